//! The global primitive `ρ` of `q/p` and root-anchored abscissas.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::poly::{complex_roots, divide, partial_fractions, PartialFractions, Poly};
use crate::quad::{gauss_kronrod, Tolerance};

/// An abscissa, optionally tagged with its exact offset from a root of `p`.
///
/// Near a root `t_j` the rounded value `t` loses the offset `t - t_j`; the
/// anchor keeps it so that `ln|t - t_j|` and `1/p(t)` stay accurate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub t: f64,
    pub anchor: Option<(usize, f64)>,
}

impl Point {
    pub fn plain(t: f64) -> Self {
        Point { t, anchor: None }
    }

    pub fn anchored(root_index: usize, root: f64, offset: f64) -> Self {
        Point {
            t: root + offset,
            anchor: Some((root_index, offset)),
        }
    }
}

/// Contribution of complex-conjugate poles of `q/p`.
#[derive(Clone, Debug)]
enum ComplexPart {
    None,
    /// `Re Σ w_k Log(t - z_k)`; continuous on the real line since no `z_k` is real.
    Logs(Vec<(Complex64, Complex64)>),
    /// `∫_0^t num/den` by adaptive quadrature, used when complex roots repeat.
    Numeric {
        num: Poly,
        den: Poly,
    },
}

impl ComplexPart {
    fn eval(&self, t: f64) -> f64 {
        match self {
            ComplexPart::None => 0.0,
            ComplexPart::Logs(terms) => terms
                .iter()
                .map(|(z, w)| (w * (Complex64::new(t, 0.0) - z).ln()).re)
                .sum(),
            ComplexPart::Numeric { num, den } => {
                gauss_kronrod(
                    |s| num.eval(s) / den.eval(s),
                    0.0,
                    t,
                    Tolerance::new(1e-15, 1e-14),
                    2000,
                )
                .value
            }
        }
    }
}

/// `ρ(t) = Σ c_j ln|t - t_j| + smooth(t)` with `ρ' = q/p`.
#[derive(Clone, Debug)]
pub struct Primitive {
    log_terms: Vec<(f64, f64)>,
    polynomial: Poly,
    complex: ComplexPart,
    offset: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveSummary {
    pub log_terms: Vec<(f64, f64)>,
    pub polynomial_part: Poly,
    pub complex_poles: usize,
}

impl Primitive {
    /// Builds `ρ` for `q/p` given the simple real roots of `p`.
    ///
    /// The smooth part vanishes at `anchor`.
    pub fn new(q: &Poly, p: &Poly, roots: &[f64], anchor: f64) -> Result<Self> {
        let pf = partial_fractions(q, p, roots)?;
        let complex = complex_part(p, roots, &pf)?;
        let log_terms = pf.poles.iter().map(|pole| (pole.at, pole.residue)).collect();
        let mut prim = Primitive {
            log_terms,
            polynomial: pf.quotient.primitive(),
            complex,
            offset: 0.0,
        };
        prim.offset = prim.smooth(anchor);
        Ok(prim)
    }

    pub fn log_terms(&self) -> &[(f64, f64)] {
        &self.log_terms
    }

    pub fn polynomial_part(&self) -> &Poly {
        &self.polynomial
    }

    pub fn summary(&self) -> PrimitiveSummary {
        PrimitiveSummary {
            log_terms: self.log_terms.clone(),
            polynomial_part: self.polynomial.clone(),
            complex_poles: match &self.complex {
                ComplexPart::None => 0,
                ComplexPart::Logs(t) => t.len(),
                ComplexPart::Numeric { den, .. } => den.degree().unwrap_or(0),
            },
        }
    }

    /// Everything except the real logarithmic terms.
    pub fn smooth(&self, t: f64) -> f64 {
        self.polynomial.eval(t) + self.complex.eval(t) - self.offset
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_point(&Point::plain(t))
    }

    pub fn eval_point(&self, pt: &Point) -> f64 {
        let logs: f64 = self
            .log_terms
            .iter()
            .enumerate()
            .map(|(i, &(r, c))| {
                if c == 0.0 {
                    return 0.0;
                }
                match pt.anchor {
                    Some((j, delta)) if j == i => c * delta.abs().ln(),
                    _ => c * (pt.t - r).abs().ln(),
                }
            })
            .sum();
        logs + self.smooth(pt.t)
    }
}

fn complex_part(p: &Poly, roots: &[f64], pf: &PartialFractions) -> Result<ComplexPart> {
    let w = Poly::from_roots(roots);
    let (reduced, _) = divide(p, &w)?;
    if reduced.degree().unwrap_or(0) == 0 {
        return Ok(ComplexPart::None);
    }
    let mut n = pf.remainder.clone();
    for pole in &pf.poles {
        n = &n - &p.deflate(pole.at).scale(pole.residue);
    }
    let (m, _) = divide(&n, &w)?;
    if m.is_zero() {
        return Ok(ComplexPart::None);
    }
    let z = complex_roots(&reduced);
    let scale = z.iter().fold(1.0f64, |s, r| s.max(r.norm()));
    let distinct = z
        .iter()
        .enumerate()
        .all(|(i, a)| z.iter().skip(i + 1).all(|b| (a - b).norm() > 1e-6 * scale));
    if !distinct {
        return Ok(ComplexPart::Numeric { num: m, den: reduced });
    }
    let dr = reduced.derivative();
    Ok(ComplexPart::Logs(
        z.into_iter()
            .map(|zk| (zk, m.eval_complex(zk) / dr.eval_complex(zk)))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_primitive_is_log_of_one_minus_t_squared() {
        let p = Poly::new(vec![1.0, 0.0, -1.0]);
        let q = Poly::new(vec![0.0, -2.0]);
        let rho = Primitive::new(&q, &p, &[-1.0, 1.0], 0.0).unwrap();
        assert_eq!(rho.log_terms(), &[(-1.0, 1.0), (1.0, 1.0)]);
        for t in [-3.0, -0.5, 0.0, 0.9, 2.5] {
            assert!((rho.eval(t) - (1.0f64 - t * t).abs().ln()).abs() < 1e-14);
        }
        let near = Point::anchored(1, 1.0, -1e-12);
        assert!((rho.eval_point(&near) - (1e-12f64 * (2.0 - 1e-12)).ln()).abs() < 1e-12);
    }

    #[test]
    fn complex_poles_are_folded_into_smooth_part() {
        // q/p with p = (1 - t^2)(1 + t^2), q = 1 + 3t^3.
        let p = Poly::new(vec![1.0, 0.0, 0.0, 0.0, -1.0]);
        let q = Poly::new(vec![1.0, 0.0, 0.0, 3.0]);
        let rho = Primitive::new(&q, &p, &[-1.0, 1.0], 0.0).unwrap();
        assert_eq!(rho.summary().complex_poles, 2);
        assert!(rho.smooth(0.0).abs() < 1e-15);
        for t in [-2.5, -0.7, 0.1, 0.6, 3.0] {
            let h = 1e-5;
            let d = (rho.eval(t + h) - rho.eval(t - h)) / (2.0 * h);
            let exact = q.eval(t) / p.eval(t);
            assert!((d - exact).abs() < 1e-8 * (1.0 + exact.abs()), "t={t}");
        }
    }
}
