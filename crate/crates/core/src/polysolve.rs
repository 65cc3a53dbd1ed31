//! Right-hand sides polynomial in `x`: coefficient functions of the inverse
//! and fits of their logarithmic and power-law blow-up at roots.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldModel, Point};
use crate::fit::{least_squares, linear_fit};
use crate::poly::Poly;
use crate::quad::{gauss_kronrod, Tolerance};
use crate::solver::{GlobalWeakSolution, StripIntegrator, STRIP_TOLERANCE};

/// `L⁻¹ f = Σ_ℓ g_ℓ(t) x^ℓ` on a separatrix strip for `f = Σ_j f_j(t) x^j`.
#[derive(Clone, Debug)]
pub struct PolyInverse {
    model: Arc<FieldModel>,
    strip: usize,
    theta: Point,
    coeffs: Vec<Poly>,
    tol: Tolerance,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient functions `g_ℓ(t) = Σ_{j≥ℓ} C(j,ℓ) ∫_θ^t f_j(τ)(ρ(τ) - ρ(t))^{j-ℓ} / p(τ) dτ`.
pub fn poly_inverse_coeffs(model: &Arc<FieldModel>, strip: usize, f: &[Poly]) -> Result<PolyInverse> {
    let s = model.strip(strip);
    if !s.separatrix {
        return Err(Error::NotSeparatrix { strip });
    }
    let theta = model.point(s.theta)?.1;
    let mut coeffs = f.to_vec();
    while coeffs.len() > 1 && coeffs.last().is_some_and(Poly::is_zero) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        coeffs.push(Poly::zero());
    }
    Ok(PolyInverse {
        model: model.clone(),
        strip,
        theta,
        coeffs,
        tol: STRIP_TOLERANCE,
    })
}

impl PolyInverse {
    /// Number of coefficient functions, `k + 1` for `f` of degree `k` in `x`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn strip(&self) -> usize {
        self.strip
    }

    pub fn g_point(&self, l: usize, pt: &Point) -> Result<f64> {
        if l >= self.coeffs.len() {
            return Err(Error::InvalidInput(format!(
                "coefficient index {l} exceeds degree {}",
                self.coeffs.len() - 1
            )));
        }
        let m = &*self.model;
        let rho_t = m.rho(pt);
        let integ = StripIntegrator::new(m, self.strip, self.tol);
        let mut total = 0.0;
        for (j, fj) in self.coeffs.iter().enumerate().skip(l) {
            if fj.is_zero() {
                continue;
            }
            let b = binomial(j, l);
            let e = (j - l) as i32;
            let v = integ.integrate(&self.theta, pt, |tau| {
                fj.eval(tau.t) * (m.rho(tau) - rho_t).powi(e) * m.inv_p(tau)
            });
            total += b * v.value;
        }
        Ok(total)
    }

    pub fn g(&self, l: usize, t: f64) -> Result<f64> {
        let (s, pt) = self.model.point(t)?;
        if s != self.strip {
            return Err(Error::OutsideStrip { t, strip: self.strip });
        }
        self.g_point(l, &pt)
    }

    /// `g_ℓ` at offset `delta` from root `j`.
    pub fn g_near(&self, l: usize, j: usize, delta: f64) -> Result<f64> {
        self.g_point(l, &self.model.point_near(j, delta))
    }

    /// `Σ_ℓ g_ℓ(t) x^ℓ`.
    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        let mut acc = 0.0;
        for l in (0..self.len()).rev() {
            acc = acc * x + self.g(l, t)?;
        }
        Ok(acc)
    }
}

/// `∫₀ᵗ a(s) lnᵖ|(1∓s)/(1∓t)| ds/(1∓s)` for `endpoint = ±1`.
///
/// With `w = ln((1∓s)/(1∓t))` the integrand becomes `a(s(w)) wᵖ`, smooth on `[0, ln(1/(1∓t))]`.
pub fn log_moment(a: &Poly, pwr: u32, t: f64, endpoint: f64) -> Result<f64> {
    if t.abs() >= 1.0 || !t.is_finite() {
        return Err(Error::InvalidInput(format!("log moment needs |t| < 1, got {t}")));
    }
    let e = endpoint.signum();
    let gap = 1.0 - e * t;
    let top = -gap.ln();
    let est = gauss_kronrod(
        |w: f64| a.eval(e * (1.0 - gap * w.exp())) * w.powi(pwr as i32),
        0.0,
        top,
        Tolerance::new(1e-14, 1e-13),
        2000,
    );
    Ok(e * est.value)
}

/// `g ≈ coefficient · |ln|t - t_j||^power` near a root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogFit {
    pub power: f64,
    pub coefficient: f64,
    pub r_squared: f64,
}

/// Offsets of the approach sequence used by [`fit_log_exponent`].
pub const LOG_FIT_RANGE: (f64, f64) = (1e-8, 1e-2);
const LOG_FIT_SAMPLES: usize = 41;
const MIN_R_SQUARED: f64 = 0.99;

/// Geometric offsets `side · δ` with `δ` from `range.1` down to `range.0`.
pub fn approach_offsets(range: (f64, f64), samples: usize, side: f64) -> Vec<f64> {
    let (lo, hi) = (range.0.ln(), range.1.ln());
    (0..samples)
        .map(|i| side.signum() * (hi + (lo - hi) * i as f64 / (samples - 1) as f64).exp())
        .collect()
}

/// Fits the power of `|ln|t - t_j||` in `g(t_j + δ)` along `δ → 0` on `side`.
///
/// `ln|g|` is regressed on `ln L` with `1/L` and `1/L²` corrections, `L = |ln δ|`,
/// which absorbs the lower powers of `L` carried by `g`. The coefficient is the
/// leading coefficient of a polynomial fit in `L` of the rounded degree.
pub fn fit_log_exponent(g: &(dyn Fn(f64) -> Result<f64> + Sync), side: f64) -> Result<LogFit> {
    let offsets = approach_offsets(LOG_FIT_RANGE, LOG_FIT_SAMPLES, side);
    let values: Vec<f64> = offsets.par_iter().map(|&d| g(d)).collect::<Result<_>>()?;
    log_fit(&offsets, &values)
}

/// [`fit_log_exponent`] on precomputed samples.
pub fn log_fit(offsets: &[f64], values: &[f64]) -> Result<LogFit> {
    if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::FitFailure(
            "approach sequence has zero or non-finite values".into(),
        ));
    }
    let ls: Vec<f64> = offsets.iter().map(|d| d.abs().ln().abs()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let design: Vec<Vec<f64>> = ls.iter().map(|l| vec![l.ln(), 1.0, 1.0 / l, 1.0 / (l * l)]).collect();
    let (beta, r_squared) =
        least_squares(&design, &y).ok_or_else(|| Error::FitFailure("singular log-power regression".into()))?;
    if r_squared < MIN_R_SQUARED {
        return Err(Error::FitFailure(format!("log-power fit has r² = {r_squared:.4}")));
    }
    let power = beta[0];
    let degree = power.round().max(0.0) as usize;
    let design: Vec<Vec<f64>> = ls
        .iter()
        .map(|l| (0..=degree).map(|i| l.powi(i as i32)).collect())
        .collect();
    let (c, _) =
        least_squares(&design, values).ok_or_else(|| Error::FitFailure("singular coefficient regression".into()))?;
    Ok(LogFit {
        power,
        coefficient: c[degree],
        r_squared,
    })
}

/// Fitted blow-up exponent of `sup_x e^{-ε|x|} |u(t, x)|` at a root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub sigma: f64,
    /// `ε |c_j|`
    pub predicted: f64,
    pub r_squared: f64,
}

pub const POWER_FIT_RANGE: (f64, f64) = (1e-14, 1e-6);
const POWER_FIT_SAMPLES: usize = 25;
const FLAT_SLOPE: f64 = 0.05;

/// Regresses `ln sup_x e^{-ε|x|}|u(t_j + δ, x)|` on `ln(1/|δ|)` over `δ` in
/// [`POWER_FIT_RANGE`] on `side` of root `j`, with the sup over `x ∈ [-4, 4]`.
pub fn fit_power_exponent(u: &GlobalWeakSolution, j: usize, side: f64, eps: f64) -> Result<PowerFit> {
    let model = u.model();
    let c = *model
        .decomposition
        .c
        .get(j)
        .ok_or_else(|| Error::InvalidInput(format!("no root with index {j}")))?;
    let offsets = approach_offsets(POWER_FIT_RANGE, POWER_FIT_SAMPLES, side);
    let xs: Vec<f64> = (0..=16).map(|i| -4.0 + 0.5 * i as f64).collect();
    let sups: Vec<f64> = offsets
        .par_iter()
        .map(|&d| {
            xs.iter().try_fold(0.0f64, |m, &x| {
                Ok(m.max((-eps * x.abs()).exp() * u.eval_near(j, d, x)?.value.abs()))
            })
        })
        .collect::<Result<_>>()?;
    if sups.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::FitFailure("envelope vanishes or overflows".into()));
    }
    let lx: Vec<f64> = offsets.iter().map(|d| -d.abs().ln()).collect();
    let ly: Vec<f64> = sups.iter().map(|v| v.ln()).collect();
    let (sigma, _, r_squared) =
        linear_fit(&lx, &ly).ok_or_else(|| Error::FitFailure("singular power regression".into()))?;
    let spread =
        |v: &[f64]| v.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b)) - v.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    // A flat envelope (at most logarithmic growth) has no meaningful r².
    let flat = spread(&ly) <= FLAT_SLOPE * spread(&lx);
    if !flat && r_squared < MIN_R_SQUARED {
        return Err(Error::FitFailure(format!("power fit has r² = {r_squared:.4}")));
    }
    Ok(PowerFit {
        sigma,
        predicted: eps * c.abs(),
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField;

    fn model() -> Arc<FieldModel> {
        Arc::new(FieldModel::new(VectorField::model()).unwrap())
    }

    #[test]
    fn constant_rhs_gives_half_log() {
        let m = model();
        let inv = poly_inverse_coeffs(&m, 1, &[Poly::constant(3.0)]).unwrap();
        assert_eq!(inv.len(), 1);
        for t in [-0.9f64, 0.2, 0.99] {
            let exact = 1.5 * ((1.0 + t) / (1.0 - t)).ln();
            assert!((inv.g(0, t).unwrap() - exact).abs() < 1e-12);
        }
        assert!(matches!(
            poly_inverse_coeffs(&m, 0, &[Poly::constant(1.0)]),
            Err(Error::NotSeparatrix { .. })
        ));
    }

    #[test]
    fn log_moment_examples() {
        let one = Poly::constant(1.0);
        assert!((log_moment(&one, 0, 0.999, 1.0).unwrap() - 1000f64.ln()).abs() < 1e-12);
        assert_eq!(log_moment(&Poly::zero(), 2, 0.5, 1.0).unwrap(), 0.0);
        // ∫₀ᵗ ln((1-s)/(1-t)) ds/(1-s) = L²/2.
        let l = 1000f64.ln();
        assert!((log_moment(&one, 1, 0.999, 1.0).unwrap() - 0.5 * l * l).abs() < 1e-11);
        assert!((log_moment(&one, 0, -0.999, -1.0).unwrap() + l).abs() < 1e-12);
    }

    #[test]
    fn log_fit_of_exact_power() {
        let g = |d: f64| {
            let l = d.abs().ln().abs();
            Ok(0.25 * l * l - 0.7 * l + 2.0)
        };
        let fit = fit_log_exponent(&g, -1.0).unwrap();
        assert!((fit.power - 2.0).abs() < 0.05, "{fit:?}");
        assert!((fit.coefficient - 0.25).abs() < 1e-9, "{fit:?}");
    }
}
