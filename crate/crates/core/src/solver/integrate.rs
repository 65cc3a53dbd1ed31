//! Integration along a strip with logarithmic substitution near its roots.

use crate::field::{FieldModel, Point};
use crate::quad::{gauss_kronrod, tanh_sinh, Estimate, Tolerance};

/// Default accuracy of strip integrals; finite-difference residual checks rely on it.
pub const STRIP_TOLERANCE: Tolerance = Tolerance::new(1e-14, 1e-13);

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
enum Pos {
    /// Offset above the lower root.
    Lower(f64),
    Mid(f64),
    /// Offset below the upper root, stored negated so that ordering follows `t`.
    Upper(f64),
}

/// Integrates point functions over subintervals of one strip.
pub struct StripIntegrator {
    lower: Option<(usize, f64, f64)>,
    upper: Option<(usize, f64, f64)>,
    tol: Tolerance,
}

impl StripIntegrator {
    pub fn new(model: &FieldModel, strip: usize, tol: Tolerance) -> Self {
        let s = model.strip(strip);
        let (lo, hi) = s.root_indices();
        StripIntegrator {
            lower: lo.map(|j| (j, model.roots()[j], model.zone(j))),
            upper: hi.map(|j| (j, model.roots()[j], model.zone(j))),
            tol,
        }
    }

    fn position(&self, pt: &Point) -> Pos {
        if let Some((j, r, z)) = self.lower {
            let d = match pt.anchor {
                Some((i, d)) if i == j => d,
                _ => pt.t - r,
            };
            if d <= z {
                return Pos::Lower(d);
            }
        }
        if let Some((j, r, z)) = self.upper {
            let d = match pt.anchor {
                Some((i, d)) if i == j => -d,
                _ => r - pt.t,
            };
            if d <= z {
                return Pos::Upper(-d);
            }
        }
        Pos::Mid(pt.t)
    }

    /// `∫_a^b g(τ) dτ` for `a`, `b` in the strip.
    pub fn integrate(&self, a: &Point, b: &Point, g: impl Fn(&Point) -> f64 + Sync) -> Estimate<f64> {
        let (pa, pb) = (self.position(a), self.position(b));
        if pa == pb {
            return Estimate {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
            };
        }
        let (lo, hi, sign) = if pa < pb { (pa, pb, 1.0) } else { (pb, pa, -1.0) };
        let tol = Tolerance::new(self.tol.abs / 3.0, self.tol.rel);
        let mut total = Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        };
        let mut add = |e: Estimate<f64>| {
            total.value += e.value;
            total.error += e.error;
            total.evaluations += e.evaluations;
        };

        if let (Pos::Lower(d0), Some((j, r, z))) = (lo, self.lower) {
            let d1 = match hi {
                Pos::Lower(d) => d,
                _ => z,
            };
            add(tanh_sinh(
                |s: f64| {
                    let d = s.exp();
                    g(&Point::anchored(j, r, d)) * d
                },
                d0.ln(),
                d1.ln(),
                tol,
            ));
        }
        let mid_start = match lo {
            Pos::Lower(_) => match hi {
                Pos::Lower(_) => None,
                _ => self.lower.map(|(_, r, z)| r + z),
            },
            Pos::Mid(t) => Some(t),
            Pos::Upper(_) => None,
        };
        let mid_end = match hi {
            Pos::Upper(_) => match lo {
                Pos::Upper(_) => None,
                _ => self.upper.map(|(_, r, z)| r - z),
            },
            Pos::Mid(t) => Some(t),
            Pos::Lower(_) => None,
        };
        if let (Some(t0), Some(t1)) = (mid_start, mid_end) {
            if t1 > t0 {
                add(gauss_kronrod(|t| g(&Point::plain(t)), t0, t1, tol, 4000));
            }
        }
        if let (Pos::Upper(neg_d1), Some((j, r, z))) = (hi, self.upper) {
            let d0 = match lo {
                Pos::Upper(neg) => -neg,
                _ => z,
            };
            add(tanh_sinh(
                |s: f64| {
                    let d = s.exp();
                    -g(&Point::anchored(j, r, -d)) * d
                },
                d0.ln(),
                (-neg_d1).ln(),
                tol,
            ));
        }
        total.value *= sign;
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField;

    #[test]
    fn integrates_one_over_p_across_zones() {
        let m = FieldModel::new(VectorField::model()).unwrap();
        let integ = StripIntegrator::new(&m, 1, STRIP_TOLERANCE);
        let exact = |t: f64| 0.5 * ((1.0 + t) / (1.0 - t)).ln();
        for t in [-0.999_999, -0.95, -0.3, 0.0, 0.5, 0.93, 0.999_999_9] {
            let (_, pt) = m.point(t).unwrap();
            let e = integ.integrate(&Point::plain(0.0), &pt, |p| m.inv_p(p));
            assert!(
                (e.value - exact(t)).abs() < 1e-12 * (1.0 + exact(t).abs()),
                "t={t}: {} vs {}",
                e.value,
                exact(t)
            );
        }
        let a = m.point_near(1, -1e-30);
        let b = m.point_near(1, -1e-20);
        let e = integ.integrate(&a, &b, |p| m.inv_p(p));
        assert!((e.value - 0.5 * (1e-30f64 / 1e-20).ln()).abs() < 1e-10);
    }

    #[test]
    fn unbounded_strip_integration() {
        let m = FieldModel::new(VectorField::model()).unwrap();
        let integ = StripIntegrator::new(&m, 2, STRIP_TOLERANCE);
        let anti = |t: f64| 0.5 * ((1.0 + t) / (t - 1.0)).abs().ln();
        for t in [1.000_001, 1.05, 2.5, 40.0] {
            let (_, pt) = m.point(t).unwrap();
            let e = integ.integrate(&Point::plain(2.0), &pt, |p| m.inv_p(p));
            let exact = anti(t) - anti(2.0);
            assert!((e.value - exact).abs() < 1e-12 * (1.0 + exact.abs()), "t={t}");
        }
    }
}
