//! Strip-wise right inverses of `L` and their gluing into a global weak solution.

mod integrate;
mod verify;

pub use integrate::{StripIntegrator, STRIP_TOLERANCE};
pub use verify::{
    dyadic_offsets, flux_check, random_probes, strong_residual, weak_residual, Bump, BumpDefect, BumpProfile,
    FluxReport, FluxStatus, FnSolution, ResidualReport, Solution, WeakReport, FLUX_CONTRACT,
};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldModel, Point};
use crate::quad::{Estimate, Tolerance};
use crate::rhs::Rhs;

/// How a strip's solution is anchored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StripKind {
    /// Integration from the sign-change zero `θ` of `q`.
    Separatrix { theta: f64 },
    /// Zero data on the transversal `x + ν t = 0`.
    Transversal { nu: f64 },
    /// Zero data on the vertical line `t = base`.
    Cauchy { base: f64 },
}

/// Predicted behaviour of the solution at one end of its strip.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndpointPrediction {
    pub root: f64,
    pub c: f64,
    /// `ε |c_j|` for the declared growth rate `ε`.
    pub power: Option<f64>,
    /// Top power of `ln|t - t_j|` for polynomial right-hand sides.
    pub log_power: Option<usize>,
}

/// Solution of `Lu = f` on one strip.
#[derive(Clone, Debug)]
pub struct StripSolution {
    model: Arc<FieldModel>,
    f: Rhs,
    strip: usize,
    kind: StripKind,
    tol: Tolerance,
    pub endpoints: Vec<EndpointPrediction>,
    pub warnings: Vec<String>,
}

/// Bisection bracket on the logistic parameter of a bounded strip.
const CROSSING_BRACKET: f64 = 700.0;

impl StripSolution {
    fn new(model: &Arc<FieldModel>, strip: usize, f: &Rhs, kind: StripKind) -> Self {
        let s = model.strip(strip);
        let eps = f.declared_eps();
        let mut warnings = Vec::new();
        let mut endpoints = Vec::new();
        let singular = !matches!(kind, StripKind::Transversal { .. });
        for (root, c) in [(s.lower, s.c_lower), (s.upper, s.c_upper)] {
            if !root.is_finite() {
                continue;
            }
            let log_power = match f {
                Rhs::PolyInX(coeffs) if singular && !coeffs.is_empty() => Some(coeffs.len()),
                _ => None,
            };
            let power = eps.filter(|_| singular).map(|e| e * c.abs());
            if let Some(pw) = power {
                if pw >= 1.0 && matches!(kind, StripKind::Separatrix { .. }) {
                    warnings.push(format!(
                        "strip {strip}: growth rate {} is not below 1/|c| = {} at t = {root}",
                        eps.unwrap_or(0.0),
                        1.0 / c.abs()
                    ));
                }
            }
            endpoints.push(EndpointPrediction {
                root,
                c,
                power,
                log_power,
            });
        }
        StripSolution {
            model: model.clone(),
            f: f.clone(),
            strip,
            kind,
            tol: STRIP_TOLERANCE,
            endpoints,
            warnings,
        }
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn strip(&self) -> usize {
        self.strip
    }

    pub fn kind(&self) -> StripKind {
        self.kind
    }

    pub fn model(&self) -> &FieldModel {
        &self.model
    }

    fn check_point(&self, t: f64) -> Result<Point> {
        let (s, pt) = self.model.point(t)?;
        if s != self.strip {
            return Err(Error::OutsideStrip { t, strip: self.strip });
        }
        Ok(pt)
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.eval_estimate(t, x)?.value)
    }

    pub fn eval_estimate(&self, t: f64, x: f64) -> Result<Estimate<f64>> {
        let pt = self.check_point(t)?;
        self.eval_point(&pt, x)
    }

    /// Value at an anchored point of this strip.
    pub fn eval_point(&self, pt: &Point, x: f64) -> Result<Estimate<f64>> {
        let m = &*self.model;
        let rho_t = m.rho(pt);
        let start = match self.kind {
            StripKind::Separatrix { theta } | StripKind::Cauchy { base: theta } => m.point(theta)?.1,
            StripKind::Transversal { nu } => self.crossing(pt, x, rho_t, nu)?,
        };
        let integrator = StripIntegrator::new(m, self.strip, self.tol);
        let f = &self.f;
        Ok(integrator.integrate(&start, pt, |tau| f.eval(tau.t, x + m.rho(tau) - rho_t) * m.inv_p(tau)))
    }

    /// The abscissa where the characteristic through `(t, x)` meets `x + ν t = 0`.
    pub fn crossing(&self, pt: &Point, x: f64, rho_t: f64, nu: f64) -> Result<Point> {
        let m = &*self.model;
        let s = m.strip(self.strip);
        let (Some(jl), Some(ju)) = s.root_indices() else {
            return Err(Error::InvalidInput("transversal data requires a bounded strip".into()));
        };
        let (lo, hi) = (s.lower, s.upper);
        let w = hi - lo;
        let (zl, zu) = (m.zone(jl), m.zone(ju));
        let at = |z: f64| -> Point {
            if z <= 0.0 {
                let d = w / (1.0 + z.exp().recip());
                if d <= zl {
                    Point::anchored(jl, lo, d)
                } else {
                    Point::plain(lo + d)
                }
            } else {
                let d = w / (1.0 + z.exp());
                if d <= zu {
                    Point::anchored(ju, hi, -d)
                } else {
                    Point::plain(hi - d)
                }
            }
        };
        let g = |z: f64| {
            let p = at(z);
            x + m.rho(&p) - rho_t + nu * p.t
        };
        let (mut a, mut b) = (-CROSSING_BRACKET, CROSSING_BRACKET);
        let (ga, gb) = (g(a), g(b));
        if !(ga.is_finite() && gb.is_finite()) || ga * gb > 0.0 {
            return Err(Error::CrossingNotFound { t: pt.t, x });
        }
        if ga == 0.0 {
            return Ok(at(a));
        }
        let increasing = gb > ga;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let gm = g(mid);
            if gm == 0.0 {
                return Ok(at(mid));
            }
            if (gm > 0.0) == increasing {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
                break;
            }
        }
        Ok(at(0.5 * (a + b)))
    }
}

/// Per-strip solutions covering the whole line.
#[derive(Clone, Debug)]
pub struct GlobalWeakSolution {
    model: Arc<FieldModel>,
    pub strips: Vec<StripSolution>,
}

impl GlobalWeakSolution {
    pub fn model(&self) -> &FieldModel {
        &self.model
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.eval_estimate(t, x)?.value)
    }

    pub fn eval_estimate(&self, t: f64, x: f64) -> Result<Estimate<f64>> {
        let (s, pt) = self.model.point(t)?;
        self.strips[s].eval_point(&pt, x)
    }

    /// Value at offset `delta` from root `j`.
    pub fn eval_near(&self, j: usize, delta: f64, x: f64) -> Result<Estimate<f64>> {
        let strip = if delta > 0.0 { j + 1 } else { j };
        self.strips[strip].eval_point(&self.model.point_near(j, delta), x)
    }

    pub fn warnings(&self) -> Vec<String> {
        self.strips.iter().flat_map(|s| s.warnings.iter().cloned()).collect()
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.strips = self.strips.into_iter().map(|s| s.with_tolerance(tol)).collect();
        self
    }
}

/// `∫_θ^t f(τ, x + ρ(τ) - ρ(t)) / p(τ) dτ` on a separatrix strip.
pub fn separatrix_inverse(model: &Arc<FieldModel>, strip: usize, f: &Rhs) -> Result<StripSolution> {
    let s = model.strip(strip);
    if !s.separatrix {
        return Err(Error::NotSeparatrix { strip });
    }
    Ok(StripSolution::new(
        model,
        strip,
        f,
        StripKind::Separatrix { theta: s.theta },
    ))
}

/// Cauchy solution with zero data on the transversal `x + ν t = 0` (bounded
/// strips) or on the vertical line `t = θ` (unbounded strips).
pub fn green_inverse(model: &Arc<FieldModel>, strip: usize, f: &Rhs, nu: Option<f64>) -> Result<StripSolution> {
    let s = model.strip(strip);
    if s.separatrix {
        return Err(Error::InvalidInput(format!("strip {strip} is a separatrix")));
    }
    let kind = if s.is_bounded() {
        let nu = nu
            .or(s.nu)
            .ok_or_else(|| Error::InvalidInput("no transversal slope".into()))?;
        StripKind::Transversal { nu }
    } else {
        StripKind::Cauchy { base: s.theta }
    };
    Ok(StripSolution::new(model, strip, f, kind))
}

/// Glues strip solutions into a right inverse of `L` on the whole line.
pub fn global_inverse(model: &Arc<FieldModel>, f: &Rhs) -> Result<GlobalWeakSolution> {
    let strips = model
        .strips()
        .iter()
        .map(|s| {
            if s.separatrix {
                separatrix_inverse(model, s.index, f)
            } else {
                green_inverse(model, s.index, f, None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GlobalWeakSolution {
        model: model.clone(),
        strips,
    })
}
