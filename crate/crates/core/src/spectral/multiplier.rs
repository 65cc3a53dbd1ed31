//! `(1 - t²)∂t - 2t∂x + b(D)` solved frequency by frequency in `σ = atanh t`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::XGrid;
use crate::error::{Error, Result};
use crate::quad::{gauss_kronrod, gauss_legendre, Estimate, Tolerance};
use crate::rhs::Rhs;

/// A real Fourier multiplier `b(ξ)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Symbol {
    Constant {
        value: f64,
    },
    /// `amplitude · cos ξ`
    Cos {
        amplitude: f64,
    },
    /// `base + amplitude · cos ξ`
    ShiftedCos {
        base: f64,
        amplitude: f64,
    },
    #[serde(skip)]
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Constant { value } => write!(f, "Constant({value})"),
            Symbol::Cos { amplitude } => write!(f, "Cos({amplitude})"),
            Symbol::ShiftedCos { base, amplitude } => write!(f, "ShiftedCos({base}, {amplitude})"),
            Symbol::Custom(_) => write!(f, "Custom(<closure>)"),
        }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Symbol::Constant { value: a }, Symbol::Constant { value: b }) => a == b,
            (Symbol::Cos { amplitude: a }, Symbol::Cos { amplitude: b }) => a == b,
            (Symbol::ShiftedCos { base: a, amplitude: c }, Symbol::ShiftedCos { base: b, amplitude: d }) => {
                a == b && c == d
            }
            (Symbol::Custom(f), Symbol::Custom(g)) => Arc::ptr_eq(f, g),
            _ => false,
        }
    }
}

impl Symbol {
    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            Symbol::Constant { value } => *value,
            Symbol::Cos { amplitude } => amplitude * xi.cos(),
            Symbol::ShiftedCos { base, amplitude } => base + amplitude * xi.cos(),
            Symbol::Custom(f) => f(xi),
        }
    }
}

/// A symbol with `δ₀ ≤ sign · b(ξ) ≤ δ₁` on the working frequencies.
#[derive(Clone, Debug)]
pub struct MultiplierSymbol {
    pub symbol: Symbol,
    pub delta0: f64,
    pub delta1: f64,
    pub sign: f64,
}

impl MultiplierSymbol {
    /// Checks the bounds on every frequency of `grid`; the sign is taken from `b(0)`.
    pub fn new(symbol: Symbol, delta0: f64, delta1: f64, grid: &XGrid) -> Result<Self> {
        if !(delta0 > 0.0 && delta1 >= delta0 && delta1.is_finite()) {
            return Err(Error::Symbol(format!(
                "need 0 < δ₀ ≤ δ₁, got δ₀ = {delta0}, δ₁ = {delta1}"
            )));
        }
        let sign = symbol.eval(0.0).signum();
        for xi in grid.xis() {
            let v = sign * symbol.eval(xi);
            if !(v >= delta0 * (1.0 - 1e-12) && v <= delta1 * (1.0 + 1e-12)) {
                return Err(Error::Symbol(format!(
                    "b({xi}) = {} leaves [{delta0}, {delta1}]",
                    sign * v
                )));
            }
        }
        Ok(MultiplierSymbol {
            symbol,
            delta0,
            delta1,
            sign,
        })
    }

    /// `δ₀ = δ₁ = |c|`.
    pub fn constant(c: f64, grid: &XGrid) -> Result<Self> {
        MultiplierSymbol::new(Symbol::Constant { value: c }, c.abs(), c.abs(), grid)
    }
}

/// Phase of the transported kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `e^{iξ(ρ(τ) - ρ(t))}`, from the equation itself.
    Transported,
    /// `e^{i ln(|1-t²|/|1-τ²|)}` without a frequency factor.
    Printed,
}

impl PhaseConvention {
    fn kappa(self, xi: f64) -> f64 {
        match self {
            PhaseConvention::Transported => xi,
            PhaseConvention::Printed => -1.0,
        }
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Decay length in `σ` after which `e^{-|b| r}` is below `e^{-36}`.
fn truncation(b: f64) -> f64 {
    36.0 / b.abs()
}

/// One Fourier mode `û(t, ξ)` of the bounded solution, started from `t = -sign(b)`:
/// `û(σ) = ∫_0^∞ f̂(tanh(σ ∓ r)) e^{-|b| r} e^{2iκ(ln cosh σ - ln cosh(σ ∓ r))} dr` (times `±1`)
/// with `κ = ξ`, or `κ = -1` for the printed phase.
pub fn mode_solve(
    b: f64,
    xi: f64,
    fhat: &(dyn Fn(f64) -> Complex64 + Sync),
    t: f64,
    phase: PhaseConvention,
) -> Result<Estimate<Complex64>> {
    if t.is_nan() || t.abs() >= 1.0 {
        return Err(Error::InvalidInput(format!("mode solve needs |t| < 1, got {t}")));
    }
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Symbol(format!(
            "multiplier value {b} is not bounded away from zero"
        )));
    }
    let sigma = t.atanh();
    let s = b.signum();
    let kappa = phase.kappa(xi);
    let lc = ln_cosh(sigma);
    let mut est = gauss_kronrod(
        |r: f64| {
            let tau_s = sigma - s * r;
            let ph = 2.0 * kappa * (lc - ln_cosh(tau_s));
            fhat(tau_s.tanh()) * Complex64::from_polar((-b.abs() * r).exp(), ph)
        },
        0.0,
        truncation(b),
        Tolerance::new(1e-15, 1e-13),
        20_000,
    );
    est.value *= s;
    Ok(est)
}

/// Samples `u(t, x_j)` of the multiplier solution at the requested `t`.
#[derive(Clone, Debug)]
pub struct MultiplierSolution {
    pub ts: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub hats: Vec<Vec<Complex64>>,
}

/// Solves `(1 - t²)u_t - 2t u_x + b(D)u = f` for `|t| < 1` on the periodic grid.
///
/// Each `t` uses one composite Gauss–Legendre rule in `r` shared by all frequencies.
pub fn multiplier_inverse(
    symbol: &MultiplierSymbol,
    f: &Rhs,
    grid: &XGrid,
    ts: &[f64],
    phase: PhaseConvention,
) -> Result<MultiplierSolution> {
    if let Some(t) = ts.iter().find(|t| t.is_nan() || t.abs() >= 1.0) {
        return Err(Error::InvalidInput(format!("multiplier solve needs |t| < 1, got {t}")));
    }
    let xis = grid.xis();
    let bs: Vec<f64> = xis.iter().map(|xi| symbol.symbol.eval(*xi)).collect();
    let xi_max = xis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let r_max = truncation(symbol.delta0);
    let width = (0.25f64).min(2.5 / xi_max.max(1.0));
    let panels = (r_max / width).ceil() as usize;
    let h = r_max / panels as f64;
    let (g, w) = gauss_legendre(16);
    let rs: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let c = (p as f64 + 0.5) * h;
            g.iter().zip(&w).map(move |(gi, wi)| (c + 0.5 * h * gi, 0.5 * h * wi))
        })
        .collect();
    let fixed_hat = f
        .is_t_independent()
        .then(|| grid.forward(&grid.sample(|x| f.eval(0.0, x))));
    let s = symbol.sign;
    let hats: Vec<Vec<Complex64>> = ts
        .par_iter()
        .map(|&t| {
            let sigma = t.atanh();
            let lc = ln_cosh(sigma);
            let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
            for &(r, wr) in &rs {
                let tau_s = sigma - s * r;
                let tau = tau_s.tanh();
                let local;
                let fh = match &fixed_hat {
                    Some(v) => v,
                    None => {
                        local = grid.forward(&grid.sample(|x| f.eval(tau, x)));
                        &local
                    }
                };
                let dl = lc - ln_cosh(tau_s);
                for k in 0..grid.len() {
                    let kappa = phase.kappa(xis[k]);
                    acc[k] += fh[k] * Complex64::from_polar(wr * (-bs[k].abs() * r).exp(), 2.0 * kappa * dl);
                }
            }
            for v in acc.iter_mut() {
                *v *= s;
            }
            acc
        })
        .collect();
    let values = hats.iter().map(|h| grid.inverse_real(h)).collect();
    Ok(MultiplierSolution {
        ts: ts.to_vec(),
        values,
        hats,
    })
}

/// `max |(1 - t²)u_t - 2t u_x + b(D)u - f|` over the grid at each `t`, with a
/// five-point difference in `t` and spectral `x` derivatives.
pub fn multiplier_residual(
    symbol: &MultiplierSymbol,
    f: &Rhs,
    grid: &XGrid,
    ts: &[f64],
    phase: PhaseConvention,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in ts {
        let h = 1e-3 * (10.0 * (1.0 - t.abs())).min(1.0);
        let stencil: Vec<f64> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|m| t + m * h).collect();
        let sol = multiplier_inverse(symbol, f, grid, &stencil, phase)?;
        let v = &sol.values;
        let ut: Vec<f64> = (0..grid.len())
            .map(|j| (v[0][j] - 8.0 * v[1][j] + 8.0 * v[3][j] - v[4][j]) / (12.0 * h))
            .collect();
        let mut lhs_hat = sol.hats[2].clone();
        for (k, c) in lhs_hat.iter_mut().enumerate() {
            let xi = grid.xi(k);
            *c *= Complex64::new(symbol.symbol.eval(xi), -2.0 * t * xi);
        }
        let rest = grid.inverse_real(&lhs_hat);
        for j in 0..grid.len() {
            let r = (1.0 - t * t) * ut[j] + rest[j] - f.eval(t, grid.x(j));
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}
