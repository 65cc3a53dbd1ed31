//! Right-hand sides `f(t, x)` with growth metadata, and the weighted seminorms.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::poly::Poly;

pub type RhsFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthMode {
    /// `|f| <= C e^{ε|x|}`.
    Growth,
    /// `|f| <= C e^{-ε|x|}`.
    Decay,
}

/// Named functions of `x` alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Builtin {
    Constant {
        #[serde(default = "one")]
        c: f64,
    },
    MonomialX {
        #[serde(default = "one_u32")]
        k: u32,
    },
    ExpAx {
        a: f64,
    },
    CosX {
        #[serde(default = "one")]
        omega: f64,
    },
    GaussianX {
        #[serde(default = "one")]
        sigma: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

impl Builtin {
    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    /// `d^m/dx^m` in closed form.
    pub fn derivative(&self, m: u32, x: f64) -> f64 {
        match *self {
            Builtin::Constant { c } => {
                if m == 0 {
                    c
                } else {
                    0.0
                }
            }
            Builtin::MonomialX { k } => {
                if m > k {
                    0.0
                } else {
                    let falling: f64 = (0..m).map(|i| (k - i) as f64).product();
                    falling * x.powi((k - m) as i32)
                }
            }
            Builtin::ExpAx { a } => a.powi(m as i32) * (a * x).exp(),
            Builtin::CosX { omega } => {
                omega.powi(m as i32) * (omega * x + m as f64 * std::f64::consts::FRAC_PI_2).cos()
            }
            Builtin::GaussianX { sigma } => {
                let y = x / sigma;
                let (mut h0, mut h1) = (1.0, y);
                let he = if m == 0 {
                    1.0
                } else {
                    for n in 1..m {
                        let h2 = y * h1 - n as f64 * h0;
                        h0 = h1;
                        h1 = h2;
                    }
                    h1
                };
                (-1.0 / sigma).powi(m as i32) * he * (-0.5 * y * y).exp()
            }
        }
    }

    /// Exponential rate that bounds the builtin, `|f| <= C e^{rate |x|}`.
    pub fn natural_rate(&self) -> f64 {
        match *self {
            Builtin::ExpAx { a } => a.abs(),
            _ => 0.0,
        }
    }
}

/// Function part of an exponential-envelope right-hand side.
#[derive(Clone)]
pub enum EnvelopeFn {
    Builtin(Builtin),
    Closure(RhsFn),
}

impl fmt::Debug for EnvelopeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvelopeFn::Builtin(b) => write!(f, "{b:?}"),
            EnvelopeFn::Closure(_) => write!(f, "<closure>"),
        }
    }
}

/// Bilinear interpolant of samples on a tensor grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSampled {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    /// `values[i][k] = f(t[i], x[k])`.
    pub values: Vec<Vec<f64>>,
}

impl GridSampled {
    fn locate(grid: &[f64], v: f64) -> Option<(usize, f64)> {
        if grid.len() < 2 || v < grid[0] || v > grid[grid.len() - 1] {
            return None;
        }
        let i = grid.partition_point(|&g| g <= v).clamp(1, grid.len() - 1) - 1;
        Some((i, (v - grid[i]) / (grid[i + 1] - grid[i])))
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let (Some((i, a)), Some((k, b))) = (Self::locate(&self.t, t), Self::locate(&self.x, x)) else {
            return 0.0;
        };
        let v = &self.values;
        (1.0 - a) * ((1.0 - b) * v[i][k] + b * v[i][k + 1]) + a * ((1.0 - b) * v[i + 1][k] + b * v[i + 1][k + 1])
    }

    fn spacing(grid: &[f64]) -> f64 {
        grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// A right-hand side `f(t, x)`.
#[derive(Clone, Debug)]
pub enum Rhs {
    /// `Σ_ℓ f_ℓ(t) x^ℓ`.
    PolyInX(Vec<Poly>),
    Envelope {
        func: EnvelopeFn,
        eps: f64,
        mode: GrowthMode,
    },
    Grid(GridSampled),
}

/// Window on which declared envelopes are spot-checked.
pub const ENVELOPE_CHECK_T: f64 = 2.0;
pub const ENVELOPE_CHECK_X: f64 = 30.0;

impl Rhs {
    pub fn zero() -> Self {
        Rhs::PolyInX(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            Rhs::zero()
        } else {
            Rhs::PolyInX(vec![Poly::constant(c)])
        }
    }

    pub fn poly_in_x(coeffs: Vec<Poly>) -> Result<Self> {
        if coeffs.last().is_some_and(Poly::is_zero) {
            return Err(Error::InvalidInput(
                "leading x-coefficient of a polynomial rhs is zero".into(),
            ));
        }
        Ok(Rhs::PolyInX(coeffs))
    }

    pub fn builtin(b: Builtin, eps: f64, mode: GrowthMode) -> Result<Self> {
        Rhs::envelope(EnvelopeFn::Builtin(b), eps, mode)
    }

    pub fn from_fn(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, eps: f64, mode: GrowthMode) -> Result<Self> {
        Rhs::envelope(EnvelopeFn::Closure(Arc::new(f)), eps, mode)
    }

    /// A closure right-hand side without the envelope spot check.
    pub fn from_fn_unchecked(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, eps: f64) -> Self {
        Rhs::Envelope {
            func: EnvelopeFn::Closure(Arc::new(f)),
            eps,
            mode: GrowthMode::Growth,
        }
    }

    fn envelope(func: EnvelopeFn, eps: f64, mode: GrowthMode) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "envelope rate must be finite and nonnegative, got {eps}"
            )));
        }
        let rhs = Rhs::Envelope { func, eps, mode };
        rhs.spot_check()?;
        Ok(rhs)
    }

    fn spot_check(&self) -> Result<()> {
        let Rhs::Envelope { eps, mode, .. } = self else {
            return Ok(());
        };
        let sgn = match mode {
            GrowthMode::Growth => -1.0,
            GrowthMode::Decay => 1.0,
        };
        let (nt, nx) = (64, 256);
        let (tw, xw) = (ENVELOPE_CHECK_T, ENVELOPE_CHECK_X);
        let mut inner = 0.0f64;
        let mut edge = 0.0f64;
        for i in 0..nt {
            let t = -tw + 2.0 * tw * i as f64 / (nt - 1) as f64;
            for k in 0..nx {
                let x = -xw + 2.0 * xw * k as f64 / (nx - 1) as f64;
                let r = self.eval(t, x).abs() * (sgn * eps * x.abs()).exp();
                if !r.is_finite() {
                    return Err(Error::EnvelopeViolation(format!("non-finite value at ({t}, {x})")));
                }
                if x.abs() <= 0.5 * xw {
                    inner = inner.max(r);
                }
                if x.abs() >= 0.9 * xw {
                    edge = edge.max(r);
                }
            }
        }
        if edge > 2.0 * inner + 1e-300 {
            return Err(Error::EnvelopeViolation(format!(
                "weighted magnitude grows toward |x| = {xw}: edge {edge:e} vs interior {inner:e}"
            )));
        }
        Ok(())
    }

    /// True when `f` is known not to depend on `t`.
    pub fn is_t_independent(&self) -> bool {
        match self {
            Rhs::PolyInX(c) => c.iter().all(|p| p.degree().unwrap_or(0) == 0),
            Rhs::Envelope { func, .. } => matches!(func, EnvelopeFn::Builtin(_)),
            Rhs::Grid(_) => false,
        }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            Rhs::PolyInX(c) => c.iter().rev().fold(0.0, |acc, f| acc * x + f.eval(t)),
            Rhs::Envelope { func, .. } => match func {
                EnvelopeFn::Builtin(b) => b.eval(x),
                EnvelopeFn::Closure(f) => f(t, x),
            },
            Rhs::Grid(g) => g.eval(t, x),
        }
    }

    /// Declared exponential rate: `0` for polynomial right-hand sides.
    pub fn declared_eps(&self) -> Option<f64> {
        match self {
            Rhs::PolyInX(_) => Some(0.0),
            Rhs::Envelope { eps, mode, .. } => Some(match mode {
                GrowthMode::Growth => *eps,
                GrowthMode::Decay => 0.0,
            }),
            Rhs::Grid(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rhs::PolyInX(c) if c.is_empty())
    }

    /// `∂_x` of a polynomial right-hand side (degree drops by one).
    pub fn d_x(&self) -> Option<Rhs> {
        match self {
            Rhs::PolyInX(c) => Some(Rhs::PolyInX(
                c.iter().enumerate().skip(1).map(|(l, f)| f.scale(l as f64)).collect(),
            )),
            _ => None,
        }
    }

    /// `∂_t^j ∂_x^k f(t, x)`.
    pub fn partial(&self, j: u32, k: u32, t: f64, x: f64) -> Result<f64> {
        match self {
            Rhs::PolyInX(c) => {
                let mut acc = 0.0;
                for (l, f) in c.iter().enumerate().rev() {
                    let l = l as u32;
                    if l < k {
                        break;
                    }
                    let mut d = f.clone();
                    for _ in 0..j {
                        d = d.derivative();
                    }
                    let falling: f64 = (0..k).map(|i| (l - i) as f64).product();
                    acc += d.eval(t) * falling * x.powi((l - k) as i32);
                }
                Ok(acc)
            }
            Rhs::Envelope {
                func: EnvelopeFn::Builtin(b),
                ..
            } => Ok(if j > 0 { 0.0 } else { b.derivative(k, x) }),
            Rhs::Envelope {
                func: EnvelopeFn::Closure(f),
                ..
            } => Ok(finite_difference(&|t, x| f(t, x), j, k, t, x, step(j, t), step(k, x))),
            Rhs::Grid(g) => {
                if j + k > 2 {
                    return Err(Error::NonEvaluable(format!(
                        "grid samples support derivative orders up to 2, requested ({j}, {k})"
                    )));
                }
                let ht = GridSampled::spacing(&g.t);
                let hx = GridSampled::spacing(&g.x);
                Ok(finite_difference(&|t, x| g.eval(t, x), j, k, t, x, ht, hx))
            }
        }
    }

    /// Closure view of the right-hand side.
    pub fn as_fn(&self) -> RhsFn {
        let me = self.clone();
        Arc::new(move |t, x| me.eval(t, x))
    }

    pub fn scaled(&self, alpha: f64) -> Rhs {
        match self {
            Rhs::PolyInX(c) => Rhs::PolyInX(if alpha == 0.0 {
                Vec::new()
            } else {
                c.iter().map(|f| f.scale(alpha)).collect()
            }),
            _ => {
                let f = self.as_fn();
                self.with_closure(Arc::new(move |t, x| alpha * f(t, x)))
            }
        }
    }

    /// `f(t, x - a)`.
    pub fn shifted_x(&self, a: f64) -> Rhs {
        let f = self.as_fn();
        self.with_closure(Arc::new(move |t, x| f(t, x - a)))
    }

    /// `α f + β g`.
    pub fn combine(alpha: f64, f: &Rhs, beta: f64, g: &Rhs) -> Rhs {
        let (ff, gf) = (f.as_fn(), g.as_fn());
        let eps = f.declared_eps().unwrap_or(0.0).max(g.declared_eps().unwrap_or(0.0));
        Rhs::Envelope {
            func: EnvelopeFn::Closure(Arc::new(move |t, x| alpha * ff(t, x) + beta * gf(t, x))),
            eps,
            mode: GrowthMode::Growth,
        }
    }

    fn with_closure(&self, func: RhsFn) -> Rhs {
        let (eps, mode) = match self {
            Rhs::Envelope { eps, mode, .. } => (*eps, *mode),
            _ => (self.declared_eps().unwrap_or(0.0), GrowthMode::Growth),
        };
        Rhs::Envelope {
            func: EnvelopeFn::Closure(func),
            eps,
            mode,
        }
    }
}

fn step(order: u32, v: f64) -> f64 {
    f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) * v.abs().max(1.0)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Tensor central difference `∂_t^j ∂_x^k f`.
fn finite_difference(f: &dyn Fn(f64, f64) -> f64, j: u32, k: u32, t: f64, x: f64, ht: f64, hx: f64) -> f64 {
    let mut acc = 0.0;
    for a in 0..=j {
        let ta = t + (0.5 * j as f64 - a as f64) * ht;
        let wa = binomial(j, a) * if a % 2 == 0 { 1.0 } else { -1.0 };
        for b in 0..=k {
            let xb = x + (0.5 * k as f64 - b as f64) * hx;
            let wb = binomial(k, b) * if b % 2 == 0 { 1.0 } else { -1.0 };
            acc += wa * wb * f(ta, xb);
        }
    }
    acc / (ht.powi(j as i32) * hx.powi(k as i32))
}

/// Sample grid for seminorm suprema.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupGrid {
    pub nt: usize,
    pub nx: usize,
    pub x_half_width: f64,
}

impl Default for SupGrid {
    fn default() -> Self {
        SupGrid {
            nt: 257,
            nx: 1025,
            x_half_width: 30.0,
        }
    }
}

/// Sobolev orders `(s1, s2)` for `‖⟨x⟩^{s2} ⟨D⟩^{s1} f‖_{L²}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevParams {
    pub s1: f64,
    pub s2: f64,
}

/// `max_{α1 ≤ j, α2 ≤ k} sup_{|t| ≤ T} |e^{-ε|x|} ∂_t^{α1} ∂_x^{α2} f|` on the grid.
pub fn seminorm(f: &Rhs, eps: f64, j: u32, k: u32, t_max: f64, grid: SupGrid) -> Result<f64> {
    let ts: Vec<f64> = (0..grid.nt)
        .map(|i| t_max * (std::f64::consts::PI * i as f64 / (grid.nt.max(2) - 1) as f64).cos())
        .collect();
    let xs: Vec<f64> = (0..grid.nx)
        .map(|i| -grid.x_half_width + 2.0 * grid.x_half_width * i as f64 / (grid.nx.max(2) - 1) as f64)
        .collect();
    let rows: Result<Vec<f64>> = ts
        .par_iter()
        .map(|&t| {
            let mut m = 0.0f64;
            for a1 in 0..=j {
                for a2 in 0..=k {
                    for &x in &xs {
                        m = m.max((-eps * x.abs()).exp() * f.partial(a1, a2, t, x)?.abs());
                    }
                }
            }
            Ok(m)
        })
        .collect();
    Ok(rows?.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub eps: f64,
    /// Coefficient of `ln|x|` absorbed from polynomial growth.
    pub power: f64,
    pub r_squared: f64,
}

/// Fitted exponential rate of `sup_t |f(t, ±x)|` over `x_range`.
///
/// The model is `ln M(x) = ε x + γ ln x + c`, so polynomial growth lands in
/// `γ` rather than inflating `ε`.
pub fn fit_growth_eps(f: &Rhs, t_range: (f64, f64), x_range: (f64, f64)) -> Result<GrowthFit> {
    let (nx, nt) = (64, 33);
    let (x0, x1) = x_range;
    if !(x0 > 0.0 && x1 > x0) {
        return Err(Error::InvalidInput("x_range must satisfy 0 < x0 < x1".into()));
    }
    let xs: Vec<f64> = (0..nx).map(|i| x0 + (x1 - x0) * i as f64 / (nx - 1) as f64).collect();
    let ts: Vec<f64> = (0..nt)
        .map(|i| t_range.0 + (t_range.1 - t_range.0) * i as f64 / (nt - 1) as f64)
        .collect();
    let m: Vec<f64> = xs
        .iter()
        .map(|&x| {
            ts.iter()
                .fold(0.0f64, |acc, &t| acc.max(f.eval(t, x).abs()).max(f.eval(t, -x).abs()))
        })
        .collect();
    if m.iter().all(|&v| v == 0.0) {
        return Ok(GrowthFit {
            eps: 0.0,
            power: 0.0,
            r_squared: 1.0,
        });
    }
    if m.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::FitFailure(
            "envelope vanishes or is non-finite on the fit range".into(),
        ));
    }
    let decreases = m.windows(2).filter(|w| w[1] < w[0] * (1.0 - 1e-12)).count();
    if decreases > nx / 4 {
        return Err(Error::FitFailure(format!(
            "non-monotone tail ({decreases} decreases out of {})",
            nx - 1
        )));
    }
    let y: Vec<f64> = m.iter().map(|v| v.ln()).collect();
    let spread = y.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - y.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if spread <= 1e-12 * (1.0 + y[0].abs()) {
        return Ok(GrowthFit {
            eps: 0.0,
            power: 0.0,
            r_squared: 1.0,
        });
    }
    let design: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x.ln(), 1.0]).collect();
    let (beta, r_squared) =
        least_squares(&design, &y).ok_or_else(|| Error::FitFailure("degenerate growth design".into()))?;
    Ok(GrowthFit {
        eps: beta[0],
        power: beta[1],
        r_squared,
    })
}
