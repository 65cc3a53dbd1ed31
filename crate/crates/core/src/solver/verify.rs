//! Strong and weak residuals of candidate solutions and the boundary flux at roots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{GlobalWeakSolution, StripSolution};
use crate::error::{Error, Result};
use crate::field::FieldModel;
use crate::fit::linear_fit;
use crate::quad::gauss_legendre;
use crate::rhs::Rhs;

/// A function `u(t, x)` that can be checked against `Lu = f`.
pub trait Solution: Sync {
    fn value(&self, t: f64, x: f64) -> Result<f64>;
}

impl Solution for GlobalWeakSolution {
    fn value(&self, t: f64, x: f64) -> Result<f64> {
        self.eval(t, x)
    }
}

impl Solution for StripSolution {
    fn value(&self, t: f64, x: f64) -> Result<f64> {
        self.eval(t, x)
    }
}

/// Wraps a closed-form `u(t, x)`.
pub struct FnSolution<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> Solution for FnSolution<F> {
    fn value(&self, t: f64, x: f64) -> Result<f64> {
        Ok((self.0)(t, x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max: f64,
    pub mean: f64,
    pub worst: Option<(f64, f64)>,
    pub probes: usize,
}

fn distance_to_roots(model: &FieldModel, t: f64) -> f64 {
    model
        .roots()
        .iter()
        .map(|r| (t - r).abs())
        .fold(f64::INFINITY, f64::min)
}

fn central5(g: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok((g(-2.0 * h)? - 8.0 * g(-h)? + 8.0 * g(h)? - g(2.0 * h)?) / (12.0 * h))
}

/// `max |p u_t + q u_x - f|` over `probes`, with a five-point central difference of
/// `u(t + p s, x + q s)` in `s`. The step keeps the `t` displacement within
/// `min(d/200, 1e-3)` for root distance `d` and the `x` displacement within `1e-3`.
pub fn strong_residual(model: &FieldModel, u: &dyn Solution, f: &Rhs, probes: &[(f64, f64)]) -> Result<ResidualReport> {
    let vals: Vec<f64> = probes
        .par_iter()
        .map(|&(t, x)| {
            let d = distance_to_roots(model, t);
            if d == 0.0 {
                return Err(Error::OnCharacteristic { t });
            }
            let (p, q) = (model.field.p.eval(t), model.field.q.eval(t));
            let h = ((d / 200.0).min(1e-3) / p.abs()).min(1e-3 / q.abs());
            let lu = central5(|s| u.value(t + p * s, x + q * s), h)?;
            Ok((lu - f.eval(t, x)).abs())
        })
        .collect::<Result<_>>()?;
    let mut max = 0.0;
    let mut worst = None;
    for (v, p) in vals.iter().zip(probes) {
        if *v > max || worst.is_none() {
            max = *v;
            worst = Some(*p);
        }
    }
    let mean = if vals.is_empty() {
        0.0
    } else {
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    Ok(ResidualReport {
        max,
        mean,
        worst,
        probes: probes.len(),
    })
}

/// Uniform random probes with `t` in `t_window`, at least `margin` from every root.
pub fn random_probes(
    model: &FieldModel,
    count: usize,
    t_window: (f64, f64),
    x_range: (f64, f64),
    margin: f64,
    seed: u64,
) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let t = rng.gen_range(t_window.0..t_window.1);
        if distance_to_roots(model, t) < margin {
            continue;
        }
        out.push((t, rng.gen_range(x_range.0..x_range.1)));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpProfile {
    /// `(1 - s²)⁴`
    Polynomial,
    /// `exp(-1/(1 - s²))`
    Smooth,
}

impl BumpProfile {
    /// Gauss–Legendre panels across the support in `x` and `t`.
    fn panels(self) -> (usize, usize) {
        match self {
            BumpProfile::Polynomial => (1, 4),
            BumpProfile::Smooth => (4, 16),
        }
    }

    fn eval(self, s: f64) -> (f64, f64) {
        let w = 1.0 - s * s;
        if w <= 0.0 {
            return (0.0, 0.0);
        }
        match self {
            BumpProfile::Polynomial => (w.powi(4), -8.0 * s * w.powi(3)),
            BumpProfile::Smooth => {
                let b = (-1.0 / w).exp();
                (b, -2.0 * s / (w * w) * b)
            }
        }
    }
}

/// Tensor-product test function supported on `[t0 ± rt] × [x0 ± rx]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bump {
    pub t0: f64,
    pub x0: f64,
    pub rt: f64,
    pub rx: f64,
    pub profile: BumpProfile,
}

impl Bump {
    pub fn new(t0: f64, x0: f64, rt: f64, rx: f64, profile: BumpProfile) -> Self {
        Bump {
            t0,
            x0,
            rt,
            rx,
            profile,
        }
    }

    /// `(φ, φ_t, φ_x)`.
    pub fn eval(&self, t: f64, x: f64) -> (f64, f64, f64) {
        let (a, da) = self.profile.eval((t - self.t0) / self.rt);
        let (b, db) = self.profile.eval((x - self.x0) / self.rx);
        (a * b, da / self.rt * b, a * db / self.rx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpDefect {
    pub bump: Bump,
    /// `⟨u, L*φ⟩`
    pub pairing_u: f64,
    /// `⟨f, φ⟩`
    pub pairing_f: f64,
    pub defect: f64,
    /// Difference between the two quadrature orders.
    pub quadrature_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakReport {
    pub max_defect: f64,
    pub bumps: Vec<BumpDefect>,
}

/// Dyadic shells toward a root in the weak pairing.
const SHELLS: usize = 24;
const T_ORDERS: (usize, usize) = (8, 12);
/// Relative bound on the quadrature error of one pairing.
const WEAK_QUADRATURE_TOL: f64 = 1e-6;

/// `max_φ |⟨u, L*φ⟩ - ⟨f, φ⟩|` with `L*φ = -∂t(pφ) - ∂x(qφ)`.
///
/// The `t` integral is split at roots and refined dyadically toward them; two
/// Gauss–Legendre orders per shell give the error estimate.
pub fn weak_residual(model: &FieldModel, u: &dyn Solution, f: &Rhs, bumps: &[Bump]) -> Result<WeakReport> {
    let mut out = Vec::with_capacity(bumps.len());
    for bump in bumps {
        let (lo_u, lo_f) = pair(model, u, f, bump, T_ORDERS.0)?;
        let (hi_u, hi_f) = pair(model, u, f, bump, T_ORDERS.1)?;
        let err = (hi_u - lo_u).abs() + (hi_f - lo_f).abs();
        let scale = 1.0 + hi_u.abs() + hi_f.abs();
        if err.is_nan() || err > WEAK_QUADRATURE_TOL * scale {
            return Err(Error::ToleranceNotMet {
                achieved: err,
                target: WEAK_QUADRATURE_TOL * scale,
            });
        }
        out.push(BumpDefect {
            bump: *bump,
            pairing_u: hi_u,
            pairing_f: hi_f,
            defect: (hi_u - hi_f).abs(),
            quadrature_error: err,
        });
    }
    let max_defect = out.iter().map(|b| b.defect).fold(0.0, f64::max);
    Ok(WeakReport { max_defect, bumps: out })
}

/// One pairing `(⟨u, L*φ⟩, ⟨f, φ⟩)` with `n` nodes per `t` panel.
fn pair(model: &FieldModel, u: &dyn Solution, f: &Rhs, bump: &Bump, n: usize) -> Result<(f64, f64)> {
    let (x_panels, t_panels) = bump.profile.panels();
    let xnodes = gl_nodes(&split(bump.x0 - bump.rx, bump.x0 + bump.rx, x_panels), 32);
    let p = &model.field.p;
    let dp = p.derivative();
    let q = &model.field.q;
    let slice = |t: f64| -> Result<(f64, f64)> {
        let (pt, dpt, qt) = (p.eval(t), dp.eval(t), q.eval(t));
        let (mut su, mut sf) = (0.0, 0.0);
        for &(_, x, w) in &xnodes {
            let (phi, phi_t, phi_x) = bump.eval(t, x);
            if phi == 0.0 && phi_t == 0.0 && phi_x == 0.0 {
                continue;
            }
            let adj = -dpt * phi - pt * phi_t - qt * phi_x;
            su += w * u.value(t, x)? * adj;
            sf += w * f.eval(t, x) * phi;
        }
        Ok((su, sf))
    };

    let (a, b) = (bump.t0 - bump.rt, bump.t0 + bump.rt);
    let mut cuts = vec![(a, false)];
    cuts.extend(model.roots().iter().filter(|r| **r > a && **r < b).map(|r| (*r, true)));
    cuts.push((b, false));

    let mut total = (0.0, 0.0);
    for w in cuts.windows(2) {
        let ((l, l_root), (r, r_root)) = (w[0], w[1]);
        let pieces: Vec<(f64, f64, Option<bool>)> = match (l_root, r_root) {
            (false, false) => vec![(l, r, None)],
            (true, false) => vec![(l, r, Some(false))],
            (false, true) => vec![(l, r, Some(true))],
            (true, true) => {
                let m = 0.5 * (l + r);
                vec![(l, m, Some(false)), (m, r, Some(true))]
            }
        };
        for (l, r, toward) in pieces {
            let v = match toward {
                None => panels(&slice, l, r, t_panels, n)?,
                Some(right) => shells(&slice, l, r, right, t_panels, n)?,
            };
            total.0 += v.0;
            total.1 += v.1;
        }
    }
    Ok(total)
}

type Slice<'a> = dyn Fn(f64) -> Result<(f64, f64)> + Sync + 'a;

fn gl_nodes(intervals: &[(f64, f64)], n: usize) -> Vec<(usize, f64, f64)> {
    let (g, w) = gauss_legendre(n);
    let mut nodes = Vec::with_capacity(intervals.len() * n);
    for (k, &(a, b)) in intervals.iter().enumerate() {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (gi, wi) in g.iter().zip(&w) {
            nodes.push((k, c + h * gi, h * wi));
        }
    }
    nodes
}

fn integrate_intervals(slice: &Slice, intervals: &[(f64, f64)], n: usize) -> Result<Vec<(f64, f64)>> {
    let nodes = gl_nodes(intervals, n);
    let vals: Vec<(f64, f64)> = nodes.par_iter().map(|&(_, t, _)| slice(t)).collect::<Result<_>>()?;
    let mut sums = vec![(0.0, 0.0); intervals.len()];
    for ((k, _, w), (vu, vf)) in nodes.iter().zip(vals) {
        sums[*k].0 += w * vu;
        sums[*k].1 += w * vf;
    }
    Ok(sums)
}

fn split(a: f64, b: f64, count: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / count as f64;
    (0..count).map(|i| (a + i as f64 * h, a + (i + 1) as f64 * h)).collect()
}

fn panels(slice: &Slice, a: f64, b: f64, count: usize, n: usize) -> Result<(f64, f64)> {
    let sums = integrate_intervals(slice, &split(a, b, count), n)?;
    Ok(sums.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1)))
}

/// Integral over `[a, b]` with dyadic shells toward `b` (or `a`) and a
/// geometric estimate of the part beyond the last shell. The outer half is
/// split into `outer` panels.
fn shells(slice: &Slice, a: f64, b: f64, toward_right: bool, outer: usize, n: usize) -> Result<(f64, f64)> {
    let len = b - a;
    let at = |off: f64| if toward_right { b - off } else { a + off };
    let ordered = |o: f64, i: f64| {
        let (x0, x1) = (at(o), at(i));
        if x0 < x1 {
            (x0, x1)
        } else {
            (x1, x0)
        }
    };
    let mut intervals: Vec<(f64, f64)> = (1..=SHELLS)
        .rev()
        .map(|k| ordered(len * 0.5f64.powi(k as i32), len * 0.5f64.powi(k as i32 + 1)))
        .collect();
    let (o0, o1) = ordered(len, 0.5 * len);
    intervals.extend(split(o0, o1, outer));
    let sums = integrate_intervals(slice, &intervals, n)?;
    let tail = |s_prev: f64, s_last: f64| {
        if s_prev == 0.0 || s_last == 0.0 {
            return 0.0;
        }
        let r = s_last / s_prev;
        if r > 0.0 && r < 1.0 {
            s_last * r / (1.0 - r)
        } else {
            0.0
        }
    };
    let (pu, pf) = sums[1];
    let (lu, lf) = sums[0];
    let total = sums.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    Ok((total.0 + tail(pu, lu), total.1 + tail(pf, lf)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxStatus {
    /// Shrinking envelope ending below the contract threshold.
    Vanishing,
    /// Shrinking with a positive power-law trend, not yet below the threshold.
    Converging,
    Divergent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxReport {
    pub root: f64,
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
    pub decreasing: bool,
    pub final_abs: f64,
    /// Slope of `ln|F|` against `ln|t - t_j|`.
    pub trend: Option<f64>,
    pub status: FluxStatus,
}

impl FluxReport {
    /// Monotone decrease to below the threshold.
    pub fn meets_contract(&self) -> bool {
        self.decreasing && self.status == FluxStatus::Vanishing
    }
}

/// Threshold on the last flux value.
pub const FLUX_CONTRACT: f64 = 1e-4;

/// `F_m = ∫ p(t_m) u(t_m, x) φ(t_m, x) dx` at `t_m = t_j + offsets[m]`.
pub fn flux_check(
    model: &FieldModel,
    u: &dyn Solution,
    root: usize,
    phi: &(dyn Fn(f64, f64) -> f64 + Sync),
    x_range: (f64, f64),
    offsets: &[f64],
) -> Result<FluxReport> {
    let tj = *model
        .roots()
        .get(root)
        .ok_or_else(|| Error::InvalidInput(format!("no root with index {root}")))?;
    let (g, w) = gauss_legendre(64);
    let (c, h) = (0.5 * (x_range.0 + x_range.1), 0.5 * (x_range.1 - x_range.0));
    let values: Vec<f64> = offsets
        .par_iter()
        .map(|&off| {
            let t = tj + off;
            let pt = model.p(&model.point_near(root, off));
            let mut s = 0.0;
            for (gi, wi) in g.iter().zip(&w) {
                let x = c + h * gi;
                s += wi * u.value(t, x)? * phi(t, x);
            }
            Ok(pt * s * h)
        })
        .collect::<Result<_>>()?;
    let decreasing = values.windows(2).all(|v| v[1].abs() <= v[0].abs() * (1.0 + 1e-9));
    let final_abs = values.last().map_or(0.0, |v| v.abs());
    let trend = if values.iter().all(|v| *v != 0.0) && values.len() >= 2 {
        let lx: Vec<f64> = offsets.iter().map(|o| o.abs().ln()).collect();
        let ly: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
        linear_fit(&lx, &ly).map(|(s, _, _)| s)
    } else {
        None
    };
    let third = (values.len() / 3).max(1);
    let peak = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let shrinking = peak(&values[values.len().saturating_sub(third)..]) <= peak(&values[..third.min(values.len())]);
    let status = if shrinking && final_abs < FLUX_CONTRACT {
        FluxStatus::Vanishing
    } else if shrinking && trend.is_some_and(|s| s > 0.0) {
        FluxStatus::Converging
    } else {
        FluxStatus::Divergent
    };
    Ok(FluxReport {
        root: tj,
        offsets: offsets.to_vec(),
        values,
        decreasing,
        final_abs,
        trend,
        status,
    })
}

/// `±2^{-m}` for `m` in `range`.
pub fn dyadic_offsets(range: std::ops::RangeInclusive<i32>, side: f64) -> Vec<f64> {
    range.map(|m| side.signum() * 0.5f64.powi(m)).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::{KernelFunction, VectorField};
    use crate::solver::global_inverse;

    #[test]
    fn kernel_function_strong_residual() {
        let m = FieldModel::new(VectorField::lambda_k(1.0, 1)).unwrap();
        let k = KernelFunction::new(1.0, 1);
        let u = FnSolution(|t, x| k.eval(t, x));
        let probes = random_probes(&m, 200, (-3.0, 3.0), (-2.0, 2.0), 1e-2, 7);
        let r = strong_residual(&m, &u, &Rhs::zero(), &probes).unwrap();
        // Rounding in the difference quotient scales with |u|, which reaches e^4 · 8 here.
        let scale = probes.iter().fold(0.0f64, |a, &(t, x)| a.max(k.eval(t, x).abs()));
        assert!(r.max < 1e-11 * scale, "{} vs scale {scale}", r.max);
    }

    #[test]
    fn bump_derivatives() {
        for profile in [BumpProfile::Polynomial, BumpProfile::Smooth] {
            let b = Bump::new(0.3, -0.2, 0.5, 1.5, profile);
            let (t, x, h) = (0.41, 0.3, 1e-5);
            let (_, pt, px) = b.eval(t, x);
            let ft = (b.eval(t + h, x).0 - b.eval(t - h, x).0) / (2.0 * h);
            let fx = (b.eval(t, x + h).0 - b.eval(t, x - h).0) / (2.0 * h);
            assert!((pt - ft).abs() < 1e-8 && (px - fx).abs() < 1e-8);
        }
    }

    #[test]
    fn weak_pairing_inside_one_strip() {
        let m = Arc::new(FieldModel::new(VectorField::model()).unwrap());
        let u = global_inverse(&m, &Rhs::constant(1.0)).unwrap();
        let b = Bump::new(0.2, 0.0, 0.3, 1.0, BumpProfile::Polynomial);
        let r = weak_residual(&m, &u, &Rhs::constant(1.0), &[b]).unwrap();
        assert!(r.max_defect < 1e-8, "{}", r.max_defect);
    }

    #[test]
    fn flux_of_zero_vanishes() {
        let m = FieldModel::new(VectorField::model()).unwrap();
        let offs = dyadic_offsets(3..=20, -1.0);
        let r = flux_check(
            &m,
            &FnSolution(|_, _| 0.0),
            1,
            &|_, x| (-x * x).exp(),
            (-6.0, 6.0),
            &offs,
        )
        .unwrap();
        assert!(r.values.iter().all(|v| *v == 0.0));
        assert!(r.meets_contract());
    }
}
