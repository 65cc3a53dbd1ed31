//! Picard iteration `u_k = L⁻¹f - L⁻¹ b u_{k-1}` on a bounded `t` window.
//!
//! Each strip piece is mapped to a variable `σ` in which `1/p` is tamed, cut
//! into Chebyshev–Lobatto panels, and `L⁻¹` is applied frequency by frequency
//! as a cumulative integral from the strip's base point.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cheb::ChebPanel;
use super::multiplier::Symbol;
use super::{edge_ratio, sobolev_norm_unchecked, XGrid};
use crate::error::{Error, Result};
use crate::field::{FieldModel, Point};
use crate::poly::Poly;
use crate::rhs::{Builtin, Rhs, SobolevParams};

type Weight<'a> = Box<dyn Fn(f64, f64) -> f64 + Sync + 'a>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardGridOptions {
    pub n_x: usize,
    pub half_width: f64,
    /// Distance from each root where the `t` grid stops.
    pub delta_min: f64,
    /// Extent of the window beyond the outer roots.
    pub pad: f64,
    pub panel_width: f64,
    pub panel_nodes: usize,
}

impl Default for PicardGridOptions {
    fn default() -> Self {
        PicardGridOptions {
            n_x: 256,
            half_width: 40.0,
            delta_min: 1e-8,
            pad: 0.5,
            panel_width: 0.5,
            panel_nodes: 17,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Map {
    /// `τ = lo + w/(1 + e^{-σ})` between roots `j` and `j + 1`.
    Bounded { j: usize, lo: f64, w: f64 },
    /// `τ = t_j - e^{-σ}`
    Left { j: usize, root: f64 },
    /// `τ = t_j + e^{-σ}`
    Right { j: usize, root: f64 },
    /// `τ = σ`
    Whole,
}

impl Map {
    /// `(point, dτ/dσ)`.
    fn at(&self, sigma: f64, zone: &dyn Fn(usize) -> f64) -> (Point, f64) {
        match *self {
            Map::Bounded { j, lo, w } => {
                let d_lo = w / (1.0 + (-sigma).exp());
                let d_hi = w / (1.0 + sigma.exp());
                let dt = d_lo * d_hi / w;
                let pt = if d_lo <= d_hi {
                    if d_lo <= zone(j) {
                        Point::anchored(j, lo, d_lo)
                    } else {
                        Point::plain(lo + d_lo)
                    }
                } else if d_hi <= zone(j + 1) {
                    Point::anchored(j + 1, lo + w, -d_hi)
                } else {
                    Point::plain(lo + w - d_hi)
                };
                (pt, dt)
            }
            Map::Left { j, root } => {
                let d = (-sigma).exp();
                let pt = if d <= zone(j) {
                    Point::anchored(j, root, -d)
                } else {
                    Point::plain(root - d)
                };
                (pt, d)
            }
            Map::Right { j, root } => {
                let d = (-sigma).exp();
                let pt = if d <= zone(j) {
                    Point::anchored(j, root, d)
                } else {
                    Point::plain(root + d)
                };
                (pt, -d)
            }
            Map::Whole => (Point::plain(sigma), 1.0),
        }
    }
}

#[derive(Clone, Debug)]
struct Panel {
    /// Half-width in `σ`.
    half: f64,
    first: usize,
    /// Panel lies at larger `σ` than the base point.
    ascending: bool,
    /// Panel adjacent on the side of the base point.
    prev: Option<usize>,
}

/// A `t` node of the grid.
#[derive(Clone, Copy, Debug)]
pub struct GridNode {
    pub strip: usize,
    pub point: Point,
    pub sigma: f64,
    dt_dsigma: f64,
    inv_p: f64,
    rho: f64,
    /// `L¹_t` quadrature weight.
    pub weight: f64,
}

impl GridNode {
    pub fn t(&self) -> f64 {
        self.point.t
    }
}

/// Tensor grid of mapped Chebyshev panels in `t` and a periodic grid in `x`.
#[derive(Clone, Debug)]
pub struct PicardGrid {
    pub options: PicardGridOptions,
    pub x: XGrid,
    cheb: ChebPanel,
    panels: Vec<Panel>,
    nodes: Vec<GridNode>,
    p: Poly,
    q: Poly,
    roots: Vec<f64>,
    window: (f64, f64),
    /// `e^{iξ_k ρ}` per node for the bins `k ≤ N/2`.
    phases: Vec<Vec<Complex64>>,
}

/// Real samples on the nodes of a [`PicardGrid`], node-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub values: Vec<Vec<f64>>,
}

impl GridField {
    pub fn zeros(grid: &PicardGrid) -> Self {
        GridField {
            values: vec![vec![0.0; grid.x.len()]; grid.nodes.len()],
        }
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        self.zip(other, |a, b| a - b)
    }

    pub fn scaled(&self, c: f64) -> GridField {
        GridField {
            values: self.values.iter().map(|r| r.iter().map(|v| c * v).collect()).collect(),
        }
    }

    fn zip(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        GridField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl PicardGrid {
    pub fn new(model: &FieldModel, options: PicardGridOptions) -> Result<Self> {
        let x = XGrid::new(options.n_x, options.half_width)?;
        let o = options;
        if !(o.delta_min > 0.0 && o.pad > o.delta_min && o.panel_width > 0.0 && o.panel_nodes >= 3) {
            return Err(Error::InvalidInput("invalid Picard grid options".into()));
        }
        let roots = model.roots().to_vec();
        let zone = |j: usize| model.zone(j);
        let cheb = ChebPanel::new(o.panel_nodes);
        let mut pieces: Vec<(usize, Map, f64, f64, f64)> = Vec::new();
        let n = roots.len();
        let lmin = (1.0 / o.delta_min).ln();
        if n == 0 {
            pieces.push((0, Map::Whole, -o.pad, o.pad, model.strip(0).theta));
        } else {
            pieces.push((0, Map::Left { j: 0, root: roots[0] }, (1.0 / o.pad).ln(), lmin, 0.0));
            for j in 0..n - 1 {
                let (lo, hi) = (roots[j], roots[j + 1]);
                let w = hi - lo;
                let edge = (w / o.delta_min - 1.0).ln();
                let theta = model.strip(j + 1).theta;
                let base = ((theta - lo) / (hi - theta)).ln();
                pieces.push((j + 1, Map::Bounded { j, lo, w }, -edge, edge, base));
            }
            pieces.push((
                n,
                Map::Right {
                    j: n - 1,
                    root: roots[n - 1],
                },
                (1.0 / o.pad).ln(),
                lmin,
                0.0,
            ));
        }

        let mut panels = Vec::new();
        let mut nodes = Vec::new();
        for (strip, map, a, b, base) in pieces {
            for ascending in [true, false] {
                let span = if ascending { b - base } else { base - a };
                if span <= 0.0 {
                    continue;
                }
                let count = (span / o.panel_width).ceil() as usize;
                let width = span / count as f64;
                let mut prev = None;
                for i in 0..count {
                    let (s0, s1) = if ascending {
                        (base + i as f64 * width, base + (i + 1) as f64 * width)
                    } else {
                        (base - (i + 1) as f64 * width, base - i as f64 * width)
                    };
                    let half = 0.5 * (s1 - s0);
                    let mid = 0.5 * (s0 + s1);
                    let first = nodes.len();
                    for (xi, wi) in cheb.nodes.iter().zip(&cheb.weights) {
                        let sigma = mid + half * xi;
                        let (point, dt) = map.at(sigma, &zone);
                        // The grid's shared panel endpoints each carry half the weight.
                        nodes.push(GridNode {
                            strip,
                            point,
                            sigma,
                            dt_dsigma: dt,
                            inv_p: model.inv_p(&point),
                            rho: model.rho(&point),
                            weight: wi * half * dt.abs(),
                        });
                    }
                    panels.push(Panel {
                        half,
                        first,
                        ascending,
                        prev,
                    });
                    prev = Some(panels.len() - 1);
                }
            }
        }
        let window = if n == 0 {
            (-o.pad, o.pad)
        } else {
            (roots[0] - o.pad, roots[n - 1] + o.pad)
        };
        let half_bins: Vec<f64> = (0..=options.n_x / 2).map(|k| x.xi(k)).collect();
        let phases = nodes
            .par_iter()
            .map(|n| {
                half_bins
                    .iter()
                    .map(|xi| Complex64::from_polar(1.0, xi * n.rho))
                    .collect()
            })
            .collect();
        Ok(PicardGrid {
            options,
            x,
            cheb,
            panels,
            nodes,
            p: model.field.p.clone(),
            q: model.field.q.clone(),
            roots,
            window,
            phases,
        })
    }

    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn sample(&self, f: &Rhs) -> GridField {
        GridField {
            values: self
                .nodes
                .par_iter()
                .map(|n| self.x.sample(|x| f.eval(n.t(), x)))
                .collect(),
        }
    }

    pub fn sample_fn(&self, f: &(dyn Fn(f64, f64) -> f64 + Sync)) -> GridField {
        GridField {
            values: self.nodes.par_iter().map(|n| self.x.sample(|x| f(n.t(), x))).collect(),
        }
    }

    /// `L¹_t(H^{s1,s2})` norm.
    pub fn norm(&self, v: &GridField, params: SobolevParams) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(&v.values)
            .map(|(n, row)| n.weight * sobolev_norm_unchecked(&self.x, row, params))
            .collect();
        terms.iter().sum()
    }

    /// Largest window-edge ratio over the nodes.
    pub fn edge_ratio(&self, v: &GridField) -> f64 {
        v.values.iter().map(|r| edge_ratio(r)).fold(0.0, f64::max)
    }

    /// `u = ∫_θ^t g(τ, x + ρ(τ) - ρ(t)) / p(τ) dτ` at every node.
    pub fn inverse(&self, g: &GridField) -> GridField {
        let nx = self.x.len();
        let half = nx / 2 + 1;
        // Real data have Hermitian spectra, so only the bins k ≤ N/2 are integrated.
        let integrand: Vec<Vec<Complex64>> = self
            .nodes
            .par_iter()
            .zip(&g.values)
            .zip(&self.phases)
            .map(|((n, row), ph)| {
                let gh = self.x.forward(row);
                let w = n.dt_dsigma * n.inv_p;
                (0..half).map(|k| gh[k] * ph[k] * w).collect()
            })
            .collect();
        let cum = self.cumulative(&integrand, half);
        let values = cum
            .par_iter()
            .zip(&self.phases)
            .map(|(c, ph)| {
                let mut full = vec![Complex64::new(0.0, 0.0); nx];
                for k in 0..half {
                    full[k] = c[k] * ph[k].conj();
                }
                for k in half..nx {
                    full[k] = full[nx - k].conj();
                }
                self.x.inverse_real(&full)
            })
            .collect();
        GridField { values }
    }

    /// `∫_{σ_base}^{σ_i} G dσ` per node, bin by bin.
    fn cumulative(&self, g: &[Vec<Complex64>], bins: usize) -> Vec<Vec<Complex64>> {
        let m = self.cheb.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![vec![zero; bins]; g.len()];
        for p in &self.panels {
            let seg = &g[p.first..p.first + m];
            let mut partial = vec![vec![zero; bins]; m];
            for (i, acc) in partial.iter_mut().enumerate() {
                for (j, row) in seg.iter().enumerate() {
                    let w = self.cheb.integ[i][j] * p.half;
                    if w != 0.0 {
                        for (a, v) in acc.iter_mut().zip(row) {
                            *a += v * w;
                        }
                    }
                }
            }
            if p.ascending {
                let start = p
                    .prev
                    .map_or(vec![zero; bins], |q| out[self.panels[q].first + m - 1].clone());
                for i in 0..m {
                    for k in 0..bins {
                        out[p.first + i][k] = start[k] + partial[i][k];
                    }
                }
            } else {
                let end = p.prev.map_or(vec![zero; bins], |q| out[self.panels[q].first].clone());
                for i in 0..m {
                    for k in 0..bins {
                        out[p.first + i][k] = end[k] - (partial[m - 1][k] - partial[i][k]);
                    }
                }
            }
        }
        out
    }

    /// `∂_t` per node by panel-wise differentiation in `σ`.
    pub fn d_t(&self, v: &GridField) -> GridField {
        let m = self.cheb.len();
        let nx = self.x.len();
        let mut out = GridField::zeros(self);
        for p in &self.panels {
            for i in 0..m {
                let node = &self.nodes[p.first + i];
                let scale = 1.0 / (p.half * node.dt_dsigma);
                let row = &mut out.values[p.first + i];
                for j in 0..m {
                    let d = self.cheb.diff[i][j] * scale;
                    let src = &v.values[p.first + j];
                    for k in 0..nx {
                        row[k] += d * src[k];
                    }
                }
            }
        }
        out
    }

    /// `∂_x` per node, spectrally.
    pub fn d_x(&self, v: &GridField) -> GridField {
        GridField {
            values: v
                .values
                .par_iter()
                .map(|r| self.x.apply_multiplier(r, |xi| Complex64::new(0.0, xi)))
                .collect(),
        }
    }

    /// `max |p u_t + q u_x + b u - f|` over nodes at least `margin` from every
    /// root and `|x| ≤ X/2`.
    pub fn residual(&self, u: &GridField, b: &Perturbation, f: &GridField, margin: f64) -> f64 {
        let ut = self.d_t(u);
        let ux = self.d_x(u);
        let bu = b.apply(self, u);
        let mut worst = 0.0f64;
        for (i, n) in self.nodes.iter().enumerate() {
            let t = n.t();
            if self.roots.iter().any(|r| (t - r).abs() < margin) {
                continue;
            }
            let (pt, qt) = (self.p.eval(t), self.q.eval(t));
            for k in 0..self.x.len() {
                if self.x.x(k).abs() > 0.5 * self.x.half_width() {
                    continue;
                }
                let r = pt * ut.values[i][k] + qt * ux.values[i][k] + bu.values[i][k] - f.values[i][k];
                worst = worst.max(r.abs());
            }
        }
        worst
    }
}

/// Zero-order perturbation `b(t, x, D)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    /// `amplitude · b(D)`
    Multiplier { symbol: Symbol, amplitude: f64 },
    /// `amplitude · β₁(t) β₂(x) β₃(D)`, with `β₃` applied first.
    Separable {
        beta_t: Poly,
        beta_x: Builtin,
        beta_xi: Symbol,
        amplitude: f64,
    },
}

impl Perturbation {
    pub fn amplitude(&self) -> f64 {
        match self {
            Perturbation::Multiplier { amplitude, .. } | Perturbation::Separable { amplitude, .. } => *amplitude,
        }
    }

    pub fn with_amplitude(&self, a: f64) -> Perturbation {
        let mut out = self.clone();
        match &mut out {
            Perturbation::Multiplier { amplitude, .. } | Perturbation::Separable { amplitude, .. } => *amplitude = a,
        }
        out
    }

    pub fn apply(&self, grid: &PicardGrid, v: &GridField) -> GridField {
        let a = self.amplitude();
        if a == 0.0 {
            return GridField::zeros(grid);
        }
        let (symbol, weight): (&Symbol, Weight) = match self {
            Perturbation::Multiplier { symbol, .. } => (symbol, Box::new(move |_, _| a)),
            Perturbation::Separable {
                beta_t,
                beta_x,
                beta_xi,
                ..
            } => (beta_xi, Box::new(move |t, x| a * beta_t.eval(t) * beta_x.eval(x))),
        };
        let table: Vec<Complex64> = grid
            .x
            .xis()
            .iter()
            .map(|xi| Complex64::new(symbol.eval(*xi), 0.0))
            .collect();
        GridField {
            values: grid
                .nodes
                .par_iter()
                .zip(&v.values)
                .map(|(n, row)| {
                    let mut out = grid.x.apply_table(row, &table);
                    for (k, o) in out.iter_mut().enumerate() {
                        *o *= weight(n.t(), grid.x.x(k));
                    }
                    out
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardConfig {
    /// Largest admissible perturbation amplitude.
    pub eps0: f64,
    pub max_iters: usize,
    /// Stop once successive iterates differ by less than this in `L¹_t(H^{s1,s2})`.
    pub contraction_tol: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            eps0: 1.0,
            max_iters: 200,
            contraction_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub u: GridField,
    pub iterations: usize,
    /// `‖u_k - u_{k-1}‖` per iteration.
    pub differences: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Largest ratio of successive differences.
    pub contraction: f64,
    pub residual: f64,
    pub edge_ratio: f64,
}

/// Ratios at or above one this many times in a row count as divergence.
const DIVERGENCE_RUN: usize = 3;
/// Residual is measured this far from the roots.
pub const RESIDUAL_MARGIN: f64 = 1e-3;

pub fn picard_solve(
    grid: &PicardGrid,
    b: &Perturbation,
    f: &Rhs,
    params: SobolevParams,
    cfg: PicardConfig,
) -> Result<PicardSolution> {
    if b.amplitude().abs() > cfg.eps0 {
        return Err(Error::InvalidInput(format!(
            "perturbation amplitude {} exceeds the budget {}",
            b.amplitude(),
            cfg.eps0
        )));
    }
    let fg = grid.sample(f);
    let v = grid.inverse(&fg);
    let mut u = v.clone();
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut iterations = 1;
    let mut run = 0;
    loop {
        if b.amplitude() == 0.0 {
            break;
        }
        if iterations >= cfg.max_iters {
            let achieved = differences.last().copied().unwrap_or(f64::INFINITY);
            return Err(Error::ToleranceNotMet {
                achieved,
                target: cfg.contraction_tol,
            });
        }
        let next = v.sub(&grid.inverse(&b.apply(grid, &u)));
        let d = grid.norm(&next.sub(&u), params);
        if let Some(prev) = differences.last().copied() {
            let r = if prev > 0.0 { d / prev } else { 0.0 };
            ratios.push(r);
            run = if r >= 1.0 { run + 1 } else { 0 };
        }
        differences.push(d);
        u = next;
        iterations += 1;
        if run >= DIVERGENCE_RUN || !d.is_finite() {
            return Err(Error::NoContraction {
                iterations,
                last_ratio: ratios.last().copied().unwrap_or(f64::NAN),
                ratios,
            });
        }
        if d < cfg.contraction_tol {
            break;
        }
    }
    let residual = grid.residual(&u, b, &fg, RESIDUAL_MARGIN);
    let edge_ratio = grid.edge_ratio(&u);
    Ok(PicardSolution {
        contraction: ratios.iter().copied().fold(0.0, f64::max),
        u,
        iterations,
        differences,
        ratios,
        residual,
        edge_ratio,
    })
}

/// A linear map of grid fields.
pub trait GridOperator: Sync {
    fn apply(&self, grid: &PicardGrid, v: &GridField) -> GridField;
}

pub struct Identity;

impl GridOperator for Identity {
    fn apply(&self, _: &PicardGrid, v: &GridField) -> GridField {
        v.clone()
    }
}

pub struct Scale(pub f64);

impl GridOperator for Scale {
    fn apply(&self, _: &PicardGrid, v: &GridField) -> GridField {
        v.scaled(self.0)
    }
}

/// `b ∘ L⁻¹`
pub struct SymbolAfterInverse(pub Perturbation);

impl GridOperator for SymbolAfterInverse {
    fn apply(&self, grid: &PicardGrid, v: &GridField) -> GridField {
        self.0.apply(grid, &grid.inverse(v))
    }
}

/// `L⁻¹ ∘ b`, the map taking one Picard difference to the next.
pub struct InverseAfterSymbol(pub Perturbation);

impl GridOperator for InverseAfterSymbol {
    fn apply(&self, grid: &PicardGrid, v: &GridField) -> GridField {
        grid.inverse(&self.0.apply(grid, v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub estimate: f64,
    /// Growth ratios per probe and power step.
    pub ratios: Vec<Vec<f64>>,
}

/// Power steps per probe.
const PROBE_STEPS: usize = 8;

/// Power-iteration estimate of the `L¹_t(H^{s1,s2})` norm of `op` from random
/// smooth starts: the largest growth ratio seen over all steps.
pub fn operator_norm_probe(
    op: &dyn GridOperator,
    grid: &PicardGrid,
    params: SobolevParams,
    n_probes: usize,
    seed: u64,
) -> ProbeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(n_probes);
    for _ in 0..n_probes {
        let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| {
                (
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(0.7..2.0),
                    rng.gen_range(-0.5..0.5),
                )
            })
            .collect();
        let mut v = grid.sample_fn(&|t, x| {
            bumps
                .iter()
                .map(|(a, c, s, beta)| a * (1.0 + beta * t) * (-(x - c) * (x - c) / (2.0 * s * s)).exp())
                .sum()
        });
        let mut norm = grid.norm(&v, params);
        let mut steps = Vec::with_capacity(PROBE_STEPS);
        for _ in 0..PROBE_STEPS {
            if norm == 0.0 {
                break;
            }
            let w = op.apply(grid, &v);
            let nw = grid.norm(&w, params);
            steps.push(nw / norm);
            if nw == 0.0 {
                break;
            }
            v = w.scaled(1.0 / nw);
            norm = 1.0;
        }
        ratios.push(steps);
    }
    let estimate = ratios.iter().flatten().copied().fold(0.0, f64::max);
    ProbeReport { estimate, ratios }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::VectorField;
    use crate::rhs::GrowthMode;
    use crate::solver::global_inverse;

    fn small_grid(model: &FieldModel) -> PicardGrid {
        let opts = PicardGridOptions {
            n_x: 128,
            half_width: 30.0,
            ..Default::default()
        };
        PicardGrid::new(model, opts).unwrap()
    }

    #[test]
    fn grid_inverse_matches_strip_solution() {
        let m = Arc::new(FieldModel::new(VectorField::model()).unwrap());
        let grid = small_grid(&m);
        let f = Rhs::builtin(Builtin::GaussianX { sigma: 1.0 }, 0.0, GrowthMode::Decay).unwrap();
        let u = grid.inverse(&grid.sample(&f));
        let exact = global_inverse(&m, &f).unwrap();
        let mut worst = 0.0f64;
        for (i, n) in grid.nodes().iter().enumerate().step_by(37) {
            for k in (0..grid.x.len()).step_by(9) {
                let x = grid.x.x(k);
                let e = exact.strips[n.strip].eval_point(&n.point, x).unwrap().value;
                worst = worst.max((u.values[i][k] - e).abs());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn probe_of_scalar_operators() {
        let m = FieldModel::new(VectorField::model()).unwrap();
        let grid = small_grid(&m);
        let p = SobolevParams::default();
        assert!((operator_norm_probe(&Identity, &grid, p, 2, 1).estimate - 1.0).abs() < 1e-6);
        assert!((operator_norm_probe(&Scale(0.5), &grid, p, 2, 1).estimate - 0.5).abs() < 1e-6);
    }
}
