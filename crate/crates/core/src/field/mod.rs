//! Vector fields `p(t)∂t + q(t)∂x`: strip decomposition, separatrix
//! classification, the primitive `ρ` and the characteristic flow.

mod curves;
mod primitive;

pub use curves::{emit_curves, CurveRow, CurveTable};
pub use primitive::{Point, Primitive, PrimitiveSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{real_roots_with_multiplicity, real_simple_roots, sign_change_roots, Poly, ROOT_GUARD};

/// `L = p(t)∂t + q(t)∂x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorField {
    pub p: Poly,
    pub q: Poly,
}

impl VectorField {
    pub fn new(p: Poly, q: Poly) -> Self {
        VectorField { p, q }
    }

    /// `(1 - t²)∂t - 2t∂x`.
    pub fn model() -> Self {
        VectorField::new(Poly::new(vec![1.0, 0.0, -1.0]), Poly::new(vec![0.0, -2.0]))
    }

    /// `(1 - t²)∂t + λ t^k ∂x`.
    pub fn lambda_k(lambda: f64, k: usize) -> Self {
        VectorField::new(Poly::new(vec![1.0, 0.0, -1.0]), Poly::monomial(k, lambda))
    }

    /// Applies the field to a function given its partial derivatives at `t`.
    pub fn apply(&self, t: f64, u_t: f64, u_x: f64) -> f64 {
        self.p.eval(t) * u_t + self.q.eval(t) * u_x
    }
}

/// Diagnostics for the three separatrix criteria of a bounded strip.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripCriteria {
    /// `c_lower * c_upper`; positive for a separatrix.
    pub residue_product: f64,
    /// Total multiplicity of the real zeros of `q` inside the strip.
    pub q_zero_multiplicity: usize,
    /// Zeros of `q` inside the strip at which `q` changes sign.
    pub sign_change_zeros: Vec<f64>,
}

impl StripCriteria {
    pub fn by_residues(&self) -> bool {
        self.residue_product > 0.0
    }

    pub fn by_parity(&self) -> bool {
        self.q_zero_multiplicity % 2 == 1
    }

    /// `q` changes sign across the strip: an odd number of sign-change zeros.
    pub fn by_sign_change(&self) -> bool {
        self.sign_change_zeros.len() % 2 == 1
    }

    pub fn agree(&self) -> bool {
        let r = self.by_residues();
        r == self.by_parity() && r == self.by_sign_change()
    }
}

/// One connected component of `{p ≠ 0}`.
///
/// Unbounded sides have `lower = -∞` or `upper = +∞` (serialised as `null`)
/// and the corresponding residue is zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Strip {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub separatrix: bool,
    /// Base point: the sign-change zero of `q` for a separatrix, otherwise an interior anchor.
    pub theta: f64,
    /// Transversal slope, for non-separatrix strips.
    pub nu: Option<f64>,
    pub criteria: Option<StripCriteria>,
}

impl Strip {
    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    /// Open-interval membership.
    pub fn contains(&self, t: f64) -> bool {
        t > self.lower && t < self.upper
    }

    /// Indices of the roots bounding this strip, `(lower, upper)`.
    pub fn root_indices(&self) -> (Option<usize>, Option<usize>) {
        let lo = self.lower.is_finite().then(|| self.index - 1);
        let hi = self.upper.is_finite().then_some(self.index);
        (lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripDecomposition {
    pub roots: Vec<f64>,
    pub kappas: Vec<f64>,
    pub c: Vec<f64>,
    pub strips: Vec<Strip>,
    /// Roots adjacent to a separatrix strip.
    pub boundary_roots: Vec<f64>,
    pub warnings: Vec<String>,
}

impl StripDecomposition {
    pub fn num_bounded_strips(&self) -> usize {
        self.roots.len().saturating_sub(1)
    }

    pub fn separatrix_strips(&self) -> impl Iterator<Item = &Strip> {
        self.strips.iter().filter(|s| s.separatrix)
    }

    /// Index of the strip containing `t`.
    pub fn strip_of(&self, t: f64) -> Result<usize> {
        if self.roots.contains(&t) {
            return Err(Error::OnCharacteristic { t });
        }
        Ok(self.roots.partition_point(|&r| r < t))
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Splits the line at the roots of `p` and classifies each strip.
pub fn decompose(field: &VectorField) -> Result<StripDecomposition> {
    let VectorField { p, q } = field;
    if p.is_zero() {
        return Err(Error::Hypothesis("p vanishes identically".into()));
    }
    let roots = real_simple_roots(p, ROOT_GUARD).map_err(|e| match e {
        Error::MultipleRoot { root, derivative } => {
            Error::Hypothesis(format!("p has a multiple root near {root} (p' = {derivative:e})"))
        }
        other => other,
    })?;
    let dp = p.derivative();
    let q_scale = q.max_abs_coeff().max(f64::MIN_POSITIVE);
    let mut kappas = Vec::with_capacity(roots.len());
    let mut c = Vec::with_capacity(roots.len());
    for &r in &roots {
        let qv = q.eval(r);
        if qv.abs() <= 1e-10 * q_scale * (1.0 + r.abs()).powi(q.degree().unwrap_or(0) as i32) {
            return Err(Error::Hypothesis(format!("p and q share the zero t = {r}")));
        }
        let kappa = 1.0 / dp.eval(r);
        kappas.push(kappa);
        c.push(kappa * qv);
    }

    let q_roots = real_roots_with_multiplicity(q);
    let q_sign_changes = sign_change_roots(q);
    let n = roots.len();
    let mut warnings = Vec::new();
    let mut strips = Vec::with_capacity(n + 1);

    if n == 0 {
        let theta = 0.0;
        strips.push(Strip {
            index: 0,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            c_lower: 0.0,
            c_upper: 0.0,
            separatrix: false,
            theta,
            nu: Some(transversal_sign(p, q, theta, 1.0)),
            criteria: None,
        });
    } else {
        let theta0 = roots[0] - 1.0;
        strips.push(Strip {
            index: 0,
            lower: f64::NEG_INFINITY,
            upper: roots[0],
            c_lower: 0.0,
            c_upper: c[0],
            separatrix: false,
            theta: theta0,
            nu: Some(-sign(c[0])),
            criteria: None,
        });
        for j in 1..n {
            let (lo, hi) = (roots[j - 1], roots[j]);
            let inside = |t: f64| t > lo && t < hi;
            let criteria = StripCriteria {
                residue_product: c[j - 1] * c[j],
                q_zero_multiplicity: q_roots.iter().filter(|r| inside(r.0)).map(|r| r.1).sum(),
                sign_change_zeros: q_sign_changes.iter().copied().filter(|&r| inside(r)).collect(),
            };
            let separatrix = criteria.by_residues();
            if !criteria.agree() {
                warnings.push(format!(
                    "strip {j}: separatrix criteria disagree (residues {}, parity {}, sign change {})",
                    criteria.by_residues(),
                    criteria.by_parity(),
                    criteria.by_sign_change()
                ));
            }
            let distinct_zeros = q_roots.iter().filter(|r| inside(r.0)).count();
            if distinct_zeros > 1 {
                warnings.push(format!(
                    "strip {j}: q has {distinct_zeros} distinct zeros inside ]{lo}, {hi}["
                ));
            }
            let mid = 0.5 * (lo + hi);
            let (theta, nu) = if separatrix {
                let theta = criteria
                    .sign_change_zeros
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - mid).abs().total_cmp(&(b - mid).abs()));
                if theta.is_none() {
                    warnings.push(format!(
                        "strip {j}: no sign-change zero of q located; using the midpoint"
                    ));
                }
                (theta.unwrap_or(mid), None)
            } else {
                (mid, Some(bounded_transversal(p, q, lo, hi, sign(c[j - 1]))))
            };
            strips.push(Strip {
                index: j,
                lower: lo,
                upper: hi,
                c_lower: c[j - 1],
                c_upper: c[j],
                separatrix,
                theta,
                nu,
                criteria: Some(criteria),
            });
        }
        strips.push(Strip {
            index: n,
            lower: roots[n - 1],
            upper: f64::INFINITY,
            c_lower: c[n - 1],
            c_upper: 0.0,
            separatrix: false,
            theta: roots[n - 1] + 1.0,
            nu: Some(sign(c[n - 1])),
            criteria: None,
        });
    }

    let mut boundary_roots = Vec::new();
    for s in strips.iter().filter(|s| s.separatrix) {
        for r in [s.lower, s.upper] {
            if !boundary_roots.contains(&r) {
                boundary_roots.push(r);
            }
        }
    }
    boundary_roots.sort_by(f64::total_cmp);

    Ok(StripDecomposition {
        roots,
        kappas,
        c,
        strips,
        boundary_roots,
        warnings,
    })
}

fn transversal_sign(p: &Poly, q: &Poly, t: f64, fallback: f64) -> f64 {
    let s = sign(p.eval(t) * q.eval(t));
    if s == 0.0 {
        fallback
    } else {
        s
    }
}

/// Slope `ν` for which `q/p + ν` keeps one sign on `]lo, hi[`.
///
/// This is `±1` when `q/p` has one sign on the strip. If `q` changes sign an
/// even number of times inside, `|ν|` is raised above the largest opposing
/// value of `q/p` so that the crossing equation stays monotone.
fn bounded_transversal(p: &Poly, q: &Poly, lo: f64, hi: f64, s: f64) -> f64 {
    let samples = 2048;
    let worst = (1..samples)
        .map(|i| lo + (hi - lo) * i as f64 / samples as f64)
        .map(|t| q.eval(t) / p.eval(t))
        .filter(|v| v * s < 0.0)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if worst == 0.0 {
        s
    } else {
        s * (1.0 + 1.5 * worst)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurjectivityReport {
    pub surjective: bool,
    pub separatrix_strips: Vec<usize>,
    /// `(strip, ν)` for the piecewise transversal when surjective.
    pub transversal_slopes: Vec<(usize, f64)>,
}

pub fn is_surjective(decomposition: &StripDecomposition) -> SurjectivityReport {
    let separatrix_strips: Vec<usize> = decomposition.separatrix_strips().map(|s| s.index).collect();
    let surjective = separatrix_strips.is_empty();
    let transversal_slopes = if surjective {
        decomposition
            .strips
            .iter()
            .filter_map(|s| s.nu.map(|nu| (s.index, nu)))
            .collect()
    } else {
        Vec::new()
    };
    SurjectivityReport {
        surjective,
        separatrix_strips,
        transversal_slopes,
    }
}

/// A vector field together with its decomposition, primitive and the
/// deflated polynomials `p/(t - t_j)` used for accurate `1/p` near roots.
#[derive(Clone, Debug)]
pub struct FieldModel {
    pub field: VectorField,
    pub decomposition: StripDecomposition,
    pub primitive: Primitive,
    deflated: Vec<Poly>,
    zones: Vec<f64>,
}

impl FieldModel {
    pub fn new(field: VectorField) -> Result<Self> {
        let decomposition = decompose(&field)?;
        let roots = &decomposition.roots;
        let anchor = match decomposition.strip_of(0.0) {
            Ok(_) => 0.0,
            Err(_) => decomposition.strips[roots.partition_point(|&r| r <= 0.0)].theta,
        };
        let primitive = Primitive::new(&field.q, &field.p, roots, anchor)?;
        let deflated = roots.iter().map(|&r| field.p.deflate(r)).collect();
        let zones = (0..roots.len())
            .map(|j| {
                let mut gap = f64::INFINITY;
                if j > 0 {
                    gap = gap.min(roots[j] - roots[j - 1]);
                }
                if j + 1 < roots.len() {
                    gap = gap.min(roots[j + 1] - roots[j]);
                }
                (0.25 * gap).min(0.1)
            })
            .collect();
        Ok(FieldModel {
            field,
            decomposition,
            primitive,
            deflated,
            zones,
        })
    }

    pub fn roots(&self) -> &[f64] {
        &self.decomposition.roots
    }

    pub fn strips(&self) -> &[Strip] {
        &self.decomposition.strips
    }

    pub fn strip(&self, index: usize) -> &Strip {
        &self.decomposition.strips[index]
    }

    /// Half-width of the neighbourhood of root `j` where anchored points are used.
    pub fn zone(&self, j: usize) -> f64 {
        self.zones[j]
    }

    /// The point at `t`, anchored to the nearest root when inside its zone.
    pub fn point(&self, t: f64) -> Result<(usize, Point)> {
        let strip = self.decomposition.strip_of(t)?;
        let roots = self.roots();
        let nearest = [strip.checked_sub(1), (strip < roots.len()).then_some(strip)]
            .into_iter()
            .flatten()
            .min_by(|&a, &b| (t - roots[a]).abs().total_cmp(&(t - roots[b]).abs()));
        let pt = match nearest {
            Some(j) if (t - roots[j]).abs() <= self.zones[j] => Point::anchored(j, roots[j], t - roots[j]),
            _ => Point::plain(t),
        };
        Ok((strip, pt))
    }

    /// The point at offset `delta` from root `j`.
    pub fn point_near(&self, j: usize, delta: f64) -> Point {
        Point::anchored(j, self.roots()[j], delta)
    }

    pub fn rho(&self, pt: &Point) -> f64 {
        self.primitive.eval_point(pt)
    }

    pub fn p(&self, pt: &Point) -> f64 {
        match pt.anchor {
            Some((j, delta)) => delta * self.deflated[j].eval(pt.t),
            None => self.field.p.eval(pt.t),
        }
    }

    pub fn inv_p(&self, pt: &Point) -> f64 {
        1.0 / self.p(pt)
    }

    pub fn q(&self, t: f64) -> f64 {
        self.field.q.eval(t)
    }

    /// `x = y + ρ(t) - ρ(τ)`: the characteristic through `(τ, y)` evaluated at `t`.
    pub fn flow(&self, t: f64, tau: f64, y: f64) -> Result<f64> {
        let (st, pt) = self.point(t)?;
        let (sr, ptau) = self.point(tau)?;
        if st != sr {
            return Err(Error::CrossesCharacteristic { t, tau });
        }
        if t == tau {
            return Ok(y);
        }
        Ok(y + self.rho(&pt) - self.rho(&ptau))
    }
}

/// Elements of the kernel of `L_{λ,k} = (1 - t²)∂t + λ t^k ∂x`.
///
/// For odd `k` this is `(1 - t²) exp(2(x/λ + Σ t^i/i))` over even `2 ≤ i < k`;
/// for even `k` it is `atan((1 - t)/(1 + t) exp(2(x/λ + Σ t^i/i)))` over odd `i < k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelFunction {
    pub lambda: f64,
    pub k: usize,
}

impl KernelFunction {
    pub fn new(lambda: f64, k: usize) -> Self {
        KernelFunction { lambda, k }
    }

    fn exponent(&self, t: f64, x: f64) -> f64 {
        let start = if self.k % 2 == 1 { 2 } else { 1 };
        let sum: f64 = (start..self.k).step_by(2).map(|i| t.powi(i as i32) / i as f64).sum();
        2.0 * (x / self.lambda + sum)
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let e = self.exponent(t, x).exp();
        if self.k % 2 == 1 {
            (1.0 - t * t) * e
        } else {
            ((1.0 - t) / (1.0 + t) * e).atan()
        }
    }
}
