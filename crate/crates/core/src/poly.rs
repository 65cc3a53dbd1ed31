//! Real univariate polynomials, root isolation and partial fractions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative guard on `|p'(t_j)|` below which a root counts as multiple.
pub const ROOT_GUARD: f64 = 1e-8;

/// Threshold (relative to the dividend scale) at which a floating remainder is treated as zero.
const REMAINDER_ZERO: f64 = 1e-10;

/// Polynomial in one real variable, coefficients in ascending degree.
///
/// The zero polynomial is the empty coefficient list; otherwise the leading
/// coefficient is nonzero.
#[derive(Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl From<Vec<f64>> for Poly {
    fn from(coeffs: Vec<f64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<f64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Poly::constant(1.0), |acc, &r| &acc * &Poly::new(vec![-r, 1.0]))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Value and first derivative by a joint Horner pass.
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for &c in self.coeffs.iter().rev() {
            d = d * t + v;
            v = v * t + c;
        }
        (v, d)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64));
        Poly::new(coeffs)
    }

    pub fn scale(&self, a: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * a).collect())
    }

    /// Scales so that the largest coefficient has magnitude one (sign preserved).
    fn normalized(&self) -> Poly {
        let m = self.max_abs_coeff();
        if m == 0.0 {
            Poly::zero()
        } else {
            self.scale(1.0 / m)
        }
    }

    /// Drops leading coefficients that are below `rel` times the largest one.
    fn trim_relative(mut self, rel: f64) -> Poly {
        let m = self.max_abs_coeff();
        while let Some(&c) = self.coeffs.last() {
            if c.abs() <= rel * m {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        self
    }

    /// Quotient of synthetic division by `(t - r)`; the remainder `p(r)` is dropped.
    pub fn deflate(&self, r: f64) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::zero();
        }
        let mut out = vec![0.0; n - 1];
        let mut acc = 0.0;
        for i in (1..n).rev() {
            acc = acc * r + self.coeffs[i];
            out[i - 1] = acc;
        }
        Poly::new(out)
    }

    /// Euclidean division `self = quotient * divisor + remainder`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        divide(self, divisor)
    }

    /// Sign changes of the Sturm chain of `self` at `x`.
    pub fn sturm_chain(&self) -> SturmChain {
        SturmChain::new(self)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).copied().unwrap_or(0.0) + rhs.coeffs.get(i).copied().unwrap_or(0.0))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Polynomial long division `q = quotient * p + remainder`, `deg remainder < deg p`.
pub fn divide(q: &Poly, p: &Poly) -> Result<(Poly, Poly)> {
    let dp = p.degree().ok_or(Error::DivisionByZero)?;
    let Some(dq) = q.degree() else {
        return Ok((Poly::zero(), Poly::zero()));
    };
    if dq < dp {
        return Ok((Poly::zero(), q.clone()));
    }
    let lead = p.leading();
    let mut rem = q.coeffs.clone();
    let mut quot = vec![0.0; dq - dp + 1];
    for i in (0..=dq - dp).rev() {
        let c = rem[i + dp] / lead;
        quot[i] = c;
        for (j, pc) in p.coeffs.iter().enumerate() {
            rem[i + j] -= c * pc;
        }
        rem[i + dp] = 0.0;
    }
    rem.truncate(dp);
    Ok((Poly::new(quot), Poly::new(rem)))
}

/// Sturm sequence with floating remainders thresholded to zero.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    fn new(p: &Poly) -> Self {
        let mut chain = Vec::new();
        if p.is_zero() {
            return SturmChain { chain };
        }
        chain.push(p.normalized());
        let d = p.derivative();
        if d.is_zero() {
            return SturmChain { chain };
        }
        chain.push(d.normalized());
        loop {
            let n = chain.len();
            let (_, r) = divide(&chain[n - 2], &chain[n - 1]).expect("nonzero divisor");
            let r = r.trim_relative(1e-13);
            if r.max_abs_coeff() <= REMAINDER_ZERO {
                break;
            }
            chain.push((-&r).normalized());
            if chain.last().and_then(Poly::degree) == Some(0) {
                break;
            }
        }
        SturmChain { chain }
    }

    pub fn polys(&self) -> &[Poly] {
        &self.chain
    }

    fn count_signs(values: impl Iterator<Item = f64>) -> usize {
        let mut changes = 0;
        let mut last = 0.0f64;
        for v in values {
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
        changes
    }

    pub fn sign_changes(&self, x: f64) -> usize {
        Self::count_signs(self.chain.iter().map(|p| p.eval(x)))
    }

    fn sign_changes_at_infinity(&self, positive: bool) -> usize {
        Self::count_signs(self.chain.iter().map(|p| {
            let deg = p.degree().unwrap_or(0);
            let s = p.leading();
            if positive || deg % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: f64, b: f64) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }

    /// Number of distinct real roots.
    pub fn count_total(&self) -> usize {
        self.sign_changes_at_infinity(false)
            .saturating_sub(self.sign_changes_at_infinity(true))
    }
}

fn cauchy_bound(p: &Poly) -> f64 {
    let lead = p.leading().abs();
    let c = p.coeffs[..p.coeffs.len() - 1]
        .iter()
        .fold(0.0f64, |m, a| m.max(a.abs() / lead));
    1.0 + c
}

/// An isolating interval `(lo, hi]` holding `count` distinct roots.
struct Bracket {
    lo: f64,
    hi: f64,
    count: usize,
}

#[allow(clippy::too_many_arguments)]
fn isolate(chain: &SturmChain, p: &Poly, lo: f64, hi: f64, vlo: usize, vhi: usize, out: &mut Vec<Bracket>, depth: u32) {
    let count = vlo.saturating_sub(vhi);
    if count == 0 {
        return;
    }
    if count == 1 || depth > 120 || hi - lo <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()) {
        out.push(Bracket { lo, hi, count });
        return;
    }
    let mut mid = 0.5 * (lo + hi);
    if p.eval(mid) == 0.0 {
        mid = lo + 0.5009765625 * (hi - lo);
    }
    let vmid = chain.sign_changes(mid);
    isolate(chain, p, lo, mid, vlo, vmid, out, depth + 1);
    isolate(chain, p, mid, hi, vmid, vhi, out, depth + 1);
}

fn refine(chain: &SturmChain, p: &Poly, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = p.eval(lo);
    let fhi = p.eval(hi);
    if fhi == 0.0 {
        return hi;
    }
    if flo * fhi < 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = p.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if chain.count(lo, mid) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (v, d) = p.eval_with_derivative(x);
        if d == 0.0 || v == 0.0 {
            break;
        }
        let next = x - v / d;
        if !(next >= lo && next <= hi) || p.eval(next).abs() >= v.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Distinct real roots, ascending, each with the size of the cluster it was
/// isolated from (more than one means Sturm counts could not separate them).
fn distinct_real_roots(p: &Poly) -> Vec<(f64, usize)> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let chain = p.sturm_chain();
    let b = 2.0 * cauchy_bound(p);
    let mut brackets = Vec::new();
    let (vlo, vhi) = (chain.sign_changes(-b), chain.sign_changes(b));
    isolate(&chain, p, -b, b, vlo, vhi, &mut brackets, 0);
    brackets
        .into_iter()
        .map(|br| (refine(&chain, p, br.lo, br.hi), br.count))
        .collect()
}

/// All real roots of `p`, which must be simple.
///
/// `tol` is the guard `|p'(t_j)| >= tol * max|coeff|`; [`ROOT_GUARD`] is the default.
pub fn real_simple_roots(p: &Poly, tol: f64) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::NonPolynomial);
    }
    let guard = tol * p.max_abs_coeff();
    let dp = p.derivative();
    let mut roots = Vec::new();
    for (r, cluster) in distinct_real_roots(p) {
        let d = dp.eval(r);
        if cluster > 1 || d.abs() < guard {
            return Err(Error::MultipleRoot { root: r, derivative: d });
        }
        roots.push(r);
    }
    Ok(roots)
}

/// Monic-normalised greatest common divisor with thresholded remainders.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let mut x = a.normalized();
    let mut y = b.normalized();
    if x.degree() < y.degree() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_zero() {
        let (_, r) = divide(&x, &y).expect("nonzero divisor");
        let r = r.trim_relative(1e-13);
        x = y;
        y = if r.max_abs_coeff() <= REMAINDER_ZERO {
            Poly::zero()
        } else {
            r.normalized()
        };
    }
    if x.is_zero() {
        return x;
    }
    x.scale(1.0 / x.leading())
}

/// Squarefree factors `(a_i, i)` with `p ~ prod a_i^i` (Yun's algorithm).
pub fn squarefree_decomposition(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = gcd(p, &dp);
    let quot = |x: &Poly, y: &Poly| divide(x, y).expect("nonzero divisor").0;
    let mut b = quot(p, &a0);
    let c = quot(&dp, &a0);
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 && i <= 64 {
        let a = if d.max_abs_coeff() <= REMAINDER_ZERO * c.max_abs_coeff().max(1.0) {
            b.clone()
        } else {
            gcd(&b, &d)
        };
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        let c_next = quot(&d, &a);
        b = quot(&b, &a);
        d = &c_next - &b.derivative();
        i += 1;
    }
    out
}

/// Distinct real roots with multiplicities, ascending.
pub fn real_roots_with_multiplicity(p: &Poly) -> Vec<(f64, usize)> {
    let mut roots: Vec<(f64, usize)> = squarefree_decomposition(p)
        .iter()
        .flat_map(|(a, m)| {
            distinct_real_roots(a)
                .into_iter()
                .map(move |(r, cluster)| (r, m * cluster))
        })
        .collect();
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, usize)> = Vec::with_capacity(roots.len());
    for (r, m) in roots {
        match merged.last_mut() {
            Some(last) if (r - last.0).abs() <= 1e-7 * (1.0 + r.abs()) => last.1 += m,
            _ => merged.push((r, m)),
        }
    }
    merged
}

/// Distinct real roots at which `p` changes sign, ascending.
pub fn sign_change_roots(p: &Poly) -> Vec<f64> {
    let roots = distinct_real_roots(p);
    let mut out = Vec::new();
    for (i, &(r, _)) in roots.iter().enumerate() {
        let mut h = 1e-6 * (1.0 + r.abs());
        if i > 0 {
            h = h.min(0.25 * (r - roots[i - 1].0));
        }
        if i + 1 < roots.len() {
            h = h.min(0.25 * (roots[i + 1].0 - r));
        }
        if p.eval(r - h) * p.eval(r + h) < 0.0 {
            out.push(r);
        }
    }
    out
}

/// All complex roots by Aberth–Ehrlich iteration.
pub fn complex_roots(p: &Poly) -> Vec<Complex64> {
    let Some(n) = p.degree() else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    let radius = cauchy_bound(p).min(1e6) * 0.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let v = p.eval_complex(z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dp.eval_complex(z[k]);
            let sum: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[k] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// A real simple pole of `q/p` with its residue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub at: f64,
    pub residue: f64,
}

/// `q/p = quotient + sum_j c_j / (t - t_j) + (complex-pole remainder)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialFractions {
    pub quotient: Poly,
    pub remainder: Poly,
    pub poles: Vec<Pole>,
}

impl PartialFractions {
    /// `quotient(t) + sum_j c_j / (t - t_j)`.
    pub fn eval_real_part(&self, t: f64) -> f64 {
        self.quotient.eval(t) + self.poles.iter().map(|pole| pole.residue / (t - pole.at)).sum::<f64>()
    }
}

/// Residues of `q/p` at the given simple real roots of `p`.
pub fn partial_fractions(q: &Poly, p: &Poly, roots: &[f64]) -> Result<PartialFractions> {
    let (quotient, remainder) = divide(q, p)?;
    let dp = p.derivative();
    let guard = ROOT_GUARD * p.max_abs_coeff();
    let poles = roots
        .iter()
        .map(|&r| {
            let d = dp.eval(r);
            if d.abs() < guard {
                Err(Error::DegenerateRoot { root: r })
            } else {
                Ok(Pole {
                    at: r,
                    residue: remainder.eval(r) / d,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PartialFractions {
        quotient,
        remainder,
        poles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divide_examples() {
        let (q, r) = divide(&Poly::new(vec![0.0, 0.0, 0.0, 1.0]), &Poly::new(vec![0.0, 0.0, 1.0])).unwrap();
        assert_eq!(q, Poly::new(vec![0.0, 1.0]));
        assert!(r.is_zero());
        let (q, r) = divide(&Poly::new(vec![1.0, 0.0, 1.0]), &Poly::new(vec![-1.0, 1.0])).unwrap();
        assert_eq!(q, Poly::new(vec![1.0, 1.0]));
        assert_eq!(r, Poly::constant(2.0));
        assert_eq!(divide(&q, &Poly::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn roots_of_model_polys() {
        let p = Poly::new(vec![1.0, 0.0, -1.0]);
        let r = real_simple_roots(&p, ROOT_GUARD).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
        assert_eq!(
            real_simple_roots(&Poly::new(vec![0.0, 1.0]), ROOT_GUARD).unwrap(),
            vec![0.0]
        );
        assert!(real_simple_roots(&Poly::new(vec![1.0, 0.0, 1.0]), ROOT_GUARD)
            .unwrap()
            .is_empty());
        assert_eq!(real_simple_roots(&Poly::zero(), ROOT_GUARD), Err(Error::NonPolynomial));
    }

    #[test]
    fn double_root_is_rejected() {
        let p = Poly::from_roots(&[1.0, 1.0, -2.0]);
        assert!(matches!(
            real_simple_roots(&p, ROOT_GUARD),
            Err(Error::MultipleRoot { .. })
        ));
    }

    #[test]
    fn multiplicities_and_sign_changes() {
        let q = Poly::from_roots(&[0.5, 0.5, -0.25, 2.0, 2.0, 2.0]);
        let m = real_roots_with_multiplicity(&q);
        let mults: Vec<usize> = m.iter().map(|r| r.1).collect();
        assert_eq!(mults, vec![1, 2, 3]);
        let sc = sign_change_roots(&q);
        assert_eq!(sc.len(), 2);
        assert!((sc[0] + 0.25).abs() < 1e-12);
        assert!((sc[1] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn partial_fraction_examples() {
        let p = Poly::new(vec![1.0, 0.0, -1.0]);
        let pf = partial_fractions(&Poly::new(vec![0.0, -2.0]), &p, &[-1.0, 1.0]).unwrap();
        assert!(pf.quotient.is_zero());
        assert_eq!(pf.poles[0].residue, 1.0);
        assert_eq!(pf.poles[1].residue, 1.0);

        let pf = partial_fractions(&Poly::monomial(2, 1.0), &p, &[-1.0, 1.0]).unwrap();
        assert_eq!(pf.quotient, Poly::constant(-1.0));
        assert_eq!(pf.poles[0].residue, 0.5);
        assert_eq!(pf.poles[1].residue, -0.5);

        let pf = partial_fractions(&Poly::zero(), &p, &[-1.0, 1.0]).unwrap();
        assert!(pf.quotient.is_zero() && pf.poles.iter().all(|c| c.residue == 0.0));
    }

    #[test]
    fn derivative_primitive_roundtrip() {
        let p = Poly::new(vec![3.0, -1.0, 0.5, 2.0]);
        assert_eq!(p.primitive().derivative(), p);
        let d = p.derivative().primitive();
        assert_eq!(&d + &Poly::constant(3.0), p);
    }

    #[test]
    fn deflation_and_complex_roots() {
        let p = Poly::from_roots(&[2.0, -1.0, 0.5]);
        let d = p.deflate(2.0);
        let expect = Poly::from_roots(&[-1.0, 0.5]);
        for (a, b) in d.coeffs().iter().zip(expect.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
        let z = complex_roots(&Poly::new(vec![1.0, 0.0, 1.0]));
        assert_eq!(z.len(), 2);
        for r in z {
            assert!((r.norm() - 1.0).abs() < 1e-14 && r.re.abs() < 1e-14);
        }
    }

    #[test]
    fn serde_roundtrip_is_coefficient_array() {
        let p = Poly::new(vec![1.0, 0.0, -1.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.0,0.0,-1.0]");
        let back: Poly = serde_json::from_str("[1.0, 2.0, 0.0]").unwrap();
        assert_eq!(back.degree(), Some(1));
    }
}
