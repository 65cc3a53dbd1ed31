//! One-dimensional quadrature rules: adaptive Gauss–Kronrod, tanh-sinh and
//! Gauss–Legendre nodes.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

/// Values that can be accumulated by a quadrature rule.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Absolute and relative target for adaptive rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    fn bound(&self, magnitude: f64) -> f64 {
        self.abs.max(self.rel * magnitude)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[i];
        if i % 2 == 1 {
            gauss = gauss + s * WG[i / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 7/15-point Gauss–Kronrod quadrature on `[a, b]`.
pub fn gauss_kronrod<T: QuadValue>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_segments: usize,
) -> Estimate<T> {
    if a == b {
        return Estimate {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        };
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 15;
    while total_err > tol.bound(total.magnitude()) && heap.len() < max_segments {
        let seg = heap.pop().expect("heap is nonempty");
        let m = 0.5 * (seg.a + seg.b);
        if m == seg.a || m == seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&f, seg.a, m);
        let (v2, e2) = gk15(&f, m, seg.b);
        evaluations += 30;
        total = total - seg.value + v1 + v2;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: m,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    let value = heap.iter().fold(T::zero(), |acc, s| acc + s.value);
    let error = heap.iter().map(|s| s.error).sum();
    Estimate {
        value,
        error,
        evaluations,
    }
}

/// Tanh-sinh quadrature on `[a, b]` with step halving until successive levels agree.
pub fn tanh_sinh<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, b: f64, tol: Tolerance) -> Estimate<T> {
    if a == b {
        return Estimate {
            value: T::zero(),
            error: 0.0,
            evaluations: 0,
        };
    }
    const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
    const T_MAX: f64 = 6.2;
    let c = 0.5 * (a + b);
    let h0 = 0.5 * (b - a);
    // Offsets from the nearer endpoint come from the complement of tanh so
    // that nodes do not collapse onto a or b.
    let node = |s: f64| -> (f64, f64) {
        let u = HALF_PI * s.sinh();
        let e = (-2.0 * u.abs()).exp();
        let comp = 2.0 * e / (1.0 + e);
        let w = HALF_PI * s.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        let x = if u < 0.0 { a + h0 * comp } else { b - h0 * comp };
        (x, w)
    };
    let add_level = |sum: &mut T, h: f64, step: usize| -> usize {
        let mut count = 0;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            for sign in [-1.0, 1.0] {
                let (x, w) = node(sign * k as f64 * h);
                if x != a && x != b && w > 0.0 {
                    *sum = *sum + f(x) * w;
                    count += 1;
                }
            }
            k += step;
        }
        count
    };
    let mut sum = f(c) * HALF_PI;
    let mut h = 1.0;
    let mut evaluations = 1 + add_level(&mut sum, h, 1);
    let mut estimate = sum * (h * h0);
    let mut error = f64::INFINITY;
    for _ in 0..10 {
        h *= 0.5;
        evaluations += add_level(&mut sum, h, 2);
        let next = sum * (h * h0);
        error = (next - estimate).magnitude();
        estimate = next;
        if error <= tol.bound(estimate.magnitude()) {
            break;
        }
    }
    Estimate {
        value: estimate,
        error,
        evaluations,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
