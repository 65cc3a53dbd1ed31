//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sepstrip::{Poly, VectorField};

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step: `(y_next, error estimate)`.
fn dopri_step(f: &dyn Fn(f64, &[f64]) -> Vec<f64>, t: f64, y: &[f64], h: f64) -> (Vec<f64>, f64, f64) {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(f(t, y));
    for s in 1..7 {
        let ys: Vec<f64> = (0..n)
            .map(|i| y[i] + h * (0..s).map(|j| A[s - 1][j] * k[j][i]).sum::<f64>())
            .collect();
        k.push(f(t + C[s] * h, &ys));
    }
    let y5: Vec<f64> = (0..n)
        .map(|i| y[i] + h * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>())
        .collect();
    let y4: Vec<f64> = (0..n)
        .map(|i| y[i] + h * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>())
        .collect();
    let scale = |i: usize| 1.0 + y[i].abs().max(y5[i].abs());
    let err = (0..n).map(|i| ((y5[i] - y4[i]) / scale(i)).abs()).fold(0.0, f64::max);
    let size = (0..n).map(|i| y5[i].abs()).fold(0.0, f64::max);
    (y5, err, size)
}

/// Adaptive RK45 from `t0` to `t1` (either direction), local error `tol` relative to `1 + |y|`.
pub fn rk45(f: &dyn Fn(f64, &[f64]) -> Vec<f64>, t0: f64, y0: &[f64], t1: f64, tol: f64) -> Vec<f64> {
    rk45_until(f, t0, y0, t1, tol, &|_, _| 1.0).1
}

/// Like [`rk45`] but stops where `event(t, y)` changes sign, located by bisection of the last step.
pub fn rk45_until(
    f: &dyn Fn(f64, &[f64]) -> Vec<f64>,
    t0: f64,
    y0: &[f64],
    t1: f64,
    tol: f64,
    event: &dyn Fn(f64, &[f64]) -> f64,
) -> (f64, Vec<f64>) {
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = dir * 1e-3 * (t1 - t0).abs().max(1e-3);
    let mut g = event(t, &y);
    let mut steps = 0;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        assert!(steps < 10_000_000, "rk45 did not finish");
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let (yn, err, _) = dopri_step(f, t, &y, h);
        if err <= tol || h.abs() < 1e-14 {
            let gn = event(t + h, &yn);
            if g * gn < 0.0 {
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let (ym, _, _) = dopri_step(f, t, &y, mid);
                    if event(t + mid, &ym) * g > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (ye, _, _) = dopri_step(f, t, &y, hi);
                return (t + hi, ye);
            }
            t += h;
            y = yn;
            g = gn;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    (t, y)
}

/// Real roots from the eigenvalues of the companion matrix.
pub fn companion_real_roots(p: &Poly, imag_tol: f64) -> Vec<f64> {
    let c = p.coeffs();
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let mut roots: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < imag_tol)
        .map(|z| z.re)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Sorted distinct values in `[lo, hi]` with pairwise gaps of at least `gap`.
pub fn spaced_points(rng: &mut ChaCha8Rng, count: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..count).map(|_| rng.gen_range(lo..hi)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= gap) {
            return v;
        }
    }
}

/// `p` with 1 to `max_roots` simple real roots (gap ≥ 0.3 in `[-3, 3]`), at most
/// degree 6, and a random `q` of degree at most 6 that does not vanish at the roots.
pub fn random_field(rng: &mut ChaCha8Rng, max_roots: usize) -> VectorField {
    let count = rng.gen_range(1..=max_roots);
    let roots = spaced_points(rng, count, -3.0, 3.0, 0.3);
    let mut p = Poly::from_roots(&roots);
    if count + 2 <= 6 && rng.gen_bool(0.3) {
        p = &p * &Poly::new(vec![rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0), 1.0]);
    }
    p = p.scale(if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..2.0));
    loop {
        let deg = rng.gen_range(0..=6usize);
        let q = Poly::new((0..=deg).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let scale = q.max_abs_coeff().max(1e-300);
        if !q.is_zero() && roots.iter().all(|r| q.eval(*r).abs() > 0.05 * scale) {
            return VectorField::new(p, q);
        }
    }
}

/// `û` of one mode by RK45 in `σ = atanh t`, started at the equilibrium far from the base.
pub fn mode_oracle(b: f64, kappa: f64, fhat: Complex64, ts: &[f64]) -> Vec<Complex64> {
    // dû/dσ = (2iκ tanh σ - b) û + f̂
    let rhs = |s: f64, y: &[f64]| {
        let u = Complex64::new(y[0], y[1]);
        let d = Complex64::new(-b, 2.0 * kappa * s.tanh()) * u + fhat;
        vec![d.re, d.im]
    };
    let start = -60.0 * b.signum();
    let eq = fhat / Complex64::new(b, -2.0 * kappa * start.signum());
    let mut state = vec![eq.re, eq.im];
    let mut sigma = start;
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&i, &j| (b.signum() * ts[i]).total_cmp(&(b.signum() * ts[j])));
    let mut out = vec![Complex64::new(0.0, 0.0); ts.len()];
    for i in order {
        let target = ts[i].atanh();
        state = rk45(&rhs, sigma, &state, target, 1e-12);
        sigma = target;
        out[i] = Complex64::new(state[0], state[1]);
    }
    out
}
