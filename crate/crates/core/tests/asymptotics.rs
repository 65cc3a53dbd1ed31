//! Endpoint behaviour of flows and solutions near the roots of `p`.

mod common;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepstrip::field::FieldModel;
use sepstrip::polysolve::{fit_log_exponent, log_moment, poly_inverse_coeffs};
use sepstrip::rhs::{seminorm, Builtin, GrowthMode, Rhs, SobolevParams, SupGrid};
use sepstrip::solver::separatrix_inverse;
use sepstrip::spectral::{sobolev_norm, XGrid};
use sepstrip::{global_inverse, Poly, VectorField};

use common::random_field;

fn l0() -> Arc<FieldModel> {
    Arc::new(FieldModel::new(VectorField::model()).unwrap())
}

#[test]
fn log_moment_leading_term() {
    let ms: Vec<f64> = (1..=12).map(|m| 10f64.powi(-m)).collect();
    for pwr in 0..3u32 {
        let n = (pwr + 1) as f64;
        for a in [Poly::constant(1.0), Poly::monomial(1, 1.0), Poly::monomial(2, 1.0)] {
            let mut prev = f64::INFINITY;
            for &gap in &ms {
                let t = 1.0 - gap;
                let l = -(1.0 - t).ln();
                let lead = a.eval(1.0) / n * l.powf(n);
                let err = (log_moment(&a, pwr, t, 1.0).unwrap() / lead - 1.0).abs();
                if a.degree() == Some(0) {
                    assert!(err < 1e-10, "a=1 p={pwr}: {err}");
                } else {
                    assert!(err <= prev && err <= 3.0 * n / l, "a={a:?} p={pwr} gap={gap}: {err}");
                }
                prev = err;
            }
            let t = -1.0 + 1e-6;
            let back = log_moment(&Poly::constant(1.0), pwr, t, -1.0).unwrap();
            let want = -(-(1.0 + t).ln()).powf(n) / n;
            assert!((back / want - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn separatrix_flows_escape_to_one_side() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut strips = 0;
    while strips < 40 {
        let model = FieldModel::new(random_field(&mut rng, 4)).unwrap();
        let c = model.decomposition.c.clone();
        for s in model.strips().iter().filter(|s| s.separatrix) {
            let (Some(lo), Some(hi)) = s.root_indices() else {
                continue;
            };
            let base = model.point(s.theta).unwrap().1;
            let x = |j: usize, d: f64| model.rho(&model.point_near(j, d)) - model.rho(&base);
            for (j, side) in [(lo, 1.0), (hi, -1.0)] {
                let near: Vec<f64> = [1e-4, 1e-8, 1e-12].iter().map(|d| x(j, side * d)).collect();
                let dir = -c[j].signum();
                assert!(near.iter().all(|v| v.signum() == dir), "{near:?} c={}", c[j]);
                assert!(near.windows(2).all(|w| w[1].abs() > w[0].abs()));
            }
            assert_eq!(c[lo].signum(), c[hi].signum());
            strips += 1;
        }
    }
}

#[test]
fn poly_coefficients_reassemble_separatrix_solution() {
    let m = l0();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let k = rng.gen_range(0..=4usize);
        let mut f: Vec<Poly> = (0..=k)
            .map(|_| Poly::new((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        f[k] = Poly::constant(rng.gen_range(0.5..1.5));
        let inv = poly_inverse_coeffs(&m, 1, &f).unwrap();
        assert_eq!(inv.len(), k + 1);
        let u = separatrix_inverse(&m, 1, &Rhs::poly_in_x(f).unwrap()).unwrap();
        for _ in 0..10 {
            let (t, x) = (rng.gen_range(-0.98..0.98), rng.gen_range(-2.0..2.0));
            let (a, b) = (inv.eval(t, x).unwrap(), u.eval(t, x).unwrap());
            assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()), "k={k} ({t}, {x}): {a} vs {b}");
        }
    }
    let trailing = poly_inverse_coeffs(&m, 1, &[Poly::constant(1.0), Poly::zero()]).unwrap();
    assert_eq!(trailing.len(), 1);
}

#[test]
fn lower_coefficients_carry_higher_log_powers() {
    let m = l0();
    let k = 2;
    let mut f = vec![Poly::zero(); k + 1];
    f[k] = Poly::constant(1.0);
    let inv = poly_inverse_coeffs(&m, 1, &f).unwrap();
    for (j, side) in [(0usize, 1.0), (1, -1.0)] {
        let powers: Vec<f64> = (0..=k)
            .map(|l| fit_log_exponent(&|d| inv.g_near(l, j, d), side).unwrap().power)
            .collect();
        for (l, pw) in powers.iter().enumerate() {
            assert!((pw - (k - l + 1) as f64).abs() < 0.15, "g_{l} at root {j}: {pw}");
            assert!(*pw <= (k + 1 - l) as f64 + 0.2);
        }
        let near = |l: usize| inv.g_near(l, j, side * 1e-10).unwrap().abs();
        assert!(near(0) > near(1) && near(1) > near(2));
    }
}

#[test]
fn growth_envelope_blows_up_at_predicted_rate() {
    let m = l0();
    let eps = 0.5;
    let u = global_inverse(
        &m,
        &Rhs::builtin(Builtin::ExpAx { a: eps }, eps, GrowthMode::Growth).unwrap(),
    )
    .unwrap();
    let envelope = |j: usize, d: f64| {
        (0..=16)
            .map(|i| -4.0 + 0.5 * i as f64)
            .map(|x: f64| (-eps * x.abs()).exp() * u.eval_near(j, d, x).unwrap().value.abs())
            .fold(0.0, f64::max)
    };
    let want = 10f64.powf(eps * m.decomposition.c[1].abs());
    for (j, side) in [(0usize, 1.0), (1, -1.0)] {
        for d in [1e-8, 1e-10, 1e-12] {
            let ratio = envelope(j, side * d / 10.0) / envelope(j, side * d);
            assert!((ratio / want - 1.0).abs() < 0.15, "root {j} δ={d}: {ratio} vs {want}");
        }
    }
}

#[test]
fn seminorm_is_stable_under_refinement() {
    let cases = [
        (
            Rhs::builtin(Builtin::GaussianX { sigma: 1.0 }, 0.0, GrowthMode::Decay).unwrap(),
            0.0,
        ),
        (
            Rhs::builtin(Builtin::ExpAx { a: 0.5 }, 0.5, GrowthMode::Growth).unwrap(),
            0.5,
        ),
        (
            Rhs::builtin(Builtin::CosX { omega: 2.0 }, 0.0, GrowthMode::Growth).unwrap(),
            0.0,
        ),
    ];
    let coarse = SupGrid::default();
    let fine = SupGrid {
        nt: 2 * coarse.nt - 1,
        nx: 2 * coarse.nx - 1,
        ..coarse
    };
    for (f, eps) in cases {
        let a = seminorm(&f, eps, 1, 2, 2.0, coarse).unwrap();
        let b = seminorm(&f, eps, 1, 2, 2.0, fine).unwrap();
        assert!(a <= b * (1.0 + 1e-12) && (b - a) <= 1e-3 * b, "{a} vs {b}");
    }
}

/// `max_t |1 - t²|^ε ‖u(t, ·)‖_{s1,s2}` over `n` Chebyshev points in `[-0.999, 0.999]`.
fn weighted_sup(n: usize, eps: f64, orders: &[SobolevParams]) -> Vec<f64> {
    let m = l0();
    let f = Rhs::builtin(Builtin::GaussianX { sigma: 1.0 }, 0.0, GrowthMode::Decay).unwrap();
    let u = global_inverse(&m, &f).unwrap();
    let grid = XGrid::new(256, 30.0).unwrap();
    let mut best = vec![0.0f64; orders.len()];
    for i in 0..n {
        let t = 0.999 * (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos();
        let w = (1.0 - t * t).powf(eps);
        let samples = grid.sample(|x| u.eval(t, x).unwrap());
        for (b, params) in best.iter_mut().zip(orders) {
            *b = b.max(w * sobolev_norm(&grid, &samples, *params).unwrap());
        }
    }
    best
}

#[test]
fn weighted_sobolev_sup_is_stable_under_refinement() {
    let orders: Vec<SobolevParams> = [0.0, 1.0, 2.0]
        .iter()
        .flat_map(|&s1| [0.0, 1.0].map(|s2| SobolevParams { s1, s2 }))
        .collect();
    let coarse = weighted_sup(33, 0.25, &orders);
    let fine = weighted_sup(65, 0.25, &orders);
    for ((a, b), p) in coarse.iter().zip(&fine).zip(&orders) {
        assert!(a.is_finite() && (a - b).abs() <= 0.02 * b, "{p:?}: {a} vs {b}");
    }
}
