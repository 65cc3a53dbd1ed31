//! Solver outputs against independent numerical oracles.

mod common;

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepstrip::field::{FieldModel, Point, VectorField};
use sepstrip::poly::{partial_fractions, real_simple_roots, ROOT_GUARD};
use sepstrip::rhs::{Builtin, GrowthMode, Rhs};
use sepstrip::solver::{global_inverse, StripKind};
use sepstrip::spectral::{mode_solve, PhaseConvention};
use sepstrip::Poly;

use common::{companion_real_roots, mode_oracle, random_field, rk45, rk45_until, spaced_points};

fn arc(field: VectorField) -> Arc<FieldModel> {
    Arc::new(FieldModel::new(field).unwrap())
}

/// `u(t, x)` by integrating `dX/dτ = q/p`, `dU/dτ = f(τ, X)/p` from `(t, x)` back to the
/// strip's data: the base point, or the transversal `X + ντ = 0`.
fn characteristic_oracle(model: &FieldModel, strip: usize, kind: StripKind, f: &Rhs, t: f64, x: f64) -> f64 {
    let (p, q) = (&model.field.p, &model.field.q);
    let rhs = |tau: f64, y: &[f64]| {
        let pv = p.eval(tau);
        vec![q.eval(tau) / pv, f.eval(tau, y[0]) / pv]
    };
    let u_end = match kind {
        StripKind::Separatrix { theta } | StripKind::Cauchy { base: theta } => {
            rk45(&rhs, t, &[x, 0.0], theta, 1e-12)[1]
        }
        StripKind::Transversal { nu } => {
            let s = model.strip(strip);
            let event = |tau: f64, y: &[f64]| y[0] + nu * tau;
            // The crossing lies on one side of t; try toward each root until the event fires.
            let mut found = None;
            let ends = [s.lower.max(t - 20.0) + 1e-9, s.upper.min(t + 20.0) - 1e-9];
            for end in ends {
                let (te, y) = rk45_until(&rhs, t, &[x, 0.0], end, 1e-12, &event);
                if (te - end).abs() > 1e-12 {
                    found = Some(y[1]);
                    break;
                }
            }
            found.expect("characteristic meets the transversal")
        }
    };
    -u_end
}

#[test]
fn transversal_strip_matches_characteristic_oracle_at_reference_point() {
    let m = arc(VectorField::lambda_k(1.0, 2));
    let f = Rhs::constant(1.0);
    let u = global_inverse(&m, &f).unwrap();
    let kind = u.strips[1].kind();
    assert!(matches!(kind, StripKind::Transversal { .. }));
    let got = u.eval(0.5, 0.3).unwrap();
    let want = characteristic_oracle(&m, 1, kind, &f, 0.5, 0.3);
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn all_strip_kinds_match_characteristic_oracle() {
    let cases = [
        (
            VectorField::model(),
            Rhs::builtin(Builtin::CosX { omega: 1.0 }, 0.0, GrowthMode::Growth).unwrap(),
        ),
        (
            VectorField::model(),
            Rhs::builtin(Builtin::GaussianX { sigma: 1.0 }, 0.0, GrowthMode::Decay).unwrap(),
        ),
        (
            VectorField::lambda_k(1.0, 2),
            Rhs::builtin(Builtin::ExpAx { a: 0.3 }, 0.3, GrowthMode::Growth).unwrap(),
        ),
        (
            VectorField::lambda_k(-2.0, 3),
            Rhs::poly_in_x(vec![Poly::new(vec![1.0, 1.0]), Poly::constant(0.5)]).unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [0usize; 3];
    for (field, f) in cases {
        let m = arc(field);
        let u = global_inverse(&m, &f).unwrap();
        for _ in 0..12 {
            let t = rng.gen_range(-2.5..2.5);
            if m.roots().iter().any(|r| (t - r).abs() < 0.05) {
                continue;
            }
            let x = rng.gen_range(-2.0..2.0);
            let (s, _) = m.point(t).unwrap();
            let got = u.eval(t, x).unwrap();
            let kind = u.strips[s].kind();
            seen[match kind {
                StripKind::Separatrix { .. } => 0,
                StripKind::Transversal { .. } => 1,
                StripKind::Cauchy { .. } => 2,
            }] += 1;
            let want = characteristic_oracle(&m, s, kind, &f, t, x);
            assert!(
                (got - want).abs() < 1e-8 * (1.0 + want.abs()),
                "t={t} x={x}: {got} vs {want}"
            );
        }
    }
    assert!(seen.iter().all(|&n| n > 0), "strip kinds covered: {seen:?}");
}

#[test]
fn random_fields_match_characteristic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = Rhs::builtin(Builtin::CosX { omega: 1.0 }, 0.0, GrowthMode::Growth).unwrap();
    let mut checked = 0;
    while checked < 40 {
        let m = arc(random_field(&mut rng, 3));
        let u = global_inverse(&m, &f).unwrap();
        let t = rng.gen_range(-3.5..3.5);
        if m.roots().iter().any(|r| (t - r).abs() < 0.1) {
            continue;
        }
        let x = rng.gen_range(-1.0..1.0);
        let (s, _) = m.point(t).unwrap();
        let got = u.eval(t, x).unwrap();
        let want = characteristic_oracle(&m, s, u.strips[s].kind(), &f, t, x);
        assert!(
            (got - want).abs() < 1e-7 * (1.0 + want.abs()),
            "{:?} t={t} x={x}: {got} vs {want}",
            m.field
        );
        checked += 1;
    }
}

#[test]
fn flow_matches_rk45() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let m = random_field(&mut rng, 4);
        let model = FieldModel::new(m.clone()).unwrap();
        let strip = &model.strips()[rng.gen_range(0..model.strips().len())];
        let lo = if strip.lower.is_finite() {
            strip.lower + 0.05
        } else {
            strip.upper - 3.0
        };
        let hi = if strip.upper.is_finite() {
            strip.upper - 0.05
        } else {
            strip.lower + 3.0
        };
        if lo >= hi {
            continue;
        }
        let (t, tau) = (rng.gen_range(lo..hi), rng.gen_range(lo..hi));
        let y = rng.gen_range(-1.0..1.0);
        let got = model.flow(t, tau, y).unwrap();
        let want = rk45(&|s, _| vec![m.q.eval(s) / m.p.eval(s)], tau, &[y], t, 1e-12)[0];
        assert!((got - want).abs() < 1e-8 * (1.0 + want.abs()), "{got} vs {want}");
    }
}

#[test]
fn primitive_derivative_is_q_over_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 1000 {
        let field = random_field(&mut rng, 4);
        let model = FieldModel::new(field.clone()).unwrap();
        for _ in 0..50 {
            let t = rng.gen_range(-4.0..4.0);
            if model.roots().iter().any(|r| (t - r).abs() < 0.01) {
                continue;
            }
            let h = 1e-6;
            let rho = |s: f64| model.rho(&Point::plain(s));
            let d = (rho(t + h) - rho(t - h)) / (2.0 * h);
            let exact = field.q.eval(t) / field.p.eval(t);
            assert!(
                (d - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                "t={t}: {d} vs {exact}"
            );
            checked += 1;
        }
    }
}

#[test]
fn roots_match_companion_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let roots = spaced_points(&mut rng, n, -5.0, 5.0, 0.1);
        let mut p = Poly::from_roots(&roots);
        if rng.gen_bool(0.5) {
            p = &p * &Poly::new(vec![rng.gen_range(1.0..3.0), rng.gen_range(-1.0..1.0), 1.0]);
        }
        let got = real_simple_roots(&p, ROOT_GUARD).unwrap();
        let oracle = companion_real_roots(&p, 1e-6);
        assert_eq!(got.len(), oracle.len());
        for ((g, o), r) in got.iter().zip(&oracle).zip(&roots) {
            assert!((g - r).abs() < 1e-9 && (g - o).abs() < 1e-6, "{g} {o} {r}");
        }
    }
}

#[test]
fn partial_fractions_recombine() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let field = random_field(&mut rng, 4);
        let roots = real_simple_roots(&field.p, ROOT_GUARD).unwrap();
        let pf = partial_fractions(&field.q, &field.p, &roots).unwrap();
        for _ in 0..20 {
            let t = rng.gen_range(-4.0..4.0);
            let back = pf.quotient.eval(t) * field.p.eval(t) + pf.remainder.eval(t);
            assert!((back - field.q.eval(t)).abs() <= 1e-9 * (1.0 + field.q.eval(t).abs()));
        }
        // Residue as the symmetric limit of (t - r) q/p.
        let h = 1e-5;
        let qp = |t: f64| field.q.eval(t) / field.p.eval(t);
        for pole in &pf.poles {
            let c = 0.5 * h * (qp(pole.at + h) - qp(pole.at - h));
            assert!(
                (c - pole.residue).abs() <= 1e-6 * (1.0 + c.abs()),
                "{c} vs {}",
                pole.residue
            );
        }
    }
}

#[test]
fn mode_solve_matches_ode_oracle() {
    let ts: Vec<f64> = (0..=40).map(|i| -0.99 + 1.98 * i as f64 / 40.0).collect();
    let fhat = |_t: f64| Complex64::new(1.0, 0.0);
    for b in [0.5, 1.0, 2.0, -1.0] {
        for xi in [-1.0, 1.0, 2.5] {
            let oracle = mode_oracle(b, xi, fhat(0.0), &ts);
            for (t, o) in ts.iter().zip(&oracle) {
                let got = mode_solve(b, xi, &fhat, *t, PhaseConvention::Transported)
                    .unwrap()
                    .value;
                assert!((got - o).norm() < 1e-6, "b={b} ξ={xi} t={t}: {got} vs {o}");
            }
            // The printed phase uses κ = -1 for every frequency.
            let printed = mode_oracle(b, -1.0, fhat(0.0), &ts);
            for (t, o) in ts.iter().zip(&printed) {
                let got = mode_solve(b, xi, &fhat, *t, PhaseConvention::Printed).unwrap().value;
                assert!((got - o).norm() < 1e-6, "printed b={b} ξ={xi} t={t}");
            }
        }
    }
}
