//! Report builders for the subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use sepstrip::field::{emit_curves, is_surjective, KernelFunction};
use sepstrip::polysolve::{approach_offsets, fit_power_exponent, log_fit, poly_inverse_coeffs, LOG_FIT_RANGE};
use sepstrip::problem::{ProblemSpec, RhsSpec};
use sepstrip::solver::{
    dyadic_offsets, flux_check, global_inverse, random_probes, strong_residual, weak_residual, Bump, BumpProfile,
    FluxStatus, FnSolution, GlobalWeakSolution,
};
use sepstrip::spectral::{operator_norm_probe, picard_solve, PicardGrid, SymbolAfterInverse, RESIDUAL_MARGIN};
use sepstrip::{Error, FieldModel, Poly, Rhs};

use crate::Command;

pub struct Options {
    pub out: PathBuf,
    pub seed: u64,
    pub tol: Option<f64>,
}

pub struct Outcome {
    pub report: String,
    /// Every checked tolerance was met.
    pub passed: bool,
}

pub struct Failure {
    pub code: u8,
    pub message: String,
    pub report: Option<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 3 },
            message: e.to_string(),
            report: None,
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
        report: None,
    }
}

/// Everything a subcommand needs besides its own logic.
struct Context {
    command: Command,
    spec: ProblemSpec,
    hash: String,
    out: PathBuf,
    seed: u64,
}

impl Context {
    fn path(&self, chosen: &Option<String>, default: &str) -> PathBuf {
        self.out.join(chosen.as_deref().unwrap_or(default))
    }

    fn write(&self, path: &Path, text: &str) -> Result<String, Failure> {
        fs::write(path, text).map_err(|e| io_failure(path, e))?;
        Ok(path
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned()))
    }

    fn write_csv(&self, text: &str) -> Result<String, Failure> {
        let path = self.path(&self.spec.outputs.csv, &format!("{}.csv", self.command.name()));
        self.write(&path, text)
    }

    /// Adds the common header, writes the JSON report and returns it.
    fn finish(&self, mut body: Value, passed: bool) -> Result<Outcome, Failure> {
        let obj = body.as_object_mut().expect("reports are JSON objects");
        obj.insert("command".into(), json!(self.command.name()));
        obj.insert("spec_sha256".into(), json!(self.hash));
        obj.insert("seed".into(), json!(self.seed));
        obj.insert("passed".into(), json!(passed));
        let text = serde_json::to_string_pretty(&body).expect("reports serialise");
        let path = self.path(&self.spec.outputs.report, &format!("{}.json", self.command.name()));
        self.write(&path, &text)?;
        Ok(Outcome { report: text, passed })
    }
}

pub fn run(command: Command, spec_path: &Path, opts: &Options) -> Result<Outcome, Failure> {
    let bytes = fs::read(spec_path).map_err(|e| io_failure(spec_path, e))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", spec_path.display()),
        report: None,
    })?;
    let mut spec = ProblemSpec::from_json(&text)?;
    if let Some(tol) = opts.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidInput(format!("--tol must be positive, got {tol}")).into());
        }
        match command {
            Command::Perturb => spec.tolerances.picard_residual = tol,
            _ => spec.tolerances.residual = tol,
        }
    }
    fs::create_dir_all(&opts.out).map_err(|e| io_failure(&opts.out, e))?;
    let ctx = Context {
        command,
        spec,
        hash: format!("{:x}", Sha256::digest(&bytes)),
        out: opts.out.clone(),
        seed: opts.seed,
    };
    match command {
        Command::Classify => classify(&ctx),
        Command::Curves => curves(&ctx),
        Command::Solve => solve(&ctx),
        Command::Asymptotics => asymptotics(&ctx),
        Command::Perturb => perturb(&ctx),
        Command::Verify => verify(&ctx),
    }
}

fn classify(ctx: &Context) -> Result<Outcome, Failure> {
    let model = ctx.spec.model()?;
    let d = &model.decomposition;
    let report = is_surjective(d);
    let criteria_agree = d.strips.iter().filter_map(|s| s.criteria.as_ref()).all(|c| c.agree());
    let body = json!({
        "roots": d.roots,
        "kappas": d.kappas,
        "c": d.c,
        "strips": d.strips,
        "bounded_strips": d.num_bounded_strips(),
        "boundary_roots": d.boundary_roots,
        "surjective": report.surjective,
        "separatrix_strips": report.separatrix_strips,
        "transversal_slopes": report.transversal_slopes,
        "criteria_agree": criteria_agree,
        "warnings": d.warnings,
    });
    ctx.finish(body, criteria_agree)
}

fn curves(ctx: &Context) -> Result<Outcome, Failure> {
    let model = ctx.spec.model()?;
    let c = &ctx.spec.curves;
    let t = ctx.spec.window.t;
    let table = emit_curves(&model, (-t, t), &c.seeds, c.samples, c.clip_x);
    let csv = ctx.write_csv(&table.to_csv())?;
    let svg_path = ctx.path(&ctx.spec.outputs.svg, "curves.svg");
    let svg = ctx.write(&svg_path, &table.to_svg())?;
    let body = json!({
        "rows": table.rows.len(),
        "seeds": c.seeds,
        "window": [-t, t],
        "csv": csv,
        "svg": svg,
    });
    ctx.finish(body, true)
}

/// `½ ln|(1 + t)/(1 - t)|`, the solution of `(1 - t²)u_t - 2t u_x = 1` vanishing at `t = 0`.
fn model_closed_form(t: f64) -> f64 {
    0.5 * ((1.0 + t) / (1.0 - t)).abs().ln()
}

/// Maximum relative error against the closed form for `L₀` and a constant right-hand side.
fn closed_form_check(ctx: &Context, model: &FieldModel, u: &GlobalWeakSolution) -> Result<Option<Value>, Failure> {
    let Some(c) = ctx.spec.rhs.as_constant() else {
        return Ok(None);
    };
    if model.field != sepstrip::VectorField::model() || c == 0.0 {
        return Ok(None);
    }
    let n = 200;
    let mut worst = 0.0f64;
    for i in 0..n {
        let t = -0.99 + 1.98 * (i as f64 + 0.5) / n as f64;
        let exact = c * model_closed_form(t);
        worst = worst.max((u.eval(t, 0.0)? - exact).abs() / exact.abs());
    }
    let tol = ctx.spec.tolerances.closed_form;
    Ok(Some(json!({
        "formula": "c/2 ln|(1+t)/(1-t)|",
        "samples": n,
        "max_relative_error": worst,
        "tolerance": tol,
        "matches": worst <= tol,
    })))
}

/// Residual probes inside the sampling window, 1e-3 away from the roots.
fn probes(ctx: &Context, model: &FieldModel) -> Vec<(f64, f64)> {
    let w = ctx.spec.window;
    random_probes(model, ctx.spec.probes, (-w.t, w.t), (-w.x, w.x), 1e-3, ctx.seed)
}

/// Bumps of both profiles centred on each root.
fn straddling_bumps(model: &FieldModel) -> Vec<Bump> {
    let roots = model.roots();
    roots
        .iter()
        .enumerate()
        .flat_map(|(j, &r)| {
            let mut gap: f64 = 0.5;
            if j > 0 {
                gap = gap.min(0.5 * (r - roots[j - 1]));
            }
            if j + 1 < roots.len() {
                gap = gap.min(0.5 * (roots[j + 1] - r));
            }
            [BumpProfile::Polynomial, BumpProfile::Smooth]
                .into_iter()
                .map(move |p| Bump::new(r, 0.0, gap, 1.0, p))
        })
        .collect()
}

/// Residual, weak pairing across the roots and the boundary flux at each root.
fn solution_checks(
    ctx: &Context,
    model: &FieldModel,
    u: &GlobalWeakSolution,
    f: &Rhs,
) -> Result<(Value, bool), Failure> {
    let tol = ctx.spec.tolerances;
    let strong = strong_residual(model, u, f, &probes(ctx, model))?;
    let weak = weak_residual(model, u, f, &straddling_bumps(model))?;
    let phi = |_t: f64, x: f64| (-x * x).exp();
    let mut fluxes = Vec::new();
    for j in 0..model.roots().len() {
        for side in [-1.0, 1.0] {
            fluxes.push(flux_check(
                model,
                u,
                j,
                &phi,
                (-8.0, 8.0),
                &dyadic_offsets(4..=30, side),
            )?);
        }
    }
    let strong_ok = strong.max <= tol.residual;
    let weak_ok = weak.max_defect <= tol.weak;
    let flux_ok = fluxes
        .iter()
        .all(|r| r.status == FluxStatus::Vanishing && r.final_abs < tol.flux);
    let body = json!({
        "strong_residual": {"report": strong, "tolerance": tol.residual, "passed": strong_ok},
        "weak_pairing": {"report": weak, "tolerance": tol.weak, "passed": weak_ok},
        "flux": {"reports": fluxes, "tolerance": tol.flux, "passed": flux_ok},
    });
    Ok((body, strong_ok && weak_ok && flux_ok))
}

fn sample_csv(ctx: &Context, model: &FieldModel, u: &GlobalWeakSolution) -> Result<String, Failure> {
    let (w, g) = (ctx.spec.window, ctx.spec.samples);
    let axis = |half: f64, n: usize| -> Vec<f64> {
        if n <= 1 {
            vec![0.0]
        } else {
            (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
        }
    };
    let mut csv = String::from("t,x,u\n");
    for t in axis(w.t, g.nt) {
        if model.roots().iter().any(|r| (t - r).abs() < 1e-9) {
            continue;
        }
        for x in axis(w.x, g.nx) {
            let _ = writeln!(csv, "{t},{x},{}", u.eval(t, x)?);
        }
    }
    Ok(csv)
}

fn solve(ctx: &Context) -> Result<Outcome, Failure> {
    let model = Arc::new(ctx.spec.model()?);
    let f = ctx.spec.rhs()?;
    let u = global_inverse(&model, &f)?;
    let closed = closed_form_check(ctx, &model, &u)?;
    let (checks, mut passed) = solution_checks(ctx, &model, &u, &f)?;
    if let Some(c) = &closed {
        passed &= c["matches"] == json!(true);
    }
    let csv = ctx.write_csv(&sample_csv(ctx, &model, &u)?)?;
    let kinds: Vec<Value> = u
        .strips
        .iter()
        .map(|s| json!({"strip": s.strip(), "kind": s.kind(), "endpoints": s.endpoints}))
        .collect();
    let body = json!({
        "strips": kinds,
        "warnings": u.warnings(),
        "closed_form": closed,
        "checks": checks,
        "csv": csv,
    });
    ctx.finish(body, passed)
}

fn asymptotics(ctx: &Context) -> Result<Outcome, Failure> {
    let model = Arc::new(ctx.spec.model()?);
    let f = ctx.spec.rhs()?;
    let coeffs: Option<Vec<Poly>> = match &ctx.spec.rhs {
        RhsSpec::Constant { value } => Some(vec![Poly::constant(*value)]),
        RhsSpec::PolyInX { coeffs } => Some(coeffs.clone()),
        _ => None,
    };
    let separatrix: Vec<usize> = model.decomposition.separatrix_strips().map(|s| s.index).collect();
    let mut csv = String::from("strip,l,root,offset,value\n");
    let mut log_fits = Vec::new();
    let mut failures = Vec::new();
    if let Some(coeffs) = &coeffs {
        for &s in &separatrix {
            let inv = poly_inverse_coeffs(&model, s, coeffs)?;
            for l in 0..inv.len() {
                for (j, side) in [(s - 1, 1.0), (s, -1.0)] {
                    let offsets = approach_offsets(LOG_FIT_RANGE, 41, side);
                    let values = offsets
                        .iter()
                        .map(|&d| inv.g_near(l, j, d))
                        .collect::<Result<Vec<_>, _>>()?;
                    for (d, v) in offsets.iter().zip(&values) {
                        let _ = writeln!(csv, "{s},{l},{j},{d:e},{v:e}");
                    }
                    match log_fit(&offsets, &values) {
                        Ok(fit) => log_fits.push(json!({"strip": s, "l": l, "root": j, "side": side, "fit": fit})),
                        Err(e) => {
                            failures.push(json!({"strip": s, "l": l, "root": j, "side": side, "error": e.to_string()}))
                        }
                    }
                }
            }
        }
    }
    let mut power_fits = Vec::new();
    let eps = f.declared_eps().unwrap_or(0.0);
    if eps > 0.0 {
        let u = global_inverse(&model, &f)?;
        for &s in &separatrix {
            for (j, side) in [(s - 1, 1.0), (s, -1.0)] {
                match fit_power_exponent(&u, j, side, eps) {
                    Ok(fit) => power_fits.push(json!({"strip": s, "root": j, "side": side, "fit": fit})),
                    Err(e) => failures.push(json!({"strip": s, "root": j, "side": side, "error": e.to_string()})),
                }
            }
        }
    }
    let csv = ctx.write_csv(&csv)?;
    let body = json!({
        "separatrix_strips": separatrix,
        "log_fits": log_fits,
        "power_fits": power_fits,
        "eps": eps,
        "failures": failures,
        "csv": csv,
    });
    ctx.finish(body, failures.is_empty())
}

fn perturb(ctx: &Context) -> Result<Outcome, Failure> {
    let Some(b) = ctx.spec.perturbation.clone() else {
        return Err(Error::InvalidInput("the problem file has no perturbation".into()).into());
    };
    let model = Arc::new(ctx.spec.model()?);
    let f = ctx.spec.rhs()?;
    let grid = PicardGrid::new(&model, ctx.spec.picard_grid)?;
    let params = ctx.spec.sobolev;
    let tol = ctx.spec.tolerances.picard_residual;
    let probe = operator_norm_probe(&SymbolAfterInverse(b.clone()), &grid, params, 4, ctx.seed);
    let f_norm = grid.norm(&grid.sample(&f), params);
    let mut body = json!({
        "amplitude": b.amplitude(),
        "perturbation": b,
        "window": grid.window(),
        "nodes": grid.nodes().len(),
        "norms": {
            "rhs": f_norm,
            "probe_symbol_after_inverse": probe.estimate,
            "probe_predicts_convergence": probe.estimate < 1.0,
        },
    });
    let solution = match picard_solve(&grid, &b, &f, params, ctx.spec.picard) {
        Ok(s) => s,
        Err(Error::NoContraction {
            iterations,
            last_ratio,
            ratios,
        }) => {
            let obj = body.as_object_mut().expect("object");
            obj.insert("status".into(), json!("no_contraction"));
            obj.insert("iterations".into(), json!(iterations));
            obj.insert("ratios".into(), json!(ratios));
            let outcome = ctx.finish(body, false)?;
            return Err(Failure {
                code: 3,
                message: format!("no contraction after {iterations} iterations (last ratio {last_ratio})"),
                report: Some(outcome.report),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let unperturbed = global_inverse(&model, &f)?;
    let half = 0.5 * grid.x.half_width();
    let mut difference = 0.0f64;
    for (i, n) in grid.nodes().iter().enumerate().step_by(11) {
        if model.roots().iter().any(|r| (n.t() - r).abs() < RESIDUAL_MARGIN) {
            continue;
        }
        for k in (0..grid.x.len()).step_by(8) {
            let x = grid.x.x(k);
            if x.abs() <= half {
                let v = unperturbed.strips[n.strip].eval_point(&n.point, x)?.value;
                difference = difference.max((solution.u.values[i][k] - v).abs());
            }
        }
    }
    let mut csv = String::from("t,x,u\n");
    let w = ctx.spec.window;
    for (i, n) in grid.nodes().iter().enumerate().step_by(4) {
        for k in 0..grid.x.len() {
            let x = grid.x.x(k);
            if x.abs() <= w.x {
                let _ = writeln!(csv, "{},{x},{}", n.t(), solution.u.values[i][k]);
            }
        }
    }
    let csv = ctx.write_csv(&csv)?;
    let passed = solution.residual <= tol;
    let obj = body.as_object_mut().expect("object");
    obj.insert("status".into(), json!("converged"));
    obj.insert("iterations".into(), json!(solution.iterations));
    obj.insert("differences".into(), json!(solution.differences));
    obj.insert("ratios".into(), json!(solution.ratios));
    obj.insert("contraction".into(), json!(solution.contraction));
    obj.insert(
        "residual".into(),
        json!({"max": solution.residual, "margin": RESIDUAL_MARGIN, "tolerance": tol, "passed": passed}),
    );
    obj.insert("edge_ratio".into(), json!(solution.edge_ratio));
    obj.insert("solution_norm".into(), json!(grid.norm(&solution.u, params)));
    obj.insert("max_difference_from_unperturbed".into(), json!(difference));
    obj.insert("csv".into(), json!(csv));
    ctx.finish(body, passed)
}

/// `(λ, k)` when the field is `(1 - t²)∂t + λ t^k ∂x`.
fn lambda_k(model: &FieldModel) -> Option<(f64, usize)> {
    let (p, q) = (&model.field.p, &model.field.q);
    if p.coeffs() != [1.0, 0.0, -1.0] {
        return None;
    }
    let k = q.degree()?;
    q.coeffs()[..k].iter().all(|c| *c == 0.0).then(|| (q.leading(), k))
}

fn verify(ctx: &Context) -> Result<Outcome, Failure> {
    let model = Arc::new(ctx.spec.model()?);
    let f = ctx.spec.rhs()?;
    let tol = ctx.spec.tolerances.residual;
    let mut passed = true;
    let kernel = match lambda_k(&model) {
        Some((lambda, k)) => {
            let kf = KernelFunction::new(lambda, k);
            let n = 200;
            let grid: Vec<(f64, f64)> = (0..n * n)
                .map(|i| {
                    let t = -0.99 + 1.98 * (i / n) as f64 / (n - 1) as f64;
                    let x = -2.0 + 4.0 * (i % n) as f64 / (n - 1) as f64;
                    (t, x)
                })
                .collect();
            let r = strong_residual(&model, &FnSolution(|t, x| kf.eval(t, x)), &Rhs::zero(), &grid)?;
            let ok = r.max <= 1e-9;
            passed &= ok;
            Some(json!({"lambda": lambda, "k": k, "grid": [n, n], "report": r, "tolerance": 1e-9, "passed": ok}))
        }
        None => None,
    };
    let u = global_inverse(&model, &f)?;
    let (checks, ok) = solution_checks(ctx, &model, &u, &f)?;
    passed &= ok;
    let body = json!({
        "kernel": kernel,
        "residual_tolerance": tol,
        "checks": checks,
    });
    ctx.finish(body, passed)
}
