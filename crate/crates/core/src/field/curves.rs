//! Integral-curve tables and their SVG rendering.

use std::fmt::Write;

use serde::Serialize;

use super::FieldModel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub seed: f64,
    pub strip: usize,
    pub t: f64,
    pub x: f64,
}

/// Samples of `x = y + ρ(t) - ρ(θ_j)` per seed `y` and strip `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
    pub roots: Vec<f64>,
    pub window: (f64, f64),
    pub clip_x: f64,
}

/// Samples every strip meeting `window` at `samples` abscissas clustered toward
/// the strip ends; rows with `|x| > clip_x` are dropped.
pub fn emit_curves(model: &FieldModel, window: (f64, f64), seeds: &[f64], samples: usize, clip_x: f64) -> CurveTable {
    let (a, b) = window;
    let mut rows = Vec::new();
    for strip in model.strips() {
        let lo = strip.lower.max(a);
        let hi = strip.upper.min(b);
        if lo >= hi {
            continue;
        }
        let Ok((_, base)) = model.point(strip.theta) else {
            continue;
        };
        let rho_base = model.rho(&base);
        let ts: Vec<f64> = (0..samples)
            .map(|i| {
                let u = (i as f64 + 0.5) / samples as f64;
                lo + (hi - lo) * 0.5 * (1.0 - (std::f64::consts::PI * u).cos())
            })
            .collect();
        for &seed in seeds {
            for &t in &ts {
                let Ok((_, pt)) = model.point(t) else {
                    continue;
                };
                let x = seed + model.rho(&pt) - rho_base;
                if x.is_finite() && x.abs() <= clip_x {
                    rows.push(CurveRow {
                        seed,
                        strip: strip.index,
                        t,
                        x,
                    });
                }
            }
        }
    }
    let roots = model.roots().iter().copied().filter(|r| *r > a && *r < b).collect();
    CurveTable {
        rows,
        roots,
        window,
        clip_x,
    }
}

impl CurveTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,t,x\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.seed, r.t, r.x);
        }
        out
    }

    /// Polyline per seed and strip, axes, and dashed lines at the roots.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (800.0, 500.0, 40.0);
        let (a, b) = self.window;
        let c = self.clip_x;
        let sx = |t: f64| pad + (t - a) / (b - a) * (w - 2.0 * pad);
        let sy = |x: f64| h / 2.0 - x / c * (h / 2.0 - pad);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            sy(0.0),
            w - pad,
            sy(0.0)
        );
        if a < 0.0 && b > 0.0 {
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{pad}" x2="{}" y2="{}" stroke="black"/>"#,
                sx(0.0),
                sx(0.0),
                h - pad
            );
        }
        for &r in &self.roots {
            let _ = writeln!(
                s,
                r##"<line x1="{0}" y1="{pad}" x2="{0}" y2="{1}" stroke="#888" stroke-dasharray="6,4"/>"##,
                sx(r),
                h - pad
            );
        }
        let mut i = 0;
        while i < self.rows.len() {
            let (seed, strip) = (self.rows[i].seed, self.rows[i].strip);
            let mut j = i;
            while j < self.rows.len() && self.rows[j].seed == seed && self.rows[j].strip == strip {
                j += 1;
            }
            let pts: Vec<String> = self.rows[i..j]
                .iter()
                .map(|r| format!("{:.2},{:.2}", sx(r.t), sy(r.x)))
                .collect();
            let _ = writeln!(
                s,
                r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.2" points="{}"/>"##,
                pts.join(" ")
            );
            i = j;
        }
        s.push_str("</svg>\n");
        s
    }
}
