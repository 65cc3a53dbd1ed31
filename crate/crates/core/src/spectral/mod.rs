//! Partial Fourier transform in `x`, weighted Sobolev norms, the multiplier
//! solver for `(1 - t²)∂t - 2t∂x + b(D)` and Picard iteration for small
//! zero-order perturbations.

mod cheb;
mod multiplier;
mod picard;

pub use multiplier::{
    mode_solve, multiplier_inverse, multiplier_residual, MultiplierSolution, MultiplierSymbol, PhaseConvention, Symbol,
};
pub use picard::{
    operator_norm_probe, picard_solve, GridField, GridNode, GridOperator, Identity, InverseAfterSymbol, Perturbation,
    PicardConfig, PicardGrid, PicardGridOptions, PicardSolution, ProbeReport, Scale, SymbolAfterInverse,
    RESIDUAL_MARGIN,
};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rhs::SobolevParams;

/// Uniform periodic grid `x_j = -X + j dx`, `j < N`, with the transform
/// `ŵ(ξ) = dx Σ w_j e^{-i x_j ξ}` and inverse weighted by `dξ/2π`.
#[derive(Clone)]
pub struct XGrid {
    n: usize,
    half_width: f64,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
    xi: Vec<f64>,
    /// `dx e^{iXξ}`
    forward_phase: Vec<Complex64>,
    /// `e^{-iXξ} / (N dx)`
    inverse_phase: Vec<Complex64>,
}

impl std::fmt::Debug for XGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("XGrid")
            .field("n", &self.n)
            .field("half_width", &self.half_width)
            .finish()
    }
}

impl XGrid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::InvalidInput(format!(
                "grid size must be a power of two, got {n}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid grid half-width {half_width}")));
        }
        let mut planner = FftPlanner::new();
        let dx = 2.0 * half_width / n as f64;
        let xi: Vec<f64> = (0..n)
            .map(|k| {
                let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
                2.0 * PI * kk / (n as f64 * dx)
            })
            .collect();
        let forward_phase = xi.iter().map(|x| Complex64::from_polar(dx, half_width * x)).collect();
        let inverse_phase = xi
            .iter()
            .map(|x| Complex64::from_polar(1.0 / (n as f64 * dx), -half_width * x))
            .collect();
        Ok(XGrid {
            n,
            half_width,
            forward: planner.plan_fft_forward(n),
            backward: planner.plan_fft_inverse(n),
            xi,
            forward_phase,
            inverse_phase,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Frequency of FFT bin `k`.
    pub fn xi(&self, k: usize) -> f64 {
        self.xi[k]
    }

    pub fn xis(&self) -> Vec<f64> {
        self.xi.clone()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|j| f(self.x(j))).collect()
    }

    pub fn forward(&self, w: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = w.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
        for (v, ph) in buf.iter_mut().zip(&self.forward_phase) {
            *v *= ph;
        }
    }

    pub fn inverse(&self, w: &[Complex64]) -> Vec<Complex64> {
        let mut buf = w.to_vec();
        self.inverse_in_place(&mut buf);
        buf
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        for (v, ph) in buf.iter_mut().zip(&self.inverse_phase) {
            *v *= ph;
        }
        self.backward.process(buf);
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, w: &[Complex64]) -> Vec<f64> {
        self.inverse(w).into_iter().map(|c| c.re).collect()
    }

    /// Applies the multiplier `m(ξ)` to real samples.
    pub fn apply_multiplier(&self, w: &[f64], m: impl Fn(f64) -> Complex64) -> Vec<f64> {
        let table: Vec<Complex64> = self.xi.iter().map(|x| m(*x)).collect();
        self.apply_table(w, &table)
    }

    /// [`XGrid::apply_multiplier`] with the symbol tabulated per bin.
    pub fn apply_table(&self, w: &[f64], table: &[Complex64]) -> Vec<f64> {
        let mut h = self.forward(w);
        for (v, m) in h.iter_mut().zip(table) {
            *v *= m;
        }
        self.inverse_real(&h)
    }

    /// `sqrt(dx Σ |w_j|²)`.
    pub fn l2(&self, w: &[f64]) -> f64 {
        (self.dx() * w.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// `sqrt(Σ |ŵ_k|² dξ/2π)`.
    pub fn l2_hat(&self, w: &[Complex64]) -> f64 {
        (w.iter().map(|v| v.norm_sqr()).sum::<f64>() / (self.n as f64 * self.dx())).sqrt()
    }
}

/// Ratio of the edge magnitude to the maximum above which samples leak out of the window.
pub const WINDOW_LEAK: f64 = 1e-8;

/// Largest magnitude at the two ends of the window relative to the maximum.
pub fn edge_ratio(samples: &[f64]) -> f64 {
    let max = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let edge = samples[0].abs().max(samples[samples.len() - 1].abs());
    edge / max
}

/// `‖⟨x⟩^{s2} ⟨D⟩^{s1} f‖_{L²}` of grid samples.
pub fn sobolev_norm(grid: &XGrid, samples: &[f64], params: SobolevParams) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} samples, got {}",
            grid.len(),
            samples.len()
        )));
    }
    let ratio = edge_ratio(samples);
    if ratio > WINDOW_LEAK {
        return Err(Error::WindowLeak { ratio });
    }
    Ok(sobolev_norm_unchecked(grid, samples, params))
}

/// [`sobolev_norm`] without the window check.
pub fn sobolev_norm_unchecked(grid: &XGrid, samples: &[f64], params: SobolevParams) -> f64 {
    let smoothed = if params.s1 == 0.0 {
        samples.to_vec()
    } else {
        grid.apply_multiplier(samples, |xi| Complex64::new((1.0 + xi * xi).powf(0.5 * params.s1), 0.0))
    };
    let weighted: Vec<f64> = if params.s2 == 0.0 {
        smoothed
    } else {
        smoothed
            .iter()
            .enumerate()
            .map(|(j, v)| v * (1.0 + grid.x(j).powi(2)).powf(0.5 * params.s2))
            .collect()
    };
    grid.l2(&weighted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_parseval() {
        let g = XGrid::new(128, 10.0).unwrap();
        let w = g.sample(|x| (-(x - 0.3) * (x - 0.3)).exp() * (2.0 * x).cos());
        let h = g.forward(&w);
        let back = g.inverse_real(&h);
        assert!(w.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-14));
        assert!((g.l2(&w) - g.l2_hat(&h)).abs() < 1e-12);
        // Transform of e^{-x²/2} is √(2π) e^{-ξ²/2}.
        let gauss = g.forward(&g.sample(|x| (-0.5 * x * x).exp()));
        for k in [0, 3, 10, 120] {
            let exact = (2.0 * PI).sqrt() * (-0.5 * g.xi(k).powi(2)).exp();
            assert!((gauss[k] - exact).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn sobolev_norm_examples() {
        let g = XGrid::new(256, 20.0).unwrap();
        let f = g.sample(|x| (-0.5 * x * x).exp());
        let zero = SobolevParams { s1: 0.0, s2: 0.0 };
        assert!((sobolev_norm(&g, &f, zero).unwrap() - PI.powf(0.25)).abs() < 1e-12);
        assert_eq!(sobolev_norm(&g, &vec![0.0; 256], zero).unwrap(), 0.0);
        let two = SobolevParams { s1: 2.0, s2: 0.0 };
        assert!((sobolev_norm(&g, &f, two).unwrap() - (2.75 * PI.sqrt()).sqrt()).abs() < 1e-10);
        let wide = g.sample(|x| (-0.01 * x * x).exp());
        assert!(matches!(sobolev_norm(&g, &wide, zero), Err(Error::WindowLeak { .. })));
    }
}
