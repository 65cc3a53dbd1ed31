//! Dense least squares by Householder QR.

/// Least-squares fit of `y ≈ X β`; returns `β` and the coefficient of determination.
///
/// Columns are scaled to unit norm before factorisation. Returns `None` when
/// the design matrix is rank deficient.
#[allow(clippy::needless_range_loop)]
pub fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = y.len();
    let n = design.first()?.len();
    if m < n || design.len() != m {
        return None;
    }
    let mut a: Vec<Vec<f64>> = design.to_vec();
    let scales: Vec<f64> = (0..n)
        .map(|j| a.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    if scales.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return None;
    }
    for r in a.iter_mut() {
        for j in 0..n {
            r[j] /= scales[j];
        }
    }
    let mut b = y.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm < 1e-13 {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in k..n {
            let s: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum::<f64>() * 2.0 / vv;
            for i in k..m {
                a[i][j] -= s * v[i - k];
            }
        }
        let s: f64 = (k..m).map(|i| v[i - k] * b[i]).sum::<f64>() * 2.0 / vv;
        for i in k..m {
            b[i] -= s * v[i - k];
        }
    }
    let mut beta = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * beta[j]).sum();
        beta[k] = (b[k] - s) / a[k][k];
    }
    for j in 0..n {
        beta[j] /= scales[j];
    }
    let mean = y.iter().sum::<f64>() / m as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let ss_res: f64 = design
        .iter()
        .zip(y)
        .map(|(row, v)| {
            let pred: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
            (v - pred) * (v - pred)
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some((beta, r2))
}

/// Straight-line fit `y ≈ slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let design: Vec<Vec<f64>> = x.iter().map(|&v| vec![v, 1.0]).collect();
    least_squares(&design, y).map(|(b, r2)| (b[0], b[1], r2))
}
