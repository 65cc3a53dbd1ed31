//! Chebyshev–Lobatto panels: cumulative integration and differentiation matrices.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct ChebPanel {
    /// Ascending nodes on `[-1, 1]`.
    pub nodes: Vec<f64>,
    /// `integ[i][j]`: weight of sample `j` in `∫_{-1}^{x_i}`.
    pub integ: Vec<Vec<f64>>,
    pub diff: Vec<Vec<f64>>,
    /// Clenshaw–Curtis weights, the last row of `integ`.
    pub weights: Vec<f64>,
}

impl ChebPanel {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3);
        let m = n - 1;
        let nodes: Vec<f64> = (0..n).map(|j| -(PI * j as f64 / m as f64).cos()).collect();
        let theta: Vec<f64> = nodes.iter().map(|x| x.clamp(-1.0, 1.0).acos()).collect();
        let cheb = |k: usize, j: usize| (k as f64 * theta[j]).cos();

        // Values to coefficients: a_k = (2/m) Σ'' f_j T_k(x_j), halved at k = 0, m.
        let mut to_coef = vec![vec![0.0; n]; n];
        for (k, row) in to_coef.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let ends = if j == 0 || j == m { 0.5 } else { 1.0 };
                let kk = if k == 0 || k == m { 0.5 } else { 1.0 };
                *v = 2.0 / m as f64 * ends * kk * cheb(k, j);
            }
        }
        // Antiderivative coefficients of T_k, one degree higher.
        let mut anti = vec![vec![0.0; n + 1]; n];
        for (k, row) in anti.iter_mut().enumerate() {
            match k {
                0 => row[1] = 1.0,
                1 => row[2] = 0.25,
                _ => {
                    row[k + 1] += 0.5 / (k + 1) as f64;
                    row[k - 1] -= 0.5 / (k - 1) as f64;
                }
            }
        }
        let eval_series = |c: &[f64], x: f64| {
            let th = x.clamp(-1.0, 1.0).acos();
            c.iter()
                .enumerate()
                .map(|(k, a)| a * (k as f64 * th).cos())
                .sum::<f64>()
        };
        let mut integ = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut c = vec![0.0; n + 1];
            for k in 0..n {
                for (l, v) in anti[k].iter().enumerate() {
                    c[l] += to_coef[k][j] * v;
                }
            }
            let base = eval_series(&c, -1.0);
            for i in 0..n {
                integ[i][j] = if i == 0 { 0.0 } else { eval_series(&c, nodes[i]) - base };
            }
        }
        let weights = integ[m].clone();

        let c = |i: usize| if i == 0 || i == m { 2.0 } else { 1.0 };
        let mut diff = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    diff[i][j] = c(i) / c(j) * sign / (nodes[i] - nodes[j]);
                    s += diff[i][j];
                }
            }
            diff[i][i] = -s;
        }
        ChebPanel {
            nodes,
            integ,
            diff,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
}
