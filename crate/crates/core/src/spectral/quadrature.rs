//! Quadrature for the Bochner-type integrals `int_0^inf t^{a-1} H_t g dt`.
//!
//! The range `[t_min, t_max]` is handled by the trapezoid rule in `log t` with
//! Gregory end corrections; `[0, t_min]` by the exact series
//! `sum_n (-1)^n t_min^{n+a} J^n g / (n! (n+a))`; the tail above `t_max` is
//! dropped.

use serde::{Deserialize, Serialize};

use crate::stats;

/// Gregory end-correction coefficients.
const GREGORY: [f64; 6] = [
    1.0 / 12.0,
    1.0 / 24.0,
    19.0 / 720.0,
    3.0 / 160.0,
    863.0 / 60480.0,
    275.0 / 24192.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub points: usize,
    /// Defaults to `h^2/4`.
    pub t_min: Option<f64>,
    /// Defaults to `16 (diam/2)^2`.
    pub t_max: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { points: 64, t_min: None, t_max: None }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weights for `int_{u_0}^{u_n} F(u) du` on `n+1` equispaced nodes.
pub fn gregory_weights(nodes: usize, step: f64) -> Vec<f64> {
    assert!(nodes >= 2);
    let n = nodes - 1;
    let mut w = vec![step; nodes];
    w[0] = 0.5 * step;
    w[n] = 0.5 * step;
    let order = GREGORY.len().min(n / 2);
    for (k1, g) in GREGORY.iter().enumerate().take(order) {
        let k = k1 + 1;
        let sign_start = if k % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..=k {
            let c = binomial(k, i);
            // backward difference at the right end
            let back = if i % 2 == 0 { c } else { -c };
            w[n - i] -= step * g * back;
            // forward difference at the left end
            let fwd = if (k - i) % 2 == 0 { c } else { -c };
            w[i] -= step * g * sign_start * fwd;
        }
    }
    w
}

/// Nodes and weights for `int_{t_min}^{t_max} F(t) dt / t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    pub ts: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> LogGrid {
        let ts = stats::geomspace(t_min, t_max, points);
        let step = (t_max / t_min).ln() / (points - 1) as f64;
        LogGrid { ts, weights: gregory_weights(points, step) }
    }
}
