//! Chebyshev interpolation of scalar symbols on `[0, lambda_max]`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sparse::Stencil;

pub const MAX_DEGREE: usize = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    /// Coefficients with `c[0]` already halved.
    pub coeffs: Vec<f64>,
    pub lambda_max: f64,
    /// Sup error against the symbol on the certification grid.
    pub error: f64,
}

fn interpolate(g: &dyn Fn(f64) -> f64, degree: usize, lambda_max: f64) -> Vec<f64> {
    let n = degree;
    let vals: Vec<f64> = (0..=n)
        .map(|k| {
            let x = (std::f64::consts::PI * k as f64 / n as f64).cos();
            g((x + 1.0) * lambda_max / 2.0)
        })
        .collect();
    let mut ext: Vec<Complex64> = Vec::with_capacity(2 * n);
    ext.extend(vals.iter().map(|&v| Complex64::new(v, 0.0)));
    ext.extend(vals[1..n].iter().rev().map(|&v| Complex64::new(v, 0.0)));
    FftPlanner::new().plan_fft_forward(2 * n).process(&mut ext);
    let mut c: Vec<f64> = ext[..=n].iter().map(|z| z.re / n as f64).collect();
    c[0] *= 0.5;
    c[n] *= 0.5;
    c
}

pub fn eval_scalar(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs[1..].iter().rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + x * b1 - b2
}

fn certify(g: &dyn Fn(f64) -> f64, coeffs: &[f64], lambda_max: f64) -> f64 {
    let m = 4 * coeffs.len() + 1;
    let mut err: f64 = 0.0;
    for i in 0..m {
        // mix of Chebyshev-clustered and uniform points
        let xc = (std::f64::consts::PI * (i as f64 + 0.5) / m as f64).cos();
        let xu = -1.0 + 2.0 * i as f64 / (m - 1) as f64;
        for x in [xc, xu] {
            let l = (x + 1.0) * lambda_max / 2.0;
            err = err.max((eval_scalar(coeffs, x) - g(l)).abs());
        }
    }
    err
}

/// Fits `g` on `[0, lambda_max]`. With `degree = None` the degree doubles
/// until the certified error drops below `tol`.
pub fn fit(g: &dyn Fn(f64) -> f64, lambda_max: f64, degree: Option<usize>, tol: f64) -> Result<ChebSeries> {
    let mut d = degree.unwrap_or(16).max(2);
    loop {
        let coeffs = interpolate(g, d, lambda_max);
        let error = certify(g, &coeffs, lambda_max);
        if error <= tol {
            return Ok(ChebSeries { coeffs, lambda_max, error });
        }
        if degree.is_some() || d >= MAX_DEGREE {
            return Err(Error::Chebyshev { tol, achieved: error, degree: d });
        }
        d *= 2;
    }
}

/// `p(J) x` by the Clenshaw recurrence on the sparse operator.
pub fn apply(series: &ChebSeries, op: &Stencil, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let a = 2.0 / series.lambda_max;
    let mut b1 = vec![0.0; n];
    let mut b2 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for &c in series.coeffs[1..].iter().rev() {
        op.apply_into(&b1, &mut tmp);
        for i in 0..n {
            // 2 (a J - I) b1
            let b0 = c * x[i] + 2.0 * (a * tmp[i] - b1[i]) - b2[i];
            b2[i] = b1[i];
            b1[i] = b0;
        }
    }
    op.apply_into(&b1, &mut tmp);
    (0..n).map(|i| series.coeffs[0] * x[i] + (a * tmp[i] - b1[i]) - b2[i]).collect()
}

#[cfg(test)]
fn unit(l: f64, lambda_max: f64) -> f64 {
    2.0 * l / lambda_max - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_to_tolerance() {
        let g = |l: f64| (-0.3 * l).exp();
        let s = fit(&g, 100.0, None, 1e-10).unwrap();
        assert!(s.error <= 1e-10);
        let x = unit(37.0, 100.0);
        assert!((eval_scalar(&s.coeffs, x) - g(37.0)).abs() < 1e-10);
    }

    #[test]
    fn fixed_degree_reports_failure() {
        let g = |l: f64| (-1e3 * l).exp();
        assert!(matches!(fit(&g, 100.0, Some(8), 1e-8), Err(Error::Chebyshev { .. })));
    }

    #[test]
    fn operator_clenshaw_matches_scalar_on_diagonal() {
        let op = Stencil::from_rows(vec![vec![(0, 1.0)], vec![(1, 5.0)], vec![(2, 9.5)]]);
        let g = |l: f64| 1.0 / (1.0 + l);
        let s = fit(&g, 10.0, None, 1e-12).unwrap();
        let y = apply(&s, &op, &[1.0, 2.0, 3.0]);
        for (i, l) in [1.0, 5.0, 9.5].iter().enumerate() {
            assert!((y[i] - (i + 1) as f64 * g(*l)).abs() < 1e-11);
        }
    }
}
