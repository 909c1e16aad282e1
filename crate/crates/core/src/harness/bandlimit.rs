//! Band-limited approximations `f_j = (chi(2^{-2j} J) - chi(2^{2j} J)) f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lattice::LatticeGroup;
use crate::multiplier::{lowpass_chi, MultiplierSpec};
use crate::norms::{self, LpRoute};
use crate::ops;
use crate::spectral::{apply_multiplier, SpectralRep};
use crate::stats;

pub fn band_limit_approx(rep: &SpectralRep, f: &GridFunction, j: i32) -> Result<GridFunction> {
    if j < 0 {
        return Err(Error::InvalidArgument(format!("band index j = {j} must be nonnegative")));
    }
    apply_multiplier(rep, &MultiplierSpec::Bandlimit { j }, 1.0, f)
}

/// Smallest `j` for which the band multiplier is 1 on every nonzero eigenvalue.
pub fn full_band_index(rep: &SpectralRep) -> Option<i32> {
    let gap = rep.spectral_gap()?;
    let top = rep.lambda_max();
    (0..64).find(|&j| {
        let k = 2f64.powi(2 * j);
        lowpass_chi(top / k) == 1.0 && lowpass_chi(gap * k) == 0.0
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimitReport {
    pub q: f64,
    pub js: Vec<i32>,
    /// `|f_j - f|_2`.
    pub l2_errors: Vec<f64>,
    /// `|f_j|_q / |grad f|_1`.
    pub lq_ratios: Vec<f64>,
    pub lq_norms: Vec<f64>,
    pub lq_of_f: f64,
    /// Slope of `log2` of the ratio against `j`.
    pub fitted_exponent: Option<f64>,
    /// `d (1 - 1/q) - 1` with `d` the local dimension.
    pub predicted_exponent: f64,
    pub l2_nonincreasing: bool,
}

pub fn approx_norm_check(
    g: &LatticeGroup,
    rep: &SpectralRep,
    f: &GridFunction,
    js: &[i32],
    q: f64,
) -> Result<BandLimitReport> {
    if js.is_empty() {
        return Err(Error::InvalidArgument("empty band index list".into()));
    }
    let grad = ops::grad_l1_norm(g, f)?;
    if !(grad > 0.0) {
        return Err(Error::Degenerate("gradient vanishes identically".into()));
    }
    let mut l2 = Vec::with_capacity(js.len());
    let mut lq = Vec::with_capacity(js.len());
    for &j in js {
        let fj = band_limit_approx(rep, f, j)?;
        l2.push(norms::lp_norm(g, &fj.sub(f)?, 2.0, LpRoute::Direct)?);
        lq.push(norms::lp_norm(g, &fj, q, LpRoute::Direct)?);
    }
    let ratios: Vec<f64> = lq.iter().map(|v| v / grad).collect();
    let xs: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.log2()).collect();
    let l2_nonincreasing = l2.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14);
    Ok(BandLimitReport {
        q,
        js: js.to_vec(),
        l2_errors: l2,
        lq_ratios: ratios,
        lq_norms: lq,
        lq_of_f: norms::lp_norm(g, f, q, LpRoute::Direct)?,
        fitted_exponent: if js.len() >= 2 { stats::slope(&xs, &ys) } else { None },
        predicted_exponent: g.local_dim() as f64 * (1.0 - 1.0 / q) - 1.0,
        l2_nonincreasing,
    })
}
