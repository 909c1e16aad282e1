//! Replays of the layer-cake arguments for the `p = 1` inequalities.

use serde::{Deserialize, Serialize};

use super::params::{SoboParams, Variant};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lattice::LatticeGroup;
use crate::norms::{self, ThermicGrid};
use crate::ops;
use crate::spectral::SpectralRep;
use crate::stats;

/// Geometric alpha grid relative to `max |g|` of the normalized function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        AlphaGrid { lo: 0.01, hi: 1.0, per_decade: 16 }
    }
}

impl AlphaGrid {
    pub fn points(&self, scale: f64) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.per_decade > 0) {
            return Err(Error::InvalidArgument(format!("bad alpha grid {self:?}")));
        }
        Ok(stats::geomspace_per_decade(self.lo * scale, self.hi * scale, self.per_decade))
    }
}

/// A function divided by its thermic Besov norm, certified on the thermic
/// grid together with every `t_alpha`.
pub(crate) struct Normalized {
    pub function: GridFunction,
    pub factor: f64,
    pub alphas: Vec<f64>,
    pub times: Vec<f64>,
}

/// `t_alpha = alpha^{-2/order}` makes `|H_{t_alpha} h|_inf <= alpha` once the
/// Besov norm of order `order` is at most 1.
pub(crate) fn normalize(
    rep: &SpectralRep,
    h: &GridFunction,
    order: f64,
    grid: &ThermicGrid,
    alpha: &AlphaGrid,
) -> Result<Normalized> {
    let first = norms::besov_thermic_norm(rep, h, order, grid)?.value;
    if !(first > 0.0) {
        return Err(Error::Degenerate("normalization failed: besov norm vanishes".into()));
    }
    let h1 = h.scaled(1.0 / first);
    let alphas = alpha.points(h1.max_abs())?;
    let times: Vec<f64> = alphas.iter().map(|a| a.powf(-2.0 / order)).collect();
    let mut union = grid.points(rep);
    union.extend_from_slice(&times);
    let second = norms::besov_thermic_norm_at(rep, &h1, order, &union)?.value;
    Ok(Normalized { function: h1.scaled(1.0 / second), factor: first * second, alphas, times })
}

fn measure_where(w: f64, values: impl Iterator<Item = bool>) -> f64 {
    w * values.filter(|b| *b).count() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTrace {
    pub params: SoboParams,
    /// Factor the input was divided by.
    pub normalization: f64,
    pub grad_l1: f64,
    pub alphas: Vec<f64>,
    pub t_alphas: Vec<f64>,
    /// `|H_{t_alpha} g|_inf / alpha`, at most 1 by construction.
    pub sup_bound: Vec<f64>,
    pub sup_bound_violations: usize,
    pub inclusion_violations: Vec<usize>,
    /// `alpha^q mu{|g| > 2 alpha} / |grad f|_1`.
    pub values: Vec<f64>,
    /// `|g - H_{t_alpha} g|_1 / (t_alpha^{(1-s)/2} |grad f|_1)`.
    pub poincare_ratios: Vec<f64>,
    /// Alphas where the Chebyshev step `alpha mu{|g - H g| > alpha} <= |g - H g|_1` fails.
    pub chebyshev_violations: usize,
    pub constant: f64,
}

/// Weak `p = 1` argument applied to `g = J^{s/2} f`.
pub fn weak_p1_trace(
    g: &LatticeGroup,
    rep: &SpectralRep,
    f: &GridFunction,
    params: &SoboParams,
    grid: &ThermicGrid,
    alpha: &AlphaGrid,
) -> Result<WeakTrace> {
    if params.variant != Variant::WeakP1 {
        return Err(Error::InvalidArgument("weak trace needs weak_p1 parameters".into()));
    }
    f.ensure_on(g)?;
    let s = params.s;
    let order = params.beta + s;
    let lifted = norms::half_power(rep, f, s)?;
    let norm = normalize(rep, &lifted, order, grid, alpha)?;
    let gfun = &norm.function;
    let grad = ops::grad_l1_norm(g, f)? / norm.factor;
    if !(grad > 0.0) {
        return Err(Error::Degenerate("gradient vanishes identically".into()));
    }
    let w = g.haar_weight();
    let spec = rep.transform(gfun)?;
    let gv = gfun.values();
    let count = norm.alphas.len();
    let mut trace = WeakTrace {
        params: *params,
        normalization: norm.factor,
        grad_l1: grad,
        alphas: norm.alphas.clone(),
        t_alphas: norm.times.clone(),
        sup_bound: vec![0.0; count],
        sup_bound_violations: 0,
        inclusion_violations: vec![0; count],
        values: vec![0.0; count],
        poincare_ratios: vec![0.0; count],
        chebyshev_violations: 0,
        constant: 0.0,
    };
    let times = &norm.times;
    rep.synthesize_each(&spec, count, &|k, l| (-times[k] * l).exp(), Some(1.0), &mut |k, heat| {
        let a = norm.alphas[k];
        let sup = heat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        trace.sup_bound[k] = sup / a;
        let mut violations = 0;
        let mut l1 = 0.0;
        let mut far = 0usize;
        for (x, h) in gv.iter().zip(heat) {
            let d = (x - h).abs();
            l1 += w * d;
            if d > a {
                far += 1;
            }
            if x.abs() > 2.0 * a && d <= a {
                violations += 1;
            }
        }
        trace.inclusion_violations[k] = violations;
        let mu = measure_where(w, gv.iter().map(|x| x.abs() > 2.0 * a));
        trace.values[k] = a.powf(params.q) * mu / grad;
        trace.poincare_ratios[k] = l1 / (times[k].powf((1.0 - s) / 2.0) * grad);
        if a * w * far as f64 > l1 * (1.0 + 1e-12) {
            trace.chebyshev_violations += 1;
        }
    })?;
    trace.sup_bound_violations = trace.sup_bound.iter().filter(|r| **r > 1.0 + 1e-9).count();
    trace.constant = trace.values.iter().copied().fold(0.0, f64::max);
    Ok(trace)
}

impl WeakTrace {
    /// Sup of the measured values over alphas in `[lo, hi]`.
    pub fn constant_on(&self, lo: f64, hi: f64) -> f64 {
        self.alphas
            .iter()
            .zip(&self.values)
            .filter(|(a, _)| **a >= lo * (1.0 - 1e-12) && **a <= hi * (1.0 + 1e-12))
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    }
}
