//! The thresholding map and the strong `p = 1` layer-cake argument.

use serde::{Deserialize, Serialize};

use super::params::{SoboParams, Variant};
use super::weak::{normalize, AlphaGrid};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lattice::{Field, LatticeGroup};
use crate::norms::{self, LpRoute, ThermicGrid};
use crate::ops;
use crate::spectral::{heat_apply, SpectralRep};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub alpha: f64,
    /// Saturation multiple, larger than 10.
    pub m: f64,
}

impl ThresholdSpec {
    pub fn new(alpha: f64, m: f64) -> Result<ThresholdSpec> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("threshold alpha = {alpha} must be positive")));
        }
        if !(m > 10.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(format!("saturation M = {m} must exceed 10")));
        }
        Ok(ThresholdSpec { alpha, m })
    }

    /// Odd map: 0 below `alpha`, `|v| - alpha` up to `M alpha`, then `(M-1) alpha`.
    pub fn map(&self, v: f64) -> f64 {
        let a = v.abs();
        let out = if a <= self.alpha {
            0.0
        } else if a <= self.m * self.alpha {
            a - self.alpha
        } else {
            (self.m - 1.0) * self.alpha
        };
        out.copysign(v)
    }

    /// Linearity region of a value, or `None` on a boundary.
    fn region(&self, v: f64) -> Option<i8> {
        let (a, lo, hi) = (v.abs(), self.alpha, self.m * self.alpha);
        let sign = if v < 0.0 { -1 } else { 1 };
        if a < lo {
            Some(0)
        } else if a > lo && a < hi {
            Some(sign)
        } else if a > hi {
            Some(2 * sign)
        } else {
            None
        }
    }
}

pub fn threshold_apply(f: &GridFunction, spec: &ThresholdSpec) -> GridFunction {
    f.map(|v| spec.map(v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// Nodes in `{|f| > 5 alpha}` outside `{|f_alpha| > 4 alpha}`.
    pub superlevel_violations: usize,
    /// Nodes with `|f| <= M alpha` and `|f - f_alpha| > alpha`.
    pub closeness_violations: usize,
    /// Nodes whose whole stencil lies inside one linearity region.
    pub gradient_nodes_checked: usize,
    pub gradient_violations: usize,
}

impl ThresholdReport {
    pub fn clean(&self) -> bool {
        self.superlevel_violations == 0 && self.closeness_violations == 0 && self.gradient_violations == 0
    }
}

pub fn threshold_lemma_check(
    g: &LatticeGroup,
    f: &GridFunction,
    f_alpha: &GridFunction,
    spec: &ThresholdSpec,
) -> Result<ThresholdReport> {
    f.ensure_on(g)?;
    f_alpha.ensure_same(f)?;
    let (fv, tv) = (f.values(), f_alpha.values());
    let a = spec.alpha;
    let mut report =
        ThresholdReport { superlevel_violations: 0, closeness_violations: 0, gradient_nodes_checked: 0, gradient_violations: 0 };
    for (x, y) in fv.iter().zip(tv) {
        if x.abs() > 5.0 * a && y.abs() <= 4.0 * a {
            report.superlevel_violations += 1;
        }
        if x.abs() <= spec.m * a && (x - y).abs() > a * (1.0 + 1e-12) {
            report.closeness_violations += 1;
        }
    }
    let grad_f = ops::gradient(g, f)?;
    let grad_t = ops::gradient(g, f_alpha)?;
    let tol = 1e-9 * f.max_abs().max(a) / g.spacing();
    for v in 0..g.node_count() {
        let Some(r) = spec.region(fv[v]) else { continue };
        let mut inside = true;
        'fields: for j in 0..g.field_count() {
            for (c, _) in g.field_stencil(Field::Left(j))?.row(v) {
                if spec.region(fv[c]) != Some(r) {
                    inside = false;
                    break 'fields;
                }
            }
        }
        if !inside {
            continue;
        }
        report.gradient_nodes_checked += 1;
        let active = if r == 1 || r == -1 { 1.0 } else { 0.0 };
        let bad = (0..g.field_count()).any(|j| (grad_t[j].values()[v] - active * grad_f[j].values()[v]).abs() > tol);
        if bad {
            report.gradient_violations += 1;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongTrace {
    pub params: SoboParams,
    pub m: f64,
    pub normalization: f64,
    pub grad_l1: f64,
    pub lq_power: f64,
    pub alphas: Vec<f64>,
    pub t_alphas: Vec<f64>,
    /// `|H_{t_alpha} f|_inf / alpha`.
    pub sup_bound: Vec<f64>,
    pub sup_bound_violations: usize,
    /// Nodes of `A_alpha` outside `B_alpha` union `C_alpha`, per alpha.
    pub inclusion_violations: Vec<usize>,
    /// Lemma 14 property (1) failures, per alpha.
    pub superlevel_violations: Vec<usize>,
    pub measure_a: Vec<f64>,
    pub measure_b: Vec<f64>,
    pub measure_c: Vec<f64>,
    /// `mu{|f| > 5 alpha}`.
    pub measure_level: Vec<f64>,
    pub i1: f64,
    pub i2: f64,
    /// `int mu{|f| > 5 alpha} d(alpha^q)` on the grid.
    pub layer_integral: f64,
    /// `I1 / (q log M |grad f|_1)`.
    pub i1_constant: f64,
    /// `I2 M^{q-1} (q-1) / (q |f|_q^q)`.
    pub i2_constant: f64,
    /// `|layer - |f|_q^q / 5^q| / (|f|_q^q / 5^q)`.
    pub assembly_defect: f64,
    pub assembly_holds: bool,
}

/// `int F d(alpha^q)` by the trapezoid rule in `alpha^q` plus `F(alpha_0) alpha_0^q`
/// for the piece below the grid.
fn integrate_power(alphas: &[f64], values: &[f64], q: f64) -> f64 {
    let mut acc = values[0] * alphas[0].powf(q);
    for k in 0..alphas.len() - 1 {
        acc += 0.5 * (values[k] + values[k + 1]) * (alphas[k + 1].powf(q) - alphas[k].powf(q));
    }
    acc
}

pub fn strong_p1_proof_trace(
    g: &LatticeGroup,
    rep: &SpectralRep,
    f: &GridFunction,
    params: &SoboParams,
    m: f64,
    grid: &ThermicGrid,
    alpha: &AlphaGrid,
) -> Result<StrongTrace> {
    if params.variant != Variant::StrongP1 {
        return Err(Error::InvalidArgument("strong trace needs strong_p1 parameters".into()));
    }
    ThresholdSpec::new(1.0, m)?;
    f.ensure_on(g)?;
    let q = params.q;
    let norm = normalize(rep, f, params.beta, grid, alpha)?;
    let fun = &norm.function;
    let grad = ops::grad_l1_norm(g, fun)?;
    if !(grad > 0.0) {
        return Err(Error::Degenerate("gradient vanishes identically".into()));
    }
    let w = g.haar_weight();
    let lq_power = norms::lp_norm(g, fun, q, LpRoute::Direct)?.powf(q);
    let n_alpha = norm.alphas.len();
    let mut tr = StrongTrace {
        params: *params,
        m,
        normalization: norm.factor,
        grad_l1: grad,
        lq_power,
        alphas: norm.alphas.clone(),
        t_alphas: norm.times.clone(),
        sup_bound: Vec::with_capacity(n_alpha),
        sup_bound_violations: 0,
        inclusion_violations: Vec::with_capacity(n_alpha),
        superlevel_violations: Vec::with_capacity(n_alpha),
        measure_a: Vec::with_capacity(n_alpha),
        measure_b: Vec::with_capacity(n_alpha),
        measure_c: Vec::with_capacity(n_alpha),
        measure_level: Vec::with_capacity(n_alpha),
        i1: 0.0,
        i2: 0.0,
        layer_integral: 0.0,
        i1_constant: 0.0,
        i2_constant: 0.0,
        assembly_defect: 0.0,
        assembly_holds: false,
    };
    let fv = fun.values();
    for (&a, &t) in norm.alphas.iter().zip(&norm.times) {
        let spec = ThresholdSpec::new(a, m)?;
        let fa = threshold_apply(fun, &spec);
        let hf = heat_apply(rep, t, fun)?;
        let hfa = heat_apply(rep, t, &fa)?;
        tr.sup_bound.push(hf.max_abs() / a);
        let (mut na, mut nb, mut nc, mut nl, mut bad, mut bad1) = (0usize, 0usize, 0usize, 0usize, 0usize, 0usize);
        for x in 0..fv.len() {
            let fa_x = fa.values()[x];
            let in_a = fa_x.abs() > 4.0 * a;
            let in_b = (fa_x - hfa.values()[x]).abs() > a;
            let in_c = (hfa.values()[x] - hf.values()[x]).abs() > 2.0 * a;
            let in_level = fv[x].abs() > 5.0 * a;
            na += in_a as usize;
            nb += in_b as usize;
            nc += in_c as usize;
            nl += in_level as usize;
            if in_a && !(in_b || in_c) {
                bad += 1;
            }
            if in_level && !in_a {
                bad1 += 1;
            }
        }
        tr.inclusion_violations.push(bad);
        tr.superlevel_violations.push(bad1);
        tr.measure_a.push(w * na as f64);
        tr.measure_b.push(w * nb as f64);
        tr.measure_c.push(w * nc as f64);
        tr.measure_level.push(w * nl as f64);
    }
    tr.sup_bound_violations = tr.sup_bound.iter().filter(|r| **r > 1.0 + 1e-9).count();
    tr.i1 = integrate_power(&tr.alphas, &tr.measure_b, q);
    tr.i2 = integrate_power(&tr.alphas, &tr.measure_c, q);
    tr.layer_integral = integrate_power(&tr.alphas, &tr.measure_level, q);
    tr.i1_constant = tr.i1 / (q * m.ln() * grad);
    tr.i2_constant = tr.i2 * m.powf(q - 1.0) * (q - 1.0) / (q * lq_power);
    let exact = lq_power / 5f64.powf(q);
    tr.assembly_defect = (tr.layer_integral - exact).abs() / exact;
    tr.assembly_holds = tr.layer_integral <= (tr.i1 + tr.i2) * (1.0 + 1e-12);
    Ok(tr)
}
