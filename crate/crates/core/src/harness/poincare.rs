//! The modified Poincare estimate and its proof decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lattice::LatticeGroup;
use crate::multiplier::MultiplierSpec;
use crate::norms::{self, LpRoute};
use crate::ops;
use crate::spectral::{apply_multiplier, kernel_of, SpectralRep};
use crate::stats;

fn check_order(s: f64) -> Result<()> {
    if (0.0..1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("poincare order must satisfy 0 <= s < 1, got {s}")))
    }
}

fn nonzero_gradient(g: &LatticeGroup, f: &GridFunction) -> Result<f64> {
    let grad = ops::grad_l1_norm(g, f)?;
    if grad > 0.0 {
        Ok(grad)
    } else {
        Err(Error::Degenerate("gradient vanishes identically".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareCurve {
    pub s: f64,
    pub grad_l1: f64,
    pub ts: Vec<f64>,
    /// `|J^{s/2} f - H_t J^{s/2} f|_1 / (t^{(1-s)/2} |grad f|_1)`.
    pub ratios: Vec<f64>,
    pub sup: f64,
    pub argmax_t: f64,
    /// Slope of `log ratio` against `log t` over the lowest decade of the grid.
    pub small_t_slope: Option<f64>,
}

pub fn poincare_ratio(
    g: &LatticeGroup,
    rep: &SpectralRep,
    f: &GridFunction,
    s: f64,
    ts: &[f64],
) -> Result<PoincareCurve> {
    check_order(s)?;
    f.ensure_on(g)?;
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("time grid must be nonempty and positive".into()));
    }
    let grad = nonzero_gradient(g, f)?;
    let spec = rep.transform(f)?;
    let w = g.haar_weight();
    let mut ratios = vec![0.0; ts.len()];
    let symbol = |k: usize, l: f64| l.powf(s / 2.0) * -(-ts[k] * l).exp_m1();
    rep.synthesize_each(&spec, ts.len(), &symbol, Some(0.0), &mut |k, v| {
        let l1: f64 = w * v.iter().map(|x| x.abs()).sum::<f64>();
        ratios[k] = l1 / (ts[k].powf((1.0 - s) / 2.0) * grad);
    })?;
    let (arg, sup) = ratios.iter().enumerate().fold((0, 0.0), |(i, m), (k, r)| if *r > m { (k, *r) } else { (i, m) });
    let t_lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let (xs, ys): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(&ratios)
        .filter(|(t, r)| **t <= 10.0 * t_lo && **r > 0.0)
        .map(|(t, r)| (t.ln(), r.ln()))
        .unzip();
    Ok(PoincareCurve {
        s,
        grad_l1: grad,
        ts: ts.to_vec(),
        ratios,
        sup,
        argmax_t: ts[arg],
        small_t_slope: if xs.len() >= 3 { stats::slope(&xs, &ys) } else { None },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareTrace {
    pub s: f64,
    pub t: f64,
    /// `|part|_1 / (t^{(1-s)/2} |grad f|_1)` for the `m0`, `m_a` and `m_b` pieces.
    pub m0_part: f64,
    pub ma_part: f64,
    pub mb_part: f64,
    /// `max |P0 + Pa - Pb - (J^{s/2} f - H_t J^{s/2} f)| / max |J^{s/2} f - H_t J^{s/2} f|`.
    pub sum_defect: f64,
    pub js: Vec<i32>,
    /// `|grad~ K_{j,t}|_1` with `K_{j,t}` the kernel of the `j`-th dyadic piece.
    pub dyadic_gradients: Vec<f64>,
    /// Slope of `log2 |grad~ K_{j,t}|_1` against `j`.
    pub dyadic_slope: Option<f64>,
}

pub fn poincare_proof_trace(
    g: &LatticeGroup,
    rep: &SpectralRep,
    f: &GridFunction,
    s: f64,
    t: f64,
    js: &[i32],
) -> Result<PoincareTrace> {
    check_order(s)?;
    if !(t > 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let grad = nonzero_gradient(g, f)?;
    let jf = ops::sub_laplacian_apply(g, f)?;
    let pre = t.powf(1.0 - s / 2.0);
    let part = |m: MultiplierSpec| -> Result<GridFunction> { Ok(apply_multiplier(rep, &m, t, &jf)?.scaled(pre)) };
    let p0 = part(MultiplierSpec::M0 { s })?;
    let pa = part(MultiplierSpec::MA { s })?;
    let pb = part(MultiplierSpec::MB { s })?;
    let direct = crate::spectral::apply_function(rep, &|l| l.powf(s / 2.0) * -(-t * l).exp_m1(), Some(0.0), f)?;
    let recombined = p0.add(&pa)?.sub(&pb)?;
    let scale = direct.max_abs();
    let sum_defect = if scale > 0.0 { recombined.max_abs_diff(&direct) / scale } else { recombined.max_abs() };
    let norm = t.powf((1.0 - s) / 2.0) * grad;
    let l1 = |h: &GridFunction| norms::lp_norm(g, h, 1.0, LpRoute::Direct);
    let mut dyadic = Vec::with_capacity(js.len());
    for &j in js {
        let k = kernel_of(rep, &MultiplierSpec::DyadicPiece { s }, t * 2f64.powi(-j))?;
        dyadic.push(ops::right_grad_l1_norm(g, &k)?);
    }
    let xs: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let ys: Vec<f64> = dyadic.iter().map(|v| v.log2()).collect();
    Ok(PoincareTrace {
        s,
        t,
        m0_part: l1(&p0)? / norm,
        ma_part: l1(&pa)? / norm,
        mb_part: l1(&pb)? / norm,
        sum_defect,
        js: js.to_vec(),
        dyadic_gradients: dyadic,
        dyadic_slope: if js.len() >= 2 { stats::slope(&xs, &ys) } else { None },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelGradientSweep {
    pub ts: Vec<f64>,
    /// `|grad~ M^{(0)}_t|_1`.
    pub norms: Vec<f64>,
    pub slope: Option<f64>,
}

/// `t -> |grad~ M^{(0)}_t|_1` and its log-log slope.
pub fn m0_gradient_sweep(g: &LatticeGroup, rep: &SpectralRep, s: f64, ts: &[f64]) -> Result<KernelGradientSweep> {
    check_order(s)?;
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let k = kernel_of(rep, &MultiplierSpec::M0 { s }, t)?;
        out.push(ops::right_grad_l1_norm(g, &k)?);
    }
    Ok(KernelGradientSweep { ts: ts.to_vec(), slope: stats::loglog_slope(ts, &out), norms: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{FamilyKind, FamilySpec};
    use crate::lattice::{build_lattice, GroupFamily, GroupSpec};
    use crate::spectral::{decompose, SpectralMode};

    fn setup() -> (LatticeGroup, SpectralRep, GridFunction) {
        let g = build_lattice(GroupSpec::new(GroupFamily::Euclidean(1), 16.0, 128)).unwrap();
        let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
        let f = FamilySpec::new(FamilyKind::Gaussian { width: 1.0 }).member(&g, 1.0).unwrap();
        (g, rep, f)
    }

    #[test]
    fn ratio_is_bounded_and_flat_at_small_t() {
        let (g, rep, f) = setup();
        let ts = stats::geomspace(0.01, 10.0, 24);
        let c = poincare_ratio(&g, &rep, &f, 0.5, &ts).unwrap();
        assert!(c.sup.is_finite() && c.sup > 0.0);
        assert!(c.small_t_slope.unwrap() > -0.05);
        assert!(poincare_ratio(&g, &rep, &f, 1.0, &ts).is_err());
    }

    #[test]
    fn pieces_recombine() {
        let (g, rep, f) = setup();
        let tr = poincare_proof_trace(&g, &rep, &f, 0.0, 0.5, &[0, 1, 2]).unwrap();
        assert!(tr.sum_defect < 1e-10, "{}", tr.sum_defect);
        assert_eq!(tr.dyadic_gradients.len(), 3);
    }

    #[test]
    fn constant_input_is_degenerate() {
        let (g, rep, _) = setup();
        let c = GridFunction::constant(&g, 1.0);
        assert!(matches!(poincare_ratio(&g, &rep, &c, 0.0, &[1.0]), Err(Error::Degenerate(_))));
    }
}
