//! Best-constant search over a dilation family.

use serde::{Deserialize, Serialize};

use super::params::{SoboParams, Variant};
use super::poincare::poincare_ratio;
use super::report::SweepPoint;
use super::sobolev::{check_improved_sobolev_with, CheckOptions};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::lattice::LatticeGroup;
use crate::spectral::SpectralRep;

const GOLDEN_STEPS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestConstant {
    pub estimate: f64,
    pub argmax_lambda: f64,
    pub sweep_max: f64,
    pub sweep: Vec<SweepPoint>,
    pub refinement: Vec<SweepPoint>,
    /// The sweep maximum sits strictly inside the dilation grid.
    pub interior: bool,
}

/// The measured ratio of one member; the Poincare variant uses the sup over
/// the thermic time grid.
pub fn member_ratio(
    g: &LatticeGroup,
    rep: &SpectralRep,
    family: &FamilySpec,
    lambda: f64,
    params: &SoboParams,
    opts: &CheckOptions,
) -> Result<Option<f64>> {
    let f = family.member(g, lambda)?;
    if params.variant == Variant::Poincare {
        if f.is_zero() {
            return Ok(None);
        }
        return Ok(Some(poincare_ratio(g, rep, &f, params.s, &opts.grid.points(rep))?.sup));
    }
    Ok(check_improved_sobolev_with(g, rep, &f, params, opts)?.ratio)
}

/// Exhaustive sweep over `family.dilations`, then golden-section search in
/// `log lambda` on the bracket around the sweep maximum.
pub fn estimate_best_constant(
    g: &LatticeGroup,
    rep: &SpectralRep,
    family: &FamilySpec,
    params: &SoboParams,
    opts: &CheckOptions,
) -> Result<BestConstant> {
    let mut lambdas = family.dilations.clone();
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("empty family".into()));
    }
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let mut sweep = Vec::with_capacity(lambdas.len());
    for &l in &lambdas {
        sweep.push(SweepPoint { param: l, ratio: member_ratio(g, rep, family, l, params, opts)? });
    }
    let best = sweep
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.ratio.map(|r| (i, r)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let Some((i, sweep_max)) = best else {
        return Err(Error::Degenerate("every family member is degenerate".into()));
    };
    let mut estimate = sweep_max;
    let mut argmax = lambdas[i];
    let mut refinement = Vec::new();
    if lambdas.len() >= 2 {
        let lo = lambdas[i.saturating_sub(1)].ln();
        let hi = lambdas[(i + 1).min(lambdas.len() - 1)].ln();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let eval = |x: f64, refinement: &mut Vec<SweepPoint>| -> Result<f64> {
            let r = member_ratio(g, rep, family, x.exp(), params, opts)?;
            refinement.push(SweepPoint { param: x.exp(), ratio: r });
            Ok(r.unwrap_or(f64::NEG_INFINITY))
        };
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = eval(c, &mut refinement)?;
        let mut fd = eval(d, &mut refinement)?;
        for _ in 0..GOLDEN_STEPS {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = eval(c, &mut refinement)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = eval(d, &mut refinement)?;
            }
        }
        for p in &refinement {
            if let Some(r) = p.ratio {
                if r > estimate {
                    estimate = r;
                    argmax = p.param;
                }
            }
        }
    }
    Ok(BestConstant {
        estimate,
        argmax_lambda: argmax,
        sweep_max,
        sweep,
        refinement,
        interior: i > 0 && i + 1 < lambdas.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyKind;
    use crate::lattice::{build_lattice, GroupFamily, GroupSpec};
    use crate::spectral::{decompose, SpectralMode};

    #[test]
    fn estimate_dominates_sweep_and_ignores_amplitude() {
        let g = build_lattice(GroupSpec::new(GroupFamily::Euclidean(1), 32.0, 128)).unwrap();
        let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
        let p = SoboParams::strong_p1(2.0).unwrap();
        let fam = FamilySpec::new(FamilyKind::Gaussian { width: 2.0 }).with_dilations(vec![0.5, 1.0, 2.0]);
        let opts = CheckOptions::default();
        let a = estimate_best_constant(&g, &rep, &fam, &p, &opts).unwrap();
        let b = estimate_best_constant(&g, &rep, &fam.clone().with_amplitude(3.0), &p, &opts).unwrap();
        assert!(a.estimate >= a.sweep_max);
        assert!((a.estimate / b.estimate - 1.0).abs() < 1e-9);
        assert!(estimate_best_constant(&g, &rep, &fam.with_dilations(vec![]), &p, &opts).is_err());
    }
}
