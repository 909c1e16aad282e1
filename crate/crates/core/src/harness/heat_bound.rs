//! Normalized gradient bounds for the heat kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{cc_distance_field, volume_growth_from, LatticeGroup};
use crate::norms::lp_of_values;
use crate::ops;
use crate::spectral::{heat_kernel, SpectralRep};
use crate::stats::Envelope;

/// Gradient values below this fraction of the peak are treated as round-off.
const NOISE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatBoundReport {
    pub p: f64,
    pub c: f64,
    pub ts: Vec<f64>,
    /// Measured `V(sqrt t)`.
    pub volumes: Vec<f64>,
    /// `sup_x |grad h_t(x)| t^{1/2} V(sqrt t) e^{d(x)^2/(c t)}`.
    pub gaussian: Vec<f64>,
    /// `|grad h_t|_p t^{1/2} V(sqrt t)^{1/p'}`.
    pub lp: Vec<f64>,
    pub gaussian_sup: f64,
    pub lp_sup: f64,
    pub lp_envelope: Option<Envelope>,
}

pub fn heat_kernel_bound_check(
    g: &LatticeGroup,
    rep: &SpectralRep,
    ts: &[f64],
    p: f64,
    c: f64,
) -> Result<HeatBoundReport> {
    let h2 = g.spacing() * g.spacing();
    if let Some(t) = ts.iter().find(|t| !(**t >= h2 * (1.0 - 1e-12))) {
        return Err(Error::InvalidArgument(format!("t = {t} is below h^2 = {h2}; the kernel is unresolved")));
    }
    if !(p >= 1.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("need p >= 1 and c > 0, got p = {p}, c = {c}")));
    }
    let dist = cc_distance_field(g, g.identity())?;
    let radii: Vec<f64> = ts.iter().map(|t| t.sqrt()).collect();
    let volumes: Vec<f64> = volume_growth_from(g, dist.values(), &radii).into_iter().map(|s| s.volume).collect();
    let dual = if p.is_infinite() { 1.0 } else { 1.0 - 1.0 / p };
    let w = g.haar_weight();
    let mut gaussian = Vec::with_capacity(ts.len());
    let mut lp = Vec::with_capacity(ts.len());
    for (k, &t) in ts.iter().enumerate() {
        let kernel = heat_kernel(rep, t)?;
        let grad = ops::gradient(g, &kernel)?;
        let len: Vec<f64> = (0..g.node_count())
            .map(|v| grad.iter().map(|c| c.values()[v].powi(2)).sum::<f64>().sqrt())
            .collect();
        let peak = len.iter().fold(0.0f64, |m, v| m.max(*v));
        let v = volumes[k];
        let gsup = len
            .iter()
            .zip(dist.values())
            .filter(|(l, _)| **l > NOISE_FLOOR * peak)
            .map(|(l, d)| l * (d * d / (c * t)).exp())
            .fold(0.0, f64::max);
        gaussian.push(gsup * t.sqrt() * v);
        lp.push(lp_of_values(&len, w, p) * t.sqrt() * v.powf(dual));
    }
    Ok(HeatBoundReport {
        p,
        c,
        ts: ts.to_vec(),
        volumes,
        gaussian_sup: gaussian.iter().copied().fold(0.0, f64::max),
        lp_sup: lp.iter().copied().fold(0.0, f64::max),
        lp_envelope: Envelope::of(&lp),
        gaussian,
        lp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, GroupFamily, GroupSpec};
    use crate::spectral::{decompose, SpectralMode};
    use crate::stats;

    #[test]
    fn bounds_are_finite_and_flat_for_p1() {
        let g = build_lattice(GroupSpec::new(GroupFamily::Euclidean(1), 128.0, 512)).unwrap();
        let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
        let h = g.spacing();
        let ts = stats::geomspace(4.0 * h * h, 100.0, 10);
        let r = heat_kernel_bound_check(&g, &rep, &ts, 1.0, 5.0).unwrap();
        assert!(r.gaussian_sup.is_finite() && r.lp_sup.is_finite());
        assert!(r.lp_envelope.unwrap().drift() < 0.1, "{:?}", r.lp);
        assert!(heat_kernel_bound_check(&g, &rep, &[h * h / 2.0], 1.0, 5.0).is_err());
    }
}
