//! Lebesgue, Lorentz, Sobolev and thermic Besov norms of grid functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lattice::LatticeGroup;
use crate::ops;
use crate::spectral::{fractional_power_apply, PowerRoute, SpectralRep, ZERO_MEAN_TOL};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpRoute {
    Direct,
    /// Layer-cake integral evaluated at the jumps of the distribution function.
    Distribution,
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent p = {p} must lie in [1, inf]")))
    }
}

fn sorted_abs_desc(values: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

pub(crate) fn lp_of_values(values: &[f64], weight: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |a, v| a.max(v.abs()));
    }
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    scale * (weight * sum).powf(1.0 / p)
}

pub fn lp_norm(g: &LatticeGroup, f: &GridFunction, p: f64, route: LpRoute) -> Result<f64> {
    f.ensure_on(g)?;
    check_p(p)?;
    let w = g.haar_weight();
    match route {
        LpRoute::Direct => Ok(lp_of_values(f.values(), w, p)),
        LpRoute::Distribution => {
            if p.is_infinite() {
                return Err(Error::InvalidArgument("distribution route needs p < inf".into()));
            }
            let a = sorted_abs_desc(f.values());
            let scale = a.first().copied().unwrap_or(0.0);
            if scale == 0.0 {
                return Ok(0.0);
            }
            // sum over jumps: mu(sigma) = w (i+1) on [a_{i+1}, a_i)
            let mut acc = 0.0;
            for i in 0..a.len() {
                let hi = (a[i] / scale).powf(p);
                let lo = a.get(i + 1).map_or(0.0, |x| (x / scale).powf(p));
                acc += (i + 1) as f64 * (hi - lo);
            }
            Ok(scale * (w * acc).powf(1.0 / p))
        }
    }
}

pub(crate) fn lorentz_of_values(values: &[f64], weight: f64, p: f64) -> f64 {
    let a = sorted_abs_desc(values);
    a.iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| v * (weight * (i + 1) as f64).powf(1.0 / p))
        .fold(0.0, f64::max)
}

/// `sup_sigma sigma mu{|f| > sigma}^{1/p}`, attained just below a jump.
pub fn lorentz_weak_norm(g: &LatticeGroup, f: &GridFunction, p: f64) -> Result<f64> {
    f.ensure_on(g)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("weak norm exponent p = {p} must lie in (1, inf)")));
    }
    Ok(lorentz_of_values(f.values(), g.haar_weight(), p))
}

fn check_sobolev_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "sobolev exponent p = {p} must lie in (1, inf); use sobolev_11_norm for p = 1"
        )))
    }
}

/// `J^{s/2} f` by the spectral route.
pub fn half_power(rep: &SpectralRep, f: &GridFunction, s: f64) -> Result<GridFunction> {
    fractional_power_apply(rep, s / 2.0, f, &PowerRoute::Spectral)
}

/// `|J^{s/2} f|_p`.
pub fn sobolev_norm(g: &LatticeGroup, rep: &SpectralRep, f: &GridFunction, s: f64, p: f64) -> Result<f64> {
    check_sobolev_p(p)?;
    lp_norm(g, &half_power(rep, f, s)?, p, LpRoute::Direct)
}

/// `|J^{s/2} f|_{p, inf}`.
pub fn weak_sobolev_norm(g: &LatticeGroup, rep: &SpectralRep, f: &GridFunction, s: f64, p: f64) -> Result<f64> {
    check_sobolev_p(p)?;
    lorentz_weak_norm(g, &half_power(rep, f, s)?, p)
}

/// `|grad f|_1`.
pub fn sobolev_11_norm(g: &LatticeGroup, f: &GridFunction) -> Result<f64> {
    ops::grad_l1_norm(g, f)
}

/// Geometric time grid for the thermic sup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermicGrid {
    /// Defaults to `h^2/4`.
    pub t_min: Option<f64>,
    /// Defaults to `4 diam^2`.
    pub t_max: Option<f64>,
    pub per_decade: usize,
}

impl Default for ThermicGrid {
    fn default() -> Self {
        ThermicGrid { t_min: None, t_max: None, per_decade: 32 }
    }
}

impl ThermicGrid {
    pub fn points(&self, rep: &SpectralRep) -> Vec<f64> {
        let h = rep.spacing();
        let lo = self.t_min.unwrap_or(h * h / 4.0);
        let hi = self.t_max.unwrap_or(4.0 * rep.diameter() * rep.diameter());
        stats::geomspace_per_decade(lo, hi, self.per_decade.max(1))
    }

    pub fn doubled(&self) -> ThermicGrid {
        ThermicGrid { per_decade: 2 * self.per_decade, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovValue {
    pub value: f64,
    pub argmax_t: f64,
    pub at_lower_end: bool,
    pub at_upper_end: bool,
    pub grid_points: usize,
}

/// `max |H_t f|` for every `t` in `ts`.
pub fn heat_sup_profile(rep: &SpectralRep, f: &GridFunction, ts: &[f64]) -> Result<Vec<f64>> {
    let spec = rep.transform(f)?;
    let mut out = vec![0.0; ts.len()];
    rep.synthesize_each(&spec, ts.len(), &|k, l| (-ts[k] * l).exp(), Some(1.0), &mut |k, v| {
        out[k] = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    })?;
    Ok(out)
}

fn require_zero_mean(f: &GridFunction) -> Result<()> {
    if f.mean().abs() > ZERO_MEAN_TOL * f.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroMode(format!(
            "homogeneous Besov norm needs a zero-mean function, mean is {:e}",
            f.mean()
        )));
    }
    Ok(())
}

/// `sup_t t^{beta/2} |H_t f|_inf` over the explicit times `ts`.
pub fn besov_thermic_norm_at(rep: &SpectralRep, f: &GridFunction, beta: f64, ts: &[f64]) -> Result<BesovValue> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("besov order beta = {beta} must be positive")));
    }
    if ts.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    require_zero_mean(f)?;
    let sup = heat_sup_profile(rep, f, ts)?;
    let (mut best, mut arg) = (0.0, 0);
    for (k, s) in sup.iter().enumerate() {
        let v = ts[k].powf(beta / 2.0) * s;
        if v > best {
            best = v;
            arg = k;
        }
    }
    let (imin, imax) = ts.iter().enumerate().fold((0, 0), |(lo, hi), (i, &t)| {
        (if t < ts[lo] { i } else { lo }, if t > ts[hi] { i } else { hi })
    });
    Ok(BesovValue {
        value: best,
        argmax_t: ts[arg],
        at_lower_end: best > 0.0 && arg == imin,
        at_upper_end: best > 0.0 && arg == imax,
        grid_points: ts.len(),
    })
}

pub fn besov_thermic_norm(rep: &SpectralRep, f: &GridFunction, beta: f64, grid: &ThermicGrid) -> Result<BesovValue> {
    if grid.per_decade < 32 {
        log::warn!("thermic grid with {} points per decade is coarser than 32", grid.per_decade);
    }
    besov_thermic_norm_at(rep, f, beta, &grid.points(rep))
}

/// `|J^{s/2} f|_{B^{-beta-s}} / |f|_{B^{-beta}}`.
pub fn besov_isomorphism_ratio(
    rep: &SpectralRep,
    f: &GridFunction,
    s: f64,
    beta: f64,
    grid: &ThermicGrid,
) -> Result<f64> {
    let lifted = half_power(rep, f, s)?;
    let top = besov_thermic_norm(rep, &lifted, beta + s, grid)?.value;
    let bottom = besov_thermic_norm(rep, f, beta, grid)?.value;
    if bottom == 0.0 {
        return Err(Error::Degenerate("besov norm of f vanishes".into()));
    }
    Ok(top / bottom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormRequest {
    Lp { p: f64 },
    LorentzWeak { p: f64 },
    Sobolev { s: f64, p: f64 },
    Sobolev11,
    WeakSobolev { s: f64, p: f64 },
    BesovThermic { beta: f64, grid: ThermicGrid },
}

pub fn evaluate(g: &LatticeGroup, rep: &SpectralRep, f: &GridFunction, req: &NormRequest) -> Result<f64> {
    match *req {
        NormRequest::Lp { p } => lp_norm(g, f, p, LpRoute::Direct),
        NormRequest::LorentzWeak { p } => lorentz_weak_norm(g, f, p),
        NormRequest::Sobolev { s, p } => sobolev_norm(g, rep, f, s, p),
        NormRequest::Sobolev11 => sobolev_11_norm(g, f),
        NormRequest::WeakSobolev { s, p } => weak_sobolev_norm(g, rep, f, s, p),
        NormRequest::BesovThermic { beta, grid } => Ok(besov_thermic_norm(rep, f, beta, &grid)?.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, GroupFamily, GroupSpec};
    use crate::spectral::{decompose, SpectralMode};
    use proptest::prelude::*;

    fn plane(n: usize, l: f64) -> LatticeGroup {
        build_lattice(GroupSpec::new(GroupFamily::Euclidean(2), l, n)).unwrap()
    }

    #[test]
    fn indicator_norms() {
        let g = plane(16, 4.0);
        let f = GridFunction::from_fn(&g, |x| if x[0].abs() < 1.0 && x[1] >= 0.0 { 1.0 } else { 0.0 }).unwrap();
        let mu = f.values().iter().filter(|v| **v > 0.0).count() as f64 * g.haar_weight();
        for route in [LpRoute::Direct, LpRoute::Distribution] {
            assert!((lp_norm(&g, &f, 2.0, route).unwrap() - mu.sqrt()).abs() < 1e-14);
        }
        assert!((lorentz_weak_norm(&g, &f, 3.0).unwrap() - mu.powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(lp_norm(&g, &f, f64::INFINITY, LpRoute::Direct).unwrap(), 1.0);
    }

    #[test]
    fn two_level_step() {
        let g = plane(8, 8.0);
        // 4 nodes at 3.0 and 12 nodes at 1.0, weight 1
        let f = GridFunction::from_values(
            &g,
            (0..64).map(|v| if v < 4 { 3.0 } else if v < 16 { 1.0 } else { 0.0 }).collect(),
        )
        .unwrap();
        let p = 2.0;
        let expected = f64::max(3.0 * 4f64.sqrt(), 1.0 * 16f64.sqrt());
        assert!((lorentz_weak_norm(&g, &f, p).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn besov_of_zero_and_nonzero_mean() {
        let g = plane(16, 4.0);
        let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
        let z = GridFunction::zeros(&g);
        assert_eq!(besov_thermic_norm(&rep, &z, 1.0, &ThermicGrid::default()).unwrap().value, 0.0);
        let one = GridFunction::constant(&g, 1.0);
        assert!(matches!(besov_thermic_norm(&rep, &one, 1.0, &ThermicGrid::default()), Err(Error::ZeroMode(_))));
    }

    #[test]
    fn sobolev_zero_is_lp() {
        let g = plane(16, 4.0);
        let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
        let f = GridFunction::from_fn(&g, |x| (x[0] * 1.3).sin() * (-x[1] * x[1]).exp() + 0.2).unwrap();
        let a = sobolev_norm(&g, &rep, &f, 0.0, 3.0).unwrap();
        let b = lp_norm(&g, &f, 3.0, LpRoute::Direct).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);
        assert!(sobolev_norm(&g, &rep, &f, 0.5, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn routes_agree_and_weak_below_strong(vals in proptest::collection::vec(-5.0f64..5.0, 64), p in 1.1f64..6.0) {
            let g = plane(8, 2.0);
            let f = GridFunction::from_values(&g, vals).unwrap();
            let d = lp_norm(&g, &f, p, LpRoute::Direct).unwrap();
            let l = lp_norm(&g, &f, p, LpRoute::Distribution).unwrap();
            prop_assert!((d - l).abs() <= 1e-10 * d.max(1e-300));
            prop_assert!(lorentz_weak_norm(&g, &f, p).unwrap() <= d * (1.0 + 1e-12));
        }

        #[test]
        fn holder_interpolation(vals in proptest::collection::vec(-5.0f64..5.0, 64), p in 1.0f64..3.0, r in 1.1f64..4.0) {
            let g = plane(8, 2.0);
            let f = GridFunction::from_values(&g, vals).unwrap();
            let q = p * r;
            let theta = p / q;
            let lhs = lp_norm(&g, &f, q, LpRoute::Direct).unwrap();
            let rhs = lp_norm(&g, &f, p, LpRoute::Direct).unwrap().powf(theta)
                * lp_norm(&g, &f, f64::INFINITY, LpRoute::Direct).unwrap().powf(1.0 - theta);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
