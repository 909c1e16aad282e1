//! Parametric test functions: Gaussians, bumps and seeded random band-limited
//! sums, with the group dilation `x -> delta_lambda x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::lattice::{GroupFamily, LatticeGroup};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `exp(-|x|^2 / (2 width^2))`, with `z` weighted homogeneously on the
    /// Heisenberg group.
    Gaussian { width: f64 },
    /// Smooth bump supported in the gauge ball of the given radius.
    Bump { radius: f64 },
    /// Random trigonometric sum over lattice frequencies `|k|_inf <= max_frequency`.
    RandomBandlimited { max_frequency: usize, seed: u64 },
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Gaussian { .. } => "gaussian",
            FamilyKind::Bump { .. } => "bump",
            FamilyKind::RandomBandlimited { .. } => "random_bandlimited",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub kind: FamilyKind,
    /// Dilation parameters of the members.
    #[serde(default = "default_dilations")]
    pub dilations: Vec<f64>,
    #[serde(default = "default_true")]
    pub zero_mean: bool,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_dilations() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0, 4.0]
}

fn default_true() -> bool {
    true
}

fn default_amplitude() -> f64 {
    1.0
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> FamilySpec {
        FamilySpec { kind, dilations: default_dilations(), zero_mean: true, amplitude: 1.0 }
    }

    pub fn with_dilations(mut self, d: Vec<f64>) -> FamilySpec {
        self.dilations = d;
        self
    }

    pub fn with_zero_mean(mut self, z: bool) -> FamilySpec {
        self.zero_mean = z;
        self
    }

    pub fn with_amplitude(mut self, a: f64) -> FamilySpec {
        self.amplitude = a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = match self.kind {
            FamilyKind::Gaussian { width } => !(width > 0.0 && width.is_finite()),
            FamilyKind::Bump { radius } => !(radius > 0.0 && radius.is_finite()),
            FamilyKind::RandomBandlimited { max_frequency, .. } => max_frequency == 0,
        };
        if bad {
            return Err(Error::InvalidArgument(format!("bad shape parameter in {:?}", self.kind)));
        }
        if let Some(l) = self.dilations.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidArgument(format!("dilation {l} must be positive")));
        }
        if !(self.amplitude.is_finite() && self.amplitude != 0.0) {
            return Err(Error::InvalidArgument("amplitude must be finite and nonzero".into()));
        }
        Ok(())
    }

    /// The member `f(delta_lambda .)`.
    pub fn member(&self, g: &LatticeGroup, lambda: f64) -> Result<GridFunction> {
        self.validate()?;
        let f = match self.kind {
            FamilyKind::Gaussian { width } => {
                let gauge = Gauge::new(g);
                GridFunction::from_fn(g, |x| (-0.5 * gauge.scaled_square(x, lambda, width)).exp())?
            }
            FamilyKind::Bump { radius } => {
                let gauge = Gauge::new(g);
                GridFunction::from_fn(g, |x| {
                    let r2 = gauge.scaled_square(x, lambda, radius);
                    if r2 < 1.0 {
                        (1.0 - 1.0 / (1.0 - r2)).exp()
                    } else {
                        0.0
                    }
                })?
            }
            FamilyKind::RandomBandlimited { max_frequency, seed } => {
                if lambda != 1.0 {
                    return Err(Error::InvalidArgument(
                        "random band-limited members are indexed by seed, not by dilation".into(),
                    ));
                }
                random_bandlimited(g, max_frequency, seed)?
            }
        };
        let f = if self.zero_mean { f.zero_mean() } else { f };
        Ok(f.scaled(self.amplitude).with_label(format!("{}(lambda={lambda})", self.kind.name())))
    }

    pub fn members(&self, g: &LatticeGroup) -> Result<Vec<(f64, GridFunction)>> {
        if self.dilations.is_empty() {
            return Err(Error::InvalidArgument("empty family".into()));
        }
        self.dilations.iter().map(|&l| Ok((l, self.member(g, l)?))).collect()
    }
}

/// Smooth dilation-covariant quadratic form: `|lambda x|^2 / w^2` on
/// euclidean groups and `lambda^2 (x^2+y^2)/w^2 + 4 lambda^4 zeta(z)^2 / w^4`
/// on the Heisenberg group, `zeta` a periodic stand-in for `z`.
struct Gauge {
    heisenberg: bool,
    z_period: f64,
}

impl Gauge {
    fn new(g: &LatticeGroup) -> Gauge {
        Gauge { heisenberg: g.family() == GroupFamily::Heisenberg, z_period: g.z_period().unwrap_or(1.0) }
    }

    fn scaled_square(&self, x: [f64; 3], lambda: f64, w: f64) -> f64 {
        if self.heisenberg {
            let p = self.z_period;
            let zeta = p / std::f64::consts::PI * (std::f64::consts::PI * x[2] / p).sin();
            let u = lambda / w;
            u * u * (x[0] * x[0] + x[1] * x[1]) + 4.0 * u.powi(4) * zeta * zeta
        } else {
            let u = lambda / w;
            u * u * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
        }
    }
}

fn random_bandlimited(g: &LatticeGroup, max_frequency: usize, seed: u64) -> Result<GridFunction> {
    let n = g.spec().nodes_per_axis;
    if 2 * max_frequency >= n {
        return Err(Error::InvalidArgument(format!(
            "max_frequency {max_frequency} not resolved by {n} nodes per axis"
        )));
    }
    let dims = g.family().coordinate_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = max_frequency as i64;
    let mut modes = Vec::new();
    let axes: Vec<i64> = (-k..=k).collect();
    let total = axes.len().pow(dims as u32);
    for idx in 0..total {
        let mut freq = [0i64; 3];
        let mut r = idx;
        for f in freq.iter_mut().take(dims) {
            *f = axes[r % axes.len()];
            r /= axes.len();
        }
        if freq.iter().all(|&f| f == 0) {
            continue;
        }
        let amp: f64 = rng.random_range(-1.0..1.0);
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        modes.push((freq, amp, phase));
    }
    let tau = std::f64::consts::TAU / n as f64;
    let values = (0..g.node_count())
        .map(|v| {
            let r = g.residues(v);
            modes
                .iter()
                .map(|(freq, a, ph)| {
                    let arg: f64 = (0..dims).map(|d| freq[d] as f64 * r[d] as f64).sum::<f64>() * tau;
                    a * (arg + ph).cos()
                })
                .sum()
        })
        .collect();
    GridFunction::from_values(g, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, GroupSpec};

    fn plane() -> LatticeGroup {
        build_lattice(GroupSpec::new(GroupFamily::Euclidean(2), 8.0, 32)).unwrap()
    }

    #[test]
    fn gaussian_peak_and_mean() {
        let g = plane();
        let f = FamilySpec::new(FamilyKind::Gaussian { width: 1.0 }).with_zero_mean(false).member(&g, 1.0).unwrap();
        assert_eq!(f.values()[g.identity()], 1.0);
        let z = FamilySpec::new(FamilyKind::Gaussian { width: 1.0 }).member(&g, 2.0).unwrap();
        assert!(z.mean().abs() < 1e-14);
    }

    #[test]
    fn bump_support_shrinks_under_dilation() {
        let g = plane();
        let spec = FamilySpec::new(FamilyKind::Bump { radius: 2.0 }).with_zero_mean(false);
        let count = |l| spec.member(&g, l).unwrap().values().iter().filter(|v| **v > 0.0).count();
        assert!(count(2.0) < count(1.0));
        assert!(count(1.0) > 0);
    }

    #[test]
    fn random_is_seeded() {
        let g = plane();
        let s = |seed| FamilySpec::new(FamilyKind::RandomBandlimited { max_frequency: 3, seed });
        assert_eq!(s(7).member(&g, 1.0).unwrap().values(), s(7).member(&g, 1.0).unwrap().values());
        assert_ne!(s(7).member(&g, 1.0).unwrap().values(), s(8).member(&g, 1.0).unwrap().values());
        assert!(s(7).member(&g, 2.0).is_err());
    }

    #[test]
    fn rejects_empty_family() {
        let g = plane();
        let spec = FamilySpec::new(FamilyKind::Gaussian { width: 1.0 }).with_dilations(vec![]);
        assert!(spec.members(&g).is_err());
    }
}
