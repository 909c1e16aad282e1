//! Experiment configuration: TOML or JSON, with nested sections.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sobolab_core::harness::{validate_params, AlphaGrid, CheckOptions, ParamInput, SoboParams, Variant};
use sobolab_core::lattice::{GroupFamily, GroupSpec};
use sobolab_core::norms::ThermicGrid;
use sobolab_core::spectral::SpectralMode;
use sobolab_core::{FamilyKind, FamilySpec};

use crate::failure::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub group: GroupSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub family: FamilySection,
    #[serde(default)]
    pub inequality: InequalitySection,
    #[serde(default)]
    pub grids: GridSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub family: String,
    pub box_size: f64,
    pub nodes_per_axis: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    /// `auto`, `dense`, `fourier` or `chebyshev`.
    pub mode: String,
    pub chebyshev_tol: f64,
    pub chebyshev_degree: Option<usize>,
}

impl Default for SpectralSection {
    fn default() -> Self {
        SpectralSection { mode: "auto".into(), chebyshev_tol: 1e-8, chebyshev_degree: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilySection {
    /// `gaussian`, `bump` or `random_bandlimited`.
    pub kind: String,
    pub width: f64,
    pub radius: f64,
    pub max_frequency: usize,
    /// Number of seeds swept by the random family.
    pub members: usize,
    pub dilations: Vec<f64>,
    pub zero_mean: bool,
    pub amplitude: f64,
}

impl Default for FamilySection {
    fn default() -> Self {
        FamilySection {
            kind: "gaussian".into(),
            width: 1.0,
            radius: 2.0,
            max_frequency: 4,
            members: 5,
            dilations: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            zero_mean: true,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InequalitySection {
    /// `pgt1`, `strong1`, `weak1` or `poincare`.
    pub variant: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub s1: Option<f64>,
    pub beta: Option<f64>,
    /// Saturation multiple of the thresholding map.
    pub m: f64,
    /// Constant in the node-dependent split time.
    pub c_t: f64,
    /// Allowed drift of a family sweep.
    pub band: f64,
}

impl Default for InequalitySection {
    fn default() -> Self {
        InequalitySection {
            variant: "pgt1".into(),
            p: Some(2.0),
            q: Some(4.0),
            s: None,
            s1: Some(1.0),
            beta: Some(1.0),
            m: 20.0,
            c_t: 1.0,
            band: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Time grid for `poincare` and `heat-check`; defaults follow the lattice.
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_points: usize,
    pub thermic_per_decade: usize,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub alpha_per_decade: usize,
    /// Radii in units of the spacing.
    pub radii_lo: f64,
    pub radii_hi: f64,
    pub radii_count: usize,
    pub split_radius: Option<f64>,
    /// Dyadic indices and time of the Poincare proof trace.
    pub js: Vec<i32>,
    pub trace_t: f64,
    /// Band indices of the approximation trace.
    pub bands: Vec<i32>,
    pub heat_p: f64,
    pub heat_c: f64,
    /// Allowed drift of the normalized kernel gradient norm over t.
    pub heat_band: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            t_min: None,
            t_max: None,
            t_points: 48,
            thermic_per_decade: 32,
            alpha_lo: 0.01,
            alpha_hi: 1.0,
            alpha_per_decade: 16,
            radii_lo: 3.0,
            radii_hi: 20.0,
            radii_count: 12,
            split_radius: None,
            js: (0..=6).collect(),
            trace_t: 0.1,
            bands: (0..=5).collect(),
            heat_p: 1.0,
            heat_c: 5.0,
            heat_band: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "sobolab-out".into() }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text)
                .map_err(|e| Failure::config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
        } else {
            toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
        }
    }

    pub fn group_spec(&self) -> Result<GroupSpec, Failure> {
        let family: GroupFamily = self.group.family.parse().map_err(Failure::from_core)?;
        let spec = GroupSpec::new(family, self.group.box_size, self.group.nodes_per_axis);
        spec.validate().map_err(Failure::from_core)?;
        Ok(spec)
    }

    pub fn spectral_mode(&self, spec: &GroupSpec) -> Result<SpectralMode, Failure> {
        let cheb = SpectralMode::Chebyshev { degree: self.spectral.chebyshev_degree, tol: self.spectral.chebyshev_tol };
        match self.spectral.mode.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(if matches!(spec.family, GroupFamily::Euclidean(_)) {
                SpectralMode::FourierSymbol
            } else if spec.nodes_per_axis.pow(3) <= 4096 {
                SpectralMode::DenseEig
            } else {
                cheb
            }),
            "chebyshev" => Ok(cheb),
            other => other.parse().map_err(Failure::from_core),
        }
    }

    pub fn variant(&self) -> Result<Variant, Failure> {
        self.inequality.variant.parse().map_err(Failure::from_core)
    }

    pub fn params(&self, variant: Variant) -> Result<SoboParams, Failure> {
        let i = &self.inequality;
        let input = match variant {
            Variant::StrongPgt1 => ParamInput { p: i.p, q: i.q, s: i.s, s1: i.s1, beta: i.beta },
            Variant::StrongP1 => ParamInput { q: i.q, ..Default::default() },
            Variant::WeakP1 => ParamInput { q: i.q, s: i.s, ..Default::default() },
            Variant::Poincare => ParamInput { s: Some(i.s.unwrap_or(0.0)), ..Default::default() },
        };
        validate_params(variant, &input).map_err(Failure::from_core)
    }

    pub fn family_spec(&self) -> Result<FamilySpec, Failure> {
        let f = &self.family;
        let kind = match f.kind.trim().to_ascii_lowercase().as_str() {
            "gaussian" => FamilyKind::Gaussian { width: f.width },
            "bump" => FamilyKind::Bump { radius: f.radius },
            "random_bandlimited" | "random" => {
                if f.members == 0 {
                    return Err(Failure::config("random family needs at least one member"));
                }
                FamilyKind::RandomBandlimited { max_frequency: f.max_frequency, seed: self.seed }
            }
            other => return Err(Failure::config(format!("unknown family kind {other:?}"))),
        };
        let spec = FamilySpec::new(kind)
            .with_dilations(f.dilations.clone())
            .with_zero_mean(f.zero_mean)
            .with_amplitude(f.amplitude);
        spec.validate().map_err(Failure::from_core)?;
        if f.dilations.is_empty() {
            return Err(Failure::config("empty family: no dilations"));
        }
        Ok(spec)
    }

    pub fn thermic(&self) -> ThermicGrid {
        ThermicGrid { per_decade: self.grids.thermic_per_decade, ..ThermicGrid::default() }
    }

    pub fn alpha_grid(&self) -> AlphaGrid {
        AlphaGrid { lo: self.grids.alpha_lo, hi: self.grids.alpha_hi, per_decade: self.grids.alpha_per_decade }
    }

    pub fn check_options(&self) -> CheckOptions {
        CheckOptions { grid: self.thermic(), band: self.inequality.band }
    }
}
