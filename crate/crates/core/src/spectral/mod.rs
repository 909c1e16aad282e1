//! Functional calculus for the sub-Laplacian.

pub mod chebyshev;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use faer::{Col, Mat, Side};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::NdFft;
use crate::grid::GridFunction;
use crate::lattice::{LatticeGroup, LatticeId};
use crate::multiplier::MultiplierSpec;
use crate::sparse::Stencil;

pub use quadrature::QuadratureSpec;
use quadrature::LogGrid;

pub const DENSE_LIMIT: usize = 4096;
/// Relative size of the mean below which a function counts as zero-mean.
pub const ZERO_MEAN_TOL: f64 = 1e-10;

const SYNTH_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralMode {
    DenseEig,
    FourierSymbol,
    Chebyshev { degree: Option<usize>, tol: f64 },
}

impl SpectralMode {
    pub fn chebyshev() -> Self {
        SpectralMode::Chebyshev { degree: None, tol: 1e-8 }
    }
}

impl fmt::Display for SpectralMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralMode::DenseEig => write!(f, "dense"),
            SpectralMode::FourierSymbol => write!(f, "fourier"),
            SpectralMode::Chebyshev { .. } => write!(f, "chebyshev"),
        }
    }
}

impl FromStr for SpectralMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dense" | "dense_eig" => Ok(SpectralMode::DenseEig),
            "fourier" | "fourier_symbol" => Ok(SpectralMode::FourierSymbol),
            "chebyshev" => Ok(SpectralMode::chebyshev()),
            other => Err(Error::InvalidArgument(format!("unknown spectral mode `{other}`"))),
        }
    }
}

#[derive(Clone)]
enum Backend {
    Dense { eigenvalues: Vec<f64>, basis: Mat<f64> },
    Fourier { fft: NdFft, symbol: Vec<f64> },
    Chebyshev { degree: Option<usize>, tol: f64 },
}

#[derive(Clone)]
pub struct SpectralRep {
    lattice: LatticeId,
    mode: SpectralMode,
    nodes: usize,
    haar_weight: f64,
    spacing: f64,
    diameter: f64,
    identity: usize,
    laplacian: Stencil,
    lambda_max: f64,
    power_estimate: f64,
    zero_tol: f64,
    backend: Backend,
}

impl fmt::Debug for SpectralRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralRep")
            .field("mode", &self.mode)
            .field("nodes", &self.nodes)
            .field("lambda_max", &self.lambda_max)
            .finish()
    }
}

/// Fifty steps of power iteration from a fixed start vector.
fn power_iteration(op: &Stencil) -> f64 {
    let n = op.rows();
    let mut x: Vec<f64> = (0..n).map(|i| ((i as f64 + 0.5) * 0.618_033_988_749).fract() - 0.5).collect();
    let mut y = vec![0.0; n];
    let mut rho = 0.0;
    for _ in 0..50 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        op.apply_into(&x, &mut y);
        rho = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        std::mem::swap(&mut x, &mut y);
    }
    rho
}

pub fn decompose(g: &LatticeGroup, mode: SpectralMode) -> Result<SpectralRep> {
    faer::set_global_parallelism(faer::Par::Seq);
    let lap = g.laplacian().clone();
    let n = g.node_count();
    let gersh = lap.gershgorin_bound();
    let backend = match mode {
        SpectralMode::DenseEig => {
            if n > DENSE_LIMIT {
                return Err(Error::SizeLimit { nodes: n, limit: DENSE_LIMIT });
            }
            let dense = lap.to_dense_col_major();
            let a = Mat::<f64>::from_fn(n, n, |i, j| dense[j * n + i]);
            let eig = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
            let s = eig.S();
            let eigenvalues: Vec<f64> = (0..n).map(|i| s[i].max(0.0)).collect();
            Backend::Dense { eigenvalues, basis: eig.U().to_owned() }
        }
        SpectralMode::FourierSymbol => {
            if !g.is_euclidean() {
                return Err(Error::NonAbelian);
            }
            let h = g.spacing();
            let na = g.spec().nodes_per_axis;
            let axis_symbol: Vec<f64> = (0..na)
                .map(|m| 4.0 * (std::f64::consts::PI * m as f64 / na as f64).sin().powi(2) / (h * h))
                .collect();
            let symbol = (0..n)
                .map(|v| g.residues(v).iter().take(g.axis_lengths().len()).map(|&m| axis_symbol[m]).sum())
                .collect();
            Backend::Fourier { fft: NdFft::new(&g.axis_lengths()), symbol }
        }
        SpectralMode::Chebyshev { degree, tol } => Backend::Chebyshev { degree, tol },
    };
    let lambda_max = match &backend {
        Backend::Dense { eigenvalues, .. } => eigenvalues[n - 1],
        Backend::Fourier { symbol, .. } => symbol.iter().cloned().fold(0.0, f64::max),
        Backend::Chebyshev { .. } => gersh,
    };
    let rep = SpectralRep {
        lattice: g.id(),
        mode,
        nodes: n,
        haar_weight: g.haar_weight(),
        spacing: g.spacing(),
        diameter: g.diameter(),
        identity: g.identity(),
        laplacian: lap,
        lambda_max,
        power_estimate: 0.0,
        zero_tol: 1e-9 * lambda_max.max(1.0),
        backend,
    };
    let power_estimate = power_iteration(&rep.laplacian);
    let rep = SpectralRep { power_estimate, ..rep };
    if let Some(ev) = rep.eigenvalues() {
        let zeros = ev.iter().filter(|&&l| l <= rep.zero_tol).count();
        if zeros != 1 {
            return Err(Error::Eigen(format!("expected a one-dimensional kernel, found {zeros} zero modes")));
        }
    }
    Ok(rep)
}

/// Coefficients of a function in the representation's own basis.
#[derive(Debug, Clone)]
pub struct Spectrum {
    lattice: LatticeId,
    mean: f64,
    scale: f64,
    data: SpectrumData,
}

#[derive(Debug, Clone)]
enum SpectrumData {
    Dense(Vec<f64>),
    Fourier(Vec<Complex64>),
    Raw(Vec<f64>),
}

impl SpectralRep {
    pub fn mode(&self) -> SpectralMode {
        self.mode
    }

    pub fn lattice_id(&self) -> LatticeId {
        self.lattice
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn haar_weight(&self) -> f64 {
        self.haar_weight
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Spectral upper bound; exact top eigenvalue in dense and fourier modes,
    /// the Gershgorin bound in chebyshev mode.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Fifty-step power iteration estimate of the top eigenvalue.
    pub fn power_estimate(&self) -> f64 {
        self.power_estimate
    }

    /// Nondecreasing eigenvalues (dense and fourier modes).
    pub fn eigenvalues(&self) -> Option<Vec<f64>> {
        match &self.backend {
            Backend::Dense { eigenvalues, .. } => Some(eigenvalues.clone()),
            Backend::Fourier { symbol, .. } => {
                let mut s = symbol.clone();
                s.sort_by(f64::total_cmp);
                Some(s)
            }
            Backend::Chebyshev { .. } => None,
        }
    }

    /// Fourier symbol in frequency order (fourier mode).
    pub fn symbol(&self) -> Option<&[f64]> {
        match &self.backend {
            Backend::Fourier { symbol, .. } => Some(symbol),
            _ => None,
        }
    }

    /// Smallest nonzero eigenvalue, when known.
    pub fn spectral_gap(&self) -> Option<f64> {
        self.eigenvalues()?.into_iter().find(|&l| l > self.zero_tol)
    }

    /// `max |U^T U - I|` of the dense basis.
    pub fn orthonormality_defect(&self) -> Option<f64> {
        match &self.backend {
            Backend::Dense { basis, .. } => {
                let gram = basis.transpose() * basis;
                let n = self.nodes;
                let mut d: f64 = 0.0;
                for j in 0..n {
                    for i in 0..n {
                        let e = if i == j { 1.0 } else { 0.0 };
                        d = d.max((gram[(i, j)] - e).abs());
                    }
                }
                Some(d)
            }
            _ => None,
        }
    }

    pub fn ensure_on(&self, f: &GridFunction) -> Result<()> {
        if f.lattice_id() == self.lattice {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    pub fn transform(&self, f: &GridFunction) -> Result<Spectrum> {
        self.ensure_on(f)?;
        let x = f.values();
        let data = match &self.backend {
            Backend::Dense { basis, .. } => {
                let col = Col::<f64>::from_fn(self.nodes, |i| x[i]);
                let c = basis.transpose() * &col;
                SpectrumData::Dense((0..self.nodes).map(|i| c[i]).collect())
            }
            Backend::Fourier { fft, .. } => SpectrumData::Fourier(fft.forward_real(x)),
            Backend::Chebyshev { .. } => SpectrumData::Raw(x.to_vec()),
        };
        Ok(Spectrum { lattice: self.lattice, mean: f.mean(), scale: f.max_abs(), data })
    }

    fn check_zero_mode(&self, spec: &Spectrum, at_zero: Option<f64>) -> Result<()> {
        if at_zero.is_none() && spec.mean.abs() > ZERO_MEAN_TOL * spec.scale.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroMode(format!(
                "multiplier is unbounded at 0 but the function has mean {:e}; project to zero mean first",
                spec.mean
            )));
        }
        Ok(())
    }

    /// `m(J)` applied to a transformed function.
    pub fn synthesize(&self, spec: &Spectrum, m: &dyn Fn(f64) -> f64, at_zero: Option<f64>) -> Result<GridFunction> {
        self.check_zero_mode(spec, at_zero)?;
        let z = at_zero.unwrap_or(0.0);
        let sym = |l: f64| if l <= self.zero_tol { z } else { m(l) };
        let values = match (&self.backend, &spec.data) {
            (Backend::Dense { eigenvalues, basis }, SpectrumData::Dense(c)) => {
                let scaled = Col::<f64>::from_fn(self.nodes, |i| sym(eigenvalues[i]) * c[i]);
                let out = basis * &scaled;
                (0..self.nodes).map(|i| out[i]).collect()
            }
            (Backend::Fourier { fft, symbol }, SpectrumData::Fourier(c)) => {
                let scaled = c.iter().zip(symbol).map(|(c, &l)| c * sym(l)).collect();
                fft.inverse_real(scaled)
            }
            (Backend::Chebyshev { degree, tol }, SpectrumData::Raw(x)) => {
                if at_zero.is_none() {
                    return Err(Error::ZeroMode(
                        "chebyshev mode cannot represent a multiplier singular at 0".into(),
                    ));
                }
                let series = chebyshev::fit(&sym, self.lambda_max, *degree, *tol)?;
                chebyshev::apply(&series, &self.laplacian, x)
            }
            _ => unreachable!("spectrum produced by a different representation"),
        };
        if let Some(i) = values.iter().position(|v: &f64| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction::from_raw(spec.lattice, values))
    }

    /// Streams `m_k(J) f` for `k < count` to `visit`; dense mode batches the
    /// symbols into matrix products of `SYNTH_CHUNK` columns.
    pub fn synthesize_each(
        &self,
        spec: &Spectrum,
        count: usize,
        symbol: &dyn Fn(usize, f64) -> f64,
        at_zero: Option<f64>,
        visit: &mut dyn FnMut(usize, &[f64]),
    ) -> Result<()> {
        match (&self.backend, &spec.data) {
            (Backend::Dense { eigenvalues, basis }, SpectrumData::Dense(c)) => {
                self.check_zero_mode(spec, at_zero)?;
                let z = at_zero.unwrap_or(0.0);
                let mut col = vec![0.0; self.nodes];
                for start in (0..count).step_by(SYNTH_CHUNK) {
                    let width = SYNTH_CHUNK.min(count - start);
                    let cols = Mat::<f64>::from_fn(self.nodes, width, |i, k| {
                        let l = eigenvalues[i];
                        let m = if l <= self.zero_tol { z } else { symbol(start + k, l) };
                        m * c[i]
                    });
                    let out = basis * &cols;
                    for k in 0..width {
                        for (i, v) in col.iter_mut().enumerate() {
                            *v = out[(i, k)];
                        }
                        if let Some(i) = col.iter().position(|x| !x.is_finite()) {
                            return Err(Error::NonFinite(i));
                        }
                        visit(start + k, &col);
                    }
                }
                Ok(())
            }
            _ => {
                for k in 0..count {
                    let f = self.synthesize(spec, &|l| symbol(k, l), at_zero)?;
                    visit(k, f.values());
                }
                Ok(())
            }
        }
    }

    pub(crate) fn identity_node(&self) -> usize {
        self.identity
    }

    /// Default Bochner range `[h^2/4, 16 (diam/2)^2]`.
    pub fn default_time_range(&self) -> (f64, f64) {
        (self.spacing * self.spacing / 4.0, 4.0 * self.diameter * self.diameter)
    }
}

pub fn apply_function(
    rep: &SpectralRep,
    m: &dyn Fn(f64) -> f64,
    at_zero: Option<f64>,
    f: &GridFunction,
) -> Result<GridFunction> {
    let s = rep.transform(f)?;
    rep.synthesize(&s, m, at_zero)
}

/// `m(tJ) f`.
pub fn apply_multiplier(rep: &SpectralRep, m: &MultiplierSpec, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        rep.ensure_on(f)?;
        let v = m.value_at_zero().ok_or_else(|| Error::ZeroMode("m(0 J) is undefined".into()))?;
        return Ok(f.scaled(v));
    }
    apply_function(rep, &|l| m.value(t * l), m.value_at_zero(), f)
}

pub fn heat_apply(rep: &SpectralRep, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        rep.ensure_on(f)?;
        return Ok(f.clone());
    }
    apply_function(rep, &|l| (-t * l).exp(), Some(1.0), f)
}

fn unit_delta(rep: &SpectralRep) -> GridFunction {
    let mut v = vec![0.0; rep.nodes];
    v[rep.identity_node()] = 1.0 / rep.haar_weight;
    GridFunction::from_raw(rep.lattice, v)
}

/// `h_t = H_t (delta_e / w)`.
pub fn heat_kernel(rep: &SpectralRep, t: f64) -> Result<GridFunction> {
    heat_apply(rep, t, &unit_delta(rep))
}

/// Convolution kernel of `m(tJ)`, that is `m(tJ)(delta_e / w)`.
pub fn kernel_of(rep: &SpectralRep, m: &MultiplierSpec, t: f64) -> Result<GridFunction> {
    apply_multiplier(rep, m, t, &unit_delta(rep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum PowerRoute {
    Spectral,
    Bochner(QuadratureSpec),
}

fn stencil_power(rep: &SpectralRep, k: usize, x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    let mut tmp = vec![0.0; v.len()];
    for _ in 0..k {
        rep.laplacian.apply_into(&v, &mut tmp);
        std::mem::swap(&mut v, &mut tmp);
    }
    v
}

/// `int_0^{t_min} t^{a-1} H_t g dt` by the exact series
/// `sum_n (-1)^n t_min^{n+a} J^n g / (n! (n+a))`.
pub(crate) fn lower_tail(rep: &SpectralRep, a: f64, g: &GridFunction, t_min: f64) -> Vec<f64> {
    let n = rep.nodes;
    let mut acc = vec![0.0; n];
    let norm0 = g.vec_norm();
    let mut term = g.values().to_vec();
    let mut tmp = vec![0.0; n];
    for k in 0..400 {
        let c = t_min.powf(a) / (k as f64 + a);
        for i in 0..n {
            acc[i] += c * term[i];
        }
        rep.laplacian.apply_into(&term, &mut tmp);
        let scale = -t_min / (k + 1) as f64;
        for i in 0..n {
            term[i] = scale * tmp[i];
        }
        let tn = term.iter().map(|v| v * v).sum::<f64>().sqrt();
        if tn * t_min.powf(a) <= 1e-18 * norm0.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    acc
}

/// Resolved `[t_min, t_max]` of a quadrature spec.
pub(crate) fn quadrature_range(rep: &SpectralRep, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let (dmin, dmax) = rep.default_time_range();
    let t_min = q.t_min.unwrap_or(dmin);
    let t_max = q.t_max.unwrap_or(dmax);
    if q.points < 8 || !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs >= 8 points on 0 < t_min < t_max, got {} on [{t_min}, {t_max}]",
            q.points
        )));
    }
    Ok((t_min, t_max))
}

/// `(1/Gamma(a)) int_0^inf t^{a-1} H_t g dt` split as documented in [`quadrature`].
fn bochner_integral(rep: &SpectralRep, a: f64, g: &GridFunction, q: &QuadratureSpec) -> Result<GridFunction> {
    let (t_min, t_max) = quadrature_range(rep, q)?;
    let mut acc = lower_tail(rep, a, g, t_min);
    let grid = LogGrid::new(t_min, t_max, q.points);
    let spec = rep.transform(g)?;
    let weights: Vec<f64> = grid.ts.iter().zip(&grid.weights).map(|(t, w)| w * t.powf(a)).collect();
    rep.synthesize_each(&spec, grid.ts.len(), &|k, l| weights[k] * (-grid.ts[k] * l).exp(), Some(0.0), &mut |_, v| {
        for (o, x) in acc.iter_mut().zip(v) {
            *o += x;
        }
    })?;
    let gamma = statrs::function::gamma::gamma(a);
    Ok(GridFunction::from_raw(rep.lattice, acc.into_iter().map(|v| v / gamma).collect()))
}

/// `J^s f` for real `s`; negative powers need a zero-mean `f`.
pub fn fractional_power_apply(rep: &SpectralRep, s: f64, f: &GridFunction, route: &PowerRoute) -> Result<GridFunction> {
    rep.ensure_on(f)?;
    if s == 0.0 {
        return Ok(f.clone());
    }
    let at_zero = if s > 0.0 { Some(0.0) } else { None };
    match route {
        PowerRoute::Spectral => apply_function(rep, &|l| l.powf(s), at_zero, f),
        PowerRoute::Bochner(q) => {
            if s > 0.0 && s.fract() == 0.0 {
                let v = stencil_power(rep, s as usize, f.values());
                return Ok(GridFunction::from_raw(rep.lattice, v));
            }
            if s > 0.0 {
                let k = s.floor() as usize + 1;
                let g = GridFunction::from_raw(rep.lattice, stencil_power(rep, k, f.values()));
                bochner_integral(rep, k as f64 - s, &g, q)
            } else {
                let spec = rep.transform(f)?;
                rep.check_zero_mode(&spec, None)?;
                bochner_integral(rep, -s, &f.zero_mean(), q)
            }
        }
    }
}
