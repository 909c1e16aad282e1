//! Scalar fields on a lattice, tagged with the lattice they belong to.

use crate::error::{Error, Result};
use crate::lattice::{LatticeGroup, LatticeId};

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lattice: LatticeId,
    values: Vec<f64>,
    label: Option<String>,
}

impl GridFunction {
    pub fn zeros(g: &LatticeGroup) -> Self {
        GridFunction { lattice: g.id(), values: vec![0.0; g.node_count()], label: None }
    }

    pub fn constant(g: &LatticeGroup, c: f64) -> Self {
        GridFunction { lattice: g.id(), values: vec![c; g.node_count()], label: None }
    }

    pub fn from_values(g: &LatticeGroup, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.node_count() {
            return Err(Error::LengthMismatch { got: values.len(), expected: g.node_count() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction { lattice: g.id(), values, label: None })
    }

    /// Samples `f` at node coordinates.
    pub fn from_fn(g: &LatticeGroup, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        GridFunction::from_values(g, (0..g.node_count()).map(|v| f(g.coords(v))).collect())
    }

    /// Discrete Dirac mass `delta_v / haar_weight`, unit mass.
    pub fn delta(g: &LatticeGroup, v: usize) -> Result<Self> {
        g.check_node(v)?;
        let mut f = GridFunction::zeros(g);
        f.values[v] = 1.0 / g.haar_weight();
        Ok(f)
    }

    pub(crate) fn from_raw(id: LatticeId, values: Vec<f64>) -> Self {
        GridFunction { lattice: id, values, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn lattice_id(&self) -> LatticeId {
        self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ensure_on(&self, g: &LatticeGroup) -> Result<()> {
        if self.lattice == g.id() {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    pub fn ensure_same(&self, other: &GridFunction) -> Result<()> {
        if self.lattice == other.lattice {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn zero_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction { lattice: self.lattice, values: self.values.iter().map(|&v| f(v)).collect(), label: None }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(GridFunction {
            lattice: self.lattice,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            label: None,
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Haar-weighted inner product.
    pub fn inner(&self, other: &GridFunction, g: &LatticeGroup) -> Result<f64> {
        self.ensure_on(g)?;
        other.ensure_on(g)?;
        Ok(g.haar_weight() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>())
    }

    /// Plain Euclidean norm of the value vector, for relative defects.
    pub fn vec_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `|self - other| / |other|` in the value-vector norm.
    pub fn rel_diff(&self, other: &GridFunction) -> f64 {
        let num: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let den = other.vec_norm();
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }
}
