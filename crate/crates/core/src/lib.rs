//! Discrete harmonic analysis on lattice groups.
//!
//! Builds finite stand-ins for polynomial-growth Lie groups, realizes the
//! sub-Laplacian and its functional calculus, evaluates the Sobolev, Lorentz
//! and thermic Besov norms, and checks improved Sobolev inequalities together
//! with numerical replays of their proofs.

pub mod error;
pub mod families;
mod fft;
pub mod grid;
pub mod harness;
pub mod lattice;
pub mod multiplier;
pub mod norms;
pub mod ops;
#[cfg(feature = "rototranslation")]
mod se2;
mod sparse;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use families::{FamilyKind, FamilySpec};
pub use grid::GridFunction;
pub use lattice::{build_lattice, Field, GroupFamily, GroupSpec, LatticeGroup};
pub use harness::{InequalityReport, SoboParams, Variant, Verdict};
pub use multiplier::MultiplierSpec;
pub use norms::{LpRoute, ThermicGrid};
pub use spectral::{decompose, SpectralMode, SpectralRep};
