//! Shared fixtures for the criterion benches.

use sobolab_core::families::{FamilyKind, FamilySpec};
use sobolab_core::lattice::{build_lattice, GroupFamily, GroupSpec, LatticeGroup};
use sobolab_core::GridFunction;

pub fn plane(n: usize) -> LatticeGroup {
    build_lattice(GroupSpec::new(GroupFamily::Euclidean(2), n as f64 / 4.0, n)).expect("valid plane")
}

/// Unit spacing Heisenberg lattice.
pub fn heisenberg(n: usize) -> LatticeGroup {
    build_lattice(GroupSpec::new(GroupFamily::Heisenberg, n as f64, n)).expect("valid heisenberg lattice")
}

pub fn gaussian(g: &LatticeGroup, width: f64) -> GridFunction {
    FamilySpec::new(FamilyKind::Gaussian { width }).member(g, 1.0).expect("gaussian member")
}
