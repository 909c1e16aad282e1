//! Invariant vector fields, gradient, sub-Laplacian and group convolution.
//!
//! `X_j f(v) = (f(v g_j) - f(v g_j^-1)) / 2h` and `Y_j` uses left
//! multiplication instead. The sub-Laplacian is the compact second difference
//! `J f(v) = sum_j (2 f(v) - f(v g_j) - f(v g_j^-1)) / h^2`.

use rustfft::num_complex::Complex64;

use crate::error::Result;
use crate::fft::NdFft;
use crate::grid::GridFunction;
use crate::lattice::{Field, LatticeGroup};

pub fn apply_field(g: &LatticeGroup, field: Field, f: &GridFunction) -> Result<GridFunction> {
    f.ensure_on(g)?;
    let st = g.field_stencil(field)?;
    Ok(GridFunction::from_raw(g.id(), st.apply(f.values())))
}

pub fn gradient(g: &LatticeGroup, f: &GridFunction) -> Result<Vec<GridFunction>> {
    (0..g.field_count()).map(|j| apply_field(g, Field::Left(j), f)).collect()
}

/// Gradient along the right-invariant fields.
pub fn right_gradient(g: &LatticeGroup, f: &GridFunction) -> Result<Vec<GridFunction>> {
    (0..g.field_count()).map(|j| apply_field(g, Field::Right(j), f)).collect()
}

fn l1_of_length(g: &LatticeGroup, parts: &[GridFunction]) -> f64 {
    let n = g.node_count();
    let mut acc = 0.0;
    for v in 0..n {
        acc += parts.iter().map(|p| p.values()[v] * p.values()[v]).sum::<f64>().sqrt();
    }
    acc * g.haar_weight()
}

/// `sum_v w |grad f(v)|`.
pub fn grad_l1_norm(g: &LatticeGroup, f: &GridFunction) -> Result<f64> {
    Ok(l1_of_length(g, &gradient(g, f)?))
}

pub fn right_grad_l1_norm(g: &LatticeGroup, f: &GridFunction) -> Result<f64> {
    Ok(l1_of_length(g, &right_gradient(g, f)?))
}

pub fn sub_laplacian_apply(g: &LatticeGroup, f: &GridFunction) -> Result<GridFunction> {
    f.ensure_on(g)?;
    Ok(GridFunction::from_raw(g.id(), g.laplacian().apply(f.values())))
}

/// `(f * K)(x) = sum_y w f(y) K(y^-1 x)`.
pub fn group_convolution(g: &LatticeGroup, f: &GridFunction, kernel: &GridFunction) -> Result<GridFunction> {
    f.ensure_on(g)?;
    kernel.ensure_on(g)?;
    if g.is_euclidean() {
        let fft = NdFft::new(&g.axis_lengths());
        let a = fft.forward_real(f.values());
        let b = fft.forward_real(kernel.values());
        let w = g.haar_weight();
        let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y * w).collect();
        return Ok(GridFunction::from_raw(g.id(), fft.inverse_real(prod)));
    }
    let n = g.node_count();
    let inv: Vec<usize> = (0..n).map(|y| g.inverse(y)).collect();
    let mut out = vec![0.0; n];
    for (y, &fy) in f.values().iter().enumerate() {
        if fy == 0.0 {
            continue;
        }
        let c = fy * g.haar_weight();
        for (x, o) in out.iter_mut().enumerate() {
            *o += c * kernel.values()[g.product(inv[y], x)];
        }
    }
    Ok(GridFunction::from_raw(g.id(), out))
}

/// `(tau_a f)(x) = f(a^-1 x)`.
pub fn left_translate(g: &LatticeGroup, a: usize, f: &GridFunction) -> Result<GridFunction> {
    f.ensure_on(g)?;
    g.check_node(a)?;
    let ai = g.inverse(a);
    let values = (0..g.node_count()).map(|x| f.values()[g.product(ai, x)]).collect();
    Ok(GridFunction::from_raw(g.id(), values))
}
