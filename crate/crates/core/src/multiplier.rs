//! Closed-form spectral multipliers and smooth cut-offs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Highest derivative order served by [`MultiplierSpec::eval_derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 4;

fn bump(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth step equal to 1 on `(0, lo]` and 0 on `[1, inf)`.
fn smooth_step(l: f64, lo: f64) -> (f64, f64) {
    if l <= lo {
        (1.0, 0.0)
    } else if l >= 1.0 {
        (0.0, 1.0)
    } else {
        let a = bump(1.0 - l);
        let b = bump(l - lo);
        (a / (a + b), b / (a + b))
    }
}

pub fn theta0(l: f64) -> f64 {
    smooth_step(l, 0.5).0
}

pub fn theta1(l: f64) -> f64 {
    smooth_step(l, 0.5).1
}

pub fn psi(l: f64) -> f64 {
    theta0(l / 2.0) - theta0(l)
}

pub fn lowpass_chi(l: f64) -> f64 {
    smooth_step(l, 0.25).0
}

/// `lambda^{s/2-1} (1 - e^{-lambda})`.
fn poincare_m(s: f64, l: f64) -> f64 {
    l.powf(s / 2.0 - 1.0) * -(-l).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MultiplierSpec {
    Heat,
    Power { s: f64 },
    PoincareM { s: f64 },
    Theta0,
    Theta1,
    M0 { s: f64 },
    M1 { s: f64 },
    MA { s: f64 },
    MB { s: f64 },
    Psi,
    Phi,
    /// `lambda^{s/2-1} psi(lambda)`; equals `Phi` at `s = 0`.
    DyadicPiece { s: f64 },
    LowpassChi,
    Bandlimit { j: i32 },
}

impl MultiplierSpec {
    /// Value at `lambda > 0`; non-positive arguments return the zero-mode value or NaN.
    pub fn value(&self, l: f64) -> f64 {
        if l <= 0.0 {
            return self.value_at_zero().unwrap_or(f64::NAN);
        }
        match *self {
            MultiplierSpec::Heat => (-l).exp(),
            MultiplierSpec::Power { s } => l.powf(s),
            MultiplierSpec::PoincareM { s } => poincare_m(s, l),
            MultiplierSpec::Theta0 => theta0(l),
            MultiplierSpec::Theta1 => theta1(l),
            MultiplierSpec::M0 { s } => poincare_m(s, l) * theta0(l),
            MultiplierSpec::M1 { s } => poincare_m(s, l) * theta1(l),
            MultiplierSpec::MA { s } => l.powf(s / 2.0 - 1.0) * theta1(l),
            MultiplierSpec::MB { s } => l.powf(s / 2.0 - 1.0) * (-l).exp() * theta1(l),
            MultiplierSpec::Psi => psi(l),
            MultiplierSpec::Phi => psi(l) / l,
            MultiplierSpec::DyadicPiece { s } => l.powf(s / 2.0 - 1.0) * psi(l),
            MultiplierSpec::LowpassChi => lowpass_chi(l),
            MultiplierSpec::Bandlimit { j } => {
                let k = 2f64.powi(2 * j);
                lowpass_chi(l / k) - lowpass_chi(l * k)
            }
        }
    }

    /// Limit at `0+`, or `None` when the multiplier is unbounded there.
    pub fn value_at_zero(&self) -> Option<f64> {
        let power_limit = |e: f64| {
            if e > 0.0 {
                Some(0.0)
            } else if e == 0.0 {
                Some(1.0)
            } else {
                None
            }
        };
        match *self {
            MultiplierSpec::Heat | MultiplierSpec::Theta0 | MultiplierSpec::LowpassChi => Some(1.0),
            MultiplierSpec::Power { s } => power_limit(s),
            MultiplierSpec::PoincareM { s } | MultiplierSpec::M0 { s } => power_limit(s / 2.0),
            MultiplierSpec::Theta1
            | MultiplierSpec::M1 { .. }
            | MultiplierSpec::MA { .. }
            | MultiplierSpec::MB { .. }
            | MultiplierSpec::Psi
            | MultiplierSpec::Phi
            | MultiplierSpec::DyadicPiece { .. }
            | MultiplierSpec::Bandlimit { .. } => Some(0.0),
        }
    }

    pub fn eval(&self, l: f64) -> Result<f64> {
        if !(l > 0.0) {
            return Err(Error::NonPositiveArgument(l));
        }
        Ok(self.value(l))
    }

    /// `r`-th derivative at `lambda > 0`; closed form for heat and powers,
    /// five-point differences with a step proportional to `lambda` otherwise.
    pub fn eval_derivative(&self, r: usize, l: f64) -> Result<f64> {
        if r > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder { requested: r, available: MAX_DERIVATIVE_ORDER });
        }
        if !(l > 0.0) {
            return Err(Error::NonPositiveArgument(l));
        }
        if r == 0 {
            return Ok(self.value(l));
        }
        match *self {
            MultiplierSpec::Heat => Ok(if r % 2 == 0 { 1.0 } else { -1.0 } * (-l).exp()),
            MultiplierSpec::Power { s } => {
                let falling: f64 = (0..r).map(|i| s - i as f64).product();
                Ok(falling * l.powf(s - r as f64))
            }
            _ => Ok(self.finite_difference(r, l)),
        }
    }

    fn finite_difference(&self, r: usize, l: f64) -> f64 {
        const STEP: [f64; 4] = [1e-3, 2e-3, 5e-3, 1e-2];
        let d = STEP[r - 1] * l;
        let f = |k: f64| self.value(l + k * d);
        let (m2, m1, z, p1, p2) = (f(-2.0), f(-1.0), f(0.0), f(1.0), f(2.0));
        match r {
            1 => (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * d),
            2 => (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * d * d),
            3 => (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * d * d * d),
            _ => (p2 - 4.0 * p1 + 6.0 * z - 4.0 * m1 + m2) / (d * d * d * d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid { min: 1e-6, max: 1e6, points: 4096 }
    }
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        stats::geomspace(self.min, self.max, self.points)
    }

    /// Same density, one more decade on each side.
    pub fn widened(&self) -> LambdaGrid {
        let per_decade = (self.points - 1) as f64 / (self.max / self.min).log10();
        LambdaGrid {
            min: self.min / 10.0,
            max: self.max * 10.0,
            points: self.points + (2.0 * per_decade).round() as usize,
        }
    }

    pub fn doubled(&self) -> LambdaGrid {
        LambdaGrid { points: 2 * self.points - 1, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub k: usize,
    pub value: f64,
    pub argmax_lambda: f64,
    pub argmax_order: usize,
    pub grid: LambdaGrid,
    /// Value on the grid widened by a decade at both ends.
    pub widened_value: f64,
    /// Set when widening the grid increases the sup by more than 1%.
    pub unbounded: bool,
}

fn grid_sup(spec: &MultiplierSpec, k: usize, grid: &LambdaGrid) -> Result<(f64, f64, usize)> {
    let mut best = (0.0, grid.min, 1);
    for l in grid.values() {
        let w = (1.0 + l).powi(k as i32);
        for r in 1..=k {
            let v = w * spec.eval_derivative(r, l)?.abs();
            if v > best.0 || !v.is_finite() {
                best = (v, l, r);
                if !v.is_finite() {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

/// `sup (1+lambda)^k |m^(r)(lambda)|` over `1 <= r <= k` and the grid.
pub fn seminorm_k(spec: &MultiplierSpec, k: usize, grid: &LambdaGrid) -> Result<SeminormReport> {
    if k == 0 || k > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrder { requested: k, available: MAX_DERIVATIVE_ORDER });
    }
    let (value, argmax_lambda, argmax_order) = grid_sup(spec, k, grid)?;
    let (widened_value, _, _) = grid_sup(spec, k, &grid.widened())?;
    let unbounded = !value.is_finite() || widened_value > 1.01 * value;
    Ok(SeminormReport { k, value, argmax_lambda, argmax_order, grid: *grid, widened_value, unbounded })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub s: f64,
    pub grid: LambdaGrid,
    pub dyadic_terms: usize,
    /// `|m0 + m1 - m|`.
    pub split_defect: f64,
    /// `|m_a - m_b - m1|`.
    pub cut_defect: f64,
    /// `|sum_j 2^{-j(1-s/2)} phi_s(2^-j lambda) - m_a(lambda)|`.
    pub dyadic_defect: f64,
    /// `|sum_j psi(2^-j lambda) - theta1(lambda)|`.
    pub partition_defect: f64,
}

impl IdentityReport {
    pub fn max_defect(&self) -> f64 {
        self.split_defect.max(self.cut_defect).max(self.dyadic_defect).max(self.partition_defect)
    }
}

/// Pointwise checks of the section 6.2 decompositions on `[1e-6, 2^19]`.
pub fn decomposition_identities_check(s: f64) -> Result<IdentityReport> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("s = {s} outside [0, 1)")));
    }
    const J: usize = 20;
    let grid = LambdaGrid { min: 1e-6, max: 2f64.powi(J as i32 - 1), points: 10_000 };
    let m = MultiplierSpec::PoincareM { s };
    let (m0, m1) = (MultiplierSpec::M0 { s }, MultiplierSpec::M1 { s });
    let (ma, mb) = (MultiplierSpec::MA { s }, MultiplierSpec::MB { s });
    let piece = MultiplierSpec::DyadicPiece { s };
    let mut rep = IdentityReport {
        s,
        grid,
        dyadic_terms: J + 1,
        split_defect: 0.0,
        cut_defect: 0.0,
        dyadic_defect: 0.0,
        partition_defect: 0.0,
    };
    for l in grid.values() {
        rep.split_defect = rep.split_defect.max((m0.value(l) + m1.value(l) - m.value(l)).abs());
        rep.cut_defect = rep.cut_defect.max((ma.value(l) - mb.value(l) - m1.value(l)).abs());
        let mut dyadic = 0.0;
        let mut partition = 0.0;
        for j in 0..=J {
            let scale = 2f64.powi(-(j as i32));
            dyadic += scale.powf(1.0 - s / 2.0) * piece.value(scale * l);
            partition += psi(scale * l);
        }
        rep.dyadic_defect = rep.dyadic_defect.max((dyadic - ma.value(l)).abs());
        rep.partition_defect = rep.partition_defect.max((partition - theta1(l)).abs());
    }
    Ok(rep)
}
