//! Exponent bookkeeping for the improved Sobolev inequalities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `|f|_{W^{s,q}} <= C |f|_{W^{s1,p}}^theta |f|_{B^{-beta}}^{1-theta}`, `p > 1`.
    StrongPgt1,
    /// `|f|_q <= C |grad f|_1^theta |f|_{B^{-beta}}^{1-theta}`.
    StrongP1,
    /// `|f|_{W^{s,q}_inf} <= C |grad f|_1^theta |f|_{B^{-beta}}^{1-theta}`.
    WeakP1,
    /// The modified Poincare estimate.
    Poincare,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::StrongPgt1 => "strong_pgt1",
            Variant::StrongP1 => "strong_p1",
            Variant::WeakP1 => "weak_p1",
            Variant::Poincare => "poincare",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strong_pgt1" | "pgt1" => Ok(Variant::StrongPgt1),
            "strong_p1" | "strong1" => Ok(Variant::StrongP1),
            "weak_p1" | "weak1" => Ok(Variant::WeakP1),
            "poincare" => Ok(Variant::Poincare),
            other => Err(Error::InvalidArgument(format!("unknown variant {other:?}"))),
        }
    }
}

/// Free exponents as supplied by a caller; derived ones may be left out.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamInput {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub s1: Option<f64>,
    pub beta: Option<f64>,
}

/// A consistent exponent tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoboParams {
    pub variant: Variant,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub s1: f64,
    pub beta: f64,
    pub theta: f64,
    /// `s1 - s`, the order of the negative power in the pointwise argument.
    pub alpha: f64,
}

const REL_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn need(name: &str, v: Option<f64>, errors: &mut Vec<String>) -> f64 {
    match v {
        Some(x) if x.is_finite() => x,
        Some(x) => {
            errors.push(format!("{name} = {x} is not finite"));
            f64::NAN
        }
        None => {
            errors.push(format!("{name} is required"));
            f64::NAN
        }
    }
}

fn check_fixed(name: &str, given: Option<f64>, value: f64, rule: &str, errors: &mut Vec<String>) {
    if let Some(x) = given {
        if !close(x, value) {
            errors.push(format!("{name} = {x} violates {rule} (expected {value})"));
        }
    }
}

/// Fills `theta`, `alpha` and whichever of `s` or `beta` is missing, and
/// names every violated relation.
pub fn validate_params(variant: Variant, input: &ParamInput) -> Result<SoboParams> {
    let mut errors = Vec::new();
    let params = match variant {
        Variant::StrongPgt1 => {
            let p = need("p", input.p, &mut errors);
            let q = need("q", input.q, &mut errors);
            let s1 = need("s1", input.s1, &mut errors);
            if !(p > 1.0 && p < q && q.is_finite()) {
                errors.push(format!("exponents must satisfy 1 < p < q < inf, got p = {p}, q = {q}"));
            }
            let theta = p / q;
            let (s, beta) = match (input.s, input.beta) {
                (Some(s), Some(b)) => {
                    let expected = theta * s1 - (1.0 - theta) * b;
                    if !close(s, expected) {
                        errors.push(format!(
                            "s = {s} violates s = theta s1 - (1 - theta) beta (expected {expected})"
                        ));
                    }
                    (s, b)
                }
                (None, Some(b)) => (theta * s1 - (1.0 - theta) * b, b),
                (Some(s), None) => (s, (theta * s1 - s) / (1.0 - theta)),
                (None, None) => {
                    errors.push("one of s or beta is required".into());
                    (f64::NAN, f64::NAN)
                }
            };
            if !(-beta < s && s < s1) {
                errors.push(format!("order constraint -beta < s < s1 violated: beta = {beta}, s = {s}, s1 = {s1}"));
            }
            SoboParams { variant, p, q, s, s1, beta, theta, alpha: s1 - s }
        }
        Variant::StrongP1 => {
            let q = need("q", input.q, &mut errors);
            if !(q > 1.0 && q.is_finite()) {
                errors.push(format!("exponent must satisfy 1 < q < inf, got q = {q}"));
            }
            let theta = 1.0 / q;
            let beta = theta / (1.0 - theta);
            check_fixed("p", input.p, 1.0, "p = 1", &mut errors);
            check_fixed("s", input.s, 0.0, "s = 0", &mut errors);
            check_fixed("s1", input.s1, 1.0, "s1 = 1", &mut errors);
            check_fixed("beta", input.beta, beta, "beta = theta / (1 - theta)", &mut errors);
            SoboParams { variant, p: 1.0, q, s: 0.0, s1: 1.0, beta, theta, alpha: 1.0 }
        }
        Variant::WeakP1 => {
            let q = need("q", input.q, &mut errors);
            let s = need("s", input.s, &mut errors);
            if !(q > 1.0 && q.is_finite()) {
                errors.push(format!("exponent must satisfy 1 < q < inf, got q = {q}"));
            }
            if !(0.0 < s && s < 1.0 / q) {
                errors.push(format!("order constraint 0 < s < 1/q violated: s = {s}, q = {q}"));
            }
            let theta = 1.0 / q;
            let beta = (1.0 - s * q) / (q - 1.0);
            check_fixed("p", input.p, 1.0, "p = 1", &mut errors);
            check_fixed("s1", input.s1, 1.0, "s1 = 1", &mut errors);
            check_fixed("beta", input.beta, beta, "beta = (1 - s q) / (q - 1)", &mut errors);
            SoboParams { variant, p: 1.0, q, s, s1: 1.0, beta, theta, alpha: 1.0 - s }
        }
        Variant::Poincare => {
            let s = input.s.unwrap_or(0.0);
            if !(0.0..1.0).contains(&s) {
                errors.push(format!("poincare order must satisfy 0 <= s < 1, got s = {s}"));
            }
            SoboParams { variant, p: 1.0, q: 1.0, s, s1: 1.0, beta: 0.0, theta: 1.0, alpha: 1.0 - s }
        }
    };
    if errors.is_empty() {
        Ok(params)
    } else {
        Err(Error::InvalidParams(errors))
    }
}

impl SoboParams {
    pub fn strong_pgt1(p: f64, q: f64, s1: f64, beta: f64) -> Result<SoboParams> {
        validate_params(Variant::StrongPgt1, &ParamInput { p: Some(p), q: Some(q), s1: Some(s1), beta: Some(beta), s: None })
    }

    pub fn strong_p1(q: f64) -> Result<SoboParams> {
        validate_params(Variant::StrongP1, &ParamInput { q: Some(q), ..Default::default() })
    }

    pub fn weak_p1(q: f64, s: f64) -> Result<SoboParams> {
        validate_params(Variant::WeakP1, &ParamInput { q: Some(q), s: Some(s), ..Default::default() })
    }

    pub fn poincare(s: f64) -> Result<SoboParams> {
        validate_params(Variant::Poincare, &ParamInput { s: Some(s), ..Default::default() })
    }

    /// Besov order on the right-hand side.
    pub fn besov_order(&self) -> f64 {
        self.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pgt1_example() {
        let p = SoboParams::strong_pgt1(2.0, 4.0, 1.0, 1.0).unwrap();
        assert_eq!((p.theta, p.s, p.alpha), (0.5, 0.0, 1.0));
    }

    #[test]
    fn weak_example() {
        let p = SoboParams::weak_p1(2.0, 0.25).unwrap();
        assert_eq!((p.theta, p.beta), (0.5, 0.5));
    }

    #[test]
    fn order_violation_is_named() {
        let input = ParamInput { p: Some(2.0), q: Some(4.0), s1: Some(1.0), s: Some(1.5), beta: None };
        match validate_params(Variant::StrongPgt1, &input) {
            Err(Error::InvalidParams(e)) => assert!(e.iter().any(|m| m.contains("-beta < s < s1")), "{e:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inconsistent_tuple_rejected() {
        let input = ParamInput { p: Some(2.0), q: Some(4.0), s1: Some(1.0), s: Some(0.2), beta: Some(1.0) };
        assert!(validate_params(Variant::StrongPgt1, &input).is_err());
        assert!(SoboParams::weak_p1(2.0, 0.6).is_err());
        assert!(SoboParams::poincare(1.0).is_err());
        assert!(SoboParams::strong_p1(1.0).is_err());
    }

    #[test]
    fn variant_names_parse() {
        for v in [Variant::StrongPgt1, Variant::StrongP1, Variant::WeakP1, Variant::Poincare] {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("weak1".parse::<Variant>().unwrap(), Variant::WeakP1);
    }

    proptest! {
        #[test]
        fn pgt1_relations_hold(p in 1.05f64..4.0, dq in 0.1f64..4.0, s1 in 0.1f64..2.0, beta in 0.1f64..2.0) {
            let q = p + dq;
            if let Ok(par) = SoboParams::strong_pgt1(p, q, s1, beta) {
                prop_assert!((par.s - (par.theta * s1 - (1.0 - par.theta) * beta)).abs() < 1e-12);
                prop_assert!((par.alpha / (par.beta + par.s1) - (1.0 - par.theta)).abs() < 1e-12);
            }
        }
    }
}
