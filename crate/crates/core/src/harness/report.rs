//! Report types shared by the harness checks.

use serde::{Deserialize, Serialize};

use super::params::SoboParams;
use crate::stats::Envelope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Zero function or zero gradient; no ratio is defined.
    Degenerate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Degenerate => "degenerate",
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One member of a parametric sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub params: SoboParams,
    pub left_norm: f64,
    pub right_product: f64,
    /// `left / right`, absent when the input is degenerate.
    pub ratio: Option<f64>,
    /// The right-hand factors: the Sobolev (or gradient) norm and the Besov norm.
    pub right_factors: [f64; 2],
    /// Time at which the Besov sup was attained and whether it sits on a grid end.
    pub besov_argmax_t: f64,
    pub besov_at_grid_end: bool,
    pub family_sweep: Vec<SweepPoint>,
    pub envelope: Option<Envelope>,
    pub verdict: Verdict,
}

impl InequalityReport {
    /// Envelope drift `max/min - 1` of the family sweep.
    pub fn drift(&self) -> Option<f64> {
        self.envelope.map(|e| e.drift())
    }
}

/// Sweep envelope and the verdict against a stability band.
pub fn judge(points: &[SweepPoint], band: f64) -> (Option<Envelope>, Verdict) {
    let ratios: Vec<f64> = points.iter().filter_map(|p| p.ratio).collect();
    if ratios.is_empty() {
        return (None, Verdict::Degenerate);
    }
    let env = Envelope::of(&ratios);
    let ok = ratios.len() == points.len() && env.is_some_and(|e| e.min > 0.0 && e.drift() <= band);
    (env, Verdict::from_bool(ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn judge_band() {
        let pts = |r: &[f64]| r.iter().map(|&x| SweepPoint { param: 1.0, ratio: Some(x) }).collect::<Vec<_>>();
        assert_eq!(judge(&pts(&[1.0, 1.04]), 0.05).1, Verdict::Pass);
        assert_eq!(judge(&pts(&[1.0, 1.06]), 0.05).1, Verdict::Fail);
        assert_eq!(judge(&[], 0.05).1, Verdict::Degenerate);
    }
}
