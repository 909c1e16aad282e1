//! Numerical checks of the improved Sobolev inequalities, the modified
//! Poincare estimate, and replays of the steps of their proofs.

pub mod bandlimit;
pub mod constant;
pub mod heat_bound;
pub mod params;
pub mod poincare;
pub mod report;
pub mod sobolev;
pub mod threshold;
pub mod weak;

pub use bandlimit::{approx_norm_check, band_limit_approx, full_band_index, BandLimitReport};
pub use constant::{estimate_best_constant, member_ratio, BestConstant};
pub use heat_bound::{heat_kernel_bound_check, HeatBoundReport};
pub use params::{validate_params, ParamInput, SoboParams, Variant};
pub use poincare::{m0_gradient_sweep, poincare_proof_trace, poincare_ratio, KernelGradientSweep, PoincareCurve, PoincareTrace};
pub use report::{judge, InequalityReport, SweepPoint, Verdict};
pub use sobolev::{check_improved_sobolev, check_improved_sobolev_with, dilation_sweep, pointwise_split_trace, CheckOptions, SplitTrace};
pub use threshold::{strong_p1_proof_trace, threshold_apply, threshold_lemma_check, StrongTrace, ThresholdReport, ThresholdSpec};
pub use weak::{weak_p1_trace, AlphaGrid, WeakTrace};
