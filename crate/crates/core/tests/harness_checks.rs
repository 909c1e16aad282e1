use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sobolab_core::families::{FamilyKind, FamilySpec};
use sobolab_core::grid::GridFunction;
use sobolab_core::harness::*;
use sobolab_core::lattice::*;
use sobolab_core::norms::ThermicGrid;
use sobolab_core::ops;
use sobolab_core::spectral::*;
use sobolab_core::stats;
use std::f64::consts::PI;

fn build(fam: GroupFamily, l: f64, n: usize) -> LatticeGroup {
    build_lattice(GroupSpec::new(fam, l, n)).unwrap()
}

#[test]
fn parameter_examples() {
    let p = SoboParams::strong_pgt1(2.0, 4.0, 1.0, 1.0).unwrap();
    assert_eq!((p.theta, p.s, p.alpha), (0.5, 0.0, 1.0));
    let w = SoboParams::weak_p1(2.0, 0.25).unwrap();
    assert_eq!((w.theta, w.beta), (0.5, 0.5));
    // t_alpha = alpha^{-2/(beta+s)}
    assert!((-2.0 / (w.beta + w.s) + 8.0 / 3.0).abs() < 1e-15);
    let err = SoboParams::strong_pgt1(2.0, 4.0, -2.0, 1.0).unwrap_err().to_string();
    assert!(err.contains("order constraint -beta < s < s1"), "{err}");
}

#[test]
fn heisenberg_strong_p1_ratio_is_refinement_stable() {
    let ratio = |n: usize| {
        let g = build(GroupFamily::Heisenberg, n as f64, n);
        let rep = decompose(&g, SpectralMode::DenseEig).unwrap();
        let f = FamilySpec::new(FamilyKind::Bump { radius: 3.0 }).member(&g, 1.0).unwrap();
        check_improved_sobolev(&g, &rep, &f, &SoboParams::strong_p1(2.0).unwrap()).unwrap().ratio.unwrap()
    };
    let (a, b) = (ratio(12), ratio(16));
    assert!(a.is_finite() && (a / b - 1.0).abs() < 0.1, "{a} vs {b}");
}

#[test]
fn split_trace_over_a_family() {
    let g = build(GroupFamily::Euclidean(2), 32.0, 128);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let p = SoboParams::strong_pgt1(2.0, 4.0, 1.0, 1.0).unwrap();
    let fam = FamilySpec::new(FamilyKind::Gaussian { width: 2.0 }).with_dilations(vec![0.5, 0.7, 1.0, 1.4, 2.0]);
    let mut constants = Vec::new();
    for (_, f) in fam.members(&g).unwrap() {
        let tr = pointwise_split_trace(&g, &rep, &f, &p, 1.0, &QuadratureSpec::default(), &ThermicGrid::default()).unwrap();
        assert!(tr.recombination_defect <= 1e-10);
        assert_eq!(tr.heat_bound_violations, 0);
        constants.push(tr.maximal_constant);
    }
    let env = stats::Envelope::of(&constants).unwrap();
    assert!(env.drift() <= 0.1, "{constants:?}");
}

#[test]
fn poincare_single_mode_closed_form() {
    let l = 2.0 * PI;
    let n = 128;
    let g = build(GroupFamily::Euclidean(1), l, n);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let h = g.spacing();
    let m = 4.0;
    let f = GridFunction::from_fn(&g, |x| (m * x[0]).cos()).unwrap();
    let lam = 4.0 * (m * h / 2.0).sin().powi(2) / (h * h);
    let l1 = |u: &dyn Fn(f64) -> f64| (0..n).map(|v| u(g.coords(v)[0]).abs()).sum::<f64>() * h;
    let cos_l1 = l1(&|x| (m * x).cos());
    let grad_l1 = (m * h).sin().abs() / h * l1(&|x| (m * x).sin());
    let ts = stats::geomspace(1e-5, 10.0, 40);
    let curve = poincare_ratio(&g, &rep, &f, 0.0, &ts).unwrap();
    for (t, r) in ts.iter().zip(&curve.ratios) {
        let exact = -(-lam * t).exp_m1() * cos_l1 / (t.sqrt() * grad_l1);
        assert!((r - exact).abs() <= 1e-10 * exact, "t = {t}");
    }
    assert!(curve.ratios[0] < 0.1 * curve.sup);
}

#[test]
fn threshold_examples() {
    let g = build(GroupFamily::Euclidean(2), 8.0, 32);
    let spec = ThresholdSpec::new(0.5, 12.0).unwrap();
    let small = GridFunction::from_fn(&g, |x| 0.5 * (x[0]).sin()).unwrap();
    assert!(threshold_apply(&small, &spec).is_zero());
    let big = GridFunction::constant(&g, 13.0 * 0.5);
    assert!(threshold_apply(&big, &spec).values().iter().all(|v| (*v - 11.0 * 0.5).abs() < 1e-15));

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..20 {
        let f = FamilySpec::new(FamilyKind::RandomBandlimited { max_frequency: 4, seed: case })
            .member(&g, 1.0)
            .unwrap();
        let alpha = rng.random_range(0.01..0.5) * f.max_abs();
        let m = rng.random_range(10.5..60.0);
        let spec = ThresholdSpec::new(alpha, m).unwrap();
        let r = threshold_lemma_check(&g, &f, &threshold_apply(&f, &spec), &spec).unwrap();
        assert!(r.clean(), "case {case}: {r:?}");
    }
}

#[test]
fn strong_trace_on_a_bump() {
    let g = build(GroupFamily::Euclidean(2), 32.0, 256);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let f = FamilySpec::new(FamilyKind::Bump { radius: 4.0 }).member(&g, 1.0).unwrap();
    let tr = strong_p1_proof_trace(&g, &rep, &f, &SoboParams::strong_p1(2.0).unwrap(), 20.0, &ThermicGrid::default(), &AlphaGrid::default())
        .unwrap();
    assert_eq!(tr.sup_bound_violations, 0);
    assert!(tr.inclusion_violations.iter().all(|v| *v == 0));
    assert!(tr.i2_constant <= 1.05);
    assert!(tr.assembly_holds);
    assert!(tr.assembly_defect <= 0.02, "{}", tr.assembly_defect);
    assert!(SoboParams::strong_p1(2.0).is_ok_and(|p| strong_p1_proof_trace(&g, &rep, &f, &p, 10.0, &ThermicGrid::default(), &AlphaGrid::default()).is_err()));
}

#[test]
fn band_limited_growth_is_flat_in_the_plane() {
    let g = build(GroupFamily::Euclidean(2), 32.0, 128);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let f = FamilySpec::new(FamilyKind::Bump { radius: 4.0 }).member(&g, 1.0).unwrap();
    let r = approx_norm_check(&g, &rep, &f, &[1, 2, 3, 4, 5], 2.0).unwrap();
    assert!((r.fitted_exponent.unwrap() - r.predicted_exponent).abs() <= 0.3, "{r:?}");
    assert!(r.l2_nonincreasing);
    assert!(r.lq_norms.last().unwrap() <= &(r.lq_of_f * (1.0 + 1e-9)));
}

#[test]
fn heat_gradient_bounds() {
    let l = 128.0;
    let g = build(GroupFamily::Euclidean(1), l, 512);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let h = g.spacing();
    let r = heat_kernel_bound_check(&g, &rep, &stats::geomspace(4.0 * h * h, (0.1 * l).powi(2), 16), 1.0, 5.0).unwrap();
    assert!(r.lp_envelope.unwrap().drift() <= 0.05, "{:?}", r.lp);
    assert!(r.gaussian.iter().chain(&r.lp).all(|v| v.is_finite() && *v > 0.0));

    // at N = 16 the z period is 16 h^2 and the kernel wraps before t = 10 h^2
    let g = build(GroupFamily::Heisenberg, 24.0, 24);
    let rep = decompose(&g, SpectralMode::chebyshev()).unwrap();
    let r = heat_kernel_bound_check(&g, &rep, &stats::geomspace(1.0, 10.0, 8), 1.0, 5.0).unwrap();
    let env = r.lp_envelope.unwrap();
    assert!(env.max / env.min <= 2.0, "{:?}", r.lp);
}

#[test]
fn best_constant_search() {
    let p = SoboParams::strong_pgt1(2.0, 4.0, 1.0, 1.0).unwrap();
    let fam = FamilySpec::new(FamilyKind::Gaussian { width: 2.0 });
    let opts = CheckOptions::default();

    let g = build(GroupFamily::Euclidean(2), 32.0, 64);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let small = fam.clone().with_dilations(vec![0.5, 1.0, 2.0]);
    let a = estimate_best_constant(&g, &rep, &small, &p, &opts).unwrap();
    let b = estimate_best_constant(&g, &rep, &small.with_amplitude(10.0), &p, &opts).unwrap();
    assert!((a.estimate - b.estimate).abs() <= 1e-10 * a.estimate);
    assert!(a.estimate >= a.sweep_max);

    let g = build(GroupFamily::Euclidean(2), 128.0, 512);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let c = estimate_best_constant(&g, &rep, &fam, &p, &opts).unwrap();
    assert!(c.interior, "{:?}", c.sweep);
    assert!(c.estimate >= c.sweep_max);
}

#[test]
fn left_side_uses_the_lattice_gradient() {
    let g = build(GroupFamily::Euclidean(1), 16.0, 64);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let f = FamilySpec::new(FamilyKind::Gaussian { width: 1.0 }).member(&g, 1.0).unwrap();
    let r = check_improved_sobolev(&g, &rep, &f, &SoboParams::strong_p1(3.0).unwrap()).unwrap();
    assert_eq!(r.right_factors[0], ops::grad_l1_norm(&g, &f).unwrap());
}
