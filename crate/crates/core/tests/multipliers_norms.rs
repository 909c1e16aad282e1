use proptest::prelude::*;
use sobolab_core::families::{FamilyKind, FamilySpec};
use sobolab_core::grid::GridFunction;
use sobolab_core::lattice::*;
use sobolab_core::multiplier::*;
use sobolab_core::norms::*;
use sobolab_core::spectral::*;
use std::f64::consts::PI;

fn plane(l: f64, n: usize) -> LatticeGroup {
    build_lattice(GroupSpec::new(GroupFamily::Euclidean(2), l, n)).unwrap()
}

#[test]
fn cutoff_values() {
    assert!((MultiplierSpec::PoincareM { s: 0.0 }.eval(1e-8).unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(theta0(0.25), 1.0);
    assert_eq!(theta0(2.0), 0.0);
    assert!(theta0(0.75) > 0.0 && theta0(0.75) < 1.0);
    for l in [0.01, 0.3, 0.6, 0.9, 5.0] {
        assert!((theta0(l) + theta1(l) - 1.0).abs() < 1e-15);
    }
    for l in [0.1, 0.45, 1.2, 3.0] {
        assert!(MultiplierSpec::Theta0.eval_derivative(1, l).unwrap().abs() < 1e-12);
    }
    let big_j = 12;
    for l in [0.3, 1.0, 7.7, 100.0, 2f64.powi(big_j - 1)] {
        let sum: f64 = (0..=big_j).map(|j| psi(l * 2f64.powi(-j))).sum();
        assert!((sum - theta1(l)).abs() <= 1e-12, "{l}");
    }
    for l in [1e-3, 0.1, 1.0, 10.0] {
        let v = |j| MultiplierSpec::Bandlimit { j }.value(l);
        assert!((v(12) - 1.0).abs() < 1e-15 && v(12) >= v(0));
    }
}

#[test]
fn seminorm_examples() {
    let grid = LambdaGrid::default();
    let heat = seminorm_k(&MultiplierSpec::Heat, 2, &grid).unwrap();
    let fine = seminorm_k(&MultiplierSpec::Heat, 2, &grid.doubled()).unwrap();
    assert!(heat.value.is_finite() && (fine.value / heat.value - 1.0).abs() < 0.01);
    for k in 1..=4 {
        let r = seminorm_k(&MultiplierSpec::MB { s: 0.0 }, k, &grid).unwrap();
        assert!(r.value.is_finite() && !r.unbounded, "k = {k}");
    }
    assert!(seminorm_k(&MultiplierSpec::Power { s: 1.0 }, 1, &grid).unwrap().unbounded);
    assert!(seminorm_k(&MultiplierSpec::Heat, 5, &grid).is_err());
}

#[test]
fn decomposition_identities() {
    for s in [0.0, 0.25, 0.5, 0.9] {
        let r = decomposition_identities_check(s).unwrap();
        assert!(r.split_defect <= 1e-14 && r.cut_defect <= 1e-14, "{r:?}");
        assert!(r.dyadic_defect <= 1e-12 && r.partition_defect <= 1e-12, "{r:?}");
    }
    assert!(decomposition_identities_check(1.0).is_err());
}

#[test]
fn sobolev_of_a_single_mode() {
    let l = 2.0 * PI;
    let g = build_lattice(GroupSpec::new(GroupFamily::Euclidean(1), l, 64)).unwrap();
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let m = 3.0;
    let f = GridFunction::from_fn(&g, |x| (m * x[0]).cos()).unwrap();
    let lam = 4.0 * (PI * m / 64.0).sin().powi(2) / (g.spacing() * g.spacing());
    let l2 = lp_norm(&g, &f, 2.0, LpRoute::Direct).unwrap();
    for s in [0.5, 1.0, 1.5] {
        let v = sobolev_norm(&g, &rep, &f, s, 2.0).unwrap();
        assert!((v - lam.powf(s / 2.0) * l2).abs() < 1e-10 * v);
    }
    assert!((sobolev_norm(&g, &rep, &f, 0.0, 3.0).unwrap() - lp_norm(&g, &f, 3.0, LpRoute::Direct).unwrap()).abs() < 1e-12);
}

#[test]
fn besov_dilation_covariance_and_grid_audit() {
    let g = plane(64.0, 256);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let fam = FamilySpec::new(FamilyKind::Gaussian { width: 2.0 });
    let beta = 1.0;
    let norm = |lam: f64| besov_thermic_norm(&rep, &fam.member(&g, lam).unwrap(), beta, &ThermicGrid::default()).unwrap();
    let base = norm(1.0);
    assert!(!base.at_lower_end && !base.at_upper_end);
    for lam in [0.5, 2.0] {
        let scaled = norm(lam).value / base.value;
        assert!((scaled / lam.powf(-beta) - 1.0).abs() < 0.05, "lambda {lam}: {scaled}");
    }
    let f = fam.member(&g, 1.0).unwrap();
    let dense = besov_thermic_norm(&rep, &f, beta, &ThermicGrid::default().doubled()).unwrap();
    assert!((dense.value / base.value - 1.0).abs() < 0.01);
    // heat flow cannot raise the thermic sup taken on the shifted grid
    let tau = 0.5;
    let flowed = heat_apply(&rep, tau, &f).unwrap();
    let ts = ThermicGrid::default().points(&rep);
    let shifted: Vec<f64> = ts.iter().map(|t| t + tau).collect();
    let a = heat_sup_profile(&rep, &flowed, &ts).unwrap();
    let b = heat_sup_profile(&rep, &f, &shifted).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-10 * y + 1e-14 * f.max_abs(), "{x} {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn weak_sobolev_below_strong(seed in 0u64..1000, s in 0.0f64..1.5, p in 1.2f64..6.0) {
        let g = plane(8.0, 16);
        let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
        let f = FamilySpec::new(FamilyKind::RandomBandlimited { max_frequency: 3, seed }).member(&g, 1.0).unwrap();
        let weak = weak_sobolev_norm(&g, &rep, &f, s, p).unwrap();
        let strong = sobolev_norm(&g, &rep, &f, s, p).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }
}
