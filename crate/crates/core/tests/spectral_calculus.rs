use sobolab_core::grid::GridFunction;
use sobolab_core::lattice::*;
use sobolab_core::multiplier::MultiplierSpec;
use sobolab_core::norms::{self, LpRoute, ThermicGrid};
use sobolab_core::ops;
use sobolab_core::spectral::*;
use sobolab_core::stats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn build(fam: GroupFamily, l: f64, n: usize) -> LatticeGroup {
    build_lattice(GroupSpec::new(fam, l, n)).unwrap()
}

fn random(g: &LatticeGroup, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_values(g, (0..g.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn circle_symbol() {
    let g = build(GroupFamily::Euclidean(1), 2.0 * PI, 64);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let h = g.spacing();
    let sym = rep.symbol().unwrap();
    assert_eq!(sym.len(), 64);
    for (m, v) in sym.iter().enumerate() {
        let exact = 4.0 * (PI * m as f64 / 64.0).sin().powi(2) / (h * h);
        assert!((v - exact).abs() < 1e-12 * exact.max(1.0));
    }
}

#[test]
fn heisenberg_dense_ground_state_and_chebyshev_agreement() {
    let g = build(GroupFamily::Heisenberg, 8.0, 16);
    let dense = decompose(&g, SpectralMode::DenseEig).unwrap();
    let ev = dense.eigenvalues().unwrap();
    assert!(ev[0].abs() < 1e-10);
    assert!(ev[1] > 1e-6);
    let one = GridFunction::constant(&g, 1.0);
    assert!(heat_apply(&dense, 3.0, &one).unwrap().max_abs_diff(&one) < 1e-10);

    let cheb = decompose(&g, SpectralMode::Chebyshev { degree: Some(200), tol: 1e-6 }).unwrap();
    let f = random(&g, 5);
    for scale in [0.1, 1.0, 10.0, 50.0] {
        let t = scale / cheb.lambda_max();
        let a = heat_apply(&dense, t, &f).unwrap();
        let b = heat_apply(&cheb, t, &f).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-6 * f.max_abs(), "t = {t}");
    }
}

#[test]
fn identity_and_composition() {
    let g = build(GroupFamily::Heisenberg, 4.0, 8);
    let rep = decompose(&g, SpectralMode::DenseEig).unwrap();
    let f = random(&g, 1);
    let same = apply_function(&rep, &|_| 1.0, Some(1.0), &f).unwrap();
    assert!(same.max_abs_diff(&f) <= 1e-12 * f.max_abs());
    let t = 0.3;
    let direct = apply_function(&rep, &|l| t * l * (-t * l).exp(), Some(0.0), &f).unwrap();
    let composed = ops::sub_laplacian_apply(&g, &heat_apply(&rep, t, &f).unwrap()).unwrap().scaled(t);
    assert!(direct.max_abs_diff(&composed) <= 1e-8 * composed.max_abs());
    let lap = apply_function(&rep, &|l| l, Some(0.0), &f).unwrap();
    assert!(lap.max_abs_diff(&ops::sub_laplacian_apply(&g, &f).unwrap()) <= 1e-8 * lap.max_abs());
}

#[test]
fn multiplier_calculus_is_multiplicative() {
    let g = build(GroupFamily::Heisenberg, 4.0, 8);
    let rep = decompose(&g, SpectralMode::DenseEig).unwrap();
    let f = random(&g, 2).zero_mean();
    let specs = [
        MultiplierSpec::Heat,
        MultiplierSpec::Theta0,
        MultiplierSpec::Theta1,
        MultiplierSpec::M0 { s: 0.5 },
        MultiplierSpec::MB { s: 0.0 },
        MultiplierSpec::Psi,
        MultiplierSpec::LowpassChi,
    ];
    let t = 0.7;
    for a in &specs {
        for b in &specs {
            let seq = apply_multiplier(&rep, b, t, &apply_multiplier(&rep, a, t, &f).unwrap()).unwrap();
            let both = apply_function(&rep, &|l| a.value(t * l) * b.value(t * l), Some(0.0), &f).unwrap();
            assert!(seq.max_abs_diff(&both) <= 1e-9 * f.max_abs(), "{a:?} {b:?}");
        }
    }
}

#[test]
fn kernel_realizes_the_multiplier() {
    let g = build(GroupFamily::Euclidean(2), 8.0, 32);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let f = random(&g, 3);
    for m in [MultiplierSpec::Heat, MultiplierSpec::M0 { s: 0.0 }, MultiplierSpec::Psi] {
        let k = kernel_of(&rep, &m, 0.5).unwrap();
        let direct = apply_multiplier(&rep, &m, 0.5, &f).unwrap();
        let conv = ops::group_convolution(&g, &f, &k).unwrap();
        assert!(direct.max_abs_diff(&conv) <= 1e-6 * direct.max_abs().max(1e-300));
    }
}

#[test]
fn semigroup_contraction_and_continuity() {
    let g = build(GroupFamily::Heisenberg, 4.0, 10);
    let rep = decompose(&g, SpectralMode::DenseEig).unwrap();
    let h2 = g.spacing() * g.spacing();
    for seed in 0..5 {
        let f = random(&g, 10 + seed);
        let twice = heat_apply(&rep, 0.4, &heat_apply(&rep, 0.3, &f).unwrap()).unwrap();
        assert!(twice.rel_diff(&heat_apply(&rep, 0.7, &f).unwrap()) <= 1e-10);
        for t in [h2, 0.1, 1.0, 10.0] {
            let ht = heat_apply(&rep, t, &f).unwrap();
            for p in [1.0, 2.0, f64::INFINITY] {
                let a = norms::lp_norm(&g, &ht, p, LpRoute::Direct).unwrap();
                let b = norms::lp_norm(&g, &f, p, LpRoute::Direct).unwrap();
                assert!(a <= b * (1.0 + 1e-12));
            }
        }
        let ts: Vec<f64> = (0..8).map(|k| 2f64.powi(-k)).collect();
        let gaps: Vec<f64> = ts
            .iter()
            .map(|t| norms::lp_norm(&g, &heat_apply(&rep, *t, &f).unwrap().sub(&f).unwrap(), 2.0, LpRoute::Direct).unwrap())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    }
    for t in [h2, 4.0 * h2, 1.0] {
        let k = heat_kernel(&rep, t).unwrap();
        assert!(k.values().iter().all(|v| *v >= -1e-8), "t = {t}");
        assert!((k.values().iter().sum::<f64>() * g.haar_weight() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn circle_kernel_against_periodized_gaussian() {
    let l = 2.0 * PI;
    let g = build(GroupFamily::Euclidean(1), l, 256);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let h = g.spacing();
    for t in stats::geomspace(h * h, 1.0, 9) {
        let k = heat_kernel(&rep, t).unwrap();
        let exact = |x: f64| {
            (-20..=20).map(|m| (-(x + m as f64 * l).powi(2) / (4.0 * t)).exp()).sum::<f64>() / (4.0 * PI * t).sqrt()
        };
        let err = (0..g.node_count()).map(|v| (k.values()[v] - exact(g.coords(v)[0])).abs()).fold(0.0, f64::max);
        let peak = exact(0.0);
        // leading discretization error of the heat kernel relative to its peak is h^2/(16 t)
        assert!(err / peak <= 0.1 * h * h / t + 1e-12, "t = {t}: {}", err / peak);
    }
}

#[test]
fn fractional_power_routes() {
    let g = build(GroupFamily::Euclidean(1), 2.0 * PI, 64);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let f = GridFunction::from_fn(&g, |x| (x[0]).sin() + 0.4 * (3.0 * x[0]).cos() + (-(x[0] * x[0])).exp()).unwrap().zero_mean();
    let one = fractional_power_apply(&rep, 1.0, &f, &PowerRoute::Bochner(QuadratureSpec::default())).unwrap();
    assert!(one.max_abs_diff(&ops::sub_laplacian_apply(&g, &f).unwrap()) <= 1e-8 * one.max_abs());
    for s in [0.25, 0.5, 0.75, 1.5, -0.5] {
        let a = fractional_power_apply(&rep, s, &f, &PowerRoute::Spectral).unwrap();
        let b = fractional_power_apply(&rep, s, &f, &PowerRoute::Bochner(QuadratureSpec::default())).unwrap();
        assert!(b.rel_diff(&a) <= 1e-3, "s = {s}: {}", b.rel_diff(&a));
    }
    let r = random(&g, 4).zero_mean();
    let back = fractional_power_apply(&rep, -0.6, &fractional_power_apply(&rep, 0.6, &r, &PowerRoute::Spectral).unwrap(), &PowerRoute::Spectral).unwrap();
    assert!(back.max_abs_diff(&r) <= 1e-6);
    let err = fractional_power_apply(&rep, -0.5, &GridFunction::constant(&g, 1.0), &PowerRoute::Spectral).unwrap_err();
    assert!(err.to_string().contains("zero"), "{err}");
}

#[test]
fn besov_isomorphism_is_bounded_over_dilations() {
    let g = build(GroupFamily::Euclidean(2), 32.0, 128);
    let rep = decompose(&g, SpectralMode::FourierSymbol).unwrap();
    let grid = ThermicGrid::default();
    let ratios: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|lam| {
            let f = GridFunction::from_fn(&g, |x| {
                let (u, v) = (lam * x[0], lam * x[1]);
                (u * 0.9).cos() * (-(u * u + v * v) / 8.0).exp()
            })
            .unwrap()
            .zero_mean();
            norms::besov_isomorphism_ratio(&rep, &f, 0.5, 1.0, &grid).unwrap()
        })
        .collect();
    let env = stats::Envelope::of(&ratios).unwrap();
    let kappa = (env.max).max(1.0 / env.min);
    assert!(kappa.is_finite() && env.drift() < 1.0, "{ratios:?}");
}
