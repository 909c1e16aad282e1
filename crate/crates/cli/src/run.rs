//! Subcommand execution: builds the lattice and families, calls the harness,
//! and flattens the result into summary and rows.

use serde::Serialize;
use serde_json::{json, Value};
use sobolab_core::harness::{
    self, estimate_best_constant, judge, threshold_apply, threshold_lemma_check, SoboParams, SweepPoint,
    ThresholdSpec, Variant, Verdict,
};
use sobolab_core::lattice::{fit_growth_exponents, geometric_radii, volume_growth};
use sobolab_core::spectral::QuadratureSpec;
use sobolab_core::stats::{self, Envelope};
use sobolab_core::{build_lattice, decompose, FamilyKind, GridFunction, LatticeGroup, SpectralRep};

use crate::config::ExperimentConfig;
use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proof {
    Poincare,
    Weak,
    Strong,
    Split,
    Bandlimit,
    Threshold,
}

impl Proof {
    pub fn name(&self) -> &'static str {
        match self {
            Proof::Poincare => "poincare",
            Proof::Weak => "weak",
            Proof::Strong => "strong",
            Proof::Split => "split",
            Proof::Bandlimit => "bandlimit",
            Proof::Threshold => "threshold",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    LatticeInfo,
    VolumeGrowth,
    HeatCheck,
    Poincare,
    Verify(Option<Variant>),
    Trace(Proof),
    Constant,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::LatticeInfo => "lattice-info".into(),
            Command::VolumeGrowth => "volume-growth".into(),
            Command::HeatCheck => "heat-check".into(),
            Command::Poincare => "poincare".into(),
            Command::Verify(Some(v)) => format!("verify-{}", v.name()),
            Command::Verify(None) => "verify".into(),
            Command::Trace(p) => format!("trace-{}", p.name()),
            Command::Constant => "constant".into(),
        }
    }
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub command: String,
    pub member: String,
    pub param: String,
    pub axis: String,
    pub axis_value: f64,
    pub value: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub headline: String,
    /// The quantity compared across resolutions by `summarize`.
    pub value: Option<f64>,
    pub envelope: Option<Envelope>,
    pub verdict: Verdict,
    pub params: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    pub report: Value,
    pub rows: Vec<Row>,
}

struct Member {
    label: String,
    param: f64,
    function: GridFunction,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    command: String,
    g: LatticeGroup,
    rep: SpectralRep,
}

impl Context<'_> {
    fn row(&self, member: &str, param: &str, axis: &str, axis_value: f64, value: f64, verdict: Verdict) -> Row {
        Row {
            command: self.command.clone(),
            member: member.to_string(),
            param: param.to_string(),
            axis: axis.to_string(),
            axis_value,
            value,
            verdict: verdict.as_str().to_string(),
        }
    }

    /// Dilated members, or one member per seed for the random family.
    fn members(&self) -> Result<Vec<Member>, Failure> {
        let spec = self.cfg.family_spec()?;
        let mut out = Vec::new();
        if let FamilyKind::RandomBandlimited { max_frequency, seed } = spec.kind {
            for k in 0..self.cfg.family.members as u64 {
                let s = FamilyKind::RandomBandlimited { max_frequency, seed: seed.wrapping_add(k) };
                let member = sobolab_core::FamilySpec { kind: s, ..spec.clone() };
                out.push(Member {
                    label: format!("random_bandlimited(seed={})", seed.wrapping_add(k)),
                    param: k as f64,
                    function: member.member(&self.g, 1.0)?,
                });
            }
        } else {
            for (lambda, f) in spec.members(&self.g)? {
                out.push(Member { label: format!("{}(lambda={lambda})", spec.kind.name()), param: lambda, function: f });
            }
        }
        Ok(out)
    }

    /// `[t_min, t_max]` of the config, defaulting to `[lo, hi]`.
    fn time_grid(&self, lo: f64, hi: f64) -> Result<Vec<f64>, Failure> {
        let a = self.cfg.grids.t_min.unwrap_or(lo);
        let b = self.cfg.grids.t_max.unwrap_or(hi);
        if !(a > 0.0 && b > a && self.cfg.grids.t_points >= 2) {
            return Err(Failure::config(format!(
                "bad time grid: t_min = {a}, t_max = {b}, t_points = {}",
                self.cfg.grids.t_points
            )));
        }
        Ok(stats::geomspace(a, b, self.cfg.grids.t_points))
    }
}

fn params_text(p: &SoboParams) -> String {
    format!(
        "{} p={} q={} s={} s1={} beta={} theta={}",
        p.variant.name(),
        p.p,
        p.q,
        p.s,
        p.s1,
        p.beta,
        p.theta
    )
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn execute(cfg: &ExperimentConfig, command: &Command) -> Result<Outcome, Failure> {
    let spec = cfg.group_spec()?;
    let mode = cfg.spectral_mode(&spec)?;
    let g = build_lattice(spec)?;
    log::info!("built {} with {} nodes", spec.family, g.node_count());
    let rep = decompose(&g, mode)?;
    let ctx = Context { cfg, command: command.name(), g, rep };
    match command {
        Command::LatticeInfo => lattice_info(&ctx),
        Command::VolumeGrowth => volume(&ctx),
        Command::HeatCheck => heat_check(&ctx),
        Command::Poincare => poincare(&ctx),
        Command::Verify(v) => verify(&ctx, v.map_or_else(|| cfg.variant(), Ok)?),
        Command::Trace(p) => trace(&ctx, *p),
        Command::Constant => constant(&ctx),
    }
}

fn lattice_info(ctx: &Context) -> Result<Outcome, Failure> {
    let g = &ctx.g;
    let rep = &ctx.rep;
    let quantities = [
        ("nodes", g.node_count() as f64),
        ("spacing", g.spacing()),
        ("haar_weight", g.haar_weight()),
        ("volume", g.volume()),
        ("diameter", g.diameter()),
        ("local_dim", g.local_dim() as f64),
        ("dim_at_infinity", g.dim_at_infinity() as f64),
        ("lambda_max", rep.lambda_max()),
        ("spectral_gap", rep.spectral_gap().unwrap_or(f64::NAN)),
    ];
    let name = g.family().to_string();
    let rows = quantities.iter().map(|(k, v)| ctx.row(&name, k, "quantity", 0.0, *v, Verdict::Pass)).collect();
    let report = json!({
        "family": name,
        "mode": rep.mode().to_string(),
        "z_period": g.z_period(),
        "orthonormality_defect": rep.orthonormality_defect(),
        "quantities": quantities.iter().map(|(k, v)| json!({ "name": k, "value": v })).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        summary: Summary {
            headline: format!("{name}: {} nodes, spacing {}", g.node_count(), g.spacing()),
            value: Some(rep.lambda_max()),
            envelope: None,
            verdict: Verdict::Pass,
            params: format!("mode={}", rep.mode()),
        },
        report,
        rows,
    })
}

fn volume(ctx: &Context) -> Result<Outcome, Failure> {
    let h = ctx.g.spacing();
    let gr = &ctx.cfg.grids;
    if !(gr.radii_lo > 0.0 && gr.radii_hi > gr.radii_lo && gr.radii_count >= 2) {
        return Err(Failure::config("radii grid needs 0 < radii_lo < radii_hi and radii_count >= 2"));
    }
    let radii = geometric_radii(gr.radii_lo * h, gr.radii_hi * h, gr.radii_count);
    let samples = volume_growth(&ctx.g, &radii)?;
    let split = gr.split_radius.map_or(gr.radii_hi * h, |r| r * h);
    let fit = fit_growth_exponents(&samples, split);
    let expected = ctx.g.local_dim() as f64;
    let verdict = match fit.local_exponent {
        Some(e) => Verdict::from_bool((e - expected).abs() <= 0.15),
        None => Verdict::Degenerate,
    };
    let rows = samples.iter().map(|s| ctx.row("identity", "volume", "radius", s.radius, s.volume, verdict)).collect();
    Ok(Outcome {
        summary: Summary {
            headline: format!("local exponent {:?} (expected {expected})", fit.local_exponent),
            value: fit.local_exponent,
            envelope: None,
            verdict,
            params: format!("split_radius={split}"),
        },
        report: json!({ "samples": to_value(&samples), "fit": to_value(&fit), "expected_local": expected }),
        rows,
    })
}

fn heat_check(ctx: &Context) -> Result<Outcome, Failure> {
    let h2 = ctx.g.spacing().powi(2);
    let l = ctx.g.spec().box_size;
    let ts = ctx.time_grid(4.0 * h2, (0.1 * l).powi(2).max(8.0 * h2))?;
    let gr = &ctx.cfg.grids;
    let rep = harness::heat_kernel_bound_check(&ctx.g, &ctx.rep, &ts, gr.heat_p, gr.heat_c)?;
    let verdict = match rep.lp_envelope {
        Some(e) if rep.gaussian_sup.is_finite() => Verdict::from_bool(e.min > 0.0 && e.drift() <= gr.heat_band),
        _ => Verdict::Degenerate,
    };
    let mut rows = Vec::new();
    for (k, &t) in rep.ts.iter().enumerate() {
        rows.push(ctx.row("heat_kernel", "lp", "t", t, rep.lp[k], verdict));
        rows.push(ctx.row("heat_kernel", "gaussian", "t", t, rep.gaussian[k], verdict));
    }
    Ok(Outcome {
        summary: Summary {
            headline: format!("lp sup {} gaussian sup {}", rep.lp_sup, rep.gaussian_sup),
            value: Some(rep.lp_sup),
            envelope: rep.lp_envelope,
            verdict,
            params: format!("p={} c={}", gr.heat_p, gr.heat_c),
        },
        report: to_value(&rep),
        rows,
    })
}

fn poincare(ctx: &Context) -> Result<Outcome, Failure> {
    let params = ctx.cfg.params(Variant::Poincare)?;
    let h2 = ctx.g.spacing().powi(2);
    let d = ctx.g.diameter();
    let ts = ctx.time_grid(h2 / 4.0, 4.0 * d * d)?;
    let members = ctx.members()?;
    let mut curves = Vec::new();
    let mut points = Vec::new();
    for m in &members {
        let c = harness::poincare_ratio(&ctx.g, &ctx.rep, &m.function, params.s, &ts)?;
        points.push(SweepPoint { param: m.param, ratio: Some(c.sup) });
        curves.push((m, c));
    }
    let (envelope, band_verdict) = judge(&points, ctx.cfg.inequality.band);
    let flat = curves.iter().all(|(_, c)| c.small_t_slope.is_none_or(|s| s >= -0.05));
    let verdict = if band_verdict == Verdict::Pass && !flat { Verdict::Fail } else { band_verdict };
    let mut rows = Vec::new();
    for (m, c) in &curves {
        for (t, r) in c.ts.iter().zip(&c.ratios) {
            rows.push(ctx.row(&m.label, "ratio", "t", *t, *r, verdict));
        }
    }
    Ok(Outcome {
        summary: Summary {
            headline: format!("sup ratio median {:?}", envelope.map(|e| e.median)),
            value: envelope.map(|e| e.median),
            envelope,
            verdict,
            params: params_text(&params),
        },
        report: json!({
            "params": to_value(&params),
            "curves": curves.iter().map(|(m, c)| json!({ "member": m.label, "curve": to_value(c) })).collect::<Vec<_>>(),
            "sweep": to_value(&points),
        }),
        rows,
    })
}

fn verify(ctx: &Context, variant: Variant) -> Result<Outcome, Failure> {
    if variant == Variant::Poincare {
        return Err(Failure::config("verify takes pgt1, strong1 or weak1; use the poincare subcommand"));
    }
    let params = ctx.cfg.params(variant)?;
    let opts = ctx.cfg.check_options();
    let members = ctx.members()?;
    let mut reports = Vec::new();
    let mut points = Vec::new();
    for m in &members {
        let r = harness::check_improved_sobolev_with(&ctx.g, &ctx.rep, &m.function, &params, &opts)?;
        points.push(SweepPoint { param: m.param, ratio: r.ratio });
        reports.push((m, r));
    }
    let (envelope, verdict) = judge(&points, opts.band);
    let rows = reports
        .iter()
        .map(|(m, r)| ctx.row(&m.label, "ratio", "lambda", m.param, r.ratio.unwrap_or(f64::NAN), r.verdict))
        .collect();
    Ok(Outcome {
        summary: Summary {
            headline: format!(
                "{} ratio median {:?} drift {:?}",
                variant.name(),
                envelope.map(|e| e.median),
                envelope.map(|e| e.drift())
            ),
            value: envelope.map(|e| e.median),
            envelope,
            verdict,
            params: params_text(&params),
        },
        report: json!({
            "params": to_value(&params),
            "members": reports.iter().map(|(m, r)| json!({ "member": m.label, "report": to_value(r) })).collect::<Vec<_>>(),
            "sweep": to_value(&points),
        }),
        rows,
    })
}

fn constant(ctx: &Context) -> Result<Outcome, Failure> {
    let variant = ctx.cfg.variant()?;
    let params = ctx.cfg.params(variant)?;
    let family = ctx.cfg.family_spec()?;
    if matches!(family.kind, FamilyKind::RandomBandlimited { .. }) {
        return Err(Failure::config("constant search needs a dilation family (gaussian or bump)"));
    }
    let best = estimate_best_constant(&ctx.g, &ctx.rep, &family, &params, &ctx.cfg.check_options())?;
    let verdict = Verdict::from_bool(best.interior && best.estimate.is_finite());
    let name = family.kind.name();
    let mut rows: Vec<Row> = best
        .sweep
        .iter()
        .map(|p| ctx.row(name, "sweep", "lambda", p.param, p.ratio.unwrap_or(f64::NAN), verdict))
        .collect();
    rows.extend(
        best.refinement
            .iter()
            .map(|p| ctx.row(name, "refinement", "lambda", p.param, p.ratio.unwrap_or(f64::NAN), verdict)),
    );
    Ok(Outcome {
        summary: Summary {
            headline: format!("best constant {} at lambda {}", best.estimate, best.argmax_lambda),
            value: Some(best.estimate),
            envelope: Envelope::of(&best.sweep.iter().filter_map(|p| p.ratio).collect::<Vec<_>>()),
            verdict,
            params: params_text(&params),
        },
        report: json!({ "params": to_value(&params), "best": to_value(&best) }),
        rows,
    })
}

fn trace(ctx: &Context, proof: Proof) -> Result<Outcome, Failure> {
    let members = ctx.members()?;
    let grid = ctx.cfg.thermic();
    let alpha = ctx.cfg.alpha_grid();
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    let mut headline_values = Vec::new();
    let mut ok = true;
    let params_desc;
    match proof {
        Proof::Poincare => {
            let params = ctx.cfg.params(Variant::Poincare)?;
            params_desc = params_text(&params);
            let t = ctx.cfg.grids.trace_t;
            for m in &members {
                let tr = harness::poincare_proof_trace(&ctx.g, &ctx.rep, &m.function, params.s, t, &ctx.cfg.grids.js)?;
                let good = tr.sum_defect <= 1e-8;
                ok &= good;
                let v = Verdict::from_bool(good);
                for (j, k) in tr.js.iter().zip(&tr.dyadic_gradients) {
                    rows.push(ctx.row(&m.label, "dyadic_gradient", "j", *j as f64, *k, v));
                }
                rows.push(ctx.row(&m.label, "m0_part", "t", t, tr.m0_part, v));
                rows.push(ctx.row(&m.label, "ma_part", "t", t, tr.ma_part, v));
                rows.push(ctx.row(&m.label, "mb_part", "t", t, tr.mb_part, v));
                if let Some(s) = tr.dyadic_slope {
                    headline_values.push(s);
                }
                traces.push(json!({ "member": m.label, "trace": to_value(&tr) }));
            }
            let h2 = ctx.g.spacing().powi(2);
            let ts = ctx.time_grid(4.0 * h2, t.max(8.0 * h2))?;
            let sweep = harness::m0_gradient_sweep(&ctx.g, &ctx.rep, params.s, &ts)?;
            for (t, n) in sweep.ts.iter().zip(&sweep.norms) {
                rows.push(ctx.row("m0_kernel", "gradient_l1", "t", *t, *n, Verdict::from_bool(ok)));
            }
            traces.push(json!({ "member": "m0_kernel", "trace": to_value(&sweep) }));
        }
        Proof::Weak => {
            let params = ctx.cfg.params(Variant::WeakP1)?;
            params_desc = params_text(&params);
            for m in &members {
                let tr = harness::weak_p1_trace(&ctx.g, &ctx.rep, &m.function, &params, &grid, &alpha)?;
                let good = tr.sup_bound_violations == 0
                    && tr.chebyshev_violations == 0
                    && tr.inclusion_violations.iter().all(|v| *v == 0);
                ok &= good;
                let v = Verdict::from_bool(good);
                for (a, val) in tr.alphas.iter().zip(&tr.values) {
                    rows.push(ctx.row(&m.label, "level_measure", "alpha", *a, *val, v));
                }
                headline_values.push(tr.constant);
                traces.push(json!({ "member": m.label, "trace": to_value(&tr) }));
            }
        }
        Proof::Strong => {
            let params = ctx.cfg.params(Variant::StrongP1)?;
            params_desc = format!("{} M={}", params_text(&params), ctx.cfg.inequality.m);
            for m in &members {
                let tr = harness::strong_p1_proof_trace(
                    &ctx.g,
                    &ctx.rep,
                    &m.function,
                    &params,
                    ctx.cfg.inequality.m,
                    &grid,
                    &alpha,
                )?;
                let good = tr.sup_bound_violations == 0
                    && tr.inclusion_violations.iter().all(|v| *v == 0)
                    && tr.superlevel_violations.iter().all(|v| *v == 0)
                    && tr.assembly_holds;
                ok &= good;
                let v = Verdict::from_bool(good);
                for (k, a) in tr.alphas.iter().enumerate() {
                    rows.push(ctx.row(&m.label, "measure_a", "alpha", *a, tr.measure_a[k], v));
                    rows.push(ctx.row(&m.label, "measure_b", "alpha", *a, tr.measure_b[k], v));
                    rows.push(ctx.row(&m.label, "measure_c", "alpha", *a, tr.measure_c[k], v));
                }
                headline_values.push(tr.i2_constant);
                traces.push(json!({ "member": m.label, "trace": to_value(&tr) }));
            }
        }
        Proof::Split => {
            let params = ctx.cfg.params(Variant::StrongPgt1)?;
            params_desc = format!("{} c_t={}", params_text(&params), ctx.cfg.inequality.c_t);
            for m in &members {
                let tr = harness::pointwise_split_trace(
                    &ctx.g,
                    &ctx.rep,
                    &m.function,
                    &params,
                    ctx.cfg.inequality.c_t,
                    &QuadratureSpec::default(),
                    &grid,
                )?;
                let good = tr.recombination_defect <= 1e-10 && tr.heat_bound_violations == 0;
                ok &= good;
                let v = Verdict::from_bool(good);
                rows.push(ctx.row(&m.label, "literal_constant", "lambda", m.param, tr.literal_constant, v));
                rows.push(ctx.row(&m.label, "maximal_constant", "lambda", m.param, tr.maximal_constant, v));
                headline_values.push(tr.maximal_constant);
                traces.push(json!({ "member": m.label, "trace": to_value(&tr) }));
            }
        }
        Proof::Bandlimit => {
            let q = ctx.cfg.inequality.q.unwrap_or(2.0);
            params_desc = format!("q={q}");
            for m in &members {
                let tr = harness::approx_norm_check(&ctx.g, &ctx.rep, &m.function, &ctx.cfg.grids.bands, q)?;
                ok &= tr.l2_nonincreasing;
                let v = Verdict::from_bool(tr.l2_nonincreasing);
                for (k, j) in tr.js.iter().enumerate() {
                    rows.push(ctx.row(&m.label, "lq_ratio", "j", *j as f64, tr.lq_ratios[k], v));
                    rows.push(ctx.row(&m.label, "l2_error", "j", *j as f64, tr.l2_errors[k], v));
                }
                if let Some(e) = tr.fitted_exponent {
                    headline_values.push(e);
                }
                traces.push(json!({ "member": m.label, "trace": to_value(&tr) }));
            }
        }
        Proof::Threshold => {
            let big_m = ctx.cfg.inequality.m;
            params_desc = format!("M={big_m}");
            for m in &members {
                let scale = m.function.max_abs();
                if scale == 0.0 {
                    return Err(Failure::from_core(sobolab_core::Error::Degenerate("zero family member".into())));
                }
                let mut checks = Vec::new();
                for a in alpha.points(scale)? {
                    let spec = ThresholdSpec::new(a, big_m)?;
                    let fa = threshold_apply(&m.function, &spec);
                    let r = threshold_lemma_check(&ctx.g, &m.function, &fa, &spec)?;
                    let v = Verdict::from_bool(r.clean());
                    ok &= r.clean();
                    let bad = (r.superlevel_violations + r.closeness_violations + r.gradient_violations) as f64;
                    rows.push(ctx.row(&m.label, "violations", "alpha", a, bad, v));
                    checks.push(json!({ "alpha": a, "report": to_value(&r) }));
                }
                traces.push(json!({ "member": m.label, "checks": checks }));
            }
        }
    }
    let envelope = Envelope::of(&headline_values);
    Ok(Outcome {
        summary: Summary {
            headline: format!("{} trace over {} members", proof.name(), members.len()),
            value: envelope.map(|e| e.median),
            envelope,
            verdict: Verdict::from_bool(ok),
            params: params_desc,
        },
        report: json!({ "proof": proof.name(), "traces": traces }),
        rows,
    })
}
