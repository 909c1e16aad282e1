//! `sobolab`: config-driven experiments on lattice groups.

mod config;
mod failure;
mod output;
mod run;
mod summarize;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sobolab_core::harness::Variant;

use config::ExperimentConfig;
use failure::Failure;
use run::{Command, Proof};

#[derive(Debug, Parser)]
#[command(name = "sobolab", version, about = "Sub-Laplacian calculus and Sobolev inequality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config, TOML or JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Nodes per axis; overrides `[group] nodes_per_axis`.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Node count, spacing, dimensions and spectral extent.
    LatticeInfo,
    /// Volume of CC balls and fitted growth exponent.
    VolumeGrowth,
    /// Gradient bounds of the heat kernel.
    HeatCheck,
    /// Modified Poincare ratio over a time grid.
    Poincare,
    /// Improved Sobolev ratio over the family.
    Verify {
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
    },
    /// Numerical replay of one proof.
    Trace {
        #[arg(long, value_enum)]
        proof: ProofArg,
    },
    /// Best-constant search over the dilation family.
    Constant,
    /// Table of written reports.
    Summarize {
        /// Report files or directories; defaults to the output directory.
        paths: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Dense,
    Fourier,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Pgt1,
    Strong1,
    Weak1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProofArg {
    Poincare,
    Weak,
    Strong,
    Split,
    Bandlimit,
    Threshold,
}

fn effective_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::config("--config PATH is required"))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.resolution {
        cfg.group.nodes_per_axis = n;
    }
    if let Some(m) = cli.mode {
        cfg.spectral.mode = match m {
            ModeArg::Dense => "dense",
            ModeArg::Fourier => "fourier",
            ModeArg::Chebyshev => "chebyshev",
        }
        .into();
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

fn command_of(cmd: &Cmd) -> Option<Command> {
    Some(match cmd {
        Cmd::LatticeInfo => Command::LatticeInfo,
        Cmd::VolumeGrowth => Command::VolumeGrowth,
        Cmd::HeatCheck => Command::HeatCheck,
        Cmd::Poincare => Command::Poincare,
        Cmd::Verify { variant } => Command::Verify(variant.map(|v| match v {
            VariantArg::Pgt1 => Variant::StrongPgt1,
            VariantArg::Strong1 => Variant::StrongP1,
            VariantArg::Weak1 => Variant::WeakP1,
        })),
        Cmd::Trace { proof } => Command::Trace(match proof {
            ProofArg::Poincare => Proof::Poincare,
            ProofArg::Weak => Proof::Weak,
            ProofArg::Strong => Proof::Strong,
            ProofArg::Split => Proof::Split,
            ProofArg::Bandlimit => Proof::Bandlimit,
            ProofArg::Threshold => Proof::Threshold,
        }),
        Cmd::Constant => Command::Constant,
        Cmd::Summarize { .. } => return None,
    })
}

fn summarize_cmd(cli: &Cli, paths: &[PathBuf]) -> Result<String, Failure> {
    let paths = if paths.is_empty() {
        let dir = match (&cli.out, &cli.config) {
            (Some(o), _) => o.clone(),
            (None, Some(_)) => PathBuf::from(effective_config(cli)?.output.dir),
            (None, None) => PathBuf::from(config::OutputSection::default().dir),
        };
        vec![dir]
    } else {
        paths.to_vec()
    };
    let files = summarize::collect(&paths)?;
    let entries = files.iter().map(|f| summarize::parse(f)).collect::<Result<Vec<_>, _>>()?;
    Ok(summarize::table(&entries))
}

/// Runs one invocation and returns the text for stdout.
fn run_cli(cli: &Cli) -> Result<String, Failure> {
    if let Cmd::Summarize { paths } = &cli.command {
        return summarize_cmd(cli, paths);
    }
    let mut command = command_of(&cli.command).expect("summarize handled above");
    let mut cfg = effective_config(cli)?;
    if let Command::Verify(v) = &mut command {
        match v {
            Some(v) => cfg.inequality.variant = v.name().to_string(),
            None => *v = Some(cfg.variant()?),
        }
    }
    let outcome = run::execute(&cfg, &command)?;
    let (json, csv) = output::write(std::path::Path::new(&cfg.output.dir), &command.name(), &cfg, &outcome)?;
    Ok(format!(
        "{}: {} [{}]\nreport {}\nrows   {}\n",
        command.name(),
        outcome.summary.headline,
        outcome.summary.verdict.as_str(),
        json.display(),
        csv.display()
    ))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;

    fn run(args: &[&str]) -> Result<String, Failure> {
        let cli = Cli::try_parse_from(std::iter::once("sobolab").chain(args.iter().copied())).unwrap();
        run_cli(&cli)
    }

    fn write_config(dir: &Path, name: &str, body: &str) -> String {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }

    const CIRCLE: &str = "seed = 5\n[group]\nfamily = \"euclidean1\"\nbox_size = 16.0\nnodes_per_axis = 128\n\
                          [family]\nkind = \"gaussian\"\nwidth = 1.0\ndilations = [0.5, 1.0, 2.0]\n\
                          [inequality]\nvariant = \"poincare\"\ns = 0.5\n";

    #[test]
    fn poincare_smoke_run_writes_t_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "c.toml", CIRCLE);
        let out = dir.path().join("out");
        run(&["--config", &cfg, "--out", out.to_str().unwrap(), "poincare"]).unwrap();
        let mut rdr = csv::Reader::from_path(out.join("poincare-n128.csv")).unwrap();
        assert_eq!(
            rdr.headers().unwrap().iter().collect::<Vec<_>>(),
            ["command", "member", "param", "axis", "axis_value", "value", "verdict"]
        );
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        let first = rows.iter().filter(|r| &r[1] == "gaussian(lambda=0.5)" && &r[3] == "t").count();
        assert!(first >= 32, "{first} rows");
    }

    #[test]
    fn order_violation_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let body = "[group]\nfamily = \"euclidean2\"\nbox_size = 16.0\nnodes_per_axis = 32\n\
                    [inequality]\np = 2.0\nq = 4.0\ns = 1.5\ns1 = 1.0\nbeta = 1.0\n";
        let cfg = write_config(dir.path(), "bad.toml", body);
        let err = run(&["--config", &cfg, "--out", dir.path().to_str().unwrap(), "verify", "--variant", "pgt1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let rec: serde_json::Value = serde_json::from_str(&err.record()).unwrap();
        assert_eq!(rec["error"]["kind"], "validation");
        assert!(rec["error"]["message"].as_str().unwrap().contains("order constraint"));
    }

    #[test]
    fn config_echo_reproduces_the_report() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "c.toml", CIRCLE);
        let first = dir.path().join("first");
        run(&["--config", &cfg, "--out", first.to_str().unwrap(), "--seed", "9", "heat-check"]).unwrap();
        let read = |p: &Path| -> serde_json::Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
        let report = read(&first.join("heat-check-n128.json"));
        assert_eq!(report["tool"], "sobolab");
        assert_eq!(report["config"]["seed"], 9);
        let mut echo = report["config"].clone();
        let second = dir.path().join("second");
        echo["output"]["dir"] = serde_json::Value::String(second.to_string_lossy().into_owned());
        let echoed = write_config(dir.path(), "echo.json", &echo.to_string());
        run(&["--config", &echoed, "heat-check"]).unwrap();
        let a = std::fs::read(first.join("heat-check-n128.csv")).unwrap();
        let b = std::fs::read(second.join("heat-check-n128.csv")).unwrap();
        assert_eq!(a, b);
        assert_eq!(read(&second.join("heat-check-n128.json"))["report"], report["report"]);
    }

    #[test]
    fn summarize_handles_empty_single_and_two_resolutions() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty");
        std::fs::create_dir(&empty).unwrap();
        assert_eq!(run(&["summarize", empty.to_str().unwrap()]).unwrap(), "no reports\n");

        let cfg = write_config(dir.path(), "c.toml", CIRCLE);
        let out = dir.path().join("out");
        for n in ["64", "128"] {
            run(&["--config", &cfg, "--out", out.to_str().unwrap(), "--resolution", n, "poincare"]).unwrap();
        }
        let text = run(&["summarize", out.join("poincare-n64.json").to_str().unwrap()]).unwrap();
        assert_eq!(text.lines().count(), 2, "{text}");
        let text = run(&["summarize", out.to_str().unwrap()]).unwrap();
        assert_eq!(text.lines().count(), 3, "{text}");
        let stability = text.lines().nth(1).unwrap().split_whitespace().last().unwrap();
        assert!(stability.parse::<f64>().is_ok_and(|s| s >= 1.0), "{text}");
    }

    #[test]
    fn malformed_report_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("broken.json"), "{\n  \"command\": \"verify\",\n  \"config\": [1, 2\n}\n").unwrap();
        let err = run(&["summarize", dir.path().to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.message.contains("broken.json:4:"), "{}", err.message);
    }

    #[test]
    fn variant_flag_is_restricted() {
        assert!(Cli::try_parse_from(["sobolab", "verify", "--variant", "poincare"]).is_err());
        assert!(Cli::try_parse_from(["sobolab", "trace", "--proof", "nope"]).is_err());
        assert!(Cli::try_parse_from(["sobolab", "--mode", "dense", "lattice-info"]).is_ok());
    }

    #[test]
    fn every_subcommand_runs_on_a_small_plane() {
        let dir = tempfile::tempdir().unwrap();
        let body = "seed = 2\n[group]\nfamily = \"euclidean2\"\nbox_size = 32.0\nnodes_per_axis = 64\n\
                    [family]\nkind = \"bump\"\nradius = 4.0\ndilations = [0.5, 1.0, 2.0]\n\
                    [inequality]\nvariant = \"strong1\"\nq = 2.0\ns = 0.25\n";
        let cfg = write_config(dir.path(), "plane.toml", body);
        let out = dir.path().join("out");
        let out = out.to_str().unwrap();
        let runs: [&[&str]; 11] = [
            &["lattice-info"],
            &["volume-growth"],
            &["heat-check"],
            &["verify", "--variant", "strong1"],
            &["verify", "--variant", "weak1"],
            &["trace", "--proof", "poincare"],
            &["trace", "--proof", "weak"],
            &["trace", "--proof", "strong"],
            &["trace", "--proof", "bandlimit"],
            &["trace", "--proof", "threshold"],
            &["constant"],
        ];
        for args in runs {
            let mut full = vec!["--config", cfg.as_str(), "--out", out];
            full.extend_from_slice(args);
            run(&full).unwrap_or_else(|e| panic!("{args:?}: {}", e.message));
        }
        let json = std::fs::read_dir(out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "json");
        assert_eq!(json.count(), 11);

        let split = "[group]\nfamily = \"euclidean2\"\nbox_size = 32.0\nnodes_per_axis = 64\n\
                     [family]\nkind = \"gaussian\"\nwidth = 2.0\ndilations = [1.0]\n";
        let cfg = write_config(dir.path(), "split.toml", split);
        run(&["--config", &cfg, "--out", out, "trace", "--proof", "split"]).unwrap();
    }
}
