use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use gapslab::config::{self, RunConfig, SetSpec, Subcommand};
use gapslab::RunError;

/// Numerical laboratory for gap spectra of arithmetic progressions and
/// cube patterns in positive-measure subsets of the unit cube.
///
/// Exit status: 0 on success, 1 when a mathematical assertion fails
/// (identity residual above tolerance, rigidity violation), 2 on invalid
/// configuration or usage.
#[derive(Parser)]
#[command(name = "gapslab", version, about, long_about)]
struct Cli {
    /// INI config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the machine-readable config schema and exit.
    #[arg(long, global = true)]
    describe: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Base seed (beats config; env GAPSLAB_SEED is the fallback).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample budget.
    #[arg(long)]
    samples: Option<u64>,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    output: Option<String>,
    /// Also write an SVG plot next to the CSV.
    #[arg(long)]
    svg: bool,
    /// Worker threads (0 = machine parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Set family: cube|empty|annuli|shells|thinboxes|box.
    #[arg(long)]
    set: Option<String>,
    /// Structure scale of the annuli/shells family.
    #[arg(long)]
    set_eps: Option<f64>,
    /// Shell exponent (integer), for the shells family.
    #[arg(long)]
    set_p: Option<u32>,
    /// Thin-box indices, comma separated.
    #[arg(long)]
    indices: Option<String>,
    /// Thin-box ambient size N.
    #[arg(long)]
    ambient: Option<u64>,
    /// Box corners for the box family.
    #[arg(long)]
    lo: Option<String>,
    #[arg(long)]
    hi: Option<String>,
    /// Pattern length.
    #[arg(long)]
    n: Option<u32>,
    /// lp exponent for gap sizes.
    #[arg(long)]
    p: Option<f64>,
    /// Ambient dimension.
    #[arg(long)]
    d: Option<u32>,
    /// Scale of largeness.
    #[arg(long)]
    lambda: Option<f64>,
    /// Scale of smoothness.
    #[arg(long)]
    eps: Option<f64>,
    /// Density parameter.
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(ClapSubcommand, Clone)]
enum Command {
    /// Monte Carlo progression counts (sharp, smoothed, or box-averaged).
    Count {
        #[command(flatten)]
        common: CommonArgs,
        /// sharp|smoothed|varnavides
        #[arg(long)]
        estimator: Option<String>,
    },
    /// Cube-pattern counts over ([0,1]^2)^n.
    Cube {
        #[command(flatten)]
        common: CommonArgs,
        /// sharp|smoothed
        #[arg(long)]
        estimator: Option<String>,
    },
    /// Gap-size spectrum with stored witnesses.
    Gaps {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        buckets: Option<usize>,
        /// Trials per bucket.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Counterexample reproduction: spectrum, run lengths, rigidity.
    Counterexample {
        #[command(flatten)]
        common: CommonArgs,
        /// annuli|shells (alias for --set)
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Gowers box norms and oscillatory decay probes.
    Gowers {
        #[command(flatten)]
        common: CommonArgs,
        /// indicator|gaussian|scaling|oscillatory
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Kernel identity suites (exit 1 when a residual exceeds tolerance).
    Identities {
        #[command(flatten)]
        common: CommonArgs,
        /// gaussian|telescope|all
        #[arg(long)]
        suite: Option<String>,
    },
    /// Exact discrete computations and the thin-box bridge.
    Discrete {
        #[command(flatten)]
        common: CommonArgs,
        /// maxfree|szemeredi|bridge|boxnorm|structured
        #[arg(long)]
        op: Option<String>,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Multiscale and uniform error scans.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        /// uniform|multiscale
        #[arg(long)]
        kind: Option<String>,
        /// Non-increasing smoothness scales, comma separated.
        #[arg(long)]
        eps_list: Option<String>,
        #[arg(long)]
        j_max: Option<u32>,
    },
    /// Re-plot a previously written CSV.
    Report {
        #[command(flatten)]
        common: CommonArgs,
        /// CSV file to re-plot.
        #[arg(long)]
        input: Option<String>,
    },
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| e.to_string()))
        .collect()
}

fn apply_common(cfg: &mut RunConfig, common: &CommonArgs) -> Result<(), String> {
    if let Some(v) = common.samples {
        cfg.samples = v;
    }
    if let Some(v) = &common.output {
        cfg.output_path = Some(v.clone());
    }
    if common.svg {
        cfg.emit_svg = true;
    }
    if let Some(v) = common.workers {
        cfg.workers = v;
    }
    if let Some(v) = common.n {
        cfg.params.n = v;
    }
    if let Some(v) = common.p {
        cfg.params.p = v;
    }
    if let Some(v) = common.d {
        cfg.params.d = v;
    }
    if let Some(v) = common.lambda {
        cfg.params.lambda = v;
    }
    if let Some(v) = common.eps {
        cfg.params.eps = v;
    }
    if let Some(v) = common.delta {
        cfg.params.delta = v;
    }
    if let Some(v) = common.ambient {
        cfg.ambient = v;
    }
    if let Some(v) = &common.indices {
        cfg.indices = parse_u64_list(v)?;
    }
    if let Some(fam) = &common.set {
        cfg.set_spec = match fam.as_str() {
            "cube" => SetSpec::Cube,
            "empty" => SetSpec::Empty,
            "annuli" => SetSpec::Annuli {
                eps: common.set_eps.unwrap_or(0.1),
            },
            "shells" => SetSpec::Shells {
                p: common.set_p.unwrap_or(1),
                eps: common.set_eps.unwrap_or(0.1),
            },
            "thinboxes" => SetSpec::ThinBoxes {
                indices: cfg.indices.clone(),
                ambient: cfg.ambient,
            },
            "box" => SetSpec::Box {
                lo: common
                    .lo
                    .as_deref()
                    .map(parse_f64_list)
                    .transpose()?
                    .unwrap_or_default(),
                hi: common
                    .hi
                    .as_deref()
                    .map(parse_f64_list)
                    .transpose()?
                    .unwrap_or_default(),
            },
            other => return Err(format!("unknown set family `{other}`")),
        };
    } else {
        // targeted tweaks of the configured family
        match (&mut cfg.set_spec, common.set_eps) {
            (SetSpec::Annuli { eps }, Some(v)) => *eps = v,
            (SetSpec::Shells { eps, .. }, Some(v)) => *eps = v,
            _ => {}
        }
        if let (SetSpec::Shells { p, .. }, Some(v)) = (&mut cfg.set_spec, common.set_p) {
            *p = v;
        }
    }
    // seed precedence: flag > config > env > 0 (config/env handled upstream)
    if let Some(v) = common.seed {
        cfg.params.seed = v;
    }
    Ok(())
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => config::load_config(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    // env fallback applies only when neither flag nor config set a seed
    let config_has_seed = match &cli.config {
        Some(path) => config::file_sets_seed(path).map_err(|e| e.to_string())?,
        None => false,
    };
    if !config_has_seed {
        if let Ok(v) = std::env::var("GAPSLAB_SEED") {
            cfg.params.seed = v.parse::<u64>().map_err(|e| format!("GAPSLAB_SEED: {e}"))?;
        }
    }
    let command = cli
        .command
        .as_ref()
        .ok_or_else(|| "missing subcommand".to_string())?;
    match command {
        Command::Count { common, estimator } => {
            cfg.subcommand = Subcommand::Count;
            apply_common(&mut cfg, common)?;
            if let Some(v) = estimator {
                cfg.estimator = v.clone();
            }
        }
        Command::Cube { common, estimator } => {
            cfg.subcommand = Subcommand::Cube;
            apply_common(&mut cfg, common)?;
            if let Some(v) = estimator {
                cfg.estimator = v.clone();
            }
        }
        Command::Gaps {
            common,
            lambda_min,
            lambda_max,
            buckets,
            trials,
        } => {
            cfg.subcommand = Subcommand::Gaps;
            apply_common(&mut cfg, common)?;
            if let Some(v) = lambda_min {
                cfg.lambda_min = *v;
            }
            if let Some(v) = lambda_max {
                cfg.lambda_max = *v;
            }
            if let Some(v) = buckets {
                cfg.buckets = *v;
            }
            if let Some(v) = trials {
                cfg.trials_per_bucket = *v;
            }
        }
        Command::Counterexample {
            common,
            family,
            trials,
        } => {
            cfg.subcommand = Subcommand::Counterexample;
            let mut common = common.clone();
            if common.set.is_none() {
                common.set = Some(family.clone().unwrap_or_else(|| "annuli".into()));
            }
            // counterexamples have no smoothness scale, so --eps means the
            // family's structure scale here
            if common.set_eps.is_none() {
                common.set_eps = common.eps.take();
            }
            apply_common(&mut cfg, &common)?;
            if let Some(v) = trials {
                cfg.trials_per_bucket = *v;
            }
            // gap sizes are measured in the exponent the family is built
            // from unless the caller explicitly asks otherwise
            if common.p.is_none() {
                cfg.params.p = match &cfg.set_spec {
                    SetSpec::Shells { p, .. } => *p as f64,
                    _ => 2.0,
                };
            }
        }
        Command::Gowers {
            common,
            target,
            grid_step,
        } => {
            cfg.subcommand = Subcommand::Gowers;
            apply_common(&mut cfg, common)?;
            if let Some(v) = target {
                cfg.gowers_target = v.clone();
            }
            if let Some(v) = grid_step {
                cfg.grid_step = *v;
            }
        }
        Command::Identities { common, suite } => {
            cfg.subcommand = Subcommand::Identities;
            apply_common(&mut cfg, common)?;
            if let Some(v) = suite {
                cfg.identities_suite = v.clone();
            }
        }
        Command::Discrete { common, op, cap } => {
            cfg.subcommand = Subcommand::Discrete;
            apply_common(&mut cfg, common)?;
            if let Some(v) = op {
                cfg.discrete_op = v.clone();
            }
            if let Some(v) = cap {
                cfg.n_cap = *v;
            }
        }
        Command::Scan {
            common,
            kind,
            eps_list,
            j_max,
        } => {
            cfg.subcommand = Subcommand::Scan;
            apply_common(&mut cfg, common)?;
            if let Some(v) = kind {
                cfg.scan_kind = v.clone();
            }
            if let Some(v) = eps_list {
                cfg.eps_list = parse_f64_list(v)?;
            }
            if let Some(v) = j_max {
                cfg.j_max = *v;
            }
        }
        Command::Report { common, input } => {
            cfg.subcommand = Subcommand::Report;
            apply_common(&mut cfg, common)?;
            if let Some(v) = input {
                cfg.report_input = Some(v.clone());
            }
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.describe {
        print!("{}", config::describe_schema());
        return ExitCode::SUCCESS;
    }
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("gapslab: {message}");
            return ExitCode::from(2);
        }
    };
    match gapslab::execute(&cfg) {
        Ok(text) => {
            if cfg.output_path.is_none() {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(RunError::Math(message)) => {
            eprintln!("gapslab: mathematical assertion failed: {message}");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("gapslab: {err}");
            ExitCode::from(2)
        }
    }
}
