//! Experiment dispatch: every subcommand turns a [`RunConfig`] into CSV
//! rows (plus an optional SVG document), inside a worker pool of the
//! configured size. Mathematical assertion failures (identity residuals
//! above tolerance, rigidity violations) are distinct from usage errors
//! so the process can exit 1 vs 2 accordingly.

use gapslab_core::counting::{
    box_norm_check, count_ap_sharp, count_ap_smoothed, count_cube, gap_spectrum,
    multiscale_error_scan, structured_lower_check, uniform_error_scan, varnavides_lhs,
    verify_annuli_rigidity, EstimateWithError, GridArray, Witness,
};
use gapslab_core::discrete::{
    bridge_check, max_ap_free_size, szemeredi_number, DiscreteSet, SearchMode, SzemerediResult,
};
use gapslab_core::fftgrid::{verify_convolution_identities, verify_ft_pairs};
use gapslab_core::gaussian::{confirm_domination_limit, heat_equation_residual};
use gapslab_core::gowers::{un_1d_oscillatory, un_norm_grid, un_norm_mc, FunctionOracle, OscillatoryInstance};
use gapslab_core::sets::ThinBoxes;
use gapslab_core::sphere::ft_decay_check;
use gapslab_core::stats::longest_run;
use gapslab_core::telescope::{
    verify_identity_full, verify_identity_tilde, verify_theta_xi, EvalPoint, PlanarBoxProduct,
    TelescopeInstance,
};
use gapslab_core::{SeedStream, SetOracle};
use thiserror::Error;

use crate::config::{RunConfig, SetSpec, Subcommand};
use crate::csv::Row;
use crate::svg;

#[derive(Debug, Error)]
pub enum RunError {
    /// Invalid configuration or usage; exit status 2.
    #[error("invalid config: {0}")]
    Config(String),
    /// A mathematical assertion failed; exit status 1.
    #[error("mathematical assertion failed: {0}")]
    Math(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub struct RunOutput {
    pub rows: Vec<Row>,
    pub messages: Vec<String>,
    pub svg: Option<String>,
}

const GAUSSIAN_SUITE_TOL: f64 = 1e-6;
const TELESCOPE_SUITE_TOL: f64 = 1e-5;

pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let mut check = cfg.params;
    if cfg.subcommand == Subcommand::Cube {
        // cube patterns are meaningful from n = 1 (a single planar side)
        if check.n < 1 {
            return Err(RunError::Config("parameter `n` must be >= 1".into()));
        }
        check.n = check.n.max(2);
    }
    check
        .validate()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| RunError::Config(e.to_string()))?;
    pool.install(|| dispatch(cfg))
}

fn dispatch(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    match cfg.subcommand {
        Subcommand::Count => cmd_count(cfg),
        Subcommand::Cube => cmd_cube(cfg),
        Subcommand::Gaps => cmd_gaps(cfg),
        Subcommand::Counterexample => cmd_counterexample(cfg),
        Subcommand::Gowers => cmd_gowers(cfg),
        Subcommand::Identities => cmd_identities(cfg),
        Subcommand::Discrete => cmd_discrete(cfg),
        Subcommand::Scan => cmd_scan(cfg),
        Subcommand::Report => cmd_report(cfg),
    }
}

fn build_set(spec: &SetSpec, dim: usize, n: u32) -> Result<SetOracle, RunError> {
    Ok(match spec {
        SetSpec::Cube => SetOracle::unit_cube(dim),
        SetSpec::Empty => SetOracle::empty(dim),
        SetSpec::Annuli { eps } => {
            if !(*eps > 0.0 && *eps <= 1.0) {
                return Err(RunError::Config(format!(
                    "set.eps = {eps} outside (0, 1]"
                )));
            }
            SetOracle::bourgain_annuli(dim, *eps)
        }
        SetSpec::Shells { p, eps } => SetOracle::lp_shells(n, *p, dim, *eps)
            .map_err(|e| RunError::Config(format!("set.p: {e}")))?,
        SetSpec::ThinBoxes { indices, ambient } => ThinBoxes::new(indices, *ambient, dim)
            .map_err(|e| RunError::Config(format!("set.indices: {e}")))?
            .oracle(),
        SetSpec::Box { lo, hi } => {
            if lo.len() != dim || hi.len() != dim {
                return Err(RunError::Config(format!(
                    "set.lo/set.hi must have {dim} coordinates"
                )));
            }
            SetOracle::axis_box(lo.clone(), hi.clone())
                .map_err(|e| RunError::Config(format!("set.lo/set.hi: {e}")))?
        }
    })
}

fn stream_of(cfg: &RunConfig) -> SeedStream {
    SeedStream::new(cfg.params.seed, 0)
}

fn estimate_row(cfg: &RunConfig, experiment: &str, label: &str, est: &EstimateWithError) -> Row {
    Row {
        experiment: experiment.into(),
        label: label.into(),
        n: est.params.n,
        p: est.params.p,
        d: est.params.d,
        lambda: est.params.lambda,
        eps: est.params.eps,
        value: est.value,
        stderr: est.stderr,
        samples: est.samples,
        seed: cfg.params.seed,
    }
}

fn plain_row(cfg: &RunConfig, experiment: &str, label: &str, value: f64) -> Row {
    Row {
        experiment: experiment.into(),
        label: label.into(),
        n: cfg.params.n,
        p: cfg.params.p,
        d: cfg.params.d,
        lambda: cfg.params.lambda,
        eps: cfg.params.eps,
        value,
        stderr: 0.0,
        samples: 0,
        seed: cfg.params.seed,
    }
}

fn cmd_count(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let set = build_set(&cfg.set_spec, cfg.params.d as usize, cfg.params.n)?;
    let stream = stream_of(cfg);
    let (name, est) = match cfg.estimator.as_str() {
        "sharp" => (
            "count_sharp",
            count_ap_sharp(&set, &cfg.params, cfg.samples, stream),
        ),
        "smoothed" => (
            "count_smoothed",
            count_ap_smoothed(&set, &cfg.params, cfg.samples, stream),
        ),
        "varnavides" => (
            "varnavides",
            varnavides_lhs(&set, cfg.params.n, cfg.params.lambda, cfg.samples, stream),
        ),
        other => {
            return Err(RunError::Config(format!(
                "count.estimator: unknown estimator `{other}`"
            )))
        }
    };
    let est = est.map_err(|e| RunError::Config(e.to_string()))?;
    let label = set.label().to_string();
    Ok(RunOutput {
        rows: vec![estimate_row(cfg, name, &label, &est)],
        messages: vec![format!(
            "{name} on {label}: {} +/- {}",
            est.value, est.stderr
        )],
        svg: None,
    })
}

fn cmd_cube(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let n = cfg.params.n;
    let set = build_set(&cfg.set_spec, 2 * n as usize, n)?;
    let eps = if cfg.estimator == "sharp" {
        0.0
    } else {
        cfg.params.eps
    };
    let est = count_cube(
        &set,
        n,
        cfg.params.lambda,
        eps,
        cfg.samples,
        stream_of(cfg),
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let label = set.label().to_string();
    Ok(RunOutput {
        rows: vec![estimate_row(cfg, "cube_count", &label, &est)],
        messages: vec![format!("cube count on {label}: {} +/- {}", est.value, est.stderr)],
        svg: None,
    })
}

fn spectrum_rows(cfg: &RunConfig, hist: &gapslab_core::counting::SpectrumHistogram) -> Vec<Row> {
    (0..hist.buckets())
        .map(|b| {
            let trials = hist.trial_counts[b];
            let hits = hist.hit_counts[b];
            let frac = hits as f64 / trials as f64;
            let se = (frac * (1.0 - frac) / trials as f64).sqrt();
            Row {
                experiment: "gap_spectrum".into(),
                label: format!("hits={hits};trials={trials}"),
                n: cfg.params.n,
                p: cfg.params.p,
                d: cfg.params.d,
                lambda: hist.midpoint(b),
                eps: cfg.params.eps,
                value: frac,
                stderr: se,
                samples: trials,
                seed: cfg.params.seed,
            }
        })
        .collect()
}

fn cmd_gaps(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let set = build_set(&cfg.set_spec, cfg.params.d as usize, cfg.params.n)?;
    if !(cfg.lambda_min > 0.0 && cfg.lambda_min < cfg.lambda_max) {
        return Err(RunError::Config(
            "gaps.lambda_min/lambda_max: need 0 < min < max".into(),
        ));
    }
    if cfg.buckets == 0 {
        return Err(RunError::Config("gaps.buckets: need at least 1".into()));
    }
    let hist = gap_spectrum(
        &set,
        cfg.params.n,
        cfg.params.p,
        cfg.lambda_min,
        cfg.lambda_max,
        cfg.buckets,
        cfg.trials_per_bucket,
        stream_of(cfg),
        false,
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let rows = spectrum_rows(cfg, &hist);
    let svg = cfg.emit_svg.then(|| {
        let mids: Vec<f64> = (0..hist.buckets()).map(|b| hist.midpoint(b)).collect();
        let fracs: Vec<f64> = rows.iter().map(|r| r.value).collect();
        svg::spectrum_bar_chart(&format!("gap spectrum: {}", set.label()), &mids, &fracs)
    });
    Ok(RunOutput {
        rows,
        messages: vec![format!(
            "spectrum over ({}, {}] with {} buckets",
            cfg.lambda_min, cfg.lambda_max, cfg.buckets
        )],
        svg,
    })
}

fn cmd_counterexample(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let (family, eps_set) = match &cfg.set_spec {
        SetSpec::Annuli { eps } => ("annuli", *eps),
        SetSpec::Shells { eps, .. } => ("shells", *eps),
        other => {
            return Err(RunError::Config(format!(
                "set.family: counterexample needs annuli or shells, got {}",
                other.family_name()
            )))
        }
    };
    let set = build_set(&cfg.set_spec, cfg.params.d as usize, cfg.params.n)?;
    // bucket width eps/20 over (0, 0.5]
    let width = eps_set / 20.0;
    let buckets = (0.5 / width).round().max(1.0) as usize;
    let hist = gap_spectrum(
        &set,
        cfg.params.n,
        cfg.params.p,
        1e-9,
        0.5,
        buckets,
        cfg.trials_per_bucket,
        stream_of(cfg),
        family == "annuli",
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let mut rows = spectrum_rows(cfg, &hist);
    let max_run = longest_run(&hist.hit_flags());
    let run_limit = 20 + 2;
    let mut messages = vec![format!(
        "hit-bucket runs: longest {max_run} of limit {run_limit} (bucket width {width})"
    )];

    let mut rigidity = "N/A".to_string();
    if family == "annuli" {
        if cfg.params.n != 3 {
            return Err(RunError::Config(
                "params.n: annuli rigidity is a 3-term statement".into(),
            ));
        }
        let witnesses: Vec<Witness> = hist
            .full_witnesses
            .as_ref()
            .map(|per_bucket| per_bucket.iter().flatten().cloned().collect())
            .unwrap_or_default();
        let verdicts = verify_annuli_rigidity(&set, eps_set, &witnesses)
            .map_err(|e| RunError::Math(e.to_string()))?;
        let failures = verdicts.iter().filter(|&&v| !v).count();
        if failures > 0 {
            return Err(RunError::Math(format!(
                "rigidity violated by {failures} of {} witnesses",
                verdicts.len()
            )));
        }
        rigidity = format!("PASS({} witnesses)", verdicts.len());
        messages.push(format!("rigidity verdict: PASS on {} witnesses", verdicts.len()));
    }
    rows.push(plain_row(
        cfg,
        "counterexample_summary",
        &format!("family={family};max_run={max_run};limit={run_limit};rigidity={rigidity}"),
        max_run as f64,
    ));
    let svg = cfg.emit_svg.then(|| {
        let mids: Vec<f64> = (0..hist.buckets()).map(|b| hist.midpoint(b)).collect();
        let fracs: Vec<f64> = hist
            .hit_counts
            .iter()
            .zip(&hist.trial_counts)
            .map(|(&h, &t)| h as f64 / t as f64)
            .collect();
        svg::spectrum_bar_chart(&format!("counterexample spectrum: {}", set.label()), &mids, &fracs)
    });
    Ok(RunOutput {
        rows,
        messages,
        svg,
    })
}

fn cmd_gowers(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let mut rows = Vec::new();
    let mut messages = Vec::new();
    // the negated form deliberately catches NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(cfg.grid_step > 0.0) {
        return Err(RunError::Config("gowers.grid_step: must be positive".into()));
    }
    match cfg.gowers_target.as_str() {
        "indicator" => {
            let f = FunctionOracle::indicator_box(vec![0.0], vec![1.0]);
            let grid = un_norm_grid(&f, 2, cfg.grid_step)
                .map_err(|e| RunError::Config(e.to_string()))?;
            let mc = un_norm_mc(&f, 2, cfg.samples, stream_of(cfg))
                .map_err(|e| RunError::Config(e.to_string()))?;
            rows.push(plain_row(cfg, "u2_grid", "indicator[0,1]", grid));
            let mut row = plain_row(cfg, "u2_mc", "indicator[0,1]", mc.value);
            row.stderr = mc.stderr;
            row.samples = mc.samples;
            rows.push(row);
            messages.push(format!("U2 grid {grid}, mc {} +/- {}", mc.value, mc.stderr));
        }
        "gaussian" => {
            // the Gaussian's support box is 12 wide, so the default step
            // for indicators would blow the term budget
            let f = FunctionOracle::gaussian(1);
            let grid = un_norm_grid(&f, 2, cfg.grid_step.max(0.05))
                .map_err(|e| RunError::Config(e.to_string()))?;
            rows.push(plain_row(cfg, "u2_grid", "gaussian", grid));
        }
        "scaling" => {
            let f = FunctionOracle::indicator_box(vec![0.0], vec![1.0]);
            let base = un_norm_mc(&f, 2, cfg.samples, stream_of(cfg))
                .map_err(|e| RunError::Config(e.to_string()))?;
            let dilated = un_norm_mc(&f.dilate(0.5), 2, cfg.samples, stream_of(cfg).offset(1 << 32))
                .map_err(|e| RunError::Config(e.to_string()))?;
            let ratio = dilated.value / base.value;
            rows.push(plain_row(cfg, "u2_scaling_ratio", "dilate=0.5", ratio));
            messages.push(format!(
                "scaling ratio {ratio} (law: 2^(1/4) = {})",
                2f64.powf(0.25)
            ));
        }
        "oscillatory" => {
            for &u in &[1.0, 10.0, 100.0, 1000.0] {
                let inst = OscillatoryInstance::new(cfg.params.p, 3, u, vec![0.5, 0.7], 0.3);
                let modulus = gapslab_core::gowers::oscillatory_integral(&inst).norm();
                let mut row = plain_row(cfg, "oscillatory_modulus", &format!("u={u}"), modulus);
                row.eps = 0.3;
                rows.push(row);
            }
            for &u in &[1.0, 10.0, 100.0] {
                let v = un_1d_oscillatory(u, cfg.params.n.clamp(2, 3), cfg.params.p, 0.2);
                rows.push(plain_row(cfg, "un_oscillatory", &format!("u={u}"), v));
            }
        }
        other => {
            return Err(RunError::Config(format!(
                "gowers.target: unknown target `{other}`"
            )))
        }
    }
    Ok(RunOutput {
        rows,
        messages,
        svg: None,
    })
}

/// Deterministic pseudo-random eval points for the telescope suites.
fn telescope_points(count: usize, dims: usize) -> Vec<Vec<f64>> {
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 1.6 - 0.8
    };
    (0..count)
        .map(|_| (0..dims).map(|_| next()).collect())
        .collect()
}

fn cmd_identities(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let mut rows = Vec::new();
    let mut messages = Vec::new();
    let mut failures = Vec::new();
    let push = |rows: &mut Vec<Row>,
                    failures: &mut Vec<String>,
                    cfg: &RunConfig,
                    name: &str,
                    residual: f64,
                    tol: f64| {
        rows.push(plain_row(cfg, name, &format!("tol={tol}"), residual));
        // the negated form deliberately catches NaN residuals
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(residual <= tol) {
            failures.push(format!("{name}: residual {residual} > {tol}"));
        }
    };

    let suite = cfg.identities_suite.as_str();
    if suite == "gaussian" || suite == "all" {
        let r = verify_ft_pairs(1, 4096, 16.0).map_err(|e| RunError::Config(e.to_string()))?;
        push(&mut rows, &mut failures, cfg, "ft_pairs_d1", r, GAUSSIAN_SUITE_TOL);
        let r = verify_ft_pairs(2, 256, 16.0).map_err(|e| RunError::Config(e.to_string()))?;
        push(&mut rows, &mut failures, cfg, "ft_pairs_d2", r, GAUSSIAN_SUITE_TOL);
        for (a, b) in [(1.0, 1.0), (3.0, 4.0)] {
            for d in [1usize, 2] {
                let r = verify_convolution_identities(a, b, d)
                    .map_err(|e| RunError::Config(e.to_string()))?;
                push(
                    &mut rows,
                    &mut failures,
                    cfg,
                    &format!("convolution_a{a}_b{b}_d{d}"),
                    r,
                    GAUSSIAN_SUITE_TOL,
                );
            }
        }
        let t_grid: Vec<f64> = (0..16).map(|i| 0.5 + 0.1 * i as f64).collect();
        let x_grid: Vec<Vec<f64>> = (-40..=40).map(|i| vec![0.1 * i as f64]).collect();
        let r = heat_equation_residual(&t_grid, &x_grid);
        push(&mut rows, &mut failures, cfg, "heat_equation_d1", r, GAUSSIAN_SUITE_TOL);
        let x_grid2: Vec<Vec<f64>> = (-8..=8)
            .flat_map(|i| (-8..=8).map(move |j| vec![0.4 * i as f64, 0.4 * j as f64]))
            .collect();
        let r = heat_equation_residual(&t_grid, &x_grid2);
        push(&mut rows, &mut failures, cfg, "heat_equation_d2", r, GAUSSIAN_SUITE_TOL);
        for d in [1usize, 2] {
            let r = confirm_domination_limit(d).map_err(|e| RunError::Config(e.to_string()))?;
            push(&mut rows, &mut failures, cfg, &format!("domination_limit_d{d}"), r, 0.02);
        }
        // circle transform decay stays bounded
        let (sup, _) = ft_decay_check(100.0, 10_000);
        push(&mut rows, &mut failures, cfg, "circle_ft_decay_sup", sup, 1.2);
    }
    if suite == "telescope" || suite == "all" {
        let pts = telescope_points(10, 2);
        let tilde = TelescopeInstance {
            k_index: 1,
            d: 1,
            n: 3,
            alpha: 1.0,
            alphas: vec![1.0, 1.0],
            a: 0.5,
            b: 2.0,
            eval_points: pts
                .iter()
                .map(|p| EvalPoint {
                    y: vec![0.0],
                    us: vec![vec![p[0]], vec![p[1]]],
                })
                .collect(),
        };
        let r = verify_identity_tilde(&tilde).map_err(|e| RunError::Config(e.to_string()))?;
        push(&mut rows, &mut failures, cfg, "telescope_tilde_n3", r, TELESCOPE_SUITE_TOL);
        let full = TelescopeInstance {
            k_index: 2,
            d: 1,
            n: 3,
            alpha: 1.0,
            alphas: vec![1.0],
            a: 1.0,
            b: 2.0,
            eval_points: pts
                .iter()
                .map(|p| EvalPoint {
                    y: vec![p[0]],
                    us: vec![vec![p[1]]],
                })
                .collect(),
        };
        let r = verify_identity_full(&full).map_err(|e| RunError::Config(e.to_string()))?;
        push(&mut rows, &mut failures, cfg, "telescope_full_n3k2", r, TELESCOPE_SUITE_TOL);
        let report = verify_theta_xi(&[PlanarBoxProduct::unit(1)], 1, &[1.0], 0.1, 1.0)
            .map_err(|e| RunError::Config(e.to_string()))?;
        push(
            &mut rows,
            &mut failures,
            cfg,
            "theta_xi_unit_square",
            report.identity_residual,
            TELESCOPE_SUITE_TOL,
        );
        if report.theta.iter().any(|&t| !(0.0..=2.0 * std::f64::consts::PI + 1e-9).contains(&t)) {
            failures.push("theta outside [0, 2 pi]".into());
        }
        if !(0.0..=1.0 + 1e-12).contains(&report.xi_a) || !(0.0..=1.0 + 1e-12).contains(&report.xi_b) {
            failures.push("xi outside [0, 1]".into());
        }
    }
    if !["gaussian", "telescope", "all"].contains(&suite) {
        return Err(RunError::Config(format!(
            "identities.suite: unknown suite `{suite}`"
        )));
    }
    for row in &rows {
        messages.push(format!("{}: residual {}", row.experiment, row.value));
    }
    if !failures.is_empty() {
        return Err(RunError::Math(failures.join("; ")));
    }
    messages.push("all identity residuals within tolerance".into());
    Ok(RunOutput {
        rows,
        messages,
        svg: None,
    })
}

fn cmd_discrete(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let mut rows = Vec::new();
    let mut messages = Vec::new();
    match cfg.discrete_op.as_str() {
        "maxfree" => {
            let (exh, witness) = max_ap_free_size(cfg.ambient, cfg.params.n, SearchMode::Exhaustive)
                .map_err(|e| RunError::Config(e.to_string()))?;
            let (bnb, _) = max_ap_free_size(cfg.ambient, cfg.params.n, SearchMode::BranchAndBound)
                .map_err(|e| RunError::Config(e.to_string()))?;
            if exh != bnb {
                return Err(RunError::Math(format!(
                    "search modes disagree at N={}: exhaustive {exh} vs branch-and-bound {bnb}",
                    cfg.ambient
                )));
            }
            let elements = witness
                .elements()
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(";");
            rows.push(plain_row(
                cfg,
                "max_ap_free",
                &format!("N={};witness={elements}", cfg.ambient),
                exh as f64,
            ));
            messages.push(format!("max {}-AP-free size in 0..{}: {exh}", cfg.params.n, cfg.ambient));
        }
        "szemeredi" => {
            let result = szemeredi_number(cfg.params.n, cfg.params.delta, cfg.n_cap)
                .map_err(|e| RunError::Config(e.to_string()))?;
            match result {
                SzemerediResult::Found(v) => {
                    rows.push(plain_row(
                        cfg,
                        "szemeredi_number",
                        &format!("delta={};cap={}", cfg.params.delta, cfg.n_cap),
                        v as f64,
                    ));
                    messages.push(format!("threshold N = {v}"));
                }
                SzemerediResult::ExceedsCap(cap) => {
                    rows.push(plain_row(
                        cfg,
                        "szemeredi_number",
                        &format!("delta={};verdict=exceeds_cap", cfg.params.delta),
                        f64::NAN,
                    ));
                    messages.push(format!("threshold exceeds the cap {cap}"));
                }
            }
        }
        "bridge" => {
            let s = DiscreteSet::new(cfg.indices.clone(), cfg.ambient)
                .map_err(|e| RunError::Config(format!("set.indices: {e}")))?;
            let report = bridge_check(&s, cfg.params.n, cfg.params.d as usize, cfg.samples, stream_of(cfg))
                .map_err(|e| RunError::Config(e.to_string()))?;
            let mut row = estimate_row(cfg, "bridge_check", "thinboxes", &report.estimate);
            row.label = format!(
                "bound={};within={}",
                report.bound, report.within_bound
            );
            rows.push(row);
            if !report.within_bound {
                return Err(RunError::Math(format!(
                    "bridge estimate {} exceeds the progression-free cap {}",
                    report.estimate.value, report.bound
                )));
            }
            messages.push(format!(
                "bridge estimate {} within 1/N = {}",
                report.estimate.value, report.bound
            ));
        }
        "boxnorm" => {
            // a deterministic demonstration instance
            let data: Vec<u8> = (0..64).map(|i| ((i * 37 + 11) % 64 < 29) as u8).collect();
            let grid = GridArray::new(vec![8, 8], data);
            let (lhs, rhs, ok) = box_norm_check(&grid, 2)
                .map_err(|e| RunError::Config(e.to_string()))?;
            rows.push(plain_row(cfg, "box_norm_lhs", "8x8", lhs));
            rows.push(plain_row(cfg, "box_norm_rhs", "8x8", rhs));
            if !ok {
                return Err(RunError::Math("box-norm inequality violated".into()));
            }
        }
        "structured" => {
            let check = structured_lower_check(
                cfg.params.n.min(2),
                cfg.params.lambda,
                &[0.1, 0.2, 0.3, 0.4, 0.5],
                cfg.samples,
                stream_of(cfg),
            )
            .map_err(|e| RunError::Config(e.to_string()))?;
            rows.push(plain_row(
                cfg,
                "structured_slope",
                &format!("bound={}", check.slope_bound),
                check.fitted_slope.unwrap_or(f64::NAN),
            ));
            if !check.pass {
                return Err(RunError::Math("structured slope above bound".into()));
            }
        }
        other => {
            return Err(RunError::Config(format!(
                "discrete.op: unknown op `{other}`"
            )))
        }
    }
    Ok(RunOutput {
        rows,
        messages,
        svg: None,
    })
}

fn cmd_scan(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let set = build_set(&cfg.set_spec, cfg.params.d as usize, cfg.params.n)?;
    let mut rows = Vec::new();
    let mut messages = Vec::new();
    let svg;
    match cfg.scan_kind.as_str() {
        "uniform" => {
            if cfg.eps_list.len() < 3 || cfg.eps_list.windows(2).any(|w| w[0] < w[1]) {
                return Err(RunError::Config(
                    "scan.eps_list: need >= 3 non-increasing entries".into(),
                ));
            }
            if cfg.eps_list.iter().any(|&e| e <= 0.0 || e > 1.0) {
                return Err(RunError::Config(
                    "scan.eps_list: entries must lie in (0, 1]".into(),
                ));
            }
            let scan = uniform_error_scan(
                &set,
                cfg.params.n,
                cfg.params.p,
                cfg.params.lambda,
                &cfg.eps_list,
                cfg.samples,
                stream_of(cfg),
            )
            .map_err(|e| RunError::Config(e.to_string()))?;
            for row in &scan.rows {
                let mut r = plain_row(
                    cfg,
                    "uniform_scan",
                    &format!("diff_vs_ref={}", row.diff_vs_ref),
                    row.value,
                );
                r.eps = row.eps;
                r.stderr = row.diff_stderr;
                r.samples = cfg.samples;
                rows.push(r);
            }
            let slope = scan.fitted_slope.unwrap_or(f64::NAN);
            rows.push(plain_row(cfg, "uniform_scan_slope", "fit=loglog", slope));
            messages.push(format!("uniform scan slope {slope}"));
            svg = cfg.emit_svg.then(|| {
                let xs: Vec<f64> = scan.rows[..scan.rows.len() - 1].iter().map(|r| r.eps).collect();
                let ys: Vec<f64> = scan.rows[..scan.rows.len() - 1]
                    .iter()
                    .map(|r| r.diff_vs_ref)
                    .collect();
                svg::loglog_plot(
                    &format!("uniform error scan: {}", set.label()),
                    &[("smoothing differences".into(), xs, ys)],
                )
            });
        }
        "multiscale" => {
            if !(1..=20).contains(&cfg.j_max) {
                return Err(RunError::Config("scan.j_max: need 1..=20".into()));
            }
            let scan = multiscale_error_scan(
                &set,
                cfg.params.n,
                cfg.params.p,
                cfg.params.eps,
                cfg.j_max,
                cfg.samples,
                stream_of(cfg),
                None,
            )
            .map_err(|e| RunError::Config(e.to_string()))?;
            for (row, cum) in scan.rows.iter().zip(&scan.cumulative_abs) {
                let mut r = plain_row(
                    cfg,
                    "multiscale_scan",
                    &format!("j={};cum={}", row.j, cum),
                    row.diff,
                );
                r.lambda = row.lambda;
                r.stderr = row.diff_stderr;
                r.samples = cfg.samples;
                rows.push(r);
            }
            let slope = scan.fitted_slope.unwrap_or(f64::NAN);
            rows.push(plain_row(cfg, "multiscale_scan_slope", "fit=loglog-tail", slope));
            messages.push(format!("multiscale cumulative slope {slope}"));
            svg = cfg.emit_svg.then(|| {
                let js: Vec<f64> = scan.rows.iter().map(|r| r.j as f64).collect();
                svg::loglog_plot(
                    &format!("multiscale error scan: {}", set.label()),
                    &[
                        ("cumulative |diff|".into(), js.clone(), scan.cumulative_abs.clone()),
                        ("reference J^(1-2^(2-n))".into(), js, scan.reference_curve.clone()),
                    ],
                )
            });
        }
        other => {
            return Err(RunError::Config(format!(
                "scan.kind: unknown kind `{other}`"
            )))
        }
    }
    Ok(RunOutput {
        rows,
        messages,
        svg,
    })
}

fn cmd_report(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let input = cfg
        .report_input
        .as_deref()
        .ok_or_else(|| RunError::Config("report.input: missing input path".into()))?;
    let text = std::fs::read_to_string(input)?;
    let rows = crate::csv::parse_rows(&text);
    if rows.is_empty() {
        return Err(RunError::Config(format!(
            "report.input: no data rows found in {input}"
        )));
    }
    let spectrum: Vec<&Row> = rows.iter().filter(|r| r.experiment == "gap_spectrum").collect();
    let scan: Vec<&Row> = rows
        .iter()
        .filter(|r| r.experiment == "uniform_scan" || r.experiment == "multiscale_scan")
        .collect();
    let svg = if !spectrum.is_empty() {
        let mids: Vec<f64> = spectrum.iter().map(|r| r.lambda).collect();
        let fracs: Vec<f64> = spectrum.iter().map(|r| r.value).collect();
        Some(svg::spectrum_bar_chart("gap spectrum (replot)", &mids, &fracs))
    } else if !scan.is_empty() {
        let xs: Vec<f64> = scan.iter().map(|r| if r.experiment == "uniform_scan" { r.eps } else { r.lambda }).collect();
        let ys: Vec<f64> = scan.iter().map(|r| r.value.abs()).collect();
        Some(svg::loglog_plot("scan (replot)", &[("values".into(), xs, ys)]))
    } else {
        None
    };
    Ok(RunOutput {
        rows: Vec::new(),
        messages: vec![format!("replotted {input}")],
        svg,
    })
}
