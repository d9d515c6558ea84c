//! Flat INI-style run configuration: `[section]` headers with
//! `key = value` pairs. Every run is fully determined by the parsed
//! config plus the seed; configs round-trip through `save`/`load` so an
//! output header can reproduce its run exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use gapslab_core::ExperimentParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("unknown set family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Count,
    Cube,
    Gaps,
    Counterexample,
    Gowers,
    Identities,
    Discrete,
    Scan,
    Report,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Count => "count",
            Subcommand::Cube => "cube",
            Subcommand::Gaps => "gaps",
            Subcommand::Counterexample => "counterexample",
            Subcommand::Gowers => "gowers",
            Subcommand::Identities => "identities",
            Subcommand::Discrete => "discrete",
            Subcommand::Scan => "scan",
            Subcommand::Report => "report",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "count" => Subcommand::Count,
            "cube" => Subcommand::Cube,
            "gaps" => Subcommand::Gaps,
            "counterexample" => Subcommand::Counterexample,
            "gowers" => Subcommand::Gowers,
            "identities" => Subcommand::Identities,
            "discrete" => Subcommand::Discrete,
            "scan" => Subcommand::Scan,
            "report" => Subcommand::Report,
            _ => return None,
        })
    }
}

/// Which measurable set an experiment runs on.
#[derive(Clone, Debug, PartialEq)]
pub enum SetSpec {
    Cube,
    Empty,
    Annuli { eps: f64 },
    Shells { p: u32, eps: f64 },
    ThinBoxes { indices: Vec<u64>, ambient: u64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl SetSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            SetSpec::Cube => "cube",
            SetSpec::Empty => "empty",
            SetSpec::Annuli { .. } => "annuli",
            SetSpec::Shells { .. } => "shells",
            SetSpec::ThinBoxes { .. } => "thinboxes",
            SetSpec::Box { .. } => "box",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub params: ExperimentParams,
    pub set_spec: SetSpec,
    pub samples: u64,
    pub output_path: Option<String>,
    pub emit_svg: bool,
    /// 0 means machine parallelism.
    pub workers: usize,

    // per-subcommand knobs, all with defaults
    pub estimator: String,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub buckets: usize,
    pub trials_per_bucket: u64,
    pub scan_kind: String,
    pub eps_list: Vec<f64>,
    pub j_max: u32,
    pub gowers_target: String,
    pub grid_step: f64,
    pub identities_suite: String,
    pub discrete_op: String,
    pub ambient: u64,
    pub n_cap: u64,
    pub indices: Vec<u64>,
    pub report_input: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: Subcommand::Count,
            params: ExperimentParams::default(),
            set_spec: SetSpec::Cube,
            samples: 100_000,
            output_path: None,
            emit_svg: false,
            workers: 0,
            estimator: "sharp".into(),
            lambda_min: 0.005,
            lambda_max: 0.5,
            buckets: 100,
            trials_per_bucket: 2000,
            scan_kind: "uniform".into(),
            eps_list: vec![0.4, 0.2, 0.1, 0.05, 0.025],
            j_max: 12,
            gowers_target: "indicator".into(),
            grid_step: 0.005,
            identities_suite: "all".into(),
            discrete_op: "maxfree".into(),
            ambient: 25,
            n_cap: 40,
            indices: vec![],
            report_input: None,
        }
    }
}

/// The schema: `(section, key, type, default, description)` rows, shared
/// by the parser, `--describe`, and the save path.
pub const SCHEMA: &[(&str, &str, &str, &str, &str)] = &[
    ("run", "subcommand", "enum", "count", "count|cube|gaps|counterexample|gowers|identities|discrete|scan|report"),
    ("run", "samples", "u64", "100000", "Monte Carlo sample budget"),
    ("run", "seed", "u64", "0", "base seed; flag --seed wins, env GAPSLAB_SEED is the fallback"),
    ("run", "output", "path", "", "CSV output path (empty: stdout)"),
    ("run", "svg", "bool", "false", "also write an SVG plot next to the CSV"),
    ("run", "workers", "usize", "0", "worker threads; 0 = machine parallelism"),
    ("params", "n", "u32", "3", "pattern length"),
    ("params", "p", "f64", "2", "lp exponent for gap sizes"),
    ("params", "d", "u32", "2", "ambient dimension"),
    ("params", "lambda", "f64", "0.1", "scale of largeness in (0,1]"),
    ("params", "eps", "f64", "0.5", "scale of smoothness in (0,1]"),
    ("params", "delta", "f64", "0.5", "density parameter in (0,1]"),
    ("set", "family", "enum", "cube", "cube|empty|annuli|shells|thinboxes|box"),
    ("set", "eps", "f64", "0.1", "structure scale of annuli/shells"),
    ("set", "p", "u32", "1", "shell exponent (integer, 1..=n-1)"),
    ("set", "indices", "list<u64>", "", "thin-box indices, comma separated"),
    ("set", "ambient", "u64", "9", "thin-box ambient size N"),
    ("set", "lo", "list<f64>", "", "box lower corner"),
    ("set", "hi", "list<f64>", "", "box upper corner"),
    ("count", "estimator", "enum", "sharp", "sharp|smoothed|varnavides"),
    ("gaps", "lambda_min", "f64", "0.005", "spectrum lower edge"),
    ("gaps", "lambda_max", "f64", "0.5", "spectrum upper edge"),
    ("gaps", "buckets", "usize", "100", "number of spectrum buckets"),
    ("gaps", "trials", "u64", "2000", "trials per bucket"),
    ("scan", "kind", "enum", "uniform", "uniform|multiscale"),
    ("scan", "eps_list", "list<f64>", "0.4,0.2,0.1,0.05,0.025", "non-increasing smoothness scales"),
    ("scan", "j_max", "u32", "12", "number of dyadic largeness scales"),
    ("gowers", "target", "enum", "indicator", "indicator|gaussian|scaling|oscillatory"),
    ("gowers", "grid_step", "f64", "0.005", "Riemann grid step"),
    ("identities", "suite", "enum", "all", "gaussian|telescope|all"),
    ("discrete", "op", "enum", "maxfree", "maxfree|szemeredi|bridge"),
    ("discrete", "ambient", "u64", "25", "ambient size N"),
    ("discrete", "cap", "u64", "40", "search cap for the density threshold"),
    ("discrete", "delta", "f64", "0.5", "density for the threshold search"),
    ("report", "input", "path", "", "CSV file to re-plot"),
];

fn parse_list_u64(key: &str, v: &str) -> Result<Vec<u64>, ConfigError> {
    if v.trim().is_empty() {
        return Ok(vec![]);
    }
    v.split(',')
        .map(|t| {
            t.trim().parse::<u64>().map_err(|e| ConfigError::BadValue {
                key: key.into(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn parse_list_f64(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    if v.trim().is_empty() {
        return Ok(vec![]);
    }
    v.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|e| ConfigError::BadValue {
                key: key.into(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| ConfigError::BadValue {
        key: key.into(),
        message: e.to_string(),
    })
}

/// Parse the INI text into `(section.key -> value)` with line numbers.
fn parse_ini(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut section = String::new();
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(stripped) = line.strip_prefix('[') {
            let Some(name) = stripped.strip_suffix(']') else {
                return Err(ConfigError::Parse {
                    line: lineno,
                    message: "unterminated section header".into(),
                });
            };
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                line: lineno,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        if section.is_empty() {
            return Err(ConfigError::Parse {
                line: lineno,
                message: "key outside of any [section]".into(),
            });
        }
        map.insert(
            format!("{section}.{}", key.trim()),
            value.trim().to_string(),
        );
    }
    Ok(map)
}

pub fn config_from_map(map: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let get = |k: &str| map.get(k).map(|s| s.as_str());

    if let Some(v) = get("run.subcommand") {
        cfg.subcommand =
            Subcommand::parse(v).ok_or_else(|| ConfigError::BadValue {
                key: "run.subcommand".into(),
                message: format!("unknown subcommand `{v}`"),
            })?;
    } else {
        return Err(ConfigError::MissingKey("run.subcommand".into()));
    }
    if let Some(v) = get("run.samples") {
        cfg.samples = parse_scalar("run.samples", v)?;
    }
    if let Some(v) = get("run.seed") {
        cfg.params.seed = parse_scalar("run.seed", v)?;
    }
    if let Some(v) = get("run.output") {
        if !v.is_empty() {
            cfg.output_path = Some(v.to_string());
        }
    }
    if let Some(v) = get("run.svg") {
        cfg.emit_svg = parse_scalar("run.svg", v)?;
    }
    if let Some(v) = get("run.workers") {
        cfg.workers = parse_scalar("run.workers", v)?;
    }
    if let Some(v) = get("params.n") {
        cfg.params.n = parse_scalar("params.n", v)?;
    }
    if let Some(v) = get("params.p") {
        cfg.params.p = parse_scalar("params.p", v)?;
    }
    if let Some(v) = get("params.d") {
        cfg.params.d = parse_scalar("params.d", v)?;
    }
    if let Some(v) = get("params.lambda") {
        cfg.params.lambda = parse_scalar("params.lambda", v)?;
    }
    if let Some(v) = get("params.eps") {
        cfg.params.eps = parse_scalar("params.eps", v)?;
    }
    if let Some(v) = get("params.delta") {
        cfg.params.delta = parse_scalar("params.delta", v)?;
    }

    let family = get("set.family").unwrap_or("cube");
    cfg.set_spec = match family {
        "cube" => SetSpec::Cube,
        "empty" => SetSpec::Empty,
        "annuli" => SetSpec::Annuli {
            eps: get("set.eps").map_or(Ok(0.1), |v| parse_scalar("set.eps", v))?,
        },
        "shells" => SetSpec::Shells {
            p: get("set.p").map_or(Ok(1), |v| parse_scalar("set.p", v))?,
            eps: get("set.eps").map_or(Ok(0.1), |v| parse_scalar("set.eps", v))?,
        },
        "thinboxes" => SetSpec::ThinBoxes {
            indices: parse_list_u64("set.indices", get("set.indices").unwrap_or(""))?,
            ambient: get("set.ambient").map_or(Ok(9), |v| parse_scalar("set.ambient", v))?,
        },
        "box" => SetSpec::Box {
            lo: parse_list_f64("set.lo", get("set.lo").unwrap_or(""))?,
            hi: parse_list_f64("set.hi", get("set.hi").unwrap_or(""))?,
        },
        other => return Err(ConfigError::UnknownFamily(other.into())),
    };

    if let Some(v) = get("count.estimator") {
        cfg.estimator = v.to_string();
    }
    if let Some(v) = get("gaps.lambda_min") {
        cfg.lambda_min = parse_scalar("gaps.lambda_min", v)?;
    }
    if let Some(v) = get("gaps.lambda_max") {
        cfg.lambda_max = parse_scalar("gaps.lambda_max", v)?;
    }
    if let Some(v) = get("gaps.buckets") {
        cfg.buckets = parse_scalar("gaps.buckets", v)?;
    }
    if let Some(v) = get("gaps.trials") {
        cfg.trials_per_bucket = parse_scalar("gaps.trials", v)?;
    }
    if let Some(v) = get("scan.kind") {
        cfg.scan_kind = v.to_string();
    }
    if let Some(v) = get("scan.eps_list") {
        cfg.eps_list = parse_list_f64("scan.eps_list", v)?;
    }
    if let Some(v) = get("scan.j_max") {
        cfg.j_max = parse_scalar("scan.j_max", v)?;
    }
    if let Some(v) = get("gowers.target") {
        cfg.gowers_target = v.to_string();
    }
    if let Some(v) = get("gowers.grid_step") {
        cfg.grid_step = parse_scalar("gowers.grid_step", v)?;
    }
    if let Some(v) = get("identities.suite") {
        cfg.identities_suite = v.to_string();
    }
    if let Some(v) = get("discrete.op") {
        cfg.discrete_op = v.to_string();
    }
    if let Some(v) = get("discrete.ambient") {
        cfg.ambient = parse_scalar("discrete.ambient", v)?;
    }
    if let Some(v) = get("discrete.cap") {
        cfg.n_cap = parse_scalar("discrete.cap", v)?;
    }
    if let Some(v) = get("discrete.delta") {
        cfg.params.delta = parse_scalar("discrete.delta", v)?;
    }
    if let Some(v) = get("set.indices") {
        cfg.indices = parse_list_u64("set.indices", v)?;
    }
    if let Some(v) = get("report.input") {
        if !v.is_empty() {
            cfg.report_input = Some(v.to_string());
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    load_config_str(&text)
}

pub fn load_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    config_from_map(&parse_ini(text)?)
}

/// Whether a config file pins its own seed (the env fallback only applies
/// when it does not).
pub fn file_sets_seed(path: &Path) -> Result<bool, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_ini(&text)?.contains_key("run.seed"))
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_list_f64(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn fmt_list_u64(v: &[u64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Serialize a config so that `load(save(cfg)) == cfg`.
pub fn save_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[run]");
    let _ = writeln!(out, "subcommand = {}", cfg.subcommand.name());
    let _ = writeln!(out, "samples = {}", cfg.samples);
    let _ = writeln!(out, "seed = {}", cfg.params.seed);
    let _ = writeln!(out, "output = {}", cfg.output_path.as_deref().unwrap_or(""));
    let _ = writeln!(out, "svg = {}", cfg.emit_svg);
    let _ = writeln!(out, "workers = {}", cfg.workers);
    let _ = writeln!(out, "[params]");
    let _ = writeln!(out, "n = {}", cfg.params.n);
    let _ = writeln!(out, "p = {}", fmt_f64(cfg.params.p));
    let _ = writeln!(out, "d = {}", cfg.params.d);
    let _ = writeln!(out, "lambda = {}", fmt_f64(cfg.params.lambda));
    let _ = writeln!(out, "eps = {}", fmt_f64(cfg.params.eps));
    let _ = writeln!(out, "delta = {}", fmt_f64(cfg.params.delta));
    let _ = writeln!(out, "[set]");
    let _ = writeln!(out, "family = {}", cfg.set_spec.family_name());
    match &cfg.set_spec {
        SetSpec::Annuli { eps } => {
            let _ = writeln!(out, "eps = {}", fmt_f64(*eps));
        }
        SetSpec::Shells { p, eps } => {
            let _ = writeln!(out, "p = {p}");
            let _ = writeln!(out, "eps = {}", fmt_f64(*eps));
        }
        SetSpec::ThinBoxes { indices, ambient } => {
            let _ = writeln!(out, "indices = {}", fmt_list_u64(indices));
            let _ = writeln!(out, "ambient = {ambient}");
        }
        SetSpec::Box { lo, hi } => {
            let _ = writeln!(out, "lo = {}", fmt_list_f64(lo));
            let _ = writeln!(out, "hi = {}", fmt_list_f64(hi));
        }
        SetSpec::Cube | SetSpec::Empty => {}
    }
    let _ = writeln!(out, "[count]");
    let _ = writeln!(out, "estimator = {}", cfg.estimator);
    let _ = writeln!(out, "[gaps]");
    let _ = writeln!(out, "lambda_min = {}", fmt_f64(cfg.lambda_min));
    let _ = writeln!(out, "lambda_max = {}", fmt_f64(cfg.lambda_max));
    let _ = writeln!(out, "buckets = {}", cfg.buckets);
    let _ = writeln!(out, "trials = {}", cfg.trials_per_bucket);
    let _ = writeln!(out, "[scan]");
    let _ = writeln!(out, "kind = {}", cfg.scan_kind);
    let _ = writeln!(out, "eps_list = {}", fmt_list_f64(&cfg.eps_list));
    let _ = writeln!(out, "j_max = {}", cfg.j_max);
    let _ = writeln!(out, "[gowers]");
    let _ = writeln!(out, "target = {}", cfg.gowers_target);
    let _ = writeln!(out, "grid_step = {}", fmt_f64(cfg.grid_step));
    let _ = writeln!(out, "[identities]");
    let _ = writeln!(out, "suite = {}", cfg.identities_suite);
    let _ = writeln!(out, "[discrete]");
    let _ = writeln!(out, "op = {}", cfg.discrete_op);
    let _ = writeln!(out, "ambient = {}", cfg.ambient);
    let _ = writeln!(out, "cap = {}", cfg.n_cap);
    let _ = writeln!(out, "[report]");
    let _ = writeln!(out, "input = {}", cfg.report_input.as_deref().unwrap_or(""));
    out
}

/// Machine-readable schema dump for `--describe`.
pub fn describe_schema() -> String {
    let mut out = String::from("section\tkey\ttype\tdefault\tdescription\n");
    for (section, key, ty, default, desc) in SCHEMA {
        let _ = writeln!(out, "{section}\t{key}\t{ty}\t{default}\t{desc}");
    }
    out
}

#[cfg(test)]
#[allow(clippy::field_reassign_with_default)]
mod tests {
    use super::*;

    #[test]
    fn parse_reports_line_numbers() {
        let err = load_config_str("[run]\nsubcommand = count\nbogus line\n").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_subcommand_is_reported() {
        let err = load_config_str("[params]\nn = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::MissingKey(k) if k == "run.subcommand"));
    }

    #[test]
    fn unknown_family_is_reported() {
        let err =
            load_config_str("[run]\nsubcommand = count\n[set]\nfamily = blob\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownFamily(f) if f == "blob"));
    }

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = RunConfig::default();
        cfg.subcommand = Subcommand::Counterexample;
        cfg.set_spec = SetSpec::Annuli { eps: 0.1 };
        cfg.params.lambda = 0.37;
        cfg.samples = 123_456;
        cfg.eps_list = vec![0.5, 0.25, 0.125];
        cfg.indices = vec![];
        let text = save_config(&cfg);
        let back = load_config_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn round_trip_random_configs() {
        // a light fuzz across the enum-ish fields
        let families = [
            SetSpec::Cube,
            SetSpec::Empty,
            SetSpec::Annuli { eps: 0.25 },
            SetSpec::Shells { p: 2, eps: 0.125 },
            SetSpec::ThinBoxes {
                indices: vec![0, 1, 3, 7, 8],
                ambient: 9,
            },
            SetSpec::Box {
                lo: vec![0.0, 0.25],
                hi: vec![0.5, 1.0],
            },
        ];
        let subs = [
            Subcommand::Count,
            Subcommand::Gaps,
            Subcommand::Scan,
            Subcommand::Discrete,
        ];
        let mut k = 0u64;
        for fam in &families {
            for sub in &subs {
                let mut cfg = RunConfig::default();
                cfg.subcommand = *sub;
                cfg.set_spec = fam.clone();
                cfg.params.seed = k;
                cfg.samples = 1000 + k;
                cfg.workers = (k % 9) as usize;
                if let SetSpec::ThinBoxes { indices, .. } = fam {
                    cfg.indices = indices.clone();
                }
                k += 1;
                let back = load_config_str(&save_config(&cfg)).unwrap();
                assert_eq!(cfg, back);
            }
        }
    }

    #[test]
    fn describe_lists_every_section() {
        let text = describe_schema();
        for section in ["run", "params", "set", "gaps", "scan", "gowers", "identities", "discrete"] {
            assert!(text.lines().any(|l| l.starts_with(section)), "{section} missing");
        }
    }
}
