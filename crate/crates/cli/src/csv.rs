//! CSV report writer. Comment lines carry provenance (version, seed,
//! normalization note, config echo); the body is the header row plus data
//! rows and is byte-identical for identical `(config, seed)` regardless
//! of worker count. Floats print in shortest round-trip form.

use std::fmt::Write as _;

use crate::config::RunConfig;

/// One report row; the fixed columns every experiment carries.
#[derive(Clone, Debug)]
pub struct Row {
    pub experiment: String,
    pub label: String,
    pub n: u32,
    pub p: f64,
    pub d: u32,
    pub lambda: f64,
    pub eps: f64,
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

pub const HEADER: &str = "experiment,label,n,p,d,lambda,eps,value,stderr,samples,seed";

impl Row {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.label,
            self.n,
            self.p,
            self.d,
            self.lambda,
            self.eps,
            self.value,
            self.stderr,
            self.samples,
            self.seed
        )
    }
}

/// Render the full report: provenance comments, then the deterministic body.
pub fn render(cfg: &RunConfig, rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# gapslab {}", gapslab_core::VERSION);
    let _ = writeln!(out, "# seed = {}", cfg.params.seed);
    let _ = writeln!(out, "# {}", gapslab_core::NORMALIZATION_NOTE);
    for line in crate::config::save_config(cfg).lines() {
        let _ = writeln!(out, "# config: {line}");
    }
    let _ = writeln!(out, "{HEADER}");
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv());
    }
    out
}

/// The body (header + data) alone, the part under the bit-identical
/// reproducibility contract.
pub fn render_body(rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv());
    }
    out
}

/// Parse rows back from a rendered report (used by the `report` command).
pub fn parse_rows(text: &str) -> Vec<Row> {
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line == HEADER || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 11 {
            continue;
        }
        let parse_f = |s: &str| s.parse::<f64>().unwrap_or(f64::NAN);
        rows.push(Row {
            experiment: parts[0].to_string(),
            label: parts[1].to_string(),
            n: parts[2].parse().unwrap_or(0),
            p: parse_f(parts[3]),
            d: parts[4].parse().unwrap_or(0),
            lambda: parse_f(parts[5]),
            eps: parse_f(parts[6]),
            value: parse_f(parts[7]),
            stderr: parse_f(parts[8]),
            samples: parts[9].parse().unwrap_or(0),
            seed: parts[10].parse().unwrap_or(0),
        });
    }
    rows
}
