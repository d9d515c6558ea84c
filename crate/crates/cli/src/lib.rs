//! gapslab: batch experiment runner over the gap-spectrum laboratory.
//!
//! The library surface exists so integration tests can drive complete
//! runs in-process; the `gapslab` binary is a thin argument-parsing shell
//! around [`execute`].

pub mod commands;
pub mod config;
pub mod csv;
pub mod svg;

use std::path::Path;

pub use commands::{run, RunError, RunOutput};
pub use config::{load_config, load_config_str, save_config, RunConfig, SetSpec, Subcommand};

/// Run a config and write its outputs. Returns the rendered CSV.
pub fn execute(cfg: &RunConfig) -> Result<String, RunError> {
    let output = run(cfg)?;
    let text = csv::render(cfg, &output.rows);
    if let Some(path) = &cfg.output_path {
        std::fs::write(path, &text)?;
        if let Some(svg_doc) = &output.svg {
            let svg_path = Path::new(path).with_extension("svg");
            std::fs::write(svg_path, svg_doc)?;
        }
    }
    for message in &output.messages {
        eprintln!("{message}");
    }
    Ok(text)
}
