//! Batch front end for the Sunada experiments: config parsing, commands,
//! and deterministic output files.

pub mod config;
pub mod run;

use std::path::Path;

pub use config::{parse_config, resolve, ConfigError, ExperimentConfig, Overrides, Resolved};
pub use run::{run, Command, Outcome, RunError, RunReport, SpectrumDocument, Status};

/// Exit code for a config error.
pub const EXIT_CONFIG: i32 = 3;

/// Writes every output file of `outcome` into `dir`.
pub fn emit(outcome: &Outcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in &outcome.files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}
