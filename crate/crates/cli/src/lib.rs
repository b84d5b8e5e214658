//! Command-line front end: space specifications, the check pipeline and reports.

pub mod config;
pub mod report;
pub mod run;
pub mod spec;

pub use config::{apply_config, ConfigError};
pub use report::{emit_report, EmbeddingReport, Format, Verdict};
pub use run::{run_check, run_norm, Command, RunRequest, OUT_OF_SCOPE};
pub use spec::parse_spec;
