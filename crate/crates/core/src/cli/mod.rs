//! Configuration schema and the operations behind the `widescan` binary.

mod commands;
mod config;
mod csvio;

pub use commands::{
    audit_run, cmd_baseline, cmd_fov, cmd_gen_fixture, cmd_report, cmd_synthesize,
    recompute_masks,
};
pub use config::{
    FeasibilityConfig, FovSection, GeometryConfig, MoeaSection, OutputSection, PatternConfig,
    PsiRuleName, ReportSection, RunConfig, ScanConfig, ScatteringConfig, SelectionSection,
    VaryAngle,
};
pub use csvio::CsvTable;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("ingestion: {0}")]
    Ingestion(String),
    #[error("synthesis: {0}")]
    Synthesis(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit code: 1 config/validation, 2 ingestion, 3 run failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Ingestion(_) => 2,
            CliError::Synthesis(_) | CliError::Output(_) => 3,
        }
    }
}
