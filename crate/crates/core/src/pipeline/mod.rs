//! File formats and the four commands behind the `harmonium` binary.
//!
//! Exit codes: 0 on success, 1 when a command fails at run time, 2 for
//! usage and configuration errors.

mod commands;
mod config;
mod formant_csv;
mod manifest;
mod report;

pub use commands::{
    cmd_analyze, cmd_extract, cmd_report, cmd_synth, extract_token, AnalyzeOutputs,
    ExtractSummary, SynthSummary,
};
pub use config::{AnalysisConfig, Config, ExtractConfig};
pub use formant_csv::{
    format_sig6, header as formant_csv_header, load_formant_csv, read_formant_csv, round_sig6,
    save_formant_csv, write_formant_csv, FormantCsvRow, NA,
};
pub use manifest::{CorpusManifest, ManifestRow};
pub use report::{
    build_report, render_markdown, AnalysisReport, ContextCell, DistanceRow, ReportCounts,
    ReportInputs, REPORT_FORMAT,
};

use std::path::Path;

use thiserror::Error;

use crate::harmony::HarmonyError;
use crate::synth::SynthError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("input: {0}")]
    Input(String),
    #[error("{0}")]
    Analysis(#[from] HarmonyError),
    #[error("synthesis: {0}")]
    Synth(SynthError),
    #[error("{failed} of {total} files failed (limit {limit})")]
    TooManyFailures {
        failed: usize,
        total: usize,
        limit: f64,
    },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn csv(path: &Path, e: csv::Error) -> Self {
        CliError::Failed(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
