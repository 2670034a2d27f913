use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use super::formant_csv::{load_formant_csv, save_formant_csv, FormantCsvRow};
use super::manifest::{CorpusManifest, ManifestRow};
use super::report::{build_report, render_markdown, AnalysisReport, ReportInputs};
use super::{CliError, Config};
use crate::audio::{read_wav, write_wav};
use crate::formants::{FormantAnalyzer, FormantError};
use crate::harmony::{Harmonicity, Source, VowelInventory};
use crate::synth::generate_corpus;
use crate::textgrid::{extract_vowel_segments, parse_textgrid_bytes, serialize_textgrid};

/// Runs `f` on a pool of `jobs` threads, or rayon's default pool.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Usage(format!("thread pool: {e}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthSummary {
    pub tokens: usize,
    pub out_dir: PathBuf,
}

/// Generates a corpus into `out_dir`: `audio/*.wav`, `textgrid/*.TextGrid`,
/// `manifest.csv` and `truth.json`.
///
/// Files are written to a sibling staging directory that is renamed into
/// place at the end, so a failure leaves nothing behind. An existing
/// `out_dir` must be empty.
pub fn cmd_synth(config: &Config, out_dir: &Path, jobs: Option<usize>) -> Result<SynthSummary, CliError> {
    config
        .synth
        .validate()
        .map_err(|e| CliError::Usage(format!("[synth] {e}")))?;
    if out_dir.exists() {
        let empty = fs::read_dir(out_dir)
            .map_err(|e| CliError::io(out_dir, e))?
            .next()
            .is_none();
        if !empty {
            return Err(CliError::Usage(format!(
                "output directory {} exists and is not empty",
                out_dir.display()
            )));
        }
    }
    let name = out_dir
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("invalid output directory {}", out_dir.display())))?;
    let staging = out_dir.with_file_name(format!(
        ".{}.partial-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| CliError::io(&staging, e))?;
    }

    let result = write_corpus(config, &staging, jobs).and_then(|n| {
        if out_dir.exists() {
            fs::remove_dir(out_dir).map_err(|e| CliError::io(out_dir, e))?;
        }
        fs::rename(&staging, out_dir).map_err(|e| CliError::io(out_dir, e))?;
        Ok(n)
    });
    match result {
        Ok(tokens) => Ok(SynthSummary {
            tokens,
            out_dir: out_dir.to_path_buf(),
        }),
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            Err(e)
        }
    }
}

fn write_corpus(config: &Config, dir: &Path, jobs: Option<usize>) -> Result<usize, CliError> {
    let corpus = generate_corpus(&config.synth).map_err(|e| CliError::Usage(format!("[synth] {e}")))?;
    let rendered = with_jobs(jobs, || corpus.render())?.map_err(CliError::Synth)?;
    let source: Source = config
        .synth
        .source
        .parse()
        .map_err(|e| CliError::Usage(format!("[synth] source: {e}")))?;
    for sub in ["audio", "textgrid"] {
        let d = dir.join(sub);
        fs::create_dir_all(&d).map_err(|e| CliError::io(&d, e))?;
    }

    let mut rows = Vec::with_capacity(rendered.len());
    for (token, truth) in rendered.iter().zip(&corpus.manifest.tokens) {
        let audio = PathBuf::from("audio").join(format!("{}.wav", token.token_id));
        let grid = PathBuf::from("textgrid").join(format!("{}.TextGrid", token.token_id));
        write_wav(&token.audio, dir.join(&audio)).map_err(|e| CliError::Failed(e.to_string()))?;
        let text = serialize_textgrid(&token.grid).map_err(|e| CliError::Failed(e.to_string()))?;
        let grid_path = dir.join(&grid);
        fs::write(&grid_path, text).map_err(|e| CliError::io(&grid_path, e))?;
        rows.push(ManifestRow {
            audio,
            textgrid: grid,
            token_id: truth.token_id.clone(),
            word: truth.word.clone(),
            harmonic: if truth.harmonic {
                Harmonicity::Harmonic
            } else {
                Harmonicity::NonHarmonic
            },
            speaker: truth.speaker.clone(),
            source,
        });
    }
    CorpusManifest::new(rows, dir)?.write(&dir.join("manifest.csv"))?;
    let truth_path = dir.join("truth.json");
    let mut truth = serde_json::to_string_pretty(&corpus.manifest).expect("manifest serializes");
    truth.push('\n');
    fs::write(&truth_path, truth).map_err(|e| CliError::io(&truth_path, e))?;
    Ok(rendered.len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractSummary {
    pub files: usize,
    pub failed_files: usize,
    pub rows: usize,
    pub unreliable_rows: usize,
}

impl std::fmt::Display for ExtractSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "extract: {} files, {} failed, {} vowel rows ({} unreliable)",
            self.files, self.failed_files, self.rows, self.unreliable_rows
        )
    }
}

/// Measures every vowel of one manifest row.
pub fn extract_token(
    manifest: &CorpusManifest,
    row: &ManifestRow,
    config: &Config,
) -> Result<Vec<FormantCsvRow>, String> {
    let audio_path = manifest.resolve(&row.audio);
    let grid_path = manifest.resolve(&row.textgrid);
    let audio = read_wav(&audio_path).map_err(|e| format!("{}: {e}", audio_path.display()))?;
    let bytes = fs::read(&grid_path).map_err(|e| format!("{}: {e}", grid_path.display()))?;
    let grid = parse_textgrid_bytes(&bytes).map_err(|e| format!("{}: {e}", grid_path.display()))?;
    let segments = extract_vowel_segments(
        &grid,
        &config.extract.tier,
        &VowelInventory::default(),
        &config.extract.consonants,
        &row.token_id,
    )
    .map_err(|e| format!("{}: {e}", grid_path.display()))?;
    for w in &segments.warnings {
        warn!(
            "{}: tier '{}' interval {}: '{}': {}",
            row.token_id, w.tier, w.interval, w.label, w.reason
        );
    }
    let analyzer = FormantAnalyzer::new(&audio, &config.formants).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(segments.segments.len());
    for (k, seg) in segments.segments.iter().enumerate() {
        let track = match analyzer.track(seg) {
            Ok(t) => t,
            Err(FormantError::UnreliableTrack { track, .. }) => {
                warn!("{} vowel {}: unreliable track", row.token_id, k + 1);
                *track
            }
            Err(e) => return Err(format!("{} vowel {}: {e}", row.token_id, k + 1)),
        };
        out.push(FormantCsvRow::from_track(&track, &row.word, k + 1));
    }
    Ok(out)
}

/// Measures every manifest row in parallel and writes the rows in manifest
/// order. Files that fail are logged and skipped; the command fails when
/// their share exceeds `[extract] max_failure_fraction`.
pub fn cmd_extract(
    manifest_path: &Path,
    config: &Config,
    out_csv: &Path,
    jobs: Option<usize>,
) -> Result<ExtractSummary, CliError> {
    let manifest = CorpusManifest::load(manifest_path)?;
    let results: Vec<Result<Vec<FormantCsvRow>, String>> = with_jobs(jobs, || {
        manifest
            .rows
            .par_iter()
            .map(|row| extract_token(&manifest, row, config))
            .collect()
    })?;

    let mut rows = Vec::new();
    let mut failed = 0;
    for (row, r) in manifest.rows.iter().zip(results) {
        match r {
            Ok(mut v) => rows.append(&mut v),
            Err(e) => {
                warn!("skipping token {}: {e}", row.token_id);
                failed += 1;
            }
        }
    }
    let summary = ExtractSummary {
        files: manifest.rows.len(),
        failed_files: failed,
        rows: rows.len(),
        unreliable_rows: rows.iter().filter(|r| !r.reliable).count(),
    };
    info!("{summary}");
    let limit = config.extract.max_failure_fraction;
    if summary.files == 0 || failed as f64 > limit * summary.files as f64 {
        return Err(CliError::TooManyFailures {
            failed,
            total: summary.files,
            limit,
        });
    }
    save_formant_csv(out_csv, &rows)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOutputs {
    pub report_json: PathBuf,
    pub report_md: PathBuf,
    pub figure_csv: PathBuf,
    pub report: AnalysisReport,
}

/// Runs the analyses and writes `report.json`, `report.md` and
/// `f1_by_context.csv` into `out_dir`.
pub fn cmd_analyze(
    formant_csv: &Path,
    manifest_path: &Path,
    config: &Config,
    out_dir: &Path,
) -> Result<AnalyzeOutputs, CliError> {
    let rows = load_formant_csv(formant_csv)?;
    let manifest = CorpusManifest::load(manifest_path)?;
    let report = build_report(
        &rows,
        &manifest.tokens(),
        config,
        ReportInputs {
            formant_csv: formant_csv.display().to_string(),
            manifest: manifest_path.display().to_string(),
        },
    )?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let write = |name: &str, text: String| -> Result<PathBuf, CliError> {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    };
    Ok(AnalyzeOutputs {
        report_json: write("report.json", report.to_json())?,
        report_md: write("report.md", render_markdown(&report))?,
        figure_csv: write("f1_by_context.csv", report.f1_by_context_csv())?,
        report,
    })
}

/// Renders a saved `report.json` to markdown at `out`.
pub fn cmd_report(report_json: &Path, out: &Path) -> Result<AnalysisReport, CliError> {
    let text = fs::read_to_string(report_json).map_err(|e| CliError::io(report_json, e))?;
    let report = AnalysisReport::from_json(&text)?;
    fs::write(out, render_markdown(&report)).map_err(|e| CliError::io(out, e))?;
    Ok(report)
}
