use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::formant_csv::{format_sig6, FormantCsvRow};
use super::{CliError, Config};
use crate::harmony::{
    analyze_generated, build_distance_pairs, directionality_analysis, score_summary, Direction,
    DirectionalityReport, DirectionalityResult, DirectionalityRow, GeneratedReport, ScoreCell,
    ScoreSummary, Source, Subset, TokenRecord, Verdict, Vowel, VowelInventory,
    VowelMeasurement, VowelPairObservation,
};

/// Identifies the JSON layout below.
pub const REPORT_FORMAT: &str = "harmonium-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub formant_csv: String,
    pub manifest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub tokens: usize,
    pub vowel_rows: usize,
    pub reliable_rows: usize,
    pub pairs: usize,
    pub dropped_pairs: usize,
    pub directionality_pairs: usize,
    pub generated_pairs: usize,
    /// Which pairs fed the directionality test: `training` or `all`.
    pub directionality_source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub distance: usize,
    pub pairs: usize,
    pub dropped: usize,
    pub before_triggers: ScoreCell,
    pub before_minus_atr: ScoreCell,
}

/// Mean F1 of V1 for one (V1, V2) context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextCell {
    pub v1: Vowel,
    pub v2: Vowel,
    pub n: usize,
    pub mean_f1v1: f64,
    pub sd_f1v1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format: String,
    pub version: String,
    /// Every setting in force, echoed for provenance.
    pub config: Config,
    pub inputs: ReportInputs,
    pub counts: ReportCounts,
    pub verdict: Verdict,
    pub directionality: DirectionalityReport,
    pub generated: Option<GeneratedReport>,
    pub scores: ScoreSummary,
    pub distance: Vec<DistanceRow>,
    pub f1_by_context: Vec<ContextCell>,
}

fn contexts(pairs: &[VowelPairObservation]) -> Vec<ContextCell> {
    let mut groups: BTreeMap<(Vowel, Vowel), Vec<f64>> = BTreeMap::new();
    for p in pairs {
        groups.entry((p.v1, p.v2)).or_default().push(p.f1v1);
    }
    groups
        .into_iter()
        .map(|((v1, v2), xs)| {
            let n = xs.len();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let sd = if n > 1 {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            ContextCell {
                v1,
                v2,
                n,
                mean_f1v1: mean,
                sd_f1v1: sd,
            }
        })
        .collect()
}

/// Runs every analysis on measured vowels: the directionality test on
/// training pairs (all pairs when none are marked training), the trigger
/// analysis on generated pairs, scores and the distance table.
pub fn build_report(
    rows: &[FormantCsvRow],
    tokens: &[TokenRecord],
    config: &Config,
    inputs: ReportInputs,
) -> Result<AnalysisReport, CliError> {
    let inventory = VowelInventory::default();
    let measurements: Vec<VowelMeasurement> = rows.iter().map(FormantCsvRow::measurement).collect();
    let a = &config.analysis;

    let mut distance_tables = Vec::with_capacity(a.max_distance);
    for k in 1..=a.max_distance {
        distance_tables.push(build_distance_pairs(&measurements, tokens, &inventory, k)?);
    }
    let adjacent = &distance_tables[0];
    let has_training = adjacent.pairs.iter().any(|p| p.source == Source::Training);
    let for_directionality = |p: &&VowelPairObservation| !has_training || p.source == Source::Training;

    let main: Vec<VowelPairObservation> =
        adjacent.pairs.iter().filter(for_directionality).cloned().collect();
    let generated: Vec<VowelPairObservation> = adjacent
        .pairs
        .iter()
        .filter(|p| p.source == Source::Generated)
        .cloned()
        .collect();

    let directionality = directionality_analysis(&main, &a.directionality())?;
    let generated_report = if has_training && !generated.is_empty() {
        Some(analyze_generated(&generated, &a.generated())?)
    } else if !has_training {
        // every pair is generated: the trigger analysis runs on all of them
        Some(analyze_generated(&main, &a.generated())?)
    } else {
        None
    };

    let distance = distance_tables
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let pairs: Vec<VowelPairObservation> =
                t.pairs.iter().filter(for_directionality).cloned().collect();
            let s = score_summary(&pairs, &a.triggers, a.margin_hz);
            DistanceRow {
                distance: k + 1,
                pairs: pairs.len(),
                dropped: t.dropped,
                before_triggers: s.before_triggers,
                before_minus_atr: s.before_minus_atr,
            }
        })
        .collect();

    Ok(AnalysisReport {
        format: REPORT_FORMAT.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        inputs,
        counts: ReportCounts {
            tokens: tokens.len(),
            vowel_rows: rows.len(),
            reliable_rows: rows.iter().filter(|r| r.reliable).count(),
            pairs: adjacent.pairs.len(),
            dropped_pairs: adjacent.dropped,
            directionality_pairs: main.len(),
            generated_pairs: generated.len(),
            directionality_source: if has_training { "training" } else { "all" }.to_string(),
        },
        verdict: directionality.verdict,
        scores: score_summary(&main, &a.triggers, a.margin_hz),
        f1_by_context: contexts(&main),
        directionality,
        generated: generated_report,
        distance,
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let report: AnalysisReport =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("report: {e}")))?;
        if report.format != REPORT_FORMAT {
            return Err(CliError::Input(format!(
                "report format '{}' is not '{REPORT_FORMAT}'",
                report.format
            )));
        }
        Ok(report)
    }

    /// Per-context F1 means, for plotting V1 F1 by following vowel.
    pub fn f1_by_context_csv(&self) -> String {
        let mut out = String::from("v1,v2,n,mean_f1v1,sd_f1v1\n");
        for c in &self.f1_by_context {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                c.v1,
                c.v2,
                c.n,
                format_sig6(c.mean_f1v1),
                format_sig6(c.sd_f1v1)
            );
        }
        out
    }
}

fn direction_label(d: Direction) -> &'static str {
    match d {
        Direction::RightToLeft => "right-to-left",
        Direction::LeftToRight => "left-to-right",
    }
}

fn subset_label(s: Subset) -> &'static str {
    match s {
        Subset::Whole => "whole",
        Subset::PlusAtr => "+ATR",
    }
}

fn p_label(p: f64) -> String {
    if p < 1e-4 {
        format!("{p:.3e}")
    } else {
        format_sig6(p)
    }
}

fn lrt_table(out: &mut String, rows: &[DirectionalityRow]) {
    out.push_str("| direction | subset | n | words | df | chi2 | p | AIC full | AIC null | note |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        let (df, chi2, p, af, an) = match &r.test {
            Some(t) => (
                t.df.to_string(),
                format_sig6(t.chi2),
                p_label(t.p_value),
                format_sig6(t.aic_full),
                format_sig6(t.aic_null),
            ),
            None => ("-".into(), "-".into(), "-".into(), "-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {df} | {chi2} | {p} | {af} | {an} | {} |",
            direction_label(r.direction),
            subset_label(r.subset),
            r.n,
            r.n_words,
            r.note.as_deref().unwrap_or("")
        );
    }
}

fn diagnostics(out: &mut String, rows: &[DirectionalityRow]) {
    out.push_str(
        "| direction | subset | model | formula | loglik | AIC | k | sigma2 | sigma_b2 | theta | iterations | bracket |\n",
    );
    out.push_str("|---|---|---|---|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        let Some(t) = &r.test else { continue };
        for (name, f) in [("full", &t.full), ("null", &t.null)] {
            let _ = writeln!(
                out,
                "| {} | {} | {name} | `{}` | {} | {} | {} | {} | {} | {} | {} | [{}, {}] |",
                direction_label(r.direction),
                subset_label(r.subset),
                f.formula,
                format_sig6(f.loglik),
                format_sig6(f.aic),
                f.k,
                format_sig6(f.sigma2),
                format_sig6(f.sigma_b2),
                format_sig6(f.theta),
                f.iterations,
                p_label(f.bracket.0),
                p_label(f.bracket.1)
            );
        }
    }
}

fn cell_row(out: &mut String, name: &str, c: &ScoreCell) {
    let _ = writeln!(
        out,
        "| {name} | {} | {} | {} | {} |",
        c.pairs,
        c.raised,
        format_sig6(c.raised_rate),
        format_sig6(c.mean_score)
    );
}

/// Human-readable rendering of a report.
pub fn render_markdown(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Harmony directionality report\n");
    let _ = writeln!(out, "Verdict: **{}** (alpha = {})\n", r.verdict, r.directionality.alpha);
    let c = &r.counts;
    let _ = writeln!(
        out,
        "Inputs: `{}`, `{}`. {} tokens, {} vowel rows ({} reliable), {} adjacent pairs ({} dropped); \
         the directionality test used {} pairs ({}) from {} words.\n",
        r.inputs.formant_csv,
        r.inputs.manifest,
        c.tokens,
        c.vowel_rows,
        c.reliable_rows,
        c.pairs,
        c.dropped_pairs,
        c.directionality_pairs,
        c.directionality_source,
        r.directionality.n_words
    );

    out.push_str("## Directionality\n\n");
    lrt_table(&mut out, &r.directionality.rows);
    out.push('\n');
    for row in &r.directionality.rows {
        if let Some(t) = &row.test {
            let _ = writeln!(
                out,
                "- {} / {}: `{}` vs `{}`",
                direction_label(row.direction),
                subset_label(row.subset),
                t.full.formula,
                t.null.formula
            );
        }
    }
    out.push('\n');
    if let Some(DirectionalityResult { rows, verdict }) = &r.directionality.opaque_excluded {
        let _ = writeln!(out, "### Without opaque vowels (verdict: {verdict})\n");
        lrt_table(&mut out, rows);
        out.push('\n');
    }

    out.push_str("## Model diagnostics\n\n");
    diagnostics(&mut out, &r.directionality.rows);
    out.push('\n');

    out.push_str("## Cross-position coefficients\n\n");
    out.push_str("| direction | subset | term | estimate | SE | t | df | p |\n");
    out.push_str("|---|---|---|---|---|---|---|---|\n");
    for row in &r.directionality.rows {
        let Some(t) = &row.test else { continue };
        for k in &t.coefficients {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                direction_label(row.direction),
                subset_label(row.subset),
                k.name,
                format_sig6(k.estimate),
                format_sig6(k.std_error),
                format_sig6(k.t_value),
                k.df,
                p_label(k.p_value)
            );
        }
    }
    out.push('\n');

    out.push_str("## Trigger analysis\n\n");
    match &r.generated {
        None => out.push_str("No generated items in the corpus.\n\n"),
        Some(g) => {
            let _ = writeln!(
                out,
                "{} pairs. Dominant trigger: **{}**\n",
                g.n,
                g.dominant_trigger.as_deref().unwrap_or("none")
            );
            out.push_str("| term | estimate | SE | t | df | p |\n|---|---|---|---|---|---|\n");
            for k in &g.triggers {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} |",
                    k.name,
                    format_sig6(k.estimate),
                    format_sig6(k.std_error),
                    format_sig6(k.t_value),
                    k.df,
                    p_label(k.p_value)
                );
            }
            out.push('\n');
            out.push_str("| model | R2 | adj R2 | F | df | p(F) | loglik | AIC |\n");
            out.push_str("|---|---|---|---|---|---|---|---|\n");
            for s in [&g.numeric_shape, &g.categorical_shape] {
                let f = &s.fit;
                let _ = writeln!(
                    out,
                    "| `{}` | {} | {} | {} | {}, {} | {} | {} | {} |",
                    s.formula,
                    format_sig6(f.r_squared),
                    format_sig6(f.adj_r_squared),
                    format_sig6(f.f_statistic),
                    f.f_df1,
                    f.f_df2,
                    p_label(f.f_p_value),
                    format_sig6(f.loglik),
                    format_sig6(f.aic)
                );
            }
            out.push('\n');
        }
    }

    let s = &r.scores;
    let _ = writeln!(out, "## Harmony scores (margin {} Hz)\n", format_sig6(s.margin));
    out.push_str("| context | pairs | raised | rate | mean score (Hz) |\n|---|---|---|---|---|\n");
    cell_row(&mut out, "before triggers", &s.before_triggers);
    cell_row(&mut out, "before other +ATR", &s.before_other_plus_atr);
    cell_row(&mut out, "before -ATR", &s.before_minus_atr);
    for (v, cell) in &s.by_v2 {
        cell_row(&mut out, &format!("V2 = {v}"), cell);
    }
    out.push('\n');

    out.push_str("## Distance\n\n");
    out.push_str("| distance | pairs | dropped | rate before triggers | rate before -ATR |\n");
    out.push_str("|---|---|---|---|---|\n");
    for d in &r.distance {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            d.distance,
            d.pairs,
            d.dropped,
            format_sig6(d.before_triggers.raised_rate),
            format_sig6(d.before_minus_atr.raised_rate)
        );
    }
    out.push('\n');

    out.push_str("## Configuration\n\n```toml\n");
    out.push_str(&r.config.to_toml_string());
    out.push_str("```\n");
    out
}
