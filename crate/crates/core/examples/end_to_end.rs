//! The full command pipeline in a temporary directory: synthesize a
//! corpus, extract formants, analyze, and print the markdown report.
//!
//! cargo run --release --example end_to_end

use harmonium::pipeline::{cmd_analyze, cmd_extract, cmd_synth, Config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let config = Config::from_toml_str("[synth]\nseed = 7\nn_tokens = 200\nrule = \"regressive\"\n")?;

    let corpus = dir.path().join("corpus");
    let synth = cmd_synth(&config, &corpus, None)?;
    eprintln!("synthesized {} tokens", synth.tokens);

    let csv = dir.path().join("formants.csv");
    eprintln!("{}", cmd_extract(&corpus.join("manifest.csv"), &config, &csv, None)?);

    let out = cmd_analyze(&csv, &corpus.join("manifest.csv"), &config, &dir.path().join("report"))?;
    print!("{}", std::fs::read_to_string(out.report_md)?);
    Ok(())
}
