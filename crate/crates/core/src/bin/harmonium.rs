use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harmonium::pipeline::{cmd_analyze, cmd_extract, cmd_report, cmd_synth, CliError, Config};

#[derive(Parser)]
#[command(version, about = "Vowel-harmony directionality analysis from speech")]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for synthesis and extraction.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus directory.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Overrides `[synth] seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure formants for every vowel listed in a manifest.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        /// Formant CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the directionality and trigger analyses.
    Analyze {
        #[arg(long)]
        formants: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Directory receiving report.json, report.md and f1_by_context.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a report.json as markdown.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Synth { out, seed } => {
            if let Some(s) = seed {
                config.synth.seed = s;
            }
            let s = cmd_synth(&config, &out, cli.jobs)?;
            eprintln!("synth: {} tokens written to {}", s.tokens, s.out_dir.display());
        }
        Command::Extract { manifest, out } => {
            let s = cmd_extract(&manifest, &config, &out, cli.jobs)?;
            eprintln!("{s}");
        }
        Command::Analyze {
            formants,
            manifest,
            out,
        } => {
            let o = cmd_analyze(&formants, &manifest, &config, &out)?;
            eprintln!("analyze: verdict {} ({})", o.report.verdict, o.report_json.display());
        }
        Command::Report { input, out } => {
            cmd_report(&input, &out)?;
            eprintln!("report: wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HARMONIUM_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
