use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hantok::pipeline::{self, MorphSource, RunConfig};
use hantok::StrategyKind;

/// Korean tokenization pipelines: train vocabularies and BPE models, encode
/// and decode text, and compute corpus statistics.
#[derive(Debug, Parser)]
#[command(name = "hantok", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a vocabulary (and a BPE model for subword strategies).
    Train {
        #[arg(long, value_parser = parse_kind)]
        strategy: StrategyKind,
        #[arg(long)]
        vocab_size: usize,
        /// Training text, one sentence per line.
        #[arg(long)]
        input: PathBuf,
        /// Output model directory.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        morph: MorphArgs,
    },
    /// Tokenize text into space-separated tokens, line by line.
    Encode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = parse_kind)]
        strategy: Option<StrategyKind>,
        #[command(flatten)]
        morph: MorphArgs,
    },
    /// Restore text from a token file.
    Decode {
        #[arg(long, required_unless_present = "strategy")]
        model: Option<PathBuf>,
        #[arg(long, value_parser = parse_kind)]
        strategy: Option<StrategyKind>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compute OOV rate, lengths, boundary-spanning tokens and the
    /// under-trained-token curve for a test file.
    Stats {
        #[arg(long)]
        model: PathBuf,
        /// Test text, one sentence per line.
        #[arg(long)]
        input: PathBuf,
        /// Training text; exact training counts for the under-trained curve.
        #[arg(long)]
        train: Option<PathBuf>,
        /// JSON report path (stdout if absent).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the under-trained curve as CSV.
        #[arg(long)]
        curve_csv: Option<PathBuf>,
        #[arg(long, default_value_t = hantok::stats::DEFAULT_MAX_N)]
        max_n: u32,
        #[command(flatten)]
        morph: MorphArgs,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct MorphArgs {
    /// Morpheme dictionary, one entry per line (longest-match analysis).
    #[arg(long)]
    morph_dict: Option<PathBuf>,
    /// Analyzer output line-parallel to --input, morphemes separated by spaces.
    #[arg(long)]
    wakati: Option<PathBuf>,
    /// Shell command printing one wakati line per input line, e.g. "mecab -O wakati".
    #[arg(long)]
    morph_cmd: Option<String>,
}

impl MorphArgs {
    fn into_source(self) -> Option<MorphSource> {
        self.morph_dict
            .map(MorphSource::Dictionary)
            .or(self.wakati.map(MorphSource::Wakati))
            .or(self.morph_cmd.map(MorphSource::Command))
    }
}

fn parse_kind(s: &str) -> Result<StrategyKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = StrategyKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn run(command: Command) -> hantok::Result<()> {
    match command {
        Command::Train {
            strategy,
            vocab_size,
            input,
            model,
            morph,
        } => {
            let config = RunConfig {
                strategy: Some(strategy),
                vocab_size: Some(vocab_size),
                input: Some(input),
                model: Some(model),
                morph: morph.into_source(),
                ..RunConfig::default()
            };
            let summary = pipeline::cmd_train(&config)?;
            println!("strategy: {}", summary.strategy);
            println!("vocab entries: {}", summary.vocab_len);
            if let Some(pieces) = summary.pieces {
                println!("pieces: {pieces}");
                println!("top merges:");
                for rule in &summary.top_merges {
                    println!("  {:>4}  {} {}", rule.rank, rule.left, rule.right);
                }
            } else {
                println!("top tokens:");
                for (token, freq) in &summary.top_tokens {
                    println!("  {token}\t{freq}");
                }
            }
        }
        Command::Encode {
            model,
            input,
            output,
            strategy,
            morph,
        } => {
            pipeline::cmd_encode(&RunConfig {
                strategy,
                model: Some(model),
                input: Some(input),
                output,
                morph: morph.into_source(),
                ..RunConfig::default()
            })?;
        }
        Command::Decode {
            model,
            strategy,
            input,
            output,
        } => {
            pipeline::cmd_decode(&RunConfig {
                strategy,
                model,
                input: Some(input),
                output,
                ..RunConfig::default()
            })?;
        }
        Command::Stats {
            model,
            input,
            train,
            report,
            curve_csv,
            max_n,
            morph,
        } => {
            pipeline::cmd_stats(&RunConfig {
                model: Some(model),
                input: Some(input),
                train,
                report,
                curve_csv,
                max_n: Some(max_n),
                morph: morph.into_source(),
                ..RunConfig::default()
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_config() { 2 } else { 1 })
        }
    }
}
