use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcwm::corpus::{LetterClass, ReadOptions};
use mcwm_cli::commands;
use mcwm_cli::config::ExperimentConfig;
use mcwm_cli::CliError;

/// Morphological compositional word model: generation, analytics and comparison.
#[derive(Parser, Debug)]
#[command(name = "mcwm", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Experiment config file with `key = value` lines.
    #[arg(long, global = true, conflicts_with = "paper")]
    config: Option<PathBuf>,
    /// Use the built-in paper configuration (the default when no config is given).
    #[arg(long, global = true)]
    paper: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long = "n-tokens", global = true)]
    n_tokens: Option<u64>,
    /// Also write a rank-frequency SVG.
    #[arg(long, global = true)]
    svg: bool,
    /// Extra `key=value` overrides, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a lexicon and write lexicon.tsv.
    GenLexicon,
    /// Generate a corpus and write counts, length and rank tables.
    Generate,
    /// Closed-form length law, moments and enumerated word distribution.
    Exact,
    /// Tokenize a text file and write its length and rank tables.
    Corpus {
        path: PathBuf,
        #[arg(long)]
        unicode_letters: bool,
        #[arg(long)]
        strip_gutenberg: bool,
    },
    /// Compare two output directories holding lengths.tsv and ranks.tsv.
    Compare {
        model_dir: PathBuf,
        corpus_dir: PathBuf,
    },
    /// Run `generate` over the Cartesian grid of `sweep.*` keys and write sweep.csv.
    Sweep,
}

fn build_config(g: &GlobalArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply_overrides(g.overrides.iter().map(String::as_str))?;
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &g.out {
        cfg.out = out.clone();
    }
    if let Some(threads) = g.threads {
        cfg.threads = threads;
    }
    if let Some(n) = g.n_tokens {
        cfg.n_tokens = n;
    }
    if g.svg {
        cfg.svg = true;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, CliError> {
    let cfg = build_config(&cli.global)?;
    match cli.command {
        Command::GenLexicon => commands::cmd_gen_lexicon(&cfg),
        Command::Generate => commands::cmd_generate(&cfg),
        Command::Exact => commands::cmd_exact(&cfg),
        Command::Corpus {
            path,
            unicode_letters,
            strip_gutenberg,
        } => {
            let opts = ReadOptions {
                letters: if unicode_letters {
                    LetterClass::Unicode
                } else {
                    LetterClass::Ascii
                },
                strip_gutenberg,
            };
            commands::cmd_corpus(&cfg, &path, opts)
        }
        Command::Compare {
            model_dir,
            corpus_dir,
        } => commands::cmd_compare(&cfg, &model_dir, &corpus_dir),
        Command::Sweep => commands::cmd_sweep(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
