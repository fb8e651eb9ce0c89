//! `actseq`: extract, symbolize and model post-editing action sequences.

mod commands;
mod config;
mod data;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use commands::{Ctx, Io};
use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "actseq", version, about = "Post-editing action sequences: extraction, symbols, editor models")]
struct Cli {
    /// File of key=value lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,
    /// Manifest path (default: <primary output>.manifest.json)
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Session logs (a .jsonl file or a directory of them) to action sequences
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the symbol vocabulary from action sequences
    Vocab {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Input arguments are already word indices
        #[arg(long)]
        anonymized: bool,
    },
    /// Replace words with vocabulary indices and editors with E<n>
    Anonymize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Map action sequences to symbol ids
    Symbolize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        anonymized: bool,
    },
    /// Generate a synthetic corpus of session logs with ground truth
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Select k editors and balanced train/dev/test splits
    Balance {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        anonymized: bool,
    },
    /// Train the editor identifier on symbolized sessions
    TrainId {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        splits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate an identifier (untrained when --model is absent)
    EvalId {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        splits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the identifier once per ablation variant
    AblateId {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        splits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a text baseline: delta, mt, pe, mt+pe or mt+pe+att
    TrainBaseline {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        splits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Session and editor embeddings from a trained identifier
    Embed {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out_sessions: PathBuf,
        #[arg(long)]
        out_editors: PathBuf,
    },
    /// Per-editor behavior features and their correlations
    Stats {
        #[arg(long)]
        actions: PathBuf,
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// 2-D PCA of editor embeddings, as a table and an SVG scatter plot
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Train the editing-time predictor
    TrainTime {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        id_model: PathBuf,
        #[arg(long)]
        splits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the editing-time predictor
    EvalTime {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        id_model: PathBuf,
        #[arg(long)]
        splits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a delimited table of action sequences to the action format
    ImportDataset {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Extract { .. } => "extract",
            Command::Vocab { .. } => "vocab",
            Command::Anonymize { .. } => "anonymize",
            Command::Symbolize { .. } => "symbolize",
            Command::Synth { .. } => "synth",
            Command::Balance { .. } => "balance",
            Command::TrainId { .. } => "train-id",
            Command::EvalId { .. } => "eval-id",
            Command::AblateId { .. } => "ablate-id",
            Command::TrainBaseline { .. } => "train-baseline",
            Command::Embed { .. } => "embed",
            Command::Stats { .. } => "stats",
            Command::Project { .. } => "project",
            Command::TrainTime { .. } => "train-time",
            Command::EvalTime { .. } => "eval-time",
            Command::ImportDataset { .. } => "import-dataset",
        }
    }

    /// Output the default manifest is placed next to.
    fn primary(&self) -> PathBuf {
        match self {
            Command::Synth { out } => out.join("corpus"),
            Command::Embed { out_editors, .. } => out_editors.clone(),
            Command::Extract { out, .. }
            | Command::Vocab { out, .. }
            | Command::Anonymize { out, .. }
            | Command::Symbolize { out, .. }
            | Command::Balance { out, .. }
            | Command::TrainId { out, .. }
            | Command::EvalId { out, .. }
            | Command::AblateId { out, .. }
            | Command::TrainBaseline { out, .. }
            | Command::Stats { out, .. }
            | Command::Project { out, .. }
            | Command::TrainTime { out, .. }
            | Command::EvalTime { out, .. }
            | Command::ImportDataset { out, .. } => out.clone(),
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<(), CliError> {
    use commands::*;
    match cmd {
        Command::Extract { input, out } => extract(ctx, input, out),
        Command::Vocab { input, out, anonymized } => vocab(ctx, input, out, *anonymized),
        Command::Anonymize { input, vocab, out } => anonymize_cmd(ctx, input, vocab, out),
        Command::Symbolize { input, vocab, out, anonymized } => symbolize(ctx, input, vocab, out, *anonymized),
        Command::Synth { out } => synth(ctx, out),
        Command::Balance { input, out, anonymized } => balance(ctx, input, out, *anonymized),
        Command::TrainId { data, vocab, splits, out } => train_id(ctx, data, vocab, splits, out),
        Command::EvalId { model, data, vocab, splits, out } => eval_id(ctx, model.as_deref(), data, vocab, splits, out),
        Command::AblateId { data, vocab, splits, out } => ablate_id(ctx, data, vocab, splits, out),
        Command::TrainBaseline { kind, logs, splits, out } => train_baseline_cmd(ctx, kind, logs, splits, out),
        Command::Embed { model, data, out_sessions, out_editors } => embed(ctx, model, data, out_sessions, out_editors),
        Command::Stats { actions, logs, out } => stats(ctx, actions, logs, out),
        Command::Project { input, stats, out, svg } => project(ctx, input, stats.as_deref(), out, svg),
        Command::TrainTime { logs, data, id_model, splits, out } => train_time(ctx, logs, data, id_model, splits, out),
        Command::EvalTime { model, logs, data, id_model, splits, out } => {
            eval_time(ctx, model, logs, data, id_model, splits, out)
        }
        Command::ImportDataset { input, out } => import(ctx, input, out),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let file = cli.config.as_deref().map(data::read_text).transpose()?;
    let cfg = RunConfig::load(file.as_deref(), &cli.set)?;
    let mut ctx = Ctx {
        cfg: &cfg,
        seed: cli.seed,
        threads: cli.threads,
        io: Io::default(),
    };
    if let Some(c) = &cli.config {
        ctx.io.inputs.push(c.clone());
    }
    dispatch(&cli.command, &mut ctx)?;
    let path = cli.manifest.clone().unwrap_or_else(|| manifest::default_path(&cli.command.primary()));
    manifest::Run {
        command: cli.command.name(),
        config: &cfg,
        seed: cli.seed,
        threads: cli.threads,
        inputs: ctx.io.inputs,
        outputs: ctx.io.outputs,
    }
    .write(&path)
}

fn main() -> ExitCode {
    let cmd = Cli::command().after_long_help(config::keys_help());
    let cli = match cmd.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""));
            eprintln!("{}", err.to_json_line());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
