use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use freediv::cli::{self, Command, DivisorInput, Options, Report};

#[derive(Parser)]
#[command(
    name = "freediv",
    version,
    about = "Free divisors and normal-crossing certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldExt {
    Allow,
    Deny,
}

#[derive(Args)]
struct Flags {
    /// Compact single-line JSON instead of pretty printing
    #[arg(long, global = true)]
    json: bool,
    /// Include per-iteration descent records
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Dimension cap for the Lie algebra closure
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "deny")]
    field_ext: FieldExt,
}

#[derive(Subcommand)]
enum Cmd {
    /// Detect or check a weight system
    Weights {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Freeness test and Saito matrix
    Free {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Basis degrees and minor degrees
    Audit {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Submaximal minors against the Jacobian ideal
    Minors {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Annihilator, lowest-weight action, sl2-triples
    Lie {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Descend to a solvable lowest-weight action
    Descend {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Certify or refute normal crossings
    Certify {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Corpus operations
    Corpus {
        #[command(subcommand)]
        action: CorpusCmd,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Check every annotated entry of a directory
    Verify {
        dir: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

fn options(f: &Flags) -> Options {
    Options {
        trace: f.trace,
        seed: f.seed,
        max_dim: f.max_dim,
        allow_extension: matches!(f.field_ext, FieldExt::Allow),
    }
}

fn emit(report: &Report, compact: bool) -> ExitCode {
    let v = report.to_json();
    let text = if compact {
        serde_json::to_string(&v)
    } else {
        serde_json::to_string_pretty(&v)
    };
    println!("{}", text.expect("report serializes"));
    eprintln!("{}", report.summary);
    if let Some(ws) = v["warnings"].as_array() {
        for w in ws {
            eprintln!("warning: {}", w.as_str().unwrap_or_default());
        }
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let (cmd, file, flags) = match args.command {
        Cmd::Weights { file, flags } => (Command::Weights, file, flags),
        Cmd::Free { file, flags } => (Command::Free, file, flags),
        Cmd::Audit { file, flags } => (Command::Audit, file, flags),
        Cmd::Minors { file, flags } => (Command::Minors, file, flags),
        Cmd::Lie { file, flags } => (Command::Lie, file, flags),
        Cmd::Descend { file, flags } => (Command::Descend, file, flags),
        Cmd::Certify { file, flags } => (Command::Certify, file, flags),
        Cmd::Corpus {
            action: CorpusCmd::Verify { dir, flags },
        } => return emit(&cli::corpus_verify(&dir, &options(&flags)), flags.json),
    };
    let report = match DivisorInput::read(&file) {
        Ok(input) => cli::run(cmd, &input, &options(&flags)),
        Err(e) => cli::error_report(cmd.name(), &file, &e),
    };
    emit(&report, flags.json)
}
