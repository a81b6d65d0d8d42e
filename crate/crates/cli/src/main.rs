//! `tamelift` command-line driver.
//!
//! Exit codes: 0 success, 1 validation or mathematical failure, 2 I/O or
//! parse failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod cmd;

#[derive(Parser, Debug)]
#[command(name = "tamelift", version, about = "Tame approximation and Weyl lifting of polynomial automorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Io {
    /// Input JSON file.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output JSON file; printed to stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Report JSON file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check Jacobian, linear part, origin and (for 2n variables) the symplectic condition.
    Verify {
        #[command(flatten)]
        io: Io,
        /// Symplectic rank n; overrides the file's `symplectic_n`.
        #[arg(long)]
        rank: Option<usize>,
        /// Compare brackets only up to this degree.
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Approximate by a tame word up to height K.
    Approx {
        kind: ApproxKind,
        #[command(flatten)]
        io: Io,
        /// Target height K.
        #[arg(long, short = 'K')]
        degree: u32,
        /// Symplectic rank n; overrides the file's `symplectic_n`.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Evaluate or invert a word.
    Word {
        action: WordAction,
        #[command(flatten)]
        io: Io,
    },
    /// Lift a symplectic word to the Weyl algebra and verify the relations.
    Lift {
        #[command(flatten)]
        io: Io,
    },
    /// Moyal product of two polynomials or truncated series.
    Star {
        #[command(flatten)]
        io: Io,
        /// Right operand.
        #[arg(long)]
        with: PathBuf,
        /// Truncation order L.
        #[arg(long, short = 'L', default_value_t = 4)]
        order: u32,
    },
    /// Bundled and random fixtures.
    Fixture {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApproxKind {
    Poly,
    Symp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordAction {
    Eval,
    Invert,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
    Tame,
    Symplectic,
}

#[derive(Subcommand, Debug)]
pub enum FixtureAction {
    /// List bundled fixture names.
    List,
    /// Write a bundled fixture.
    Write {
        name: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write a seeded random word.
    Random {
        kind: RandomKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of variables (tame) or symplectic rank n.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Maximum generator degree.
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 4)]
        factors: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { io, rank, degree } => cmd::verify(&io, rank, degree),
        Command::Approx { kind, io, degree, rank } => cmd::approx(kind, &io, degree, rank),
        Command::Word { action, io } => cmd::word(action, &io),
        Command::Lift { io } => cmd::lift(&io),
        Command::Star { io, with, order } => cmd::star(&io, &with, order),
        Command::Fixture { action } => cmd::fixture(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
