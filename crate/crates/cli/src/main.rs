//! Command-line front end: validate problem files, run the consensus
//! procedure with optional parameter overrides, and print rankings.
//!
//! Exit codes: 0 success, 1 validation failure, 2 no consensus within the
//! round budget, 3 degenerate-cell abort, 64 usage.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use dulv_core::{
    parse_problem, run_consensus, ConsensusError, ConsensusRun, ProblemSpec, TraceBundle,
    TraceFormat,
};

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_NO_CONSENSUS: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "dulv",
    about = "Multi-attribute group decision making over 2-dimensional uncertain linguistic variables",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a problem file without running anything.
    Validate { problem: PathBuf },
    /// Run the consensus procedure and optionally write a round trace.
    Run {
        problem: PathBuf,
        /// Aggregation order override (defaults to the file's alpha, then 1).
        #[arg(long)]
        alpha: Option<f64>,
        /// Round budget override.
        #[arg(long = "max-rounds")]
        max_rounds: Option<usize>,
        /// Directory for round documents and summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trace encoding.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the procedure and print the final ranking table.
    Rank {
        problem: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "max-rounds")]
        max_rounds: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for TraceFormat {
    fn from(format: Format) -> Self {
        match format {
            Format::Json => TraceFormat::Json,
            Format::Csv => TraceFormat::Csv,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            // clap renders help to stdout and errors (with usage) to stderr.
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Validate { problem } => validate(&problem),
        Command::Run {
            problem,
            alpha,
            max_rounds,
            out,
            format,
        } => run(&problem, alpha, max_rounds, out.as_deref(), format.into()),
        Command::Rank {
            problem,
            alpha,
            max_rounds,
        } => rank(&problem, alpha, max_rounds),
    };
    ExitCode::from(code)
}

fn load(
    path: &std::path::Path,
    alpha: Option<f64>,
    max_rounds: Option<usize>,
) -> Result<ProblemSpec, u8> {
    let mut problem = parse_problem(path).map_err(|err| {
        eprintln!("error: {err}");
        EXIT_VALIDATION
    })?;
    if let Some(alpha) = alpha {
        problem = problem.with_alpha(alpha).map_err(|err| {
            eprintln!("error: {err}");
            EXIT_VALIDATION
        })?;
    }
    if let Some(max_rounds) = max_rounds {
        problem = problem.with_max_rounds(max_rounds).map_err(|err| {
            eprintln!("error: {err}");
            EXIT_VALIDATION
        })?;
    }
    Ok(problem)
}

fn execute(problem: &ProblemSpec) -> Result<ConsensusRun, u8> {
    run_consensus(problem).map_err(|err| {
        eprintln!("error: {err}");
        match err {
            ConsensusError::DegenerateCell { .. } | ConsensusError::InvalidExpectation { .. } => {
                EXIT_DEGENERATE
            }
            _ => EXIT_VALIDATION,
        }
    })
}

fn validate(path: &std::path::Path) -> u8 {
    match parse_problem(path) {
        Ok(problem) => {
            println!(
                "ok: {} alternatives x {} attributes, {} experts, scale ({}, {})",
                problem.alternatives().len(),
                problem.attributes().len(),
                problem.experts().len(),
                problem.scale().eval_terms(),
                problem.scale().reliability_terms(),
            );
            EXIT_OK
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_VALIDATION
        }
    }
}

fn run(
    path: &std::path::Path,
    alpha: Option<f64>,
    max_rounds: Option<usize>,
    out: Option<&std::path::Path>,
    format: TraceFormat,
) -> u8 {
    let problem = match load(path, alpha, max_rounds) {
        Ok(problem) => problem,
        Err(code) => return code,
    };
    let run = match execute(&problem) {
        Ok(run) => run,
        Err(code) => return code,
    };
    let bundle = match TraceBundle::new(&problem, &run) {
        Ok(bundle) => bundle,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_VALIDATION;
        }
    };
    if let Some(dir) = out {
        match bundle.write(dir, format) {
            Ok(written) => println!("wrote {} files to {}", written.len(), dir.display()),
            Err(err) => {
                eprintln!("error: {err}");
                return EXIT_VALIDATION;
            }
        }
    }
    let last = run.rounds.last().expect("at least one round");
    println!(
        "{} after {} round(s); eta = {:?}",
        if run.converged {
            "consensus"
        } else {
            "no consensus"
        },
        run.rounds.len(),
        last.eta,
    );
    if run.converged {
        EXIT_OK
    } else {
        eprintln!(
            "thresholds {:?} not met within {} round(s)",
            problem.thresholds(),
            problem.max_rounds(),
        );
        EXIT_NO_CONSENSUS
    }
}

fn rank(path: &std::path::Path, alpha: Option<f64>, max_rounds: Option<usize>) -> u8 {
    let problem = match load(path, alpha, max_rounds) {
        Ok(problem) => problem,
        Err(code) => return code,
    };
    let run = match execute(&problem) {
        Ok(run) => run,
        Err(code) => return code,
    };
    let bundle = match TraceBundle::new(&problem, &run) {
        Ok(bundle) => bundle,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_VALIDATION;
        }
    };
    println!(
        "{} after {} round(s)",
        if run.converged {
            "consensus"
        } else {
            "no consensus"
        },
        run.rounds.len(),
    );
    println!("rank  alternative  score");
    for (position, entry) in bundle.ranking().iter().enumerate() {
        println!(
            "{:>4}  {:<11}  {:.6}",
            position + 1,
            entry.alternative,
            entry.score
        );
    }
    if run.converged {
        EXIT_OK
    } else {
        EXIT_NO_CONSENSUS
    }
}
