//! `flannquad`: definite integration by training a functional-link
//! network, with classical quadrature baselines for comparison.

// Interval checks are written `!(a < b)` so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod corpus;
mod error;
mod fmt;
mod opts;

use clap::{Parser, Subcommand};

use commands::Outcome;
use opts::{CommonOpts, OutputFormat, TrainerKind};

const GRAMMAR_HELP: &str = "\
Integrand expressions use the single variable `x`.

  operators:   +  -  *  /  ^        (`^` binds tightest, right-associative,
                                      then unary minus, then * /, then + -)
  functions:   sqrt exp log sin cos tan abs   (log is the natural logarithm)
  constants:   pi  e
  numbers:     decimal literals such as 2, 0.5, 12.25

There is no implicit multiplication: write 2*x, not 2x.

Exit codes: 0 success, 1 usage/parse/domain error, 2 training divergence
or non-convergence.";

#[derive(Parser)]
#[command(
    name = "flannquad",
    version,
    about = "Definite integrals via a functional-link network trained to match the integrand",
    after_long_help = GRAMMAR_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on [a, b] and report the definite integral N(b) - N(a)
    Integrate {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Train once, then report sub-interval integrals over a grid of
    /// upper limits in (a, b], with the reference value per row
    Sweep {
        #[command(flatten)]
        opts: CommonOpts,
        /// Number of grid points
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Emit the training error per iteration
    Trace {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Compare against composite trapezoid and Simpson baselines over a
    /// grid of upper limits
    Compare {
        #[command(flatten)]
        opts: CommonOpts,
        /// Number of grid points
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Weight fit to compare: gradient descent or exact least squares
        #[arg(long, value_enum, default_value_t = TrainerKind::Gd)]
        trainer: TrainerKind,
    },
    /// Inspect the built-in integrand corpus
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List the built-in integrands with intervals and analytic values
    List {
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long, value_name = "PATH")]
        output: Option<std::path::PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    let result = match &cli.command {
        Command::Integrate { opts } => commands::cmd_integrate(opts),
        Command::Sweep { opts, steps } => commands::cmd_sweep(opts, *steps),
        Command::Trace { opts } => commands::cmd_trace(opts),
        Command::Compare {
            opts,
            steps,
            trainer,
        } => commands::cmd_compare(opts, *steps, *trainer),
        Command::Corpus {
            action: CorpusAction::List { format, output },
        } => commands::cmd_corpus_list(*format, output.as_deref()),
    };

    match result {
        Ok(Outcome::Success) => {}
        Ok(Outcome::NotConverged) => std::process::exit(2),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
