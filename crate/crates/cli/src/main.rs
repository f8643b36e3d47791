//! `volrat`: John-position pipeline, reverse isoperimetric batches and
//! Monte Carlo checks from the command line.
//!
//! Exit codes: 0 when every checked bound holds, 1 on a bound violation,
//! 2 on bad input or solver failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{Format, Output};

#[derive(Parser, Debug)]
#[command(
    name = "volrat",
    version,
    about = "John ellipsoids, volume ratios and reverse isoperimetric checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximal ellipsoid, John position, contact points and decomposition of a polytope file.
    John(commands::JohnArgs),
    /// Isoperimetric quotients of random polytopes in John position against the extremal constant.
    Reviso(commands::RevisoArgs),
    /// Lewis position and volume ratio of a subspace of l_p^m.
    Lp(commands::LpArgs),
    /// Monte Carlo Brascamp–Lieb ratio for a rank-one system.
    Bl(commands::BlArgs),
    /// Petty's projection functional of a polytope and of random affine images of it.
    Petty(commands::PettyArgs),
}

/// Output destination and format, shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (out, report): (&OutputArgs, Output) = match &cli.command {
        Command::John(a) => (&a.output, commands::john(a)?),
        Command::Reviso(a) => (&a.output, commands::reviso(a)?),
        Command::Lp(a) => (&a.output, commands::lp(a)?),
        Command::Bl(a) => (&a.output, commands::bl(a)?),
        Command::Petty(a) => (&a.output, commands::petty(a)?),
    };
    report.write(out)?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
