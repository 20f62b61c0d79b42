//! `oseen` command-line interface.
//!
//! Subcommands: `solve` runs a scenario file, `verify` runs the oracle
//! suite, `tabulate` prints kernel values at requested points.
//!
//! Exit codes: 0 success; 1 verification failures (or a tabulation where
//! every row failed); 2 invalid input; 3 contraction failure after retries.

mod output;
mod scenario_file;
mod solve;
mod tabulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oseen::oracles::suite::{run_suite, SuiteOptions};

#[derive(Parser)]
#[command(
    name = "oseen",
    version,
    about = "Pseudo-spectral integral-equation solver for the incompressible Navier-Stokes equations on a periodic box"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write trajectory and diagnostic CSVs.
    Solve(SolveArgs),
    /// Run the self-contained verification suite.
    Verify(VerifyArgs),
    /// Tabulate kernel values at given points.
    Tabulate(tabulate::TabulateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Disable the convective term (Stokes limit).
    #[arg(long)]
    linear: bool,
    /// Override the contraction window: a number or "adaptive".
    #[arg(long)]
    tau: Option<String>,
    /// Override the Duhamel quadrature step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the grid resolution.
    #[arg(long)]
    grid: Option<usize>,
    /// Override the box half width.
    #[arg(long = "box")]
    box_half_width: Option<f64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only one sub-suite: kernels, estimates, or solver.
    #[arg(long)]
    only: Option<String>,
    /// Trim the slowest checks.
    #[arg(long)]
    quick: bool,
    /// Negative control: verify against a deliberately perturbed kernel copy
    /// (must fail).
    #[arg(long)]
    negative_control: bool,
    /// Also write the report table as CSV into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => solve::run(&args),
        Command::Verify(args) => verify(&args),
        Command::Tabulate(args) => tabulate::run(&args),
    };
    match code {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    if let Some(only) = &args.only {
        if !["kernels", "estimates", "solver"].contains(&only.as_str()) {
            anyhow::bail!("unknown suite {only:?}; expected kernels, estimates, or solver");
        }
    }
    let options = SuiteOptions {
        only: args.only.clone(),
        perturb_kernel: args.negative_control,
        quick: args.quick,
    };
    let results = run_suite(&options);
    output::print_verify_table(&results);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        output::write_verify_table(&dir.join("verify.csv"), &results)?;
    }
    let all_pass = results.iter().all(|r| r.pass);
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
