//! `gme`: command-line front end for the GME and Stefan solvers.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use gme_core::{GmeError, SolverConfig};

use crate::output::Format;

#[derive(Parser)]
#[command(
    name = "gme",
    version,
    about = "Generalized modified error function and the one-phase Stefan problem with variable conductivity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Contraction threshold β₁(γ) for each γ
    Beta1 {
        /// γ values [default: 0.1 1 10 100]
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        gamma: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// GME function on [0, λ] with its approximations and pointwise errors
    Gme {
        #[command(flatten)]
        beta: BetaArgs,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sup-norm errors of the order 0 and order 1 approximations against β
    Approx {
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// Largest β in the scan [default: 0.99 β₁(γ)]
        #[arg(long, allow_negative_numbers = true)]
        beta_max: Option<f64>,
        /// Number of β values, starting at 0
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// H(λ) = φ'(λ)/λ on an evenly spaced λ range
    Hscan {
        #[command(flatten)]
        beta: BetaArgs,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        lmin: f64,
        #[arg(long, allow_negative_numbers = true)]
        lmax: f64,
        /// Number of λ values, endpoints included
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve the dimensional Stefan problem and report front and profiles as JSON
    #[command(visible_alias = "physical")]
    Solve {
        #[command(flatten)]
        physical: commands::PhysicalArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output path [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the GME function with the Dirichlet (ME) function for several γ
    Dirichlet {
        #[command(flatten)]
        beta: BetaArgs,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// γ values [default: 0.1 1 10 100]
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        gamma: Option<Vec<f64>>,
        /// Directory for per-γ curve files (eta, phi_gamma, phi_dagger)
        #[arg(long)]
        curves_dir: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve a grid of (γ, λ, β) points in parallel
    Sweep {
        /// JSON file with `gamma`, `lambda` and either `beta` or `beta_frac` lists
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// How β is chosen: directly, as a fraction of β₁(γ), or as the tabulated β₁*.
#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
struct BetaArgs {
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// β as a fraction of β₁(γ)
    #[arg(long, allow_negative_numbers = true)]
    beta_frac: Option<f64>,
    /// β₁(γ) rounded to three significant digits
    #[arg(long)]
    beta_star: bool,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Grid nodes on [0, λ]
    #[arg(long, env = "GME_GRID_N", default_value_t = 1001)]
    grid_n: usize,
    /// Sup-norm stopping tolerance of the fixed-point iteration
    #[arg(long, default_value_t = 1e-10)]
    fp_tol: f64,
    #[arg(long, default_value_t = 500)]
    fp_max_iter: usize,
    /// Absolute tolerance of the root finders
    #[arg(long, default_value_t = 1e-12)]
    root_tol: f64,
    #[arg(long, default_value_t = 200)]
    root_max_iter: usize,
    /// Iterate even where convergence is not guaranteed
    #[arg(long)]
    allow_uncertified: bool,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let config = SolverConfig {
            grid_n: self.grid_n,
            fp_tol: self.fp_tol,
            fp_max_iter: self.fp_max_iter,
            root_tol: self.root_tol,
            root_max_iter: self.root_max_iter,
            allow_uncertified: self.allow_uncertified,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Output path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Raised when some points of a batch failed after the rest were written.
/// `code` is the most severe exit code among the failures.
#[derive(Debug)]
pub struct PartialFailure {
    pub failed: usize,
    pub code: u8,
}

impl std::fmt::Display for PartialFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} point(s) failed", self.failed)
    }
}

impl std::error::Error for PartialFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(partial) = err.downcast_ref::<PartialFailure>() {
        return partial.code;
    }
    match err.downcast_ref::<GmeError>() {
        Some(
            GmeError::InvalidGrid(_)
            | GmeError::InvalidParameter(_)
            | GmeError::OutOfDomain { .. }
            | GmeError::UnsupportedOrder(_)
            | GmeError::ContractionNotGuaranteed { .. },
        ) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Beta1 { gamma, output } => {
            let gammas = gamma.unwrap_or_else(|| commands::DEFAULT_GAMMAS.to_vec());
            if gammas.is_empty() {
                bail!("at least one γ is required");
            }
            commands::beta1_table(&gammas, &output)
        }
        Command::Gme {
            beta,
            gamma,
            lambda,
            solver,
            output,
        } => commands::gme(beta, gamma, lambda, &solver.config()?, &output),
        Command::Approx {
            gamma,
            lambda,
            beta_max,
            steps,
            solver,
            output,
        } => commands::approx(gamma, lambda, beta_max, steps, &solver.config()?, &output),
        Command::Hscan {
            beta,
            gamma,
            lmin,
            lmax,
            steps,
            solver,
            output,
        } => commands::hscan(beta, gamma, lmin, lmax, steps, &solver.config()?, &output),
        Command::Solve {
            physical,
            solver,
            out,
        } => commands::physical(&physical, &solver.config()?, out.as_deref()),
        Command::Dirichlet {
            beta,
            lambda,
            gamma,
            curves_dir,
            solver,
            output,
        } => {
            let gammas = gamma.unwrap_or_else(|| commands::DEFAULT_GAMMAS.to_vec());
            commands::dirichlet(
                beta,
                lambda,
                &gammas,
                curves_dir.as_deref(),
                &solver.config()?,
                &output,
            )
        }
        Command::Sweep {
            spec,
            solver,
            output,
        } => commands::sweep(&spec, &solver.config()?, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn solver_defaults_match_the_library() {
        let cli =
            Cli::try_parse_from(["gme", "gme", "--beta", "0", "--gamma", "1", "--lambda", "1"])
                .unwrap();
        let Command::Gme { solver, .. } = cli.command else {
            unreachable!()
        };
        let mut expected = SolverConfig::default();
        if let Ok(n) = std::env::var("GME_GRID_N") {
            expected.grid_n = n.parse().unwrap();
        }
        assert_eq!(solver.config().unwrap(), expected);
    }

    #[test]
    fn solver_failures_map_to_exit_code_two() {
        let err = anyhow::Error::new(GmeError::NotConverged {
            iterations: 3,
            residual: 1.0,
        });
        assert_eq!(exit_code(&err), 2);
        let err = anyhow::Error::new(GmeError::InvalidParameter("x".into()));
        assert_eq!(exit_code(&err), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), 1);
    }
}
