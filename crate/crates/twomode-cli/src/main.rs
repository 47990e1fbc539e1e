//! `twomode` — analysis of two-mode Gaussian states from covariance
//! matrices: validation, entanglement reports, standard-form reduction,
//! passive optimization, parameter sweeps, and homodyne simulation.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 unphysical state,
//! 3 optimizer did not converge (best found is still written).

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Format;

#[derive(Parser)]
#[command(name = "twomode", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a covariance-matrix file against the uncertainty relation.
    Validate(ValidateArgs),
    /// Entanglement report: transposed eigenvalue, negativities, formation
    /// measure, purity.
    Analyze(AnalyzeArgs),
    /// Reduce to the four standard-form scalars (a, b, c+, c-).
    StandardForm(StandardFormArgs),
    /// Find the passive transform minimizing the transposed eigenvalue and
    /// write the corrected state.
    Optimize(OptimizeArgs),
    /// Tabulate model sweeps.
    Sweep(SweepArgs),
    /// Sample homodyne traces from a state and optionally re-estimate its
    /// covariance matrix.
    Simulate(SimulateArgs),
}

/// Basis handling before analysis: as stored, or after the balanced beam
/// splitter that maps the squeezed pair onto the entangled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    AsIs,
    #[value(name = "rotate-45")]
    Rotate45,
}

impl Basis {
    fn label(self) -> &'static str {
        match self {
            Basis::AsIs => "as-is",
            Basis::Rotate45 => "rotate-45",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl SignArg {
    fn label(self) -> &'static str {
        match self {
            SignArg::Plus => "plus",
            SignArg::Minus => "minus",
        }
    }
}

#[derive(Args)]
pub struct ValidateArgs {
    /// Covariance matrix in cmv1 format.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Covariance matrix in cmv1 format.
    input: PathBuf,
    /// Basis of the analysis relative to the stored matrix.
    #[arg(long, value_enum, default_value = "as-is")]
    basis: Basis,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
pub struct StandardFormArgs {
    /// Covariance matrix in cmv1 format.
    input: PathBuf,
    /// Write the reduced matrix here (cmv1).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
pub struct OptimizeArgs {
    /// Covariance matrix in cmv1 format, stored in the squeezed-mode basis.
    input: PathBuf,
    /// Where to write the corrected matrix (default: INPUT with a
    /// .corrected.cm extension).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(subcommand)]
    kind: SweepKind,
}

#[derive(Subcommand)]
enum SweepKind {
    /// Entanglement of the tilted-squeezing family over an (a, theta) grid.
    TiltSurface(TiltSurfaceArgs),
    /// Entanglement error under additive perturbations of the matrix
    /// entries, by block and entry set.
    Sensitivity(SensitivityArgs),
}

#[derive(Args)]
pub struct TiltSurfaceArgs {
    /// Smallest anti-squeezed variance a.
    #[arg(long, default_value_t = 1.0)]
    a_min: f64,
    /// Largest anti-squeezed variance a.
    #[arg(long, default_value_t = 10.0)]
    a_max: f64,
    #[arg(long, default_value_t = 101)]
    a_steps: usize,
    /// Smallest tilt angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    theta_min: f64,
    /// Largest tilt angle, degrees.
    #[arg(long, default_value_t = 180.0)]
    theta_max: f64,
    #[arg(long, default_value_t = 101)]
    theta_steps: usize,
    /// Write the table here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SensitivityArgs {
    /// Baseline covariance matrix (default: the built-in squeezed pair
    /// diag(0.33, 7.94, 7.94, 0.33)).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Largest perturbation magnitude, shot-noise units.
    #[arg(long, default_value_t = 0.3)]
    delta_max: f64,
    #[arg(long, default_value_t = 151)]
    delta_steps: usize,
    /// Sign of the additive error.
    #[arg(long, value_enum, default_value = "plus")]
    sign: SignArg,
    /// Write the table here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Covariance matrix in cmv1 format.
    input: PathBuf,
    /// Sample count for covariance estimation (with --estimate).
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Generator seed; equal seeds reproduce every output byte for byte.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of local-oscillator phases across one full turn.
    #[arg(long, default_value_t = 64)]
    phases: usize,
    #[arg(long, default_value_t = 2000)]
    samples_per_phase: usize,
    /// Estimate the covariance matrix back from samples and analyze it.
    #[arg(long)]
    estimate: bool,
    /// Zero the off-diagonal entries of the intermodal block of the
    /// estimate (the standard policy for entries that are hardest to
    /// measure).
    #[arg(long)]
    zero_offdiag: bool,
    /// Basis for the entanglement report on the estimate.
    #[arg(long, value_enum, default_value = "rotate-45")]
    basis: Basis,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too and must stay exit 0; real
            // usage mistakes are contractually exit 1 (clap's default is 2).
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = match &cli.command {
        Command::Validate(args) => commands::cmd_validate(args),
        Command::Analyze(args) => commands::cmd_analyze(args),
        Command::StandardForm(args) => commands::cmd_standard_form(args),
        Command::Optimize(args) => commands::cmd_optimize(args),
        Command::Sweep(args) => match &args.kind {
            SweepKind::TiltSurface(a) => commands::cmd_sweep_tilt_surface(a),
            SweepKind::Sensitivity(a) => commands::cmd_sweep_sensitivity(a),
        },
        Command::Simulate(args) => commands::cmd_simulate(args),
    };

    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e) as u8)
        }
    }
}
