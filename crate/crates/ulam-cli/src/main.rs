//! Command-line driver: enumeration, counting, verification, eigenfunction
//! rigidity checks and flow simulation, with machine-readable JSON/CSV
//! output and stable exit codes.
//!
//! Exit codes: 0 success, 1 a numeric check failed its tolerance,
//! 2 path-tracking failure, 3 inadmissible point.

mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    Full,
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridPreset {
    Default,
    Wide,
    Fine,
}

/// Numerical experiments around monic polynomials whose coefficients
/// coincide with their zeros.
#[derive(Debug, Parser)]
#[command(name = "ulam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate all fixed points of the chosen degree by homotopy
    /// continuation and emit the solution set.
    Enumerate {
        /// Polynomial degree (1..=8).
        #[arg(long)]
        n: usize,
        /// RNG seed for the start system and homotopy constant.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Which residual system to solve.
        #[arg(long, value_enum, default_value_t = SystemKind::Full)]
        system: SystemKind,
        /// Residual tolerance for endpoint polishing.
        #[arg(long, default_value_t = 1e-12)]
        tol_residual: f64,
        /// Clustering radius for endpoint deduplication.
        #[arg(long, default_value_t = 1e-6)]
        tol_cluster: f64,
        /// Output format (json or csv).
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count fixed points by inclusion-exclusion and cross-check against
    /// direct enumeration.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity, equivalence, padding and zero-tail suite over the
    /// enumerated fixed points of one degree.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Tolerance for the identity and equivalence defects.
        #[arg(long, default_value_t = 1e-8)]
        tol_residual: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the only eigenpolynomial family satisfying the
    /// fixed-point constraints is the trivial one.
    Eigencheck {
        #[arg(long, value_enum, default_value_t = GridPreset::Default)]
        grid: GridPreset,
        /// Residual below which a parameter counts as satisfying the
        /// constraints.
        #[arg(long, default_value_t = 1e-10)]
        tol_residual: f64,
        #[arg(long, default_value_t = 2016)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the zero-relaxation flow from a perturbed fixed point and
    /// probe its stability.
    Flow {
        #[arg(long)]
        n: usize,
        /// Index into the (deterministically sorted) enumerated fixed
        /// points; defaults to the first admissible one.
        #[arg(long)]
        point_index: Option<usize>,
        /// Perturbation radius per component.
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Integration horizon.
        #[arg(long, default_value_t = 25.0)]
        t_end: f64,
        /// Integration step.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Stability-probe trials.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Trajectory file format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output directory for the trajectory file and stability JSON
        /// (default: $ULAM_OUT_DIR or the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-shot reproduction summary for degrees 1..=5.
    Report {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Include the deflated-system variety counts.
        #[arg(long)]
        tilde: bool,
        /// Include the overlap counts for degrees 2..=5.
        #[arg(long)]
        intersections: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Enumerate {
            n,
            seed,
            system,
            tol_residual,
            tol_cluster,
            format,
            out,
        } => commands::enumerate(n, seed, system, tol_residual, tol_cluster, format, out),
        Command::Count { n, seed, out } => commands::count(n, seed, out),
        Command::Verify {
            n,
            seed,
            tol_residual,
            out,
        } => commands::verify(n, seed, tol_residual, out),
        Command::Eigencheck {
            grid,
            tol_residual,
            seed,
            out,
        } => commands::eigencheck(grid, tol_residual, seed, out),
        Command::Flow {
            n,
            point_index,
            radius,
            seed,
            t_end,
            dt,
            trials,
            format,
            out,
        } => commands::flow(n, point_index, radius, seed, t_end, dt, trials, format, out),
        Command::Report {
            seed,
            tilde,
            intersections,
            format,
            out,
        } => commands::report(seed, tilde, intersections, format, out),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(4)
        }
    }
}
