use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "inlm",
    version,
    about = "Inertial Levenberg-Marquardt experiments and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient identification in -Δu + cu = f on the unit square.
    Pde(PdeArgs),
    /// Training of a single saturated-linear neuron.
    Nn(NnArgs),
    /// Run the verification suites and print a pass/fail table.
    Verify(VerifyArgs),
}

/// Flags shared by the experiment commands; each one overrides the config file.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides INLM_OUT_DIR and the config file).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Relative noise level, e.g. 0.01 for 1%.
    #[arg(long)]
    pub noise: Option<f64>,
    /// A single constant inertial weight.
    #[arg(long, conflicts_with = "alpha_sweep")]
    pub alpha: Option<f64>,
    /// Comma-separated constant inertial weights, one run each.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub alpha_sweep: Option<Vec<f64>>,
    /// Discrepancy factor τ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Constant Lagrange multiplier λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Conjugate gradient steps per outer iteration.
    #[arg(long)]
    pub cg_iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stop each run at the discrepancy index instead of recording it.
    #[arg(long)]
    pub stop_at_discrepancy: bool,
    /// Parallel worker slots for the sweep.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    /// Include per-run wall time in summary.json.
    #[arg(long)]
    pub record_timing: bool,
}

#[derive(Debug, Args)]
pub struct PdeArgs {
    /// Interior grid points per direction.
    #[arg(long)]
    pub n: Option<usize>,
    /// Outer iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct NnArgs {
    /// Use a synthetic dataset (the default).
    #[arg(long, conflicts_with = "csv")]
    pub synthetic: bool,
    /// Load samples from a numeric CSV file.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Zero-based index of the target column.
    #[arg(long, requires = "csv")]
    pub target_col: Option<usize>,
    /// Comma-separated zero-based columns to ignore.
    #[arg(long, value_delimiter = ',', requires = "csv")]
    pub exclude_cols: Option<Vec<usize>>,
    /// Whether the first CSV row is a header (detected when omitted).
    #[arg(long, requires = "csv")]
    pub has_header: Option<bool>,
    /// Scale test inputs by the training factor or by their own.
    #[arg(long, value_enum)]
    pub test_scaling: Option<ScalingArg>,
    /// Training samples.
    #[arg(long)]
    pub train: Option<usize>,
    /// Test samples.
    #[arg(long)]
    pub test: Option<usize>,
    /// Input dimension of synthetic data.
    #[arg(long)]
    pub input_dim: Option<usize>,
    /// Outer iterations.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalingArg {
    Train,
    Own,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Adjoint,
    Fd,
    Cg,
    Lemma,
    Monotone,
    Wtcc,
    Kstar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Scalar,
    Pde,
    Nn,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (all when omitted).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub suite: Vec<Suite>,
    /// Restrict to checks on one problem.
    #[arg(long, value_enum)]
    pub problem: Option<ProblemArg>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sweep_and_single_alpha_conflict() {
        let ok = Cli::try_parse_from(["inlm", "pde", "--alpha-sweep", "0,0.2,0.4"]).unwrap();
        let Command::Pde(p) = ok.command else { panic!() };
        assert_eq!(p.common.alpha_sweep, Some(vec![0.0, 0.2, 0.4]));
        assert!(Cli::try_parse_from(["inlm", "pde", "--alpha", "0", "--alpha-sweep", "0.2"]).is_err());
        assert!(Cli::try_parse_from(["inlm", "nn", "--synthetic", "--csv", "x.csv"]).is_err());
        assert!(Cli::try_parse_from(["inlm", "pde", "--jobs", "0"]).is_err());
    }

    #[test]
    fn suites_accept_lists_and_repeats() {
        let cli = Cli::try_parse_from(["inlm", "verify", "--suite", "lemma,kstar", "--suite", "cg"]).unwrap();
        let Command::Verify(v) = cli.command else { panic!() };
        assert_eq!(v.suite, vec![Suite::Lemma, Suite::Kstar, Suite::Cg]);
    }
}
