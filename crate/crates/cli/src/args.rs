use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qhc",
    version,
    about = "Hidden correlations in single-qudit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a state, observable or matrix file against its validity conditions.
    Validate {
        path: PathBuf,
        /// Treat a matrix file as this kind instead of a density matrix.
        #[arg(long, value_enum, default_value_t = MatrixKind::Density)]
        matrix_as: MatrixKind,
    },
    /// Entropies, marginals and subadditivity of a probability state.
    Analyze {
        state: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        /// Sweep every factorization of N into `--parts` factors.
        #[arg(long, conflicts_with_all = ["map", "map_file"])]
        all_partitions: bool,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
        parts: u32,
    },
    /// Rewrite a classical mean as a correlation of factor observables.
    Hidden {
        state: PathBuf,
        observable: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        /// Residual tolerance for the product-form test.
        #[arg(long, default_value_t = qhc_core::factorize::DEFAULT_TOL)]
        tol: f64,
    },
    /// Compare Tr((F₁⊗⋯⊗F_ℓ)ρ) with the product of commuting lifts.
    Quantum {
        rho: PathBuf,
        #[arg(required = true)]
        factors: Vec<PathBuf>,
        #[command(flatten)]
        map: MapArgs,
    },
    /// Simulate repeated measurements of an observable.
    Sample {
        state: PathBuf,
        observable: PathBuf,
        #[arg(long)]
        samples: u64,
        #[arg(long, env = "QHC_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// Factor dimensions, e.g. `2x2` or `2x2x2`.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, value_enum, default_value_t = ConventionArg::RowMajor)]
    pub convention: ConventionArg,
    /// JSON index map, including explicit tables.
    #[arg(long, conflicts_with = "map")]
    pub map_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    RowMajor,
    ColMajor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    Density,
    Observable,
}

/// Parses `2x2x3` into `[2, 2, 3]`.
pub fn parse_dims(spec: &str) -> Result<Vec<usize>, String> {
    spec.split(['x', 'X'])
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad map spec {spec:?}: expected dimensions like 2x2"))
        })
        .collect()
}
