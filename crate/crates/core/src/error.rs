use std::fmt;

use serde::{Deserialize, Serialize};

/// The validity condition a state, observable or factorization failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// Entries must be finite.
    Finite,
    /// Probabilities must be nonnegative.
    Nonnegativity,
    /// Probabilities must sum to one.
    Normalization,
    /// Matrices must be square with the declared dimension.
    Shape,
    /// Matrices must equal their conjugate transpose.
    Hermiticity,
    /// Density matrices must have unit trace.
    Trace,
    /// Density matrices must have no negative eigenvalue.
    PositiveSemidefinite,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Finite => "finite",
            Condition::Nonnegativity => "nonnegativity",
            Condition::Normalization => "normalization",
            Condition::Shape => "shape",
            Condition::Hermiticity => "hermiticity",
            Condition::Trace => "trace",
            Condition::PositiveSemidefinite => "positive-semidefinite",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A violated invariant and by how much it was violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    /// Size of the violation in the natural units of the condition, e.g.
    /// `|trace - 1|` or the magnitude of the most negative eigenvalue.
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {:e}", self.condition, self.magnitude)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} {value} out of range 1..={max}")]
    Range {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("validation failed: {0}")]
    Validation(Violation),

    #[error("operation requires a {required} map, got {parts} subsystem(s)")]
    UnsupportedPartition {
        required: &'static str,
        parts: usize,
    },

    #[error("Kronecker-ordered operations require a row-major index map")]
    ConventionMismatch,

    #[error("invalid factorization {factors:?} of {total}: {reason}")]
    InvalidFactorization {
        factors: Vec<usize>,
        total: usize,
        reason: &'static str,
    },

    #[error("invalid index table: {0}")]
    InvalidTable(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unsupported observable: {0}")]
    UnsupportedObservable(&'static str),

    #[error("expectation value has imaginary part {imag:e} above tolerance")]
    ImaginaryExpectation { imag: f64 },
}

impl Error {
    pub(crate) fn violation(condition: Condition, magnitude: f64) -> Self {
        Error::Validation(Violation {
            condition,
            magnitude,
        })
    }

    pub(crate) fn dimension(expected: usize, found: usize) -> Self {
        Error::Dimension { expected, found }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
