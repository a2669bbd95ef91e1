//! Hidden correlations in single-qudit states.
//!
//! A probability vector `p_s` or density matrix `ρ_{ss'}` on `N = n₁⋯n_ℓ`
//! outcomes can be read as a joint state of `ℓ` artificial subsystems by
//! relabeling `s ↔ (j₁,…,j_ℓ)` with an invertible [`IndexMap`]. Under that
//! reading the usual multipartite machinery applies to a single system:
//! marginals and partial traces, mutual information, subadditivity and
//! strong subadditivity of entropy, and means of product-form observables
//! rewritten as correlation functions of commuting factor observables.
//!
//! | module | contents |
//! |--------|----------|
//! | [`indexmap`] | factorizations of `N`, row/column-major and explicit bijections |
//! | [`classical`] | means, moments, Shannon entropy, marginals, subadditivity, lifts |
//! | [`quantum`] | density matrices, partial trace, von Neumann entropy, Kronecker lifts |
//! | [`factorize`] | rank-one tests for product-form observables |
//! | [`sampler`] | seeded measurement simulation and random instances |
//! | [`linalg`] | dense complex matrices and a Jacobi Hermitian eigensolver |
//! | [`json`] | JSON output with 17-significant-digit floats |
//!
//! ```
//! use qhc_core::{classical, IndexMap, ProbabilityState, ClassicalObservable};
//!
//! let p = ProbabilityState::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
//! let f = ClassicalObservable::new(vec![1.0, -1.0, -1.0, 1.0]).unwrap();
//! let map = IndexMap::row_major(&[2, 2]).unwrap();
//!
//! let sign = ClassicalObservable::new(vec![1.0, -1.0]).unwrap();
//! let corr = classical::mean_as_correlation(&p, &map, &[sign.clone(), sign]).unwrap();
//! assert!((corr - classical::mean(&p, &f).unwrap()).abs() < 1e-12);
//! ```

pub mod classical;
pub mod error;
pub mod factorize;
pub mod indexmap;
pub mod json;
pub mod linalg;
pub mod quantum;
pub mod sampler;

pub use classical::{ClassicalObservable, InequalityReport, MarginalSet, ProbabilityState};
pub use error::{Condition, Error, Result, Violation};
pub use factorize::FactorizationResult;
pub use indexmap::{enumerate_factorizations, Convention, DimensionFactorization, IndexMap};
pub use linalg::CMatrix;
pub use quantum::{DensityMatrix, QuantumObservable, QuantumSubadditivityReport};
pub use sampler::SampleReport;
