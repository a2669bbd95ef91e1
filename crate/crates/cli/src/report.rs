//! Report shapes emitted by each command. Deserializing a command's output
//! into its type is the schema check: unknown or missing keys are rejected.

use qhc_core::{IndexMap, InequalityReport, QuantumSubadditivityReport, Violation};
use serde::{Deserialize, Serialize};

pub const NOT_PRODUCT_FORM: &str = "not product-form under this map";
pub const PRODUCT_FORM: &str = "product-form";
pub const NO_PARTITIONS: &str = "no nontrivial partitions";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateReport {
    pub kind: String,
    pub dim: usize,
    pub valid: bool,
    /// `"valid"`, or the violated condition and its magnitude.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeReport {
    pub dim: usize,
    pub entropy: f64,
    pub partitions: Vec<PartitionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionReport {
    pub map: IndexMap,
    pub marginals: Vec<Vec<f64>>,
    pub marginal_entropies: Vec<f64>,
    /// Largest deviation of the joint state from the product of its marginals.
    pub product_defect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutual_information: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subadditivity: Option<InequalityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strong_subadditivity: Option<InequalityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiddenReport {
    pub map: IndexMap,
    pub product_form: bool,
    pub verdict: String,
    pub residual: f64,
    pub gauge: String,
    pub degenerate: bool,
    /// `Σ_s p_s F(s)`.
    pub mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<Vec<f64>>>,
    /// Each factor lifted to the full index set, `F'_p(s)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifts: Option<Vec<Vec<f64>>>,
    /// `Σ_s p_s Π_p F'_p(s)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutatorNorm {
    pub a: usize,
    pub b: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumReport {
    pub map: IndexMap,
    /// `Tr((F₁ ⊗ ⋯ ⊗ F_ℓ) ρ)`.
    pub trace_value: f64,
    /// `Tr(F̃₁ ⋯ F̃_ℓ ρ)` from the lifted factors.
    pub lifted_value: f64,
    pub difference: f64,
    pub commutator_norms: Vec<CommutatorNorm>,
    pub entropy: f64,
    pub reduced_entropies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subadditivity: Option<QuantumSubadditivityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strong_subadditivity: Option<InequalityReport>,
}
