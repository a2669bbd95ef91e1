//! Density matrices and Hermitian observables on an `N`-dimensional space,
//! relabeled as artificial multiqudit systems through an [`IndexMap`].
//!
//! Tensor-product constructions ([`kron`], [`lift_observable`],
//! [`mean_as_quantum_correlation`]) use the row-major basis order
//! `|s(j,k)⟩ = |j⟩|k⟩` and reject maps with any other convention.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{normalize_keep, InequalityReport, ProbabilityState, INEQUALITY_TOL};
use crate::error::{Condition, Error, Result};
use crate::indexmap::{row_major_linear, IndexMap};
use crate::linalg::{eigh, CMatrix};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues down to `-PSD_TOL` are accepted and clamped to zero.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this contribute nothing to the von Neumann entropy.
pub const EIGEN_ZERO: f64 = 1e-12;
/// Imaginary residue allowed in `Tr(Fρ)`, relative to `max(1, max|F|)`.
pub const IMAG_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct DensityMatrix {
    matrix: CMatrix,
    // spectrum from validation, clamped at zero
    eigenvalues: Vec<f64>,
}

/// Checks `ρ = ρ†`, `Tr ρ = 1` and `ρ ≥ 0`, in that order, and reports the
/// first violated condition together with its size.
pub fn validate_density(entries: CMatrix) -> Result<DensityMatrix> {
    if entries.dim() == 0 {
        return Err(Error::violation(Condition::Shape, 0.0));
    }
    if let Some(bad) = entries.as_slice().iter().find(|z| !z.is_finite()) {
        return Err(Error::violation(Condition::Finite, bad.norm()));
    }
    let herm = entries.hermiticity_defect();
    if herm > HERMITIAN_TOL {
        return Err(Error::violation(Condition::Hermiticity, herm));
    }
    let trace_err = (entries.trace() - 1.0).norm();
    if trace_err > TRACE_TOL {
        return Err(Error::violation(Condition::Trace, trace_err));
    }
    let mut eigenvalues = eigh(&entries).values;
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL {
        return Err(Error::violation(Condition::PositiveSemidefinite, -min));
    }
    for l in eigenvalues.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(DensityMatrix {
        matrix: entries,
        eigenvalues,
    })
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        validate_density(entries)
    }

    /// `1/N`, the maximally mixed state.
    pub fn maximally_mixed(n: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::from_diagonal(&vec![1.0 / n as f64; n]),
            eigenvalues: vec![1.0 / n as f64; n],
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        validate_density(CMatrix::outer(psi))
    }

    /// `diag(p_s)`: the classical state embedded as a diagonal density matrix.
    pub fn from_state(state: &ProbabilityState) -> Self {
        DensityMatrix {
            matrix: CMatrix::from_diagonal(state.probs()),
            eigenvalues: state.probs().to_vec(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Spin label `j = (N − 1)/2` of the qudit.
    pub fn spin(&self) -> f64 {
        (self.dim() as f64 - 1.0) / 2.0
    }

    /// Spectrum in no particular order; entries are nonnegative.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The diagonal `ρ_ss` as a probability vector.
    pub fn populations(&self) -> Result<ProbabilityState> {
        ProbabilityState::new(self.matrix.diagonal().iter().map(|z| z.re).collect())
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.matrix
    }
}

impl TryFrom<CMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: CMatrix) -> Result<Self> {
        validate_density(m)
    }
}

impl From<DensityMatrix> for CMatrix {
    fn from(rho: DensityMatrix) -> Self {
        rho.matrix
    }
}

/// A Hermitian matrix `F_{ss'}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix", into = "CMatrix")]
pub struct QuantumObservable {
    matrix: CMatrix,
}

impl QuantumObservable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if let Some(bad) = matrix.as_slice().iter().find(|z| !z.is_finite()) {
            return Err(Error::violation(Condition::Finite, bad.norm()));
        }
        let herm = matrix.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::violation(Condition::Hermiticity, herm));
        }
        Ok(QuantumObservable { matrix })
    }

    pub fn identity(n: usize) -> Self {
        QuantumObservable {
            matrix: CMatrix::identity(n),
        }
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        QuantumObservable {
            matrix: CMatrix::from_diagonal(values),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The real diagonal if every off-diagonal entry is within `tol` of zero.
    pub fn diagonal_values(&self, tol: f64) -> Option<Vec<f64>> {
        (self.matrix.off_diagonal_max() <= tol)
            .then(|| self.matrix.diagonal().iter().map(|z| z.re).collect())
    }
}

impl AsRef<CMatrix> for QuantumObservable {
    fn as_ref(&self) -> &CMatrix {
        &self.matrix
    }
}

impl TryFrom<CMatrix> for QuantumObservable {
    type Error = Error;

    fn try_from(m: CMatrix) -> Result<Self> {
        QuantumObservable::new(m)
    }
}

impl From<QuantumObservable> for CMatrix {
    fn from(obs: QuantumObservable) -> Self {
        obs.matrix
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::dimension(expected, found));
    }
    Ok(())
}

/// `Σ_{s,s'} A_{ss'} B_{s's}`.
fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..n {
        for t in 0..n {
            acc += a[(s, t)] * b[(t, s)];
        }
    }
    acc
}

fn real_expectation(obs: &CMatrix, rho: &CMatrix) -> Result<f64> {
    let value = trace_of_product(obs, rho);
    if value.im.abs() > IMAG_TOL * obs.max_abs().max(1.0) {
        return Err(Error::ImaginaryExpectation { imag: value.im });
    }
    Ok(value.re)
}

/// `⟨F⟩ = Tr(F ρ)`.
pub fn expectation(rho: &DensityMatrix, obs: &QuantumObservable) -> Result<f64> {
    check_dim(rho.dim(), obs.dim())?;
    real_expectation(&obs.matrix, &rho.matrix)
}

/// A matrix addressed by multi-indices: element `(j,k,…),(j',k',…)` is the
/// stored element `s(j,k,…), s(j',k',…)`. Nothing is copied.
#[derive(Debug, Clone, Copy)]
pub struct Relabeled<'a> {
    matrix: &'a CMatrix,
    map: &'a IndexMap,
}

impl<'a> Relabeled<'a> {
    pub fn map(&self) -> &'a IndexMap {
        self.map
    }

    /// Element at the 1-based multi-indices `row`, `col`.
    pub fn get(&self, row: &[usize], col: &[usize]) -> Result<Complex64> {
        let s = self.map.encode(row)?;
        let t = self.map.encode(col)?;
        Ok(self.matrix[(s - 1, t - 1)])
    }

    /// Back to `s`-indexed form.
    pub fn flatten(&self) -> CMatrix {
        self.matrix.clone()
    }
}

pub fn relabel<'a, M: AsRef<CMatrix>>(m: &'a M, map: &'a IndexMap) -> Result<Relabeled<'a>> {
    let matrix = m.as_ref();
    check_dim(map.total(), matrix.dim())?;
    Ok(Relabeled { matrix, map })
}

/// Reduced state on the subsystems `keep` (1-based), e.g. for `keep = [1]`
/// on a bipartite map `(ρ₁)_{jj'} = Σ_k ρ_{jk,j'k}`. The reduced basis is
/// row-major over the kept subsystems in increasing order.
pub fn partial_trace(rho: &DensityMatrix, map: &IndexMap, keep: &[usize]) -> Result<DensityMatrix> {
    check_dim(map.total(), rho.dim())?;
    let keep = normalize_keep(map, keep)?;
    if keep.len() == map.parts() {
        return Err(Error::Argument(
            "partial trace must trace out at least one subsystem".into(),
        ));
    }
    let traced: Vec<usize> = (0..map.parts()).filter(|p| !keep.contains(p)).collect();
    let dims = map.factors();
    let kept_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();

    let n = map.total();
    let mut kept_of = Vec::with_capacity(n);
    let mut traced_of = Vec::with_capacity(n);
    let mut buf = Vec::with_capacity(map.parts());
    for s0 in 0..n {
        let c = map.coords0(s0);
        buf.clear();
        buf.extend(keep.iter().map(|&p| c[p]));
        kept_of.push(row_major_linear(&kept_dims, &buf));
        buf.clear();
        buf.extend(traced.iter().map(|&p| c[p]));
        traced_of.push(row_major_linear(&traced_dims, &buf));
    }

    let mut reduced = CMatrix::zeros(kept_dims.iter().product());
    for s0 in 0..n {
        for t0 in 0..n {
            if traced_of[s0] == traced_of[t0] {
                reduced[(kept_of[s0], kept_of[t0])] += rho.matrix[(s0, t0)];
            }
        }
    }
    validate_density(reduced)
}

/// `S(ρ) = −Tr ρ ln ρ` in nats, from the spectrum computed at validation.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    0.0 - rho
        .eigenvalues
        .iter()
        .filter(|&&l| l >= EIGEN_ZERO)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// `S(ρ) ≤ S(ρ₁) + S(ρ₂)` for a bipartite relabeling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumSubadditivityReport {
    #[serde(rename = "S12")]
    pub s12: f64,
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    pub holds: bool,
    /// `S1 + S2 − S12`, the quantum mutual information.
    pub slack: f64,
}

fn require_parts(map: &IndexMap, parts: usize, required: &'static str) -> Result<()> {
    if map.parts() != parts {
        return Err(Error::UnsupportedPartition {
            required,
            parts: map.parts(),
        });
    }
    Ok(())
}

pub fn check_quantum_subadditivity(
    rho: &DensityMatrix,
    map: &IndexMap,
) -> Result<QuantumSubadditivityReport> {
    check_dim(map.total(), rho.dim())?;
    require_parts(map, 2, "bipartite")?;
    let s12 = von_neumann_entropy(rho);
    let s1 = von_neumann_entropy(&partial_trace(rho, map, &[1])?);
    let s2 = von_neumann_entropy(&partial_trace(rho, map, &[2])?);
    Ok(QuantumSubadditivityReport {
        s12,
        s1,
        s2,
        holds: s12 <= s1 + s2 + INEQUALITY_TOL,
        slack: s1 + s2 - s12,
    })
}

/// `S(ρ₁₂₃) + S(ρ₂) ≤ S(ρ₁₂) + S(ρ₂₃)` for a tripartite relabeling.
pub fn check_quantum_ssa(rho: &DensityMatrix, map: &IndexMap) -> Result<InequalityReport> {
    check_dim(map.total(), rho.dim())?;
    require_parts(map, 3, "tripartite")?;
    let s = |keep: &[usize]| partial_trace(rho, map, keep).map(|r| von_neumann_entropy(&r));
    let lhs = von_neumann_entropy(rho) + s(&[2])?;
    let rhs = s(&[1, 2])? + s(&[2, 3])?;
    Ok(InequalityReport::new(lhs, rhs))
}

/// `F₁ ⊗ F₂ ⊗ ⋯` in row-major order.
pub fn kron(factors: &[QuantumObservable]) -> Result<QuantumObservable> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Argument("Kronecker product of no factors".into()))?;
    let matrix = rest
        .iter()
        .fold(first.matrix.clone(), |acc, f| acc.kron(&f.matrix));
    Ok(QuantumObservable { matrix })
}

fn require_row_major(map: &IndexMap) -> Result<()> {
    if !map.is_row_major() {
        return Err(Error::ConventionMismatch);
    }
    Ok(())
}

fn check_subsystem(map: &IndexMap, p: usize) -> Result<()> {
    if p == 0 || p > map.parts() {
        return Err(Error::Range {
            what: "subsystem",
            value: p,
            max: map.parts(),
        });
    }
    Ok(())
}

/// `F̃_p = 1 ⊗ ⋯ ⊗ F_p ⊗ ⋯ ⊗ 1`, the subsystem observable acting on the
/// whole space. Lifts on distinct subsystems commute.
pub fn lift_observable(
    map: &IndexMap,
    p: usize,
    factor: &QuantumObservable,
) -> Result<QuantumObservable> {
    require_row_major(map)?;
    check_subsystem(map, p)?;
    check_dim(map.factors()[p - 1], factor.dim())?;
    let parts: Vec<QuantumObservable> = map
        .factors()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i + 1 == p {
                factor.clone()
            } else {
                QuantumObservable::identity(d)
            }
        })
        .collect();
    kron(&parts)
}

fn check_factors(map: &IndexMap, factors: &[QuantumObservable]) -> Result<()> {
    check_dim(map.parts(), factors.len())?;
    for (f, &d) in factors.iter().zip(map.factors()) {
        check_dim(d, f.dim())?;
    }
    Ok(())
}

/// All lifts `F̃₁, …, F̃_ℓ` of one factor per subsystem.
pub fn lift_all(map: &IndexMap, factors: &[QuantumObservable]) -> Result<Vec<QuantumObservable>> {
    require_row_major(map)?;
    check_factors(map, factors)?;
    factors
        .iter()
        .enumerate()
        .map(|(i, f)| lift_observable(map, i + 1, f))
        .collect()
}

/// The operator product `F̃₁ F̃₂ ⋯ F̃_ℓ`.
pub fn lifted_product(map: &IndexMap, factors: &[QuantumObservable]) -> Result<CMatrix> {
    let lifts = lift_all(map, factors)?;
    Ok(lifts
        .iter()
        .skip(1)
        .fold(lifts[0].matrix.clone(), |acc, l| acc.matmul(&l.matrix)))
}

/// `max |[F̃_a, F̃_b]|` for every pair `a < b` (1-based).
pub fn commutator_norms(
    map: &IndexMap,
    factors: &[QuantumObservable],
) -> Result<Vec<(usize, usize, f64)>> {
    let lifts = lift_all(map, factors)?;
    let mut out = Vec::new();
    for a in 0..lifts.len() {
        for b in (a + 1)..lifts.len() {
            let norm = lifts[a].matrix.commutator(&lifts[b].matrix).max_abs();
            out.push((a + 1, b + 1, norm));
        }
    }
    Ok(out)
}

/// `⟨F̃₁ F̃₂ ⋯ F̃_ℓ⟩ = Tr(F̃₁ ⋯ F̃_ℓ ρ)`: the correlation function of the
/// commuting lifts. Equals `Tr((F₁ ⊗ ⋯ ⊗ F_ℓ) ρ)`.
pub fn mean_as_quantum_correlation(
    rho: &DensityMatrix,
    map: &IndexMap,
    factors: &[QuantumObservable],
) -> Result<f64> {
    check_dim(map.total(), rho.dim())?;
    let product = lifted_product(map, factors)?;
    real_expectation(&product, &rho.matrix)
}
