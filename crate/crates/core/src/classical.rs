//! Classical states `p_s` and observables `F(s)` on `s ∈ 1..=N`, and their
//! reading as joint distributions of artificial random variables `(j,k,…)`
//! under an [`IndexMap`].
//!
//! Entropies are in nats.

use serde::{Deserialize, Serialize};

use crate::error::{Condition, Error, Result};
use crate::indexmap::IndexMap;

/// Entries in `[-NEGATIVE_CLAMP, 0)` are rounded up to zero on construction.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
/// Allowed deviation of `Σ p_s` from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Slack tolerance when deciding whether an entropic inequality holds.
pub const INEQUALITY_TOL: f64 = 1e-10;

/// A normalized nonnegative vector `p_s`, the classical state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateWire", into = "StateWire")]
pub struct ProbabilityState {
    probs: Vec<f64>,
}

impl ProbabilityState {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Argument("a state needs at least one entry".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite()) {
            return Err(Error::violation(Condition::Finite, bad.abs()));
        }
        let most_negative = probs.iter().copied().fold(0.0f64, f64::min);
        if most_negative < -NEGATIVE_CLAMP {
            return Err(Error::violation(Condition::Nonnegativity, -most_negative));
        }
        for p in probs.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::violation(
                Condition::Normalization,
                (sum - 1.0).abs(),
            ));
        }
        Ok(ProbabilityState { probs })
    }

    pub fn uniform(n: usize) -> Self {
        ProbabilityState {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// The point mass on the 1-based outcome `s`.
    pub fn point_mass(n: usize, s: usize) -> Result<Self> {
        if s == 0 || s > n {
            return Err(Error::Range {
                what: "outcome",
                value: s,
                max: n,
            });
        }
        let mut probs = vec![0.0; n];
        probs[s - 1] = 1.0;
        Ok(ProbabilityState { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// A real-valued observable `F(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObservableWire", into = "ObservableWire")]
pub struct ClassicalObservable {
    values: Vec<f64>,
}

impl ClassicalObservable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::violation(Condition::Finite, bad.abs()));
        }
        Ok(ClassicalObservable { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ClassicalObservable { values: vec![c; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise product `F(s)·G(s)`.
    pub fn pointwise_product(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(ClassicalObservable {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::dimension(expected, found));
    }
    Ok(())
}

fn check_map(state: &ProbabilityState, map: &IndexMap) -> Result<()> {
    check_len(map.total(), state.len())
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

/// `⟨F⟩ = Σ_s p_s F(s)`.
pub fn mean(state: &ProbabilityState, obs: &ClassicalObservable) -> Result<f64> {
    check_len(state.len(), obs.len())?;
    Ok(state
        .probs
        .iter()
        .zip(&obs.values)
        .map(|(p, f)| p * f)
        .sum())
}

/// `⟨F^k⟩ = Σ_s p_s F(s)^k`. `k = 0` gives 1 (the empty product).
pub fn moment(state: &ProbabilityState, obs: &ClassicalObservable, k: u32) -> Result<f64> {
    check_len(state.len(), obs.len())?;
    if k == 0 {
        return Ok(1.0);
    }
    let k = i32::try_from(k).map_err(|_| Error::Argument(format!("moment order {k} too large")))?;
    Ok(state
        .probs
        .iter()
        .zip(&obs.values)
        .map(|(p, f)| p * f.powi(k))
        .sum())
}

/// `⟨F²⟩ − ⟨F⟩²`.
pub fn variance(state: &ProbabilityState, obs: &ClassicalObservable) -> Result<f64> {
    let m1 = mean(state, obs)?;
    Ok(moment(state, obs, 2)? - m1 * m1)
}

/// `−Σ p ln p` with `0·ln 0 = 0`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    0.0 - probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Shannon entropy in nats; lies in `[0, ln N]`.
pub fn shannon_entropy(state: &ProbabilityState) -> f64 {
    entropy_of(&state.probs)
}

/// `p_{j,k,…} = p_{s(j,k,…)}`, addressed by multi-index without copying.
#[derive(Debug, Clone, Copy)]
pub struct JointView<'a> {
    probs: &'a [f64],
    map: &'a IndexMap,
}

impl<'a> JointView<'a> {
    pub fn map(&self) -> &'a IndexMap {
        self.map
    }

    /// Probability of the 1-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.probs[self.map.encode(idx)? - 1])
    }

    /// `(multi-index, probability)` pairs in lexicographic multi-index order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + 'a {
        let map = self.map;
        let probs = self.probs;
        let dims = map.factors().to_vec();
        MultiIndexIter::new(dims).map(move |idx0| {
            let p = probs[map.index0(&idx0)];
            (idx0.into_iter().map(|j| j + 1).collect(), p)
        })
    }

    /// `Σ_{j,k,…} Φ(j,k,…) p_{jk…}` with `Φ` given on 1-based multi-indices.
    pub fn expectation(&self, mut phi: impl FnMut(&[usize]) -> f64) -> f64 {
        self.iter().map(|(idx, p)| phi(&idx) * p).sum()
    }
}

pub fn joint_view<'a>(state: &'a ProbabilityState, map: &'a IndexMap) -> Result<JointView<'a>> {
    check_map(state, map)?;
    Ok(JointView {
        probs: &state.probs,
        map,
    })
}

/// Lexicographic enumeration of a 0-based multi-index box.
pub(crate) struct MultiIndexIter {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndexIter {
    pub(crate) fn new(dims: Vec<usize>) -> Self {
        let next = if dims.iter().all(|&d| d > 0) {
            Some(vec![0; dims.len()])
        } else {
            None
        };
        MultiIndexIter { dims, next }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.dims[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// Single-subsystem marginals `Π_j`, `𝒫_k`, … in subsystem order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarginalSet {
    pub marginals: Vec<ProbabilityState>,
}

impl MarginalSet {
    pub fn get(&self, p: usize) -> Option<&ProbabilityState> {
        p.checked_sub(1).and_then(|i| self.marginals.get(i))
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.marginals.iter().map(shannon_entropy).collect()
    }
}

/// Marginal on the subsystems `keep` (1-based, any order, no repeats),
/// indexed row-major over the kept subsystems in increasing order.
pub fn marginal(
    state: &ProbabilityState,
    map: &IndexMap,
    keep: &[usize],
) -> Result<ProbabilityState> {
    check_map(state, map)?;
    let keep = normalize_keep(map, keep)?;
    let dims: Vec<usize> = keep.iter().map(|&p| map.factors()[p]).collect();
    let size: usize = dims.iter().product();
    let mut out = vec![0.0; size];
    let mut sub = vec![0usize; keep.len()];
    for (s0, &p) in state.probs.iter().enumerate() {
        let c = map.coords0(s0);
        for (slot, &q) in sub.iter_mut().zip(&keep) {
            *slot = c[q];
        }
        out[crate::indexmap::row_major_linear(&dims, &sub)] += p;
    }
    ProbabilityState::new(out)
}

/// Sorted 0-based subsystem list from a 1-based selection.
pub(crate) fn normalize_keep(map: &IndexMap, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::Argument("subsystem selection is empty".into()));
    }
    let mut out = Vec::with_capacity(keep.len());
    for &p in keep {
        check_subsystem(map, p)?;
        out.push(p - 1);
    }
    out.sort_unstable();
    let len = out.len();
    out.dedup();
    if out.len() != len {
        return Err(Error::Argument(
            "subsystem selection repeats an entry".into(),
        ));
    }
    Ok(out)
}

pub fn marginals(state: &ProbabilityState, map: &IndexMap) -> Result<MarginalSet> {
    check_map(state, map)?;
    let marginals = (1..=map.parts())
        .map(|p| marginal(state, map, &[p]))
        .collect::<Result<_>>()?;
    Ok(MarginalSet { marginals })
}

/// `max_{j,k,…} |p_{jk…} − Π_j 𝒫_k ⋯|`; zero iff the state is the product of
/// its marginals.
pub fn product_defect(state: &ProbabilityState, map: &IndexMap) -> Result<f64> {
    let m = marginals(state, map)?;
    Ok((0..state.len())
        .map(|s0| {
            let prod: f64 = map
                .coords0(s0)
                .iter()
                .zip(&m.marginals)
                .map(|(&j, marg)| marg.probs[j])
                .product();
            (state.probs[s0] - prod).abs()
        })
        .fold(0.0, f64::max))
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

/// `H(Π) + H(𝒫) − H(p)` for a bipartite map.
pub fn mutual_information(state: &ProbabilityState, map: &IndexMap) -> Result<f64> {
    Ok(check_subadditivity(state, map)?.slack)
}

/// Outcome of an entropic inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `rhs − lhs`.
    pub slack: f64,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        InequalityReport {
            lhs,
            rhs,
            holds: lhs <= rhs + INEQUALITY_TOL,
            slack: rhs - lhs,
        }
    }
}

/// `H(p) ≤ H(Π) + H(𝒫)` under a bipartite map. The slack is the mutual
/// information between the two artificial variables.
pub fn check_subadditivity(state: &ProbabilityState, map: &IndexMap) -> Result<InequalityReport> {
    check_map(state, map)?;
    require_parts(map, 2, "bipartite")?;
    let h = marginals(state, map)?.entropies();
    Ok(InequalityReport::new(shannon_entropy(state), h[0] + h[1]))
}

/// `H(p₁₂₃) + H(p₂) ≤ H(p₁₂) + H(p₂₃)` under a tripartite map.
pub fn check_strong_subadditivity(
    state: &ProbabilityState,
    map: &IndexMap,
) -> Result<InequalityReport> {
    check_map(state, map)?;
    require_parts(map, 3, "tripartite")?;
    let h = |keep: &[usize]| marginal(state, map, keep).map(|m| shannon_entropy(&m));
    let lhs = shannon_entropy(state) + h(&[2])?;
    let rhs = h(&[1, 2])? + h(&[2, 3])?;
    Ok(InequalityReport::new(lhs, rhs))
}

fn check_factors(map: &IndexMap, factors: &[ClassicalObservable]) -> Result<()> {
    check_len(map.parts(), factors.len())?;
    for (f, &d) in factors.iter().zip(map.factors()) {
        check_len(d, f.len())?;
    }
    Ok(())
}

/// `Σ_{j,k,…} φ(j) χ(k) ⋯ p_{s(j,k,…)}`: the correlation function of one
/// factor observable per artificial subsystem.
pub fn mean_as_correlation(
    state: &ProbabilityState,
    map: &IndexMap,
    factors: &[ClassicalObservable],
) -> Result<f64> {
    let joint = joint_view(state, map)?;
    check_factors(map, factors)?;
    Ok(joint.expectation(|idx| {
        idx.iter()
            .zip(factors)
            .map(|(&j, f)| f.values[j - 1])
            .product::<f64>()
    }))
}

/// `F̃(s) = factor(j_p(s))`: a subsystem observable seen as a function of `s`.
pub fn lift_factor(
    map: &IndexMap,
    p: usize,
    factor: &ClassicalObservable,
) -> Result<ClassicalObservable> {
    check_subsystem(map, p)?;
    check_len(map.factors()[p - 1], factor.len())?;
    let values = (0..map.total())
        .map(|s0| factor.values[map.coords0(s0)[p - 1]])
        .collect();
    Ok(ClassicalObservable { values })
}

/// The pointwise product of all lifts, `F(s) = Π_p factor_p(j_p(s))`.
pub fn compose_factors(
    map: &IndexMap,
    factors: &[ClassicalObservable],
) -> Result<ClassicalObservable> {
    check_factors(map, factors)?;
    let mut out = ClassicalObservable::constant(map.total(), 1.0);
    for (p, f) in factors.iter().enumerate() {
        out = out.pointwise_product(&lift_factor(map, p + 1, f)?)?;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct StateWire {
    probs: Vec<f64>,
}

impl TryFrom<StateWire> for ProbabilityState {
    type Error = Error;

    fn try_from(w: StateWire) -> Result<Self> {
        ProbabilityState::new(w.probs)
    }
}

impl From<ProbabilityState> for StateWire {
    fn from(s: ProbabilityState) -> Self {
        StateWire { probs: s.probs }
    }
}

#[derive(Serialize, Deserialize)]
struct ObservableWire {
    values: Vec<f64>,
}

impl TryFrom<ObservableWire> for ClassicalObservable {
    type Error = Error;

    fn try_from(w: ObservableWire) -> Result<Self> {
        ClassicalObservable::new(w.values)
    }
}

impl From<ClassicalObservable> for ObservableWire {
    fn from(o: ClassicalObservable) -> Self {
        ObservableWire { values: o.values }
    }
}
