//! Dimension factorizations `N = n₁⋯n_ℓ` and invertible maps between a
//! linear index `s ∈ 1..=N` and a multi-index `(j₁,…,j_ℓ)` with
//! `jᵢ ∈ 1..=nᵢ`.
//!
//! All public indices are 1-based. Two arithmetic conventions are built in:
//!
//! * [`Convention::RowMajor`] varies the last component fastest:
//!   `1↔(1,1), 2↔(1,2), 3↔(2,1), 4↔(2,2)` for `2×2`. This is the order in
//!   which `A ⊗ B` lays out its basis, and the default.
//! * [`Convention::ColMajor`] varies the first component fastest:
//!   `1↔(1,1), 2↔(2,1), …, n↔(n,1), n+1↔(1,2), …`.
//!
//! Any other bijection can be given as an explicit table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered factorization of `total` into factors that are each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimensionFactorization {
    factors: Vec<usize>,
    total: usize,
}

impl DimensionFactorization {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        let invalid = |factors: &Vec<usize>, reason| Error::InvalidFactorization {
            factors: factors.clone(),
            total: factors.iter().product(),
            reason,
        };
        if factors.is_empty() {
            return Err(invalid(&factors, "at least one factor is required"));
        }
        if factors.iter().any(|&n| n < 2) {
            return Err(invalid(&factors, "every factor must be at least 2"));
        }
        let total = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| invalid(&factors, "product overflows"))?;
        Ok(DimensionFactorization { factors, total })
    }

    /// Like [`new`](Self::new) but also checks the product against `total`.
    pub fn with_total(factors: Vec<usize>, total: usize) -> Result<Self> {
        let f = Self::new(factors)?;
        if f.total != total {
            return Err(Error::InvalidFactorization {
                factors: f.factors,
                total,
                reason: "product of factors does not equal the total",
            });
        }
        Ok(f)
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of subsystems `ℓ`.
    pub fn parts(&self) -> usize {
        self.factors.len()
    }
}

/// How linear indices are assigned to multi-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Convention {
    RowMajor,
    ColMajor,
    /// `table[s-1]` is the 1-based multi-index assigned to `s`.
    Explicit(Vec<Vec<usize>>),
}

/// A bijection `s ↔ (j₁,…,j_ℓ)` for a fixed [`DimensionFactorization`].
///
/// The full decode table is built on construction, so lookups in either
/// direction are O(ℓ).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MapSpec", into = "MapSpec")]
pub struct IndexMap {
    factorization: DimensionFactorization,
    convention: Convention,
    // 0-based coordinates of s0, flattened: coords[s0 * parts + i]
    coords: Vec<usize>,
    // row-major linearization of a 0-based multi-index -> s0
    lookup: Vec<usize>,
}

impl IndexMap {
    pub fn new(factorization: DimensionFactorization, convention: Convention) -> Result<Self> {
        let n = factorization.total();
        let parts = factorization.parts();
        let dims = factorization.factors().to_vec();
        let mut coords = Vec::with_capacity(n * parts);
        match &convention {
            Convention::RowMajor => {
                for s0 in 0..n {
                    let start = coords.len();
                    coords.resize(start + parts, 0);
                    let mut rest = s0;
                    for i in (0..parts).rev() {
                        coords[start + i] = rest % dims[i];
                        rest /= dims[i];
                    }
                }
            }
            Convention::ColMajor => {
                for s0 in 0..n {
                    let mut rest = s0;
                    for &d in &dims {
                        coords.push(rest % d);
                        rest /= d;
                    }
                }
            }
            Convention::Explicit(table) => {
                if table.len() != n {
                    return Err(Error::InvalidTable(format!(
                        "expected {n} rows, found {}",
                        table.len()
                    )));
                }
                for (s0, row) in table.iter().enumerate() {
                    if row.len() != parts {
                        return Err(Error::InvalidTable(format!(
                            "row {} has {} components, expected {parts}",
                            s0 + 1,
                            row.len()
                        )));
                    }
                    for (&j, &d) in row.iter().zip(&dims) {
                        if j == 0 || j > d {
                            return Err(Error::InvalidTable(format!(
                                "row {} component {j} out of range 1..={d}",
                                s0 + 1
                            )));
                        }
                        coords.push(j - 1);
                    }
                }
            }
        }

        const UNSET: usize = usize::MAX;
        let mut lookup = vec![UNSET; n];
        for s0 in 0..n {
            let idx = row_major_linear(&dims, &coords[s0 * parts..(s0 + 1) * parts]);
            if lookup[idx] != UNSET {
                return Err(Error::InvalidTable(format!(
                    "multi-index of row {} repeats row {}",
                    s0 + 1,
                    lookup[idx] + 1
                )));
            }
            lookup[idx] = s0;
        }

        Ok(IndexMap {
            factorization,
            convention,
            coords,
            lookup,
        })
    }

    pub fn row_major(factors: &[usize]) -> Result<Self> {
        Self::new(
            DimensionFactorization::new(factors.to_vec())?,
            Convention::RowMajor,
        )
    }

    pub fn col_major(factors: &[usize]) -> Result<Self> {
        Self::new(
            DimensionFactorization::new(factors.to_vec())?,
            Convention::ColMajor,
        )
    }

    pub fn explicit(factors: &[usize], table: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(
            DimensionFactorization::new(factors.to_vec())?,
            Convention::Explicit(table),
        )
    }

    pub fn factorization(&self) -> &DimensionFactorization {
        &self.factorization
    }

    pub fn factors(&self) -> &[usize] {
        self.factorization.factors()
    }

    pub fn total(&self) -> usize {
        self.factorization.total()
    }

    pub fn parts(&self) -> usize {
        self.factorization.parts()
    }

    pub fn convention(&self) -> &Convention {
        &self.convention
    }

    pub fn is_row_major(&self) -> bool {
        self.convention == Convention::RowMajor
    }

    /// Multi-index (1-based) assigned to the linear index `s` (1-based).
    pub fn decode(&self, s: usize) -> Result<Vec<usize>> {
        self.check_linear(s)?;
        Ok(self.coords0(s - 1).iter().map(|&j| j + 1).collect())
    }

    /// Linear index (1-based) of the multi-index `idx` (1-based).
    pub fn encode(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.parts() {
            return Err(Error::dimension(self.parts(), idx.len()));
        }
        let mut zero_based = Vec::with_capacity(idx.len());
        for (&j, &d) in idx.iter().zip(self.factors()) {
            if j == 0 || j > d {
                return Err(Error::Range {
                    what: "multi-index component",
                    value: j,
                    max: d,
                });
            }
            zero_based.push(j - 1);
        }
        Ok(self.index0(&zero_based) + 1)
    }

    /// The full table of multi-indices in `s` order, 1-based.
    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.total())
            .map(|s0| self.coords0(s0).iter().map(|&j| j + 1).collect())
            .collect()
    }

    pub(crate) fn check_linear(&self, s: usize) -> Result<()> {
        if s == 0 || s > self.total() {
            return Err(Error::Range {
                what: "linear index",
                value: s,
                max: self.total(),
            });
        }
        Ok(())
    }

    /// 0-based coordinates of the 0-based linear index `s0`.
    pub(crate) fn coords0(&self, s0: usize) -> &[usize] {
        let p = self.parts();
        &self.coords[s0 * p..(s0 + 1) * p]
    }

    /// 0-based linear index of an in-range 0-based multi-index.
    pub(crate) fn index0(&self, idx: &[usize]) -> usize {
        self.lookup[row_major_linear(self.factors(), idx)]
    }
}

pub(crate) fn row_major_linear(dims: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&j, &d)| acc * d + j)
}

/// All ordered factorizations of `n` into exactly `parts` factors, each at
/// least 2, in lexicographic order. Empty when none exist (e.g. prime `n`
/// with `parts ≥ 2`).
pub fn enumerate_factorizations(n: usize, parts: usize) -> Vec<DimensionFactorization> {
    fn extend(
        rest: usize,
        parts: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<DimensionFactorization>,
    ) {
        if parts == 1 {
            if rest >= 2 {
                prefix.push(rest);
                out.push(
                    DimensionFactorization::new(prefix.clone())
                        .expect("factors are at least 2 by construction"),
                );
                prefix.pop();
            }
            return;
        }
        for d in 2..=rest {
            if rest.is_multiple_of(d) {
                prefix.push(d);
                extend(rest / d, parts - 1, prefix, out);
                prefix.pop();
            }
        }
    }

    let mut out = Vec::new();
    if parts > 0 {
        extend(n, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ConventionSpec {
    Named(NamedConvention),
    Table { table: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum NamedConvention {
    RowMajor,
    ColMajor,
}

/// Wire form: `{"factors":[..],"convention":"row-major"|"col-major"|{"table":[[..],..]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MapSpec {
    factors: Vec<usize>,
    convention: ConventionSpec,
}

impl TryFrom<MapSpec> for IndexMap {
    type Error = Error;

    fn try_from(spec: MapSpec) -> Result<Self> {
        let convention = match spec.convention {
            ConventionSpec::Named(NamedConvention::RowMajor) => Convention::RowMajor,
            ConventionSpec::Named(NamedConvention::ColMajor) => Convention::ColMajor,
            ConventionSpec::Table { table } => Convention::Explicit(table),
        };
        IndexMap::new(DimensionFactorization::new(spec.factors)?, convention)
    }
}

impl From<IndexMap> for MapSpec {
    fn from(map: IndexMap) -> Self {
        let convention = match map.convention {
            Convention::RowMajor => ConventionSpec::Named(NamedConvention::RowMajor),
            Convention::ColMajor => ConventionSpec::Named(NamedConvention::ColMajor),
            Convention::Explicit(table) => ConventionSpec::Table { table },
        };
        MapSpec {
            factors: map.factorization.factors,
            convention,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn col_major_matches_listing() {
        // 1↔1,1; 2↔2,1; …; n↔n,1; n+1↔1,2; …
        let map = IndexMap::col_major(&[3, 2]).unwrap();
        assert_eq!(map.decode(4).unwrap(), vec![1, 2]);
        assert_eq!(map.encode(&[2, 1]).unwrap(), 2);
        assert_eq!(
            map.table(),
            vec![
                vec![1, 1],
                vec![2, 1],
                vec![3, 1],
                vec![1, 2],
                vec![2, 2],
                vec![3, 2]
            ]
        );
    }

    #[test]
    fn row_major_matches_roulette_labels() {
        let map = IndexMap::row_major(&[2, 2]).unwrap();
        assert_eq!(map.decode(2).unwrap(), vec![1, 2]);
        assert_eq!(map.encode(&[2, 1]).unwrap(), 3);
        let map = IndexMap::row_major(&[2, 2, 2]).unwrap();
        assert_eq!(map.encode(&[2, 2, 2]).unwrap(), 8);
        assert_eq!(map.decode(2).unwrap(), vec![1, 1, 2]);
        assert_eq!(map.decode(5).unwrap(), vec![2, 1, 1]);
    }

    #[test]
    fn first_index_is_all_ones() {
        let table = vec![vec![2, 1], vec![1, 1], vec![2, 2], vec![1, 2]];
        for map in [
            IndexMap::row_major(&[2, 3, 2]).unwrap(),
            IndexMap::col_major(&[2, 3, 2]).unwrap(),
        ] {
            assert_eq!(map.decode(1).unwrap(), vec![1, 1, 1]);
        }
        // explicit tables are free to put anything first
        let map = IndexMap::explicit(&[2, 2], table).unwrap();
        assert_eq!(map.decode(1).unwrap(), vec![2, 1]);
        assert_eq!(map.encode(&[1, 1]).unwrap(), 2);
    }

    #[test]
    fn conventions_differ_on_3x2() {
        let row = IndexMap::row_major(&[3, 2]).unwrap();
        let col = IndexMap::col_major(&[3, 2]).unwrap();
        assert_eq!(col.decode(2).unwrap(), vec![2, 1]);
        assert_eq!(row.decode(2).unwrap(), vec![1, 2]);
        // both agree on the first and last element
        assert_eq!(row.decode(1).unwrap(), col.decode(1).unwrap());
        assert_eq!(row.decode(6).unwrap(), col.decode(6).unwrap());
    }

    #[test]
    fn out_of_range() {
        let map = IndexMap::row_major(&[2, 3]).unwrap();
        assert!(matches!(map.decode(0), Err(Error::Range { .. })));
        assert!(matches!(map.decode(7), Err(Error::Range { .. })));
        assert!(matches!(map.encode(&[3, 1]), Err(Error::Range { .. })));
        assert!(matches!(map.encode(&[1, 0]), Err(Error::Range { .. })));
        assert!(matches!(map.encode(&[1]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn bad_factorizations() {
        assert!(DimensionFactorization::new(vec![]).is_err());
        assert!(DimensionFactorization::new(vec![1, 4]).is_err());
        assert!(DimensionFactorization::with_total(vec![2, 3], 8).is_err());
        assert_eq!(
            DimensionFactorization::with_total(vec![2, 4], 8)
                .unwrap()
                .total(),
            8
        );
    }

    #[test]
    fn bad_tables() {
        assert!(IndexMap::explicit(&[2, 2], vec![vec![1, 1]; 4]).is_err());
        assert!(IndexMap::explicit(&[2, 2], vec![vec![1, 1], vec![1, 2], vec![2, 1]]).is_err());
        assert!(IndexMap::explicit(
            &[2, 2],
            vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 3]]
        )
        .is_err());
    }

    fn divisor_oracle(n: usize, parts: usize) -> Vec<Vec<usize>> {
        // brute force over the full box [2, n]^parts
        let mut out = Vec::new();
        let mut idx = vec![2usize; parts];
        loop {
            if idx.iter().product::<usize>() == n {
                out.push(idx.clone());
            }
            let mut i = parts;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] <= n {
                    break;
                }
                idx[i] = 2;
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let f = |n, l| -> Vec<Vec<usize>> {
            enumerate_factorizations(n, l)
                .into_iter()
                .map(|d| d.factors().to_vec())
                .collect()
        };
        assert_eq!(f(4, 2), vec![vec![2, 2]]);
        assert_eq!(
            f(12, 2),
            vec![vec![2, 6], vec![3, 4], vec![4, 3], vec![6, 2]]
        );
        assert_eq!(f(8, 3), vec![vec![2, 2, 2]]);
        assert!(f(13, 2).is_empty());
        assert!(f(12, 4).is_empty());
        for n in 2..=40 {
            for l in 1..=3 {
                assert_eq!(f(n, l), divisor_oracle(n, l), "n={n} l={l}");
            }
        }
    }

    #[test]
    fn json_forms() {
        let map: IndexMap =
            serde_json::from_str(r#"{"factors":[2,3],"convention":"col-major"}"#).unwrap();
        assert_eq!(map.convention(), &Convention::ColMajor);
        let map: IndexMap = serde_json::from_str(
            r#"{"factors":[2,2],"convention":{"table":[[1,1],[1,2],[2,1],[2,2]]}}"#,
        )
        .unwrap();
        assert_eq!(map.decode(3).unwrap(), vec![2, 1]);
        let text = serde_json::to_string(&IndexMap::row_major(&[2, 2, 2]).unwrap()).unwrap();
        assert_eq!(text, r#"{"factors":[2,2,2],"convention":"row-major"}"#);
        assert!(
            serde_json::from_str::<IndexMap>(r#"{"factors":[1,2],"convention":"row-major"}"#)
                .is_err()
        );
    }
}
