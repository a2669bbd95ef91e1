//! Product-form detection for observables under an index map.
//!
//! A classical observable has product form under a bipartite map when its
//! value table `Φ(j,k) = F(s(j,k))` has rank one. A quantum observable is a
//! Kronecker product `F₁ ⊗ F₂` exactly when its rearrangement
//! `R[(j,j'),(k,k')] = F_{jk,j'k'}` has rank one. Both are tested with the
//! same alternating rank-one iteration.
//!
//! Residuals are relative: the largest reconstruction error divided by the
//! largest absolute entry of the input.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{compose_factors, ClassicalObservable};
use crate::error::{Error, Result};
use crate::indexmap::IndexMap;
use crate::linalg::CMatrix;
use crate::quantum::QuantumObservable;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 500;
pub const CONVERGENCE_TOL: f64 = 1e-14;

/// Normalization applied to the factors: every factor but the last has unit
/// Euclidean (Frobenius) norm with its first nonzero entry positive, and the
/// last factor carries the overall scale and sign.
pub const GAUGE: &str = "unit-norm-first-positive";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResult<T> {
    pub success: bool,
    /// Relative max-abs reconstruction error (see module docs).
    pub residual: f64,
    pub factors: Vec<T>,
    pub gauge: String,
    /// Set for the zero observable, whose factors are all zero.
    #[serde(default)]
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl<T> FactorizationResult<T> {
    fn new(success: bool, residual: f64, factors: Vec<T>) -> Self {
        FactorizationResult {
            success,
            residual,
            factors,
            gauge: GAUGE.to_string(),
            degenerate: false,
            reason: (!success).then(|| "residual above tolerance".to_string()),
        }
    }
}

pub type ClassicalFactorization = FactorizationResult<Vec<f64>>;
pub type QuantumFactorization = FactorizationResult<QuantumObservable>;

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Argument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Best rank-one fit `R ≈ u vᵀ` of a `rows × cols` row-major matrix.
struct RankOne {
    left: Vec<Complex64>,
    right: Vec<Complex64>,
}

fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

fn rank_one(rows: usize, cols: usize, r: &[Complex64]) -> RankOne {
    debug_assert_eq!(r.len(), rows * cols);
    let (pivot, _) = r.iter().enumerate().fold((0, -1.0), |best, (i, z)| {
        if z.norm() > best.1 {
            (i, z.norm())
        } else {
            best
        }
    });
    let pivot_col = pivot % cols;

    let right_given = |u: &[Complex64]| -> Vec<Complex64> {
        let nu = norm_sqr(u);
        (0..cols)
            .map(|k| {
                (0..rows)
                    .map(|i| u[i].conj() * r[i * cols + k])
                    .sum::<Complex64>()
                    / nu
            })
            .collect()
    };
    let left_given = |v: &[Complex64]| -> Vec<Complex64> {
        let nv = norm_sqr(v);
        (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|k| r[i * cols + k] * v[k].conj())
                    .sum::<Complex64>()
                    / nv
            })
            .collect()
    };
    let direction = |u: &[Complex64]| -> Vec<Complex64> {
        let n = norm_sqr(u).sqrt();
        u.iter().map(|z| z / n).collect()
    };

    let mut u: Vec<Complex64> = (0..rows).map(|i| r[i * cols + pivot_col]).collect();
    for _ in 0..MAX_ITERATIONS {
        let v = right_given(&u);
        let next = left_given(&v);
        let change = direction(&u)
            .iter()
            .zip(direction(&next))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        u = next;
        if change <= CONVERGENCE_TOL {
            break;
        }
    }
    let v = right_given(&u);
    RankOne { left: u, right: v }
}

fn max_abs(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Relative residual of `R − u vᵀ`.
fn rank_one_residual(rows: usize, cols: usize, r: &[Complex64], fit: &RankOne, scale: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..rows {
        for k in 0..cols {
            worst = worst.max((r[i * cols + k] - fit.left[i] * fit.right[k]).norm());
        }
    }
    worst / scale
}

/// Index of the first entry that is nonzero relative to the largest one.
fn first_significant(x: &[Complex64]) -> Option<usize> {
    let cutoff = 1e-12 * max_abs(x);
    x.iter().position(|z| z.norm() > cutoff)
}

/// Rescales `u` to unit norm with a positive leading component and moves the
/// inverse scale onto `v`. Only real rescalings are applied, so Hermitian
/// factors stay Hermitian.
fn fix_gauge(u: &mut [Complex64], v: &mut [Complex64]) {
    let norm = norm_sqr(u).sqrt();
    let lead = first_significant(u)
        .map(|i| u[i])
        .unwrap_or(Complex64::new(1.0, 0.0));
    let positive = if lead.re.abs() > 1e-12 * lead.norm() {
        lead.re > 0.0
    } else {
        lead.im > 0.0
    };
    let sign = if positive { 1.0 } else { -1.0 };
    for z in u.iter_mut() {
        *z *= sign / norm;
    }
    for z in v.iter_mut() {
        *z *= sign * norm;
    }
}

fn require_parts(map: &IndexMap, at_least: usize, exactly: bool) -> Result<()> {
    let parts = map.parts();
    let ok = if exactly {
        parts == at_least
    } else {
        parts >= at_least
    };
    if !ok {
        return Err(Error::UnsupportedPartition {
            required: if exactly { "bipartite" } else { "multipartite" },
            parts,
        });
    }
    Ok(())
}

/// Rank-one test of `Φ(j,k) = F(s(j,k))` for a bipartite map, returning
/// `[φ, χ]` with `Φ(j,k) = φ(j) χ(k)` on success.
pub fn factor_classical(
    obs: &ClassicalObservable,
    map: &IndexMap,
    tol: f64,
) -> Result<ClassicalFactorization> {
    require_parts(map, 2, true)?;
    peel(obs, map, tol)
}

/// `T(j,k,ℓ,…) = a(j) b(k) c(ℓ) ⋯`, found by splitting off one subsystem at
/// a time (first versus the rest) with the bipartite rank-one test.
pub fn factor_classical_multi(
    obs: &ClassicalObservable,
    map: &IndexMap,
    tol: f64,
) -> Result<ClassicalFactorization> {
    require_parts(map, 2, false)?;
    peel(obs, map, tol)
}

fn peel(obs: &ClassicalObservable, map: &IndexMap, tol: f64) -> Result<ClassicalFactorization> {
    check_tol(tol)?;
    if obs.len() != map.total() {
        return Err(Error::dimension(map.total(), obs.len()));
    }
    let dims = map.factors();
    let scale = obs.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        let mut result =
            FactorizationResult::new(true, 0.0, dims.iter().map(|&d| vec![0.0; d]).collect());
        result.degenerate = true;
        return Ok(result);
    }

    // the value table in row-major multi-index order
    let mut rest: Vec<Complex64> = (0..map.total())
        .map(|linear| {
            let mut rem = linear;
            let mut idx = vec![0usize; dims.len()];
            for i in (0..dims.len()).rev() {
                idx[i] = rem % dims[i];
                rem /= dims[i];
            }
            Complex64::new(obs.values()[map.index0(&idx)], 0.0)
        })
        .collect();

    let mut factors = Vec::with_capacity(dims.len());
    let mut worst_stage = 0.0f64;
    for &rows in &dims[..dims.len() - 1] {
        let cols = rest.len() / rows;
        let mut fit = rank_one(rows, cols, &rest);
        worst_stage = worst_stage.max(rank_one_residual(rows, cols, &rest, &fit, scale));
        fix_gauge(&mut fit.left, &mut fit.right);
        factors.push(fit.left.iter().map(|z| z.re).collect::<Vec<f64>>());
        rest = fit.right;
    }
    factors.push(rest.iter().map(|z| z.re).collect());

    let factor_obs = factors
        .iter()
        .map(|f| ClassicalObservable::new(f.clone()))
        .collect::<Result<Vec<_>>>()?;
    let rebuilt = compose_factors(map, &factor_obs)?;
    let recon = obs
        .values()
        .iter()
        .zip(rebuilt.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;

    let residual = worst_stage.max(recon);
    Ok(FactorizationResult::new(residual <= tol, residual, factors))
}

/// Tests `F = F₁ ⊗ F₂` for a row-major bipartite map and, on success, returns
/// Hermitian factors.
///
/// The rank-one fit determines the factors only up to `(cA) ⊗ (B/c)` with
/// complex `c`. The phase of `c` is fixed from `Tr(A²)`, which is real and
/// positive exactly when `A` is Hermitian.
pub fn factor_quantum(
    obs: &QuantumObservable,
    map: &IndexMap,
    tol: f64,
) -> Result<QuantumFactorization> {
    if !map.is_row_major() {
        return Err(Error::ConventionMismatch);
    }
    require_parts(map, 2, true)?;
    check_tol(tol)?;
    if obs.dim() != map.total() {
        return Err(Error::dimension(map.total(), obs.dim()));
    }
    let (n, m) = (map.factors()[0], map.factors()[1]);
    let f = obs.matrix();
    let scale = f.max_abs();
    if scale == 0.0 {
        let zero = |d| QuantumObservable::new(CMatrix::zeros(d)).expect("zero is Hermitian");
        let mut result = FactorizationResult::new(true, 0.0, vec![zero(n), zero(m)]);
        result.degenerate = true;
        return Ok(result);
    }

    let (rows, cols) = (n * n, m * m);
    let mut unfolding = vec![ZERO; rows * cols];
    for j in 0..n {
        for jp in 0..n {
            for k in 0..m {
                for kp in 0..m {
                    unfolding[(j * n + jp) * cols + k * m + kp] = f[(j * m + k, jp * m + kp)];
                }
            }
        }
    }
    let fit = rank_one(rows, cols, &unfolding);
    let stage = rank_one_residual(rows, cols, &unfolding, &fit, scale);

    let mut a = CMatrix::from_vec(n, fit.left).expect("n² entries");
    let mut b = CMatrix::from_vec(m, fit.right).expect("m² entries");
    let tr_a2 = a.matmul(&a).trace();
    let phase = Complex64::from_polar(1.0, tr_a2.arg() / 2.0);
    a = a.scale(phase.conj());
    b = b.scale(phase);

    let defect = (a.hermiticity_defect() / a.max_abs()).max(b.hermiticity_defect() / b.max_abs());
    if defect > tol {
        return Ok(FactorizationResult {
            success: false,
            residual: stage.max(defect),
            factors: vec![],
            gauge: GAUGE.to_string(),
            degenerate: false,
            reason: Some("non-Hermitian factor gauge".into()),
        });
    }
    let hermitian_part = |x: &CMatrix| x.add(&x.dagger()).scale(Complex64::new(0.5, 0.0));
    let a = hermitian_part(&a);
    let b = hermitian_part(&b);

    let mut u = a.as_slice().to_vec();
    let mut v = b.as_slice().to_vec();
    fix_gauge(&mut u, &mut v);
    let a = CMatrix::from_vec(n, u).expect("n² entries");
    let b = CMatrix::from_vec(m, v).expect("m² entries");

    let recon = a.kron(&b).max_abs_diff(f) / scale;
    let residual = stage.max(recon);
    let factors = vec![QuantumObservable::new(a)?, QuantumObservable::new(b)?];
    Ok(FactorizationResult::new(residual <= tol, residual, factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{mean, mean_as_correlation, ProbabilityState};

    fn obs(v: &[f64]) -> ClassicalObservable {
        ClassicalObservable::new(v.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn parallel(a: &[f64], b: &[f64]) -> bool {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        (dot.abs() - na * nb).abs() < 1e-12 * na * nb
    }

    #[test]
    fn roulette_observable_factors() {
        let map = IndexMap::row_major(&[2, 2]).unwrap();
        let r = factor_classical(&obs(&[1.0, -1.0, -1.0, 1.0]), &map, DEFAULT_TOL).unwrap();
        assert!(r.success && r.residual <= 1e-12);
        assert!(parallel(&r.factors[0], &[1.0, -1.0]));
        assert!(parallel(&r.factors[1], &[1.0, -1.0]));
        // gauge: unit norm, first entry positive
        let n0: f64 = r.factors[0].iter().map(|x| x * x).sum();
        assert!((n0 - 1.0).abs() < 1e-15 && r.factors[0][0] > 0.0);
        assert_eq!(r.gauge, GAUGE);
    }

    #[test]
    fn rank_two_table_is_rejected() {
        // det [[1,1],[1,0]] = −1
        let map = IndexMap::row_major(&[2, 2]).unwrap();
        let r = factor_classical(&obs(&[1.0, 1.0, 1.0, 0.0]), &map, DEFAULT_TOL).unwrap();
        assert!(!r.success);
        assert!(r.residual >= DEFAULT_TOL);
        assert!(r.reason.is_some());
    }

    #[test]
    fn constant_and_zero() {
        let map = IndexMap::col_major(&[3, 2]).unwrap();
        let r =
            factor_classical(&ClassicalObservable::constant(6, -2.0), &map, DEFAULT_TOL).unwrap();
        assert!(r.success);
        assert!(parallel(&r.factors[1], &[1.0, 1.0]));

        let z =
            factor_classical(&ClassicalObservable::constant(6, 0.0), &map, DEFAULT_TOL).unwrap();
        assert!(z.success && z.degenerate && z.residual == 0.0);
        assert_eq!(z.factors, vec![vec![0.0; 3], vec![0.0; 2]]);
    }

    #[test]
    fn errors() {
        let tri = IndexMap::row_major(&[2, 2, 2]).unwrap();
        let f = ClassicalObservable::constant(8, 1.0);
        assert!(matches!(
            factor_classical(&f, &tri, DEFAULT_TOL),
            Err(Error::UnsupportedPartition { .. })
        ));
        let map = IndexMap::row_major(&[2, 2]).unwrap();
        assert!(factor_classical(&f, &map, DEFAULT_TOL).is_err());
        assert!(factor_classical(&ClassicalObservable::constant(4, 1.0), &map, 0.0).is_err());
        let single = IndexMap::row_major(&[4]).unwrap();
        assert!(
            factor_classical_multi(&ClassicalObservable::constant(4, 1.0), &single, 1e-10).is_err()
        );

        let col = IndexMap::col_major(&[2, 2]).unwrap();
        assert!(matches!(
            factor_quantum(&QuantumObservable::identity(4), &col, DEFAULT_TOL),
            Err(Error::ConventionMismatch)
        ));
    }

    #[test]
    fn tripartite_sign_product() {
        let map = IndexMap::row_major(&[2, 2, 2]).unwrap();
        let pm = obs(&[1.0, -1.0]);
        let f = compose_factors(&map, &[pm.clone(), pm.clone(), pm]).unwrap();
        let r = factor_classical_multi(&f, &map, DEFAULT_TOL).unwrap();
        assert!(r.success, "{r:?}");
        for factor in &r.factors {
            assert!(parallel(factor, &[1.0, -1.0]));
        }

        let ones =
            factor_classical_multi(&ClassicalObservable::constant(8, 1.0), &map, 1e-10).unwrap();
        assert!(ones.success);
        for factor in &ones.factors {
            assert!(parallel(factor, &[1.0, 1.0]));
        }

        let mut flipped = f.values().to_vec();
        flipped[0] = -flipped[0];
        let r = factor_classical_multi(&obs(&flipped), &map, DEFAULT_TOL).unwrap();
        assert!(!r.success);
    }

    #[test]
    fn closure_with_mean() {
        let map = IndexMap::col_major(&[2, 3]).unwrap();
        let f = compose_factors(&map, &[obs(&[0.5, -2.0]), obs(&[1.0, 3.0, -0.25])]).unwrap();
        let r = factor_classical(&f, &map, DEFAULT_TOL).unwrap();
        assert!(r.success);
        let factors: Vec<_> = r.factors.iter().map(|v| obs(v)).collect();
        let p = ProbabilityState::new(vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.25]).unwrap();
        let lhs = mean(&p, &f).unwrap();
        let rhs = mean_as_correlation(&p, &map, &factors).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn quantum_examples() {
        let map = IndexMap::row_major(&[2, 2]).unwrap();
        let zz = QuantumObservable::from_diagonal(&[1.0, -1.0, -1.0, 1.0]);
        let r = factor_quantum(&zz, &map, DEFAULT_TOL).unwrap();
        assert!(r.success);
        let z = CMatrix::from_diagonal(&[1.0, -1.0]);
        let rebuilt = r.factors[0].matrix().kron(r.factors[1].matrix());
        assert!(rebuilt.max_abs_diff(zz.matrix()) < 1e-14);
        // each factor ∝ σz
        for fct in &r.factors {
            let ratio = fct.matrix()[(0, 0)];
            assert!(fct.matrix().max_abs_diff(&z.scale(ratio)) < 1e-14);
        }

        let map23 = IndexMap::row_major(&[2, 3]).unwrap();
        let id = factor_quantum(&QuantumObservable::identity(6), &map23, DEFAULT_TOL).unwrap();
        assert!(id.success);
        let ratio = id.factors[0].matrix()[(0, 0)];
        assert!(
            id.factors[0]
                .matrix()
                .max_abs_diff(&CMatrix::identity(2).scale(ratio))
                < 1e-14
        );

        // σy ⊗ σy: factors are Hermitian only after removing a phase of i
        let y = CMatrix::from_rows(vec![
            vec![c(0., 0.), c(0., -1.)],
            vec![c(0., 1.), c(0., 0.)],
        ])
        .unwrap();
        let yy = QuantumObservable::new(y.kron(&y)).unwrap();
        let r = factor_quantum(&yy, &map, DEFAULT_TOL).unwrap();
        assert!(r.success, "{r:?}");
        assert!(r
            .factors
            .iter()
            .all(|f| f.matrix().hermiticity_defect() == 0.0));

        // Bell projector is not a product
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CMatrix::outer(&[c(h, 0.), c(0., 0.), c(0., 0.), c(h, 0.)]);
        let r = factor_quantum(&QuantumObservable::new(bell).unwrap(), &map, DEFAULT_TOL).unwrap();
        assert!(!r.success);

        let zero = factor_quantum(
            &QuantumObservable::new(CMatrix::zeros(4)).unwrap(),
            &map,
            1e-10,
        )
        .unwrap();
        assert!(zero.success && zero.degenerate);
    }
}
