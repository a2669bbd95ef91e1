//! Seeded Monte Carlo measurement and random test instances.
//!
//! All randomness comes from [`SplitMix64`], so every output is a pure
//! function of its inputs and the seed, and can be reproduced bit-for-bit in
//! any language:
//!
//! ```text
//! state ← state + 0x9E3779B97F4A7C15            (mod 2⁶⁴)
//! z ← state
//! z ← (z ⊕ (z ≫ 30)) · 0xBF58476D1CE4E5B9       (mod 2⁶⁴)
//! z ← (z ⊕ (z ≫ 27)) · 0x94D049BB133111EB       (mod 2⁶⁴)
//! output z ⊕ (z ≫ 31)
//! ```
//!
//! A uniform double in `[0, 1)` is `(output ≫ 11) · 2⁻⁵³`. Standard normals
//! use Box–Muller on two consecutive uniforms `u₁, u₂`:
//! `r = √(−2 ln(1 − u₁))`, `(r cos 2πu₂, r sin 2πu₂)`. Exponentials are
//! `−ln(1 − u)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{mean, ClassicalObservable, ProbabilityState};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quantum::{validate_density, DensityMatrix, QuantumObservable};

pub const PRNG_NAME: &str = "splitmix64";

/// Off-diagonal tolerance for observables measured in the computational basis.
pub const DIAGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard exponential.
    pub fn next_exp(&mut self) -> f64 {
        -(1.0 - self.next_f64()).ln()
    }

    /// A pair of independent standard normals.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub count: u64,
    pub empirical_mean: f64,
    /// Empirical `⟨F⟩` and `⟨F²⟩`.
    pub empirical_moments: Vec<f64>,
    pub exact_mean: f64,
    /// `√(s²/L)` with the unbiased sample variance `s²`; zero when `L = 1`.
    pub standard_error_estimate: f64,
    pub seed: u64,
    pub prng: String,
}

/// Inverse-CDF sampler over `p_s`. Ties go to the lower index, and outcomes
/// with zero probability are never drawn.
struct InverseCdf {
    cdf: Vec<f64>,
    last_positive: usize,
}

impl InverseCdf {
    fn new(probs: &[f64]) -> Self {
        let cdf = probs
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let last_positive = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        InverseCdf { cdf, last_positive }
    }

    fn draw(&self, u: f64) -> usize {
        let s0 = self.cdf.partition_point(|&c| c <= u);
        s0.min(self.last_positive)
    }
}

/// Draws `samples` outcomes `s ~ p` and records the sample mean of `F(s)`.
pub fn sample_classical(
    state: &ProbabilityState,
    obs: &ClassicalObservable,
    samples: u64,
    seed: u64,
) -> Result<SampleReport> {
    if samples == 0 {
        return Err(Error::Argument("at least one sample is required".into()));
    }
    let exact_mean = mean(state, obs)?;
    let sampler = InverseCdf::new(state.probs());
    let mut rng = SplitMix64::new(seed);
    let mut counts = vec![0u64; state.len()];
    for _ in 0..samples {
        counts[sampler.draw(rng.next_f64())] += 1;
    }

    // frequencies first, so a point mass reproduces F(s*) exactly
    let l = samples as f64;
    let (m1, m2) = counts
        .iter()
        .zip(obs.values())
        .filter(|(&c, _)| c > 0)
        .fold((0.0, 0.0), |(m1, m2), (&c, &f)| {
            let freq = c as f64 / l;
            (m1 + freq * f, m2 + freq * f * f)
        });
    let standard_error_estimate = if samples > 1 {
        ((m2 - m1 * m1).max(0.0) / (l - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(SampleReport {
        count: samples,
        empirical_mean: m1,
        empirical_moments: vec![m1, m2],
        exact_mean,
        standard_error_estimate,
        seed,
        prng: PRNG_NAME.to_string(),
    })
}

/// Born-rule sampling in the computational basis: `s` is drawn with
/// probability `ρ_ss` and `F_ss` is recorded. The observable must be diagonal.
pub fn sample_diagonal_quantum(
    rho: &DensityMatrix,
    obs: &QuantumObservable,
    samples: u64,
    seed: u64,
) -> Result<SampleReport> {
    if rho.dim() != obs.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            found: obs.dim(),
        });
    }
    let values = obs
        .diagonal_values(DIAGONAL_TOL)
        .ok_or(Error::UnsupportedObservable(
            "only observables diagonal in the computational basis can be sampled",
        ))?;
    sample_classical(
        &rho.populations()?,
        &ClassicalObservable::new(values)?,
        samples,
        seed,
    )
}

/// A uniform point of the probability simplex (flat Dirichlet), from
/// normalized exponential draws.
pub fn random_simplex(n: usize, seed: u64) -> Result<ProbabilityState> {
    if n == 0 {
        return Err(Error::Argument(
            "simplex dimension must be at least 1".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let draws: Vec<f64> = (0..n).map(|_| rng.next_exp()).collect();
    let total: f64 = draws.iter().sum();
    ProbabilityState::new(draws.into_iter().map(|x| x / total).collect())
}

fn ginibre(n: usize, rng: &mut SplitMix64) -> CMatrix {
    CMatrix::from_fn(n, |_, _| {
        let (re, im) = rng.next_normal_pair();
        Complex64::new(re, im)
    })
}

/// `G G† / Tr(G G†)` for a complex Gaussian `G`.
pub fn random_density(n: usize, seed: u64) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::Argument("dimension must be at least 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let g = ginibre(n, &mut rng);
    let mut w = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z: Complex64 = (0..n).map(|k| g[(i, k)] * g[(j, k)].conj()).sum();
            w[(i, j)] = z;
            w[(j, i)] = z.conj();
        }
        w[(i, i)].im = 0.0;
    }
    let trace = w.trace().re;
    validate_density(w.scale(Complex64::new(1.0 / trace, 0.0)))
}

/// `(G + G†)/2` for a complex Gaussian `G`.
pub fn random_hermitian(n: usize, seed: u64) -> QuantumObservable {
    let mut rng = SplitMix64::new(seed);
    let g = ginibre(n, &mut rng);
    let h = CMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::new(g[(i, i)].re, 0.0)
        } else if i < j {
            (g[(i, j)] + g[(j, i)].conj()) * 0.5
        } else {
            (g[(j, i)] + g[(i, j)].conj()).conj() * 0.5
        }
    });
    QuantumObservable::new(h).expect("Hermitian by construction")
}
