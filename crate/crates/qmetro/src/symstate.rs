//! Symmetric N-probe states in the Dicke basis.
//!
//! A pure state of N indistinguishable two-level probes is fixed by N+1
//! complex amplitudes α_n on the Dicke states ∣n, N−n⟩ (n probes in ∣0⟩,
//! N−n in ∣1⟩). Everything downstream — loss branches, Fisher information,
//! collective spin moments — is built from these amplitudes, so this module
//! also owns the log-domain binomial machinery that keeps the combinatorics
//! finite at large N.

use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;
use thiserror::Error;

use crate::util::KahanSum;

/// Normalization tolerance used by state constructors.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    /// `log_binomial` called with k > n.
    #[error("binomial coefficient undefined for k = {k} > n = {n}")]
    BinomialDomain { n: usize, k: usize },

    /// All-zero (or numerically vanishing) amplitude vector.
    #[error("cannot normalize an all-zero amplitude vector")]
    DegenerateState,

    /// States describe at least one probe.
    #[error("probe count must be at least 1")]
    NoProbes,

    /// Non-finite entry in an amplitude vector.
    #[error("amplitudes must be finite")]
    NonFinite,

    /// Constructor given amplitudes that are not normalized.
    #[error("state norm deviates from unity by {deviation:.3e}")]
    NotNormalized { deviation: f64 },
}

/// Grow-on-demand table of ln(n!) built by compensated summation of ln(i).
struct LnFactorial {
    values: Vec<f64>,
    acc: KahanSum,
}

impl LnFactorial {
    fn ensure(&mut self, n: usize) {
        while self.values.len() <= n {
            self.acc.add((self.values.len() as f64).ln());
            self.values.push(self.acc.value());
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<RwLock<LnFactorial>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        RwLock::new(LnFactorial {
            values: vec![0.0, 0.0],
            acc: KahanSum::new(),
        })
    });
    {
        let t = table.read().unwrap();
        if let Some(&v) = t.values.get(n) {
            return v;
        }
    }
    let mut t = table.write().unwrap();
    t.ensure(n);
    t.values[n]
}

/// ln C(n, k), computed entirely in the log domain.
///
/// For small min(k, n−k) the sum Σ ln((n−k+i)/i) is used directly; larger
/// arguments go through the compensated ln-factorial table. Relative error
/// stays below 1e-12 for n up to 10⁴ (the direct route avoids the
/// cancellation that makes the factorial difference inaccurate when the
/// coefficient itself is small).
pub fn log_binomial(n: usize, k: usize) -> Result<f64, StateError> {
    if k > n {
        return Err(StateError::BinomialDomain { n, k });
    }
    let m = k.min(n - k);
    if m == 0 {
        return Ok(0.0);
    }
    if m <= 64 {
        let mut s = KahanSum::new();
        for i in 1..=m {
            s.add((((n - m + i) as f64) / (i as f64)).ln());
        }
        Ok(s.value())
    } else {
        Ok(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
    }
}

/// Phase convention for [`product_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductGauge {
    /// Real nonnegative amplitudes √C(N,n)/2^{N/2}.
    Real,
    /// Amplitudes multiplied by iⁿ; points the collective spin along +y.
    IPower,
}

/// Normalized N-probe symmetric state ∣Ψ⟩ = Σₙ αₙ ∣n, N−n⟩.
///
/// Amplitudes are stored as complex numbers even where only ∣αₙ∣² enters a
/// figure of merit; the Ramsey objective is phase sensitive.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricState {
    amplitudes: Vec<Complex64>,
}

impl SymmetricState {
    /// Wraps an already-normalized amplitude vector of length N+1.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        if amplitudes.len() < 2 {
            return Err(StateError::NoProbes);
        }
        if !amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let mut norm2 = KahanSum::new();
        for a in &amplitudes {
            norm2.add(a.norm_sqr());
        }
        let deviation = (norm2.value() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(StateError::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    pub fn n_probes(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes[n]
    }

    /// Occupation probabilities ∣αₙ∣².
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Mean and variance of the excitation number n̂∣n, N−n⟩ = n∣n, N−n⟩.
    ///
    /// The variance is clamped at zero when roundoff drives it slightly
    /// negative, so downstream Fisher information stays nonnegative.
    pub fn excitation_moments(&self) -> (f64, f64) {
        let mut mean = KahanSum::new();
        let mut second = KahanSum::new();
        for (n, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            let nf = n as f64;
            mean.add(nf * p);
            second.add(nf * nf * p);
        }
        let mean = mean.value();
        let var = second.value() - mean * mean;
        (mean, if var < 0.0 { 0.0 } else { var })
    }

    /// Same state with every amplitude replaced by its modulus.
    ///
    /// Legal gauge fix for phase-insensitive objectives; used to report
    /// optimization results in the real-nonnegative gauge.
    pub fn rephased_nonnegative(&self) -> SymmetricState {
        SymmetricState {
            amplitudes: self
                .amplitudes
                .iter()
                .map(|a| Complex64::new(a.norm(), 0.0))
                .collect(),
        }
    }
}

/// Scales a raw amplitude vector onto the unit sphere.
///
/// The output differs from the input by one positive scalar factor, so the
/// relative phases of the entries are untouched.
pub fn normalize(raw: &[Complex64]) -> Result<SymmetricState, StateError> {
    if raw.len() < 2 {
        return Err(StateError::NoProbes);
    }
    if !raw.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
        return Err(StateError::NonFinite);
    }
    let mut norm2 = KahanSum::new();
    for a in raw {
        norm2.add(a.norm_sqr());
    }
    let norm = norm2.value().sqrt();
    if norm == 0.0 {
        return Err(StateError::DegenerateState);
    }
    let inv = 1.0 / norm;
    Ok(SymmetricState {
        amplitudes: raw.iter().map(|a| a * inv).collect(),
    })
}

/// (∣N, 0⟩ + ∣0, N⟩)/√2 — the decoherence-free optimum with F = N².
pub fn noon_state(n_probes: usize) -> Result<SymmetricState, StateError> {
    if n_probes == 0 {
        return Err(StateError::NoProbes);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_probes + 1];
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = a;
    amplitudes[n_probes] = a;
    Ok(SymmetricState { amplitudes })
}

/// Uncorrelated product of N identical single-probe superpositions,
/// αₙ = √C(N,n)/2^{N/2}, optionally in the iⁿ gauge.
pub fn product_state(
    n_probes: usize,
    gauge: ProductGauge,
) -> Result<SymmetricState, StateError> {
    if n_probes == 0 {
        return Err(StateError::NoProbes);
    }
    let half_n_ln2 = 0.5 * n_probes as f64 * std::f64::consts::LN_2;
    let mut amplitudes = Vec::with_capacity(n_probes + 1);
    for n in 0..=n_probes {
        let mag = (0.5 * log_binomial(n_probes, n).expect("k <= n") - half_n_ln2).exp();
        let a = match gauge {
            ProductGauge::Real => Complex64::new(mag, 0.0),
            // i^n cycles exactly through {1, i, -1, -i}
            ProductGauge::IPower => match n % 4 {
                0 => Complex64::new(mag, 0.0),
                1 => Complex64::new(0.0, mag),
                2 => Complex64::new(-mag, 0.0),
                _ => Complex64::new(0.0, -mag),
            },
        };
        amplitudes.push(a);
    }
    // amplitudes already sum to one in probability up to roundoff
    normalize(&amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_bigint::BigUint;
    use rand_core::SeedableRng;
    use rand_pcg::Pcg64;

    use crate::util::uniform_symmetric;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Exact big-integer binomial, ln taken from the top bits.
    fn ln_binomial_exact(n: usize, k: usize) -> f64 {
        let mut c = BigUint::from(1u32);
        let m = k.min(n - k);
        for i in 1..=m {
            c *= BigUint::from(n - m + i);
            c /= BigUint::from(i);
        }
        let bits = c.bits();
        if bits <= 53 {
            let v: f64 = c.to_string().parse().unwrap();
            v.ln()
        } else {
            let shift = bits - 53;
            let top: f64 = (c >> shift).to_string().parse().unwrap();
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }

    #[test]
    fn log_binomial_trivial_values() {
        assert_eq!(log_binomial(0, 0).unwrap(), 0.0);
        assert_relative_eq!(
            log_binomial(5, 2).unwrap(),
            10.0f64.ln(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn log_binomial_rejects_k_above_n() {
        assert_eq!(
            log_binomial(3, 4),
            Err(StateError::BinomialDomain { n: 3, k: 4 })
        );
    }

    #[test]
    fn log_binomial_matches_big_integer_reference() {
        assert_relative_eq!(
            log_binomial(500, 250).unwrap(),
            ln_binomial_exact(500, 250),
            max_relative = 1e-12
        );
        for &(n, k) in &[
            (500usize, 1usize),
            (500, 13),
            (1000, 999),
            (2000, 700),
            (10_000, 5000),
            (10_000, 2),
            (10_000, 9_936),
        ] {
            assert_relative_eq!(
                log_binomial(n, k).unwrap(),
                ln_binomial_exact(n, k),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let s = normalize(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(s.amplitude(0).re, r, max_relative = 1e-15);
        assert_relative_eq!(s.amplitude(1).re, r, max_relative = 1e-15);

        // |3+4i| = 5
        let s = normalize(&[c(3.0, 4.0), c(0.0, 0.0)]).unwrap();
        assert_relative_eq!(s.amplitude(0).re, 0.6, max_relative = 1e-15);
        assert_relative_eq!(s.amplitude(0).im, 0.8, max_relative = 1e-15);
    }

    #[test]
    fn normalize_rejects_zero_vector() {
        assert_eq!(
            normalize(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(StateError::DegenerateState)
        );
    }

    #[test]
    fn normalize_is_idempotent() {
        let mut rng = Pcg64::seed_from_u64(11);
        for _ in 0..20 {
            let raw: Vec<Complex64> = (0..8)
                .map(|_| c(uniform_symmetric(&mut rng, 3.0), uniform_symmetric(&mut rng, 3.0)))
                .collect();
            let once = normalize(&raw).unwrap();
            let twice = normalize(once.amplitudes()).unwrap();
            for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
                assert!((a - b).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn excitation_moments_examples() {
        let (mean, var) = noon_state(4).unwrap().excitation_moments();
        assert_relative_eq!(mean, 2.0, max_relative = 1e-14);
        assert_relative_eq!(var, 4.0, max_relative = 1e-14);

        let mut basis = vec![c(0.0, 0.0); 6];
        basis[3] = c(1.0, 0.0);
        let (mean, var) = SymmetricState::new(basis).unwrap().excitation_moments();
        assert_eq!((mean, var), (3.0, 0.0));

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = SymmetricState::new(vec![c(r, 0.0), c(r, 0.0), c(0.0, 0.0)]).unwrap();
        let (mean, var) = s.excitation_moments();
        assert_relative_eq!(mean, 0.5, max_relative = 1e-14);
        assert_relative_eq!(var, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn moments_invariant_under_rephasing() {
        let mut rng = Pcg64::seed_from_u64(3);
        let raw: Vec<Complex64> = (0..11)
            .map(|_| c(uniform_symmetric(&mut rng, 1.0), uniform_symmetric(&mut rng, 1.0)))
            .collect();
        let s = normalize(&raw).unwrap();
        let rotated: Vec<Complex64> = s
            .amplitudes()
            .iter()
            .map(|a| a * Complex64::from_polar(1.0, uniform_symmetric(&mut rng, 3.0)))
            .collect();
        let t = normalize(&rotated).unwrap();
        let (m0, v0) = s.excitation_moments();
        let (m1, v1) = t.excitation_moments();
        assert_relative_eq!(m0, m1, max_relative = 1e-12);
        assert_relative_eq!(v0, v1, max_relative = 1e-12);
    }

    #[test]
    fn state_constructors() {
        let s = noon_state(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(s.amplitude(0).re, r);
        assert_eq!(s.amplitude(1), c(0.0, 0.0));
        assert_relative_eq!(s.amplitude(2).re, r);

        let p = product_state(1, ProductGauge::Real).unwrap();
        assert_relative_eq!(p.amplitude(0).re, r, max_relative = 1e-15);
        assert_relative_eq!(p.amplitude(1).re, r, max_relative = 1e-15);

        // i^2 = -1
        let p = product_state(2, ProductGauge::IPower).unwrap();
        assert_relative_eq!(p.amplitude(0).re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(p.amplitude(1).im, r, max_relative = 1e-14);
        assert_relative_eq!(p.amplitude(2).re, -0.5, max_relative = 1e-14);

        assert_eq!(noon_state(0), Err(StateError::NoProbes));
        assert_eq!(product_state(0, ProductGauge::Real), Err(StateError::NoProbes));
    }

    #[test]
    fn product_state_moments_match_binomial() {
        for n in [1usize, 2, 17, 64, 150, 200] {
            let (mean, var) = product_state(n, ProductGauge::Real)
                .unwrap()
                .excitation_moments();
            assert_relative_eq!(mean, n as f64 / 2.0, max_relative = 1e-12);
            assert_relative_eq!(var, n as f64 / 4.0, max_relative = 1e-12);
        }
    }
}
