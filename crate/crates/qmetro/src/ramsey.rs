//! Collective-spin moments and the operational Ramsey precision.
//!
//! Treating each probe as a spin 1/2, the Dicke states ∣n, N−n⟩ form the
//! j = N/2 ladder with m = n − N/2. A Ramsey (equivalently Mach-Zehnder)
//! sequence senses the rotation e^{iφĴz} through a measurement of Ĵx, and
//! error propagation at the operating point φ = 0 gives
//!
//!   Δφ = √( Δ²Ĵx/⟨Ĵy⟩² + (1−η)/η · N/(4⟨Ĵy⟩²) ),
//!
//! where the moments are those of the input state and the second term is the
//! noise added by losing each probe independently with probability 1−η.

use thiserror::Error;

use crate::symstate::SymmetricState;
use crate::util::KahanSum;

#[derive(Debug, Error, PartialEq)]
pub enum RamseyError {
    /// ⟨Ĵy⟩ = 0: the interferometer signal has no slope at φ = 0.
    #[error("vanishing <Jy> = {jy_mean:.3e}: no signal slope at the operating point")]
    NoSignal { jy_mean: f64 },

    /// η = 0 loses every probe.
    #[error("eta = 0 transmits no probes; precision is unbounded")]
    InfiniteLoss,

    #[error("transmissivity eta = {eta} outside (0, 1]")]
    EtaOutOfRange { eta: f64 },
}

/// First and second collective-spin moments of a symmetric state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveMoments {
    pub jx_mean: f64,
    pub jy_mean: f64,
    /// ⟨Ĵx²⟩.
    pub jx_second: f64,
    /// Δ²Ĵx, clamped at zero against roundoff.
    pub jx_var: f64,
}

/// Ladder coupling c_n = √((n+1)(N−n)) between ∣n⟩ and ∣n+1⟩.
#[inline]
fn ladder(n: usize, n_probes: usize) -> f64 {
    (((n + 1) * (n_probes - n)) as f64).sqrt()
}

/// Collective moments ⟨Ĵx⟩, ⟨Ĵy⟩, ⟨Ĵx²⟩, Δ²Ĵx.
///
/// The sign of Ĵy is fixed so that the iⁿ-gauge product state points along
/// +y (⟨Ĵy⟩ = +N/2): the off-diagonal expectation is accumulated as
/// Σₙ αₙ* αₙ₊₁ cₙ = ⟨Ĵx⟩ + i⟨Ĵy⟩.
pub fn collective_moments(state: &SymmetricState) -> CollectiveMoments {
    let a = state.amplitudes();
    let n_probes = state.n_probes();

    // Jx + iJy pairs conjugate ladder terms, so no extra factor of 1/2
    let mut jx = KahanSum::new();
    let mut jy = KahanSum::new();
    for n in 0..n_probes {
        let z = a[n].conj() * a[n + 1] * ladder(n, n_probes);
        jx.add(z.re);
        jy.add(z.im);
    }
    let jx_mean = jx.value();
    let jy_mean = jy.value();

    // <Jx^2> = ( 2 Re<J+^2> + Sum |a_n|^2 (c_{n-1}^2 + c_n^2) ) / 4
    let mut two_step = KahanSum::new();
    for n in 0..n_probes.saturating_sub(1) {
        let z = a[n].conj() * a[n + 2] * (ladder(n, n_probes) * ladder(n + 1, n_probes));
        two_step.add(z.re);
    }
    let mut diagonal = KahanSum::new();
    for n in 0..=n_probes {
        let p = a[n].norm_sqr();
        let down = (n * (n_probes - n + 1)) as f64;
        let up = ((n + 1) * (n_probes - n)) as f64;
        diagonal.add(p * (down + up));
    }
    let jx_second = 0.25 * (2.0 * two_step.value() + diagonal.value());
    let jx_var = jx_second - jx_mean * jx_mean;

    CollectiveMoments {
        jx_mean,
        jy_mean,
        jx_second,
        jx_var: if jx_var < 0.0 { 0.0 } else { jx_var },
    }
}

/// Ramsey uncertainty at φ = 0 from precomputed moments.
pub fn ramsey_precision_from_moments(
    moments: &CollectiveMoments,
    n_probes: usize,
    eta: f64,
) -> Result<f64, RamseyError> {
    if eta == 0.0 {
        return Err(RamseyError::InfiniteLoss);
    }
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(RamseyError::EtaOutOfRange { eta });
    }
    let jy = moments.jy_mean;
    if jy.abs() <= 1e-9 {
        return Err(RamseyError::NoSignal { jy_mean: jy });
    }
    let jy2 = jy * jy;
    let loss_noise = (1.0 - eta) / eta * n_probes as f64 / (4.0 * jy2);
    Ok((moments.jx_var / jy2 + loss_noise).sqrt())
}

/// Ramsey uncertainty of a state under transmissivity η ∈ (0, 1].
pub fn ramsey_precision(state: &SymmetricState, eta: f64) -> Result<f64, RamseyError> {
    ramsey_precision_from_moments(&collective_moments(state), state.n_probes(), eta)
}
