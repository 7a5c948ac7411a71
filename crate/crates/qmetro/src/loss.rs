//! Loss-pattern decomposition of the lossy interferometer output.
//!
//! Each probe survives independently with transmissivity η. Conditioned on
//! losing l₀ probes from mode ∣0⟩ and l₁ from ∣1⟩, the output is again a pure
//! symmetric state; the full output is the mixture of these branches with
//! probabilities p_{l₀l₁}. This module computes the branch survival weights
//!
//!   β ⁿ_{l₀l₁}(η) = √(B ⁿ_{l₀} B ^{N−n}_{l₁}),   B ⁿ_l = C(n,l) η^{n−l} (1−η)^l,
//!
//! branch probabilities, and the conditional excitation distributions q(n).
//! Conditional weights are always indexed by the original excitation number n
//! of the input state: the phase picked up under the channel is e^{inφ} with
//! the original n, which is what Fisher information needs.

use std::ops::RangeInclusive;

use thiserror::Error;

use crate::symstate::{log_binomial, SymmetricState};
use crate::util::KahanSum;

/// Branch enumeration is exact (no truncation); t = C(n,l₀)C(N−n,l₁) stays
/// below f64 range for N up to this bound.
const MAX_PROBES: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum LossError {
    #[error("transmissivity eta = {eta} outside [0, 1]")]
    EtaOutOfRange { eta: f64 },

    /// Requested conditional distribution of a branch that never occurs.
    #[error("loss branch (l0 = {l0}, l1 = {l1}) has zero probability")]
    EmptyBranch { l0: usize, l1: usize },
}

/// Per-probe loss channel with transmissivity η ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    eta: f64,
}

impl LossChannel {
    pub fn new(eta: f64) -> Result<Self, LossError> {
        if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
            return Err(LossError::EtaOutOfRange { eta });
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// One loss pattern (l₀, l₁) with its probability and the conditional
/// distribution q(n) over the original excitation number.
#[derive(Debug, Clone, PartialEq)]
pub struct LossBranch {
    pub l0: usize,
    pub l1: usize,
    pub probability: f64,
    /// q(n) for n = l0 ..= l0 + weights.len() − 1; sums to one.
    weights: Vec<f64>,
}

impl LossBranch {
    /// Original excitation numbers carrying nonzero weight.
    pub fn support(&self) -> RangeInclusive<usize> {
        self.l0..=self.l0 + self.weights.len() - 1
    }

    /// q(n); zero outside the support.
    pub fn weight(&self, n: usize) -> f64 {
        if n < self.l0 || n >= self.l0 + self.weights.len() {
            0.0
        } else {
            self.weights[n - self.l0]
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mean and variance of n under q; variance clamped at zero.
    pub fn excitation_moments(&self) -> (f64, f64) {
        let mut mean = KahanSum::new();
        let mut second = KahanSum::new();
        for (i, &q) in self.weights.iter().enumerate() {
            let nf = (self.l0 + i) as f64;
            mean.add(nf * q);
            second.add(nf * nf * q);
        }
        let mean = mean.value();
        let var = second.value() - mean * mean;
        (mean, if var < 0.0 { 0.0 } else { var })
    }
}

/// ln B ⁿ_l for η strictly inside (0, 1); caller handles the endpoints.
fn ln_loss_factor(n: usize, l: usize, ln_eta: f64, ln_loss: f64) -> f64 {
    log_binomial(n, l).expect("l <= n checked by caller")
        + (n - l) as f64 * ln_eta
        + l as f64 * ln_loss
}

/// Survival weight β ⁿ_{l₀l₁}(η); zero when the pattern cannot occur
/// (l₀ > n or l₁ > N−n). Computed in the log domain throughout.
pub fn survival_weight(
    n: usize,
    n_probes: usize,
    l0: usize,
    l1: usize,
    eta: f64,
) -> Result<f64, LossError> {
    let channel = LossChannel::new(eta)?;
    assert!(n <= n_probes, "excitation n = {n} exceeds N = {n_probes}");
    if l0 > n || l1 > n_probes - n {
        return Ok(0.0);
    }
    let eta = channel.eta();
    if eta == 0.0 {
        // every probe is lost
        return Ok(if l0 == n && l1 == n_probes - n { 1.0 } else { 0.0 });
    }
    if eta == 1.0 {
        return Ok(if l0 == 0 && l1 == 0 { 1.0 } else { 0.0 });
    }
    let (ln_eta, ln_loss) = (eta.ln(), (1.0 - eta).ln());
    let ln_b0 = ln_loss_factor(n, l0, ln_eta, ln_loss);
    let ln_b1 = ln_loss_factor(n_probes - n, l1, ln_eta, ln_loss);
    Ok((0.5 * (ln_b0 + ln_b1)).exp())
}

/// Probability p_{l₀l₁} = Σₙ ∣αₙ∣² (β ⁿ_{l₀l₁})².
pub fn branch_probability(
    state: &SymmetricState,
    l0: usize,
    l1: usize,
    eta: f64,
) -> Result<f64, LossError> {
    let mut scan = BranchScan::new(state.n_probes(), LossChannel::new(eta)?);
    let u = state.probabilities();
    Ok(scan.one_branch(l0, l1, &u).map_or(0.0, |(p, _, _)| p))
}

/// Conditional distribution of the original excitation number in branch
/// (l₀, l₁). Errors when the branch has zero probability; callers skipping
/// branches should treat that as "nothing to do".
pub fn conditional_distribution(
    state: &SymmetricState,
    l0: usize,
    l1: usize,
    eta: f64,
) -> Result<LossBranch, LossError> {
    let mut scan = BranchScan::new(state.n_probes(), LossChannel::new(eta)?);
    let u = state.probabilities();
    let (probability, s0) = match scan.one_branch(l0, l1, &u) {
        Some((p, s0, _)) if p > 0.0 => (p, s0),
        _ => return Err(LossError::EmptyBranch { l0, l1 }),
    };
    let inv = 1.0 / s0;
    let weights = scan
        .weights()
        .iter()
        .zip(&u[l0..])
        .map(|(t, un)| t * un * inv)
        .collect();
    Ok(LossBranch {
        l0,
        l1,
        probability,
        weights,
    })
}

/// Shared enumeration of loss branches.
///
/// For each branch the unnormalized weights t(n) = C(n,l₀)C(N−n,l₁) are
/// generated by a multiplicative recurrence (no exp/ln in the inner loop) and
/// the η-dependence is folded into the per-branch constant η^{N−s}(1−η)^s,
/// s = l₀+l₁. The same scan backs the public branch operations and the
/// Fisher-information hot loops, so all routes agree bitwise.
pub(crate) struct BranchScan {
    n_probes: usize,
    /// η^{N−s}(1−η)^s for s = 0..=N.
    consts: Vec<f64>,
    /// 1/k for k = 0..=N+1 (entry 0 unused).
    inv: Vec<f64>,
    buf: Vec<f64>,
}

impl BranchScan {
    pub fn new(n_probes: usize, channel: LossChannel) -> Self {
        assert!(
            (1..=MAX_PROBES).contains(&n_probes),
            "loss enumeration supports 1 <= N <= {MAX_PROBES}, got {n_probes}"
        );
        let eta = channel.eta();
        let consts = if eta == 1.0 {
            let mut v = vec![0.0; n_probes + 1];
            v[0] = 1.0;
            v
        } else if eta == 0.0 {
            let mut v = vec![0.0; n_probes + 1];
            v[n_probes] = 1.0;
            v
        } else {
            let (ln_eta, ln_loss) = (eta.ln(), (1.0 - eta).ln());
            (0..=n_probes)
                .map(|s| ((n_probes - s) as f64 * ln_eta + s as f64 * ln_loss).exp())
                .collect()
        };
        let inv: Vec<f64> = (0..=n_probes + 1)
            .map(|k| if k == 0 { 0.0 } else { 1.0 / k as f64 })
            .collect();
        Self {
            n_probes,
            consts,
            inv,
            buf: Vec::with_capacity(n_probes + 1),
        }
    }

    /// Weights t(n) of the branch most recently scanned.
    pub fn weights(&self) -> &[f64] {
        &self.buf
    }

    /// Fills the scratch buffer with t(n) for n = l0..=N−l1.
    fn fill(&mut self, l0: usize, l1: usize) {
        let n_probes = self.n_probes;
        let len = n_probes - l1 - l0 + 1;
        self.buf.clear();
        self.buf
            .push(log_binomial(n_probes - l0, l1).expect("l1 <= N - l0").exp());
        for i in 1..len {
            let n = l0 + i;
            let prev = self.buf[i - 1];
            let grow = n as f64 * self.inv[n - l0];
            let shrink = (n_probes - n + 1 - l1) as f64 * self.inv[n_probes - n + 1];
            self.buf.push(prev * grow * shrink);
        }
    }

    /// Scans one branch against occupation probabilities u, returning
    /// (p, S0, const_s) with S0 = Σ t·u and p = const_s · S0, or None when
    /// the branch cannot occur.
    pub fn one_branch(&mut self, l0: usize, l1: usize, u: &[f64]) -> Option<(f64, f64, f64)> {
        if l0 + l1 > self.n_probes {
            return None;
        }
        let const_s = self.consts[l0 + l1];
        self.fill(l0, l1);
        let mut s0 = KahanSum::new();
        for (t, un) in self.buf.iter().zip(&u[l0..]) {
            s0.add(t * un);
        }
        Some((const_s * s0.value(), s0.value(), const_s))
    }

    /// Visits every branch in the fixed order l₀ = 0..N (outer),
    /// l₁ = 0..N−l₀ (inner) with (l0, l1, const_s, t-window). Branches whose
    /// constant underflows to zero are skipped; they carry no probability.
    pub fn for_each_branch(&mut self, mut visit: impl FnMut(usize, usize, f64, &[f64])) {
        for l0 in 0..=self.n_probes {
            for l1 in 0..=self.n_probes - l0 {
                let const_s = self.consts[l0 + l1];
                if const_s == 0.0 {
                    continue;
                }
                self.fill(l0, l1);
                visit(l0, l1, const_s, &self.buf);
            }
        }
    }
}
