//! Fisher-information figures of merit and precision conversion.
//!
//! Three routes to the quantum Fisher information of the lossy
//! interferometer output are provided:
//!
//! * [`pure_qfi`] — the lossless pure-state value 4·Var(n̂);
//! * [`approx_qfi`] — the branch-resolved upper bound F̃ = Σ p_{l₀l₁} F(∣Ψ^{l₀l₁}⟩),
//!   the quantity the optimizer maximizes. It is phase independent and costs
//!   O(N³) with O(1) extra memory per branch;
//! * [`exact_qfi`] — a dense oracle for small N that eigendecomposes every
//!   surviving-probe sector of the output state and applies the symmetric
//!   logarithmic derivative eigen-formula. By convexity it never exceeds F̃.
//!
//! Precision is reported through the Cramér-Rao conversion Δφ = 1/√(kF).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::loss::{BranchScan, LossChannel, LossError};
use crate::symstate::SymmetricState;
use crate::util::KahanSum;

/// Largest N accepted by [`exact_qfi`]; sector eigendecompositions make the
/// oracle cubic per sector and it is meant for validation, not production.
pub const ORACLE_N_CAP: usize = 30;

/// Relative eigenvalue cutoff in the SLD eigen-formula (the output state has
/// unit trace, so the cutoff is applied as an absolute threshold).
pub const EIGEN_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum QfiError {
    #[error("exact QFI oracle capped at N <= {cap}, got N = {n}; use approx_qfi instead")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error(transparent)]
    Channel(#[from] LossError),

    #[error("precision undefined for Fisher information F = {f} <= 0")]
    UndefinedPrecision { f: f64 },

    #[error("repetition count k must be positive")]
    ZeroRepetitions,

    #[error("QFI value {value} outside [0, N^2] for N = {n}")]
    OutOfBounds { value: f64, n: usize },
}

/// Which route produced a QFI figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiKind {
    Pure,
    Approximate,
    Exact,
}

/// A QFI value tagged with its provenance, range-checked against the
/// decoherence-free ceiling N² attained by the N00N state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiValue {
    pub value: f64,
    pub kind: QfiKind,
}

impl QfiValue {
    pub fn checked(value: f64, kind: QfiKind, n_probes: usize) -> Result<Self, QfiError> {
        let ceiling = (n_probes as f64) * (n_probes as f64) + 1e-6;
        if !value.is_finite() || value < 0.0 || value > ceiling {
            return Err(QfiError::OutOfBounds {
                value,
                n: n_probes,
            });
        }
        Ok(Self { value, kind })
    }
}

/// QFI of the lossless pure state: 4·Var(n̂).
pub fn pure_qfi(state: &SymmetricState) -> f64 {
    let (_, var) = state.excitation_moments();
    4.0 * var
}

fn channel(eta: f64) -> LossChannel {
    LossChannel::new(eta).expect("transmissivity must lie in [0, 1]")
}

/// Per-branch accumulation shared by the streaming and cached evaluators,
/// so both produce bitwise-identical results. Returns (p, p·4·Var_q(n)).
#[inline]
fn branch_contribution(l0: usize, const_s: f64, t: &[f64], u: &[f64]) -> (f64, f64) {
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (i, (&ti, &ui)) in t.iter().zip(&u[l0..]).enumerate() {
        let w = ti * ui;
        let nf = (l0 + i) as f64;
        s0 += w;
        s1 += w * nf;
        s2 += w * nf * nf;
    }
    if s0 <= 0.0 {
        return (0.0, 0.0);
    }
    let p = const_s * s0;
    let mean = s1 / s0;
    let var = s2 / s0 - mean * mean;
    let var = if var < 0.0 { 0.0 } else { var };
    (p, p * 4.0 * var)
}

/// Approximate QFI F̃: the loss-branch weighted sum of pure-state QFIs.
///
/// Exact enumeration of all (l₀, l₁) branches; depends on the input only
/// through the occupation probabilities ∣αₙ∣², hence is independent of φ and
/// of amplitude phases.
pub fn approx_qfi(state: &SymmetricState, eta: f64) -> f64 {
    approx_qfi_with_cutoff(state, eta, 0.0)
}

/// [`approx_qfi`] with an optional branch-probability cutoff: branches with
/// p ≤ cutoff contribute no variance term. The default cutoff 0 is exact;
/// a small positive value trades a bounded error for speed.
pub fn approx_qfi_with_cutoff(state: &SymmetricState, eta: f64, cutoff: f64) -> f64 {
    let u = state.probabilities();
    let mut scan = BranchScan::new(state.n_probes(), channel(eta));
    let mut f = KahanSum::new();
    scan.for_each_branch(|l0, _l1, const_s, t| {
        if cutoff > 0.0 {
            let mut s0 = 0.0;
            for (&ti, &ui) in t.iter().zip(&u[l0..]) {
                s0 += ti * ui;
            }
            if const_s * s0 <= cutoff {
                return;
            }
        }
        let (_, contribution) = branch_contribution(l0, const_s, t, &u);
        f.add(contribution);
    });
    f.value()
}

/// Residual of the completeness identity Σ p·E_q[n²] = ⟨n̂²⟩; a cheap
/// internal consistency check of the branch enumeration behind F̃.
pub fn telescoping_residual(state: &SymmetricState, eta: f64) -> f64 {
    let u = state.probabilities();
    let mut scan = BranchScan::new(state.n_probes(), channel(eta));
    let mut total = KahanSum::new();
    scan.for_each_branch(|l0, _l1, const_s, t| {
        let mut s2 = 0.0;
        for (i, (&ti, &ui)) in t.iter().zip(&u[l0..]).enumerate() {
            let nf = (l0 + i) as f64;
            s2 += ti * ui * nf * nf;
        }
        total.add(const_s * s2);
    });
    let (mean, var) = state.excitation_moments();
    let second = var + mean * mean;
    (total.value() - second).abs()
}

/// Cached branch weights for repeated F̃ evaluations at fixed (N, η).
///
/// Objective functions evaluate F̃ thousands of times on states that share
/// N and η; materializing the t-windows once turns each evaluation into a
/// stream of fused multiply-adds. Evaluation order and arithmetic match the
/// streaming path exactly.
pub(crate) struct ApproxQfiKernel {
    n_probes: usize,
    /// (l0, const_s, offset, len) per branch, in scan order.
    branches: Vec<(usize, f64, usize, usize)>,
    weights: Vec<f64>,
}

impl ApproxQfiKernel {
    /// Memory is ~N³/6 weights; callers gate on N.
    pub fn new(n_probes: usize, eta: f64) -> Self {
        let mut scan = BranchScan::new(n_probes, channel(eta));
        let mut branches = Vec::new();
        let mut weights = Vec::new();
        scan.for_each_branch(|l0, _l1, const_s, t| {
            branches.push((l0, const_s, weights.len(), t.len()));
            weights.extend_from_slice(t);
        });
        Self {
            n_probes,
            branches,
            weights,
        }
    }

    /// F̃ from occupation probabilities u (length N+1).
    pub fn eval(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.n_probes + 1);
        let mut f = KahanSum::new();
        for &(l0, const_s, offset, len) in &self.branches {
            let t = &self.weights[offset..offset + len];
            let (_, contribution) = branch_contribution(l0, const_s, t, u);
            f.add(contribution);
        }
        f.value()
    }
}

/// Options for the exact SLD oracle.
#[derive(Debug, Clone, Copy)]
pub struct ExactQfiOptions {
    /// Reject states with more probes than this.
    pub n_cap: usize,
    /// Eigenvalue-pair cutoff ε, relative to the (unit) output trace.
    pub eigen_cutoff: f64,
}

impl Default for ExactQfiOptions {
    fn default() -> Self {
        Self {
            n_cap: ORACLE_N_CAP,
            eigen_cutoff: EIGEN_CUTOFF,
        }
    }
}

/// Exact QFI of the mixed output state via the SLD eigen-formula.
///
/// The output density matrix is block diagonal in the number of surviving
/// probes N′ = N − l₀ − l₁. Branches sharing l₀+l₁ overlap inside a sector
/// and are summed as operators. Within each sector dρ/dφ at φ = 0 carries
/// the factor i(m−m′) elementwise (the l₀ offset of the original excitation
/// index cancels between bra and ket), and the sector contributes
/// Σ 2∣⟨j∣dρ∣k⟩∣²/(λⱼ+λₖ) over eigenpairs above the cutoff.
pub fn exact_qfi(state: &SymmetricState, eta: f64) -> Result<f64, QfiError> {
    exact_qfi_with(state, eta, &ExactQfiOptions::default())
}

pub fn exact_qfi_with(
    state: &SymmetricState,
    eta: f64,
    opts: &ExactQfiOptions,
) -> Result<f64, QfiError> {
    let n = state.n_probes();
    if n > opts.n_cap {
        return Err(QfiError::OracleCapExceeded { n, cap: opts.n_cap });
    }
    let chan = LossChannel::new(eta)?;
    let alpha = state.amplitudes();
    let mut fisher = KahanSum::new();
    for s in 0..=n {
        let dim = n - s + 1;
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for l0 in 0..=s {
            let l1 = s - l0;
            let v: Vec<Complex64> = (0..dim)
                .map(|m| {
                    let orig = m + l0;
                    let beta = crate::loss::survival_weight(orig, n, l0, l1, chan.eta())
                        .expect("eta validated");
                    alpha[orig] * beta
                })
                .collect();
            for i in 0..dim {
                for j in 0..dim {
                    rho[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        let trace: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
        if trace <= opts.eigen_cutoff {
            continue;
        }
        let mut drho = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                drho[(i, j)] = Complex64::new(0.0, i as f64 - j as f64) * rho[(i, j)];
            }
        }
        // enforce hermiticity against accumulation roundoff
        let rho = (rho.adjoint() + rho).map(|z| 0.5 * z);
        let eig = SymmetricEigen::new(rho);
        let m = eig.eigenvectors.adjoint() * drho * &eig.eigenvectors;
        for j in 0..dim {
            for k in 0..dim {
                let denom = eig.eigenvalues[j].max(0.0) + eig.eigenvalues[k].max(0.0);
                if denom > opts.eigen_cutoff {
                    fisher.add(2.0 * m[(j, k)].norm_sqr() / denom);
                }
            }
        }
    }
    Ok(fisher.value())
}

/// Cramér-Rao conversion Δφ = 1/√(kF) for k independent repetitions.
pub fn precision_from_qfi(f: f64, repetitions: u64) -> Result<f64, QfiError> {
    if repetitions == 0 {
        return Err(QfiError::ZeroRepetitions);
    }
    if !(f > 0.0) {
        return Err(QfiError::UndefinedPrecision { f });
    }
    Ok(1.0 / (repetitions as f64 * f).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand_core::SeedableRng;
    use rand_pcg::Pcg64;

    use crate::loss::conditional_distribution;
    use crate::symstate::{noon_state, normalize, product_state, ProductGauge};
    use crate::util::uniform_symmetric;

    fn random_state(n: usize, rng: &mut Pcg64) -> SymmetricState {
        let raw: Vec<Complex64> = (0..=n)
            .map(|_| {
                Complex64::new(
                    uniform_symmetric(rng, 1.0),
                    uniform_symmetric(rng, 1.0),
                )
            })
            .collect();
        normalize(&raw).unwrap()
    }

    fn balanced_one_probe() -> SymmetricState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        normalize(&[Complex64::new(r, 0.0), Complex64::new(r, 0.0)]).unwrap()
    }

    #[test]
    fn pure_qfi_examples() {
        assert_relative_eq!(pure_qfi(&noon_state(4).unwrap()), 16.0, max_relative = 1e-13);
        for n in [1usize, 5, 40] {
            assert_relative_eq!(
                pure_qfi(&product_state(n, ProductGauge::Real).unwrap()),
                n as f64,
                max_relative = 1e-12
            );
        }
        let mut basis = vec![Complex64::new(0.0, 0.0); 7];
        basis[2] = Complex64::new(1.0, 0.0);
        assert_eq!(pure_qfi(&SymmetricState::new(basis).unwrap()), 0.0);
    }

    #[test]
    fn approx_qfi_reduces_to_pure_without_loss() {
        let mut rng = Pcg64::seed_from_u64(2);
        for n in [1usize, 4, 17] {
            let s = random_state(n, &mut rng);
            assert_relative_eq!(approx_qfi(&s, 1.0), pure_qfi(&s), max_relative = 1e-12);
        }
    }

    #[test]
    fn approx_qfi_single_probe() {
        let s = balanced_one_probe();
        for &eta in &[0.1, 0.5, 0.9] {
            assert_relative_eq!(approx_qfi(&s, eta), eta, max_relative = 1e-13);
        }
    }

    #[test]
    fn approx_qfi_noon_two_probes() {
        let noon = noon_state(2).unwrap();
        assert_relative_eq!(approx_qfi(&noon, 0.9), 3.24, max_relative = 1e-13);
        for &eta in &[0.25, 0.6, 1.0] {
            assert_relative_eq!(approx_qfi(&noon, eta), 4.0 * eta * eta, max_relative = 1e-13);
        }
    }

    #[test]
    fn approx_qfi_ignores_amplitude_phases() {
        let mut rng = Pcg64::seed_from_u64(8);
        let s = random_state(9, &mut rng);
        let rotated: Vec<Complex64> = s
            .amplitudes()
            .iter()
            .map(|a| a * Complex64::from_polar(1.0, uniform_symmetric(&mut rng, 3.0)))
            .collect();
        let t = normalize(&rotated).unwrap();
        // the branch sum sees only |alpha|^2, so equality holds to the
        // rounding of the occupation probabilities
        assert_relative_eq!(approx_qfi(&s, 0.7), approx_qfi(&t, 0.7), max_relative = 1e-12);
    }

    #[test]
    fn approx_qfi_matches_public_branch_route() {
        let mut rng = Pcg64::seed_from_u64(13);
        let s = random_state(12, &mut rng);
        let eta = 0.65;
        let mut total = KahanSum::new();
        for l0 in 0..=12usize {
            for l1 in 0..=12 - l0 {
                let Ok(branch) = conditional_distribution(&s, l0, l1, eta) else {
                    continue;
                };
                let (_, var) = branch.excitation_moments();
                total.add(branch.probability * 4.0 * var);
            }
        }
        assert_relative_eq!(approx_qfi(&s, eta), total.value(), max_relative = 1e-11);
    }

    #[test]
    fn kernel_matches_streaming_bitwise() {
        let mut rng = Pcg64::seed_from_u64(19);
        for &(n, eta) in &[(6usize, 0.8), (25, 0.4), (60, 0.95)] {
            let kernel = ApproxQfiKernel::new(n, eta);
            for _ in 0..3 {
                let s = random_state(n, &mut rng);
                let u = s.probabilities();
                assert_eq!(kernel.eval(&u), approx_qfi(&s, eta));
            }
        }
    }

    #[test]
    fn cutoff_zero_is_exact_and_small_cutoff_close() {
        let mut rng = Pcg64::seed_from_u64(29);
        let s = random_state(30, &mut rng);
        let exact = approx_qfi(&s, 0.8);
        assert_eq!(approx_qfi_with_cutoff(&s, 0.8, 0.0), exact);
        let truncated = approx_qfi_with_cutoff(&s, 0.8, 1e-9);
        assert_relative_eq!(truncated, exact, max_relative = 1e-6);
    }

    #[test]
    fn telescoping_identity_holds() {
        let mut rng = Pcg64::seed_from_u64(37);
        for &n in &[3usize, 20, 80] {
            let s = random_state(n, &mut rng);
            assert!(telescoping_residual(&s, 0.55) < 1e-10 * (n as f64 * n as f64));
        }
    }

    #[test]
    fn exact_qfi_single_probe_balanced() {
        let s = balanced_one_probe();
        assert_relative_eq!(exact_qfi(&s, 0.5).unwrap(), 0.5, max_relative = 1e-11);
        // single-probe loss carries no phase information: exact equals F-tilde
        for &eta in &[0.2, 0.7] {
            assert_relative_eq!(
                exact_qfi(&s, eta).unwrap(),
                approx_qfi(&s, eta),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn exact_qfi_lossless_equals_pure() {
        let mut rng = Pcg64::seed_from_u64(43);
        for n in [1usize, 3, 7] {
            let s = random_state(n, &mut rng);
            let f = exact_qfi(&s, 1.0).unwrap();
            assert!((f - pure_qfi(&s)).abs() <= 1e-10 * pure_qfi(&s).max(1.0));
        }
    }

    #[test]
    fn exact_qfi_respects_cap() {
        let s = product_state(31, ProductGauge::Real).unwrap();
        assert_eq!(
            exact_qfi(&s, 0.9),
            Err(QfiError::OracleCapExceeded { n: 31, cap: 30 })
        );
    }

    #[test]
    fn exact_below_approx_by_convexity() {
        let mut rng = Pcg64::seed_from_u64(47);
        for _ in 0..6 {
            let s = random_state(8, &mut rng);
            for &eta in &[0.3, 0.6, 0.9] {
                assert!(exact_qfi(&s, eta).unwrap() <= approx_qfi(&s, eta) + 1e-8);
            }
        }
    }

    #[test]
    fn exact_qfi_monotone_in_transmissivity() {
        let mut rng = Pcg64::seed_from_u64(53);
        for _ in 0..4 {
            let s = random_state(6, &mut rng);
            let mut previous = 0.0;
            for &eta in &[0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
                let f = exact_qfi(&s, eta).unwrap();
                assert!(f >= previous - 1e-9);
                previous = f;
            }
        }
    }

    #[test]
    fn exact_qfi_respects_loss_bound() {
        let mut rng = Pcg64::seed_from_u64(61);
        for &n in &[4usize, 10] {
            for _ in 0..4 {
                let s = random_state(n, &mut rng);
                for &eta in &[0.3, 0.6, 0.9] {
                    let bound = eta * n as f64 / (1.0 - eta);
                    assert!(exact_qfi(&s, eta).unwrap() <= bound + 1e-8);
                }
            }
        }
    }

    #[test]
    fn precision_conversion() {
        assert_relative_eq!(precision_from_qfi(16.0, 1).unwrap(), 0.25);
        assert_relative_eq!(
            precision_from_qfi(0.9 * 10.0, 1).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(precision_from_qfi(4.0, 25).unwrap(), 0.1);
        assert_eq!(
            precision_from_qfi(0.0, 1),
            Err(QfiError::UndefinedPrecision { f: 0.0 })
        );
        assert_eq!(precision_from_qfi(1.0, 0), Err(QfiError::ZeroRepetitions));
    }

    #[test]
    fn qfi_value_range_check() {
        assert!(QfiValue::checked(16.0, QfiKind::Pure, 4).is_ok());
        assert!(QfiValue::checked(16.1, QfiKind::Pure, 4).is_err());
        assert!(QfiValue::checked(-0.1, QfiKind::Exact, 4).is_err());
    }
}
