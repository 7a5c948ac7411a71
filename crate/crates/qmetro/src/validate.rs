//! Seeded invariant suite behind the `validate` subcommand.
//!
//! Each check exercises a structural identity the implementation must keep:
//! completeness of the loss decomposition, convexity and channel bounds of
//! the Fisher information routes, stability of the MPS amplitude map,
//! measurement precision never beating the Cramér-Rao bound, bond-dimension
//! monotonicity, and bitwise determinism of seeded optimization. All inputs
//! are generated from fixed seeds so the suite itself is reproducible.

use num_complex::Complex64;
use rand_core::SeedableRng;
use rand_pcg::Pcg64;

use crate::loss::{branch_probability, survival_weight};
use crate::mps::{mps_amplitudes, DiagonalMps};
use crate::optimize::{
    optimize_mps, ObjectiveSpec, OptimizerOptions,
};
use crate::qfi::{approx_qfi, exact_qfi, precision_from_qfi, pure_qfi, telescoping_residual};
use crate::ramsey::ramsey_precision;
use crate::symstate::{normalize, SymmetricState};
use crate::util::{derive_seed, uniform_symmetric, uniform_unit, KahanSum};

/// One validation check with a human-readable outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Deterministic batch of normalized random states with N drawn up to
/// `max_n` inclusive.
pub fn seeded_states(count: usize, max_n: usize, seed: u64) -> Vec<SymmetricState> {
    let mut states = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = Pcg64::seed_from_u64(derive_seed(seed, i as u64));
        let n = 1 + (uniform_unit(&mut rng) * max_n as f64) as usize;
        let n = n.min(max_n);
        let raw: Vec<Complex64> = (0..=n)
            .map(|_| {
                Complex64::new(
                    uniform_symmetric(&mut rng, 1.0),
                    uniform_symmetric(&mut rng, 1.0),
                )
            })
            .collect();
        states.push(normalize(&raw).expect("random vector is nonzero"));
    }
    states
}

/// Deterministic batch of iⁿ-gauge states (αₙ = iⁿ rₙ, rₙ real > 0).
pub fn seeded_ipower_states(count: usize, max_n: usize, seed: u64) -> Vec<SymmetricState> {
    let mut states = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = Pcg64::seed_from_u64(derive_seed(seed ^ 0x1b, i as u64));
        let n = 1 + (uniform_unit(&mut rng) * max_n as f64) as usize;
        let n = n.min(max_n);
        let raw: Vec<Complex64> = (0..=n)
            .map(|k| {
                let r = 0.05 + uniform_unit(&mut rng);
                match k % 4 {
                    0 => Complex64::new(r, 0.0),
                    1 => Complex64::new(0.0, r),
                    2 => Complex64::new(-r, 0.0),
                    _ => Complex64::new(0.0, -r),
                }
            })
            .collect();
        states.push(normalize(&raw).expect("random vector is nonzero"));
    }
    states
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// β-completeness: Σ_{l₀,l₁} (β ⁿ_{l₀l₁})² = 1 for every excitation n.
pub fn check_beta_completeness() -> Check {
    let mut worst: f64 = 0.0;
    for &(n_probes, eta) in &[(7usize, 0.35), (64, 0.9), (200, 0.6), (200, 0.97)] {
        for n in [0, n_probes / 3, n_probes / 2, n_probes] {
            let mut total = KahanSum::new();
            for l0 in 0..=n {
                for l1 in 0..=n_probes - n {
                    let b = survival_weight(n, n_probes, l0, l1, eta).expect("valid eta");
                    total.add(b * b);
                }
            }
            worst = worst.max((total.value() - 1.0).abs());
        }
    }
    check(
        "beta-completeness",
        worst < 1e-10,
        format!("max |sum - 1| = {worst:.3e}"),
    )
}

/// Branch probabilities of random states sum to one.
pub fn check_probability_completeness(states: &[SymmetricState]) -> Check {
    let mut worst: f64 = 0.0;
    for (i, s) in states.iter().enumerate() {
        let eta = [0.3, 0.6, 0.9, 1.0][i % 4];
        let n = s.n_probes();
        let mut total = KahanSum::new();
        for l0 in 0..=n {
            for l1 in 0..=n - l0 {
                total.add(branch_probability(s, l0, l1, eta).expect("valid eta"));
            }
        }
        worst = worst.max((total.value() - 1.0).abs());
    }
    check(
        "branch-probability-sum",
        worst < 1e-10,
        format!("{} states, max |sum p - 1| = {worst:.3e}", states.len()),
    )
}

/// Convexity: the exact QFI never exceeds the branch-resolved bound F̃.
pub fn check_convexity(states: &[SymmetricState], etas: &[f64]) -> Check {
    let mut worst: f64 = f64::NEG_INFINITY;
    for s in states {
        for &eta in etas {
            let gap = exact_qfi(s, eta).expect("N within cap") - approx_qfi(s, eta);
            worst = worst.max(gap);
        }
    }
    check(
        "convexity-exact-below-approx",
        worst <= 1e-8,
        format!("max (exact - approx) = {worst:.3e}"),
    )
}

/// Asymptotic loss bound: exact QFI ≤ ηN/(1−η).
pub fn check_loss_bound(states: &[SymmetricState], etas: &[f64]) -> Check {
    let mut worst: f64 = f64::NEG_INFINITY;
    for s in states {
        for &eta in etas.iter().filter(|&&e| e < 1.0) {
            let bound = eta * s.n_probes() as f64 / (1.0 - eta);
            let excess = exact_qfi(s, eta).expect("N within cap") - bound;
            worst = worst.max(excess);
        }
    }
    check(
        "asymptotic-loss-bound",
        worst <= 1e-8,
        format!("max (exact - bound) = {worst:.3e}"),
    )
}

/// Completeness identity Σ p·E_q[n²] = ⟨n̂²⟩ behind the F̃ evaluation.
pub fn check_telescoping(states: &[SymmetricState]) -> Check {
    let mut worst: f64 = 0.0;
    for (i, s) in states.iter().enumerate() {
        let eta = [0.25, 0.55, 0.85][i % 3];
        let scale = (s.n_probes() as f64).powi(2).max(1.0);
        worst = worst.max(telescoping_residual(s, eta) / scale);
    }
    check(
        "second-moment-telescoping",
        worst < 1e-10,
        format!("max scaled residual = {worst:.3e}"),
    )
}

/// Lossless channel: both QFI routes collapse to the pure-state value.
pub fn check_lossless_agreement(states: &[SymmetricState]) -> Check {
    let mut worst: f64 = 0.0;
    for s in states.iter().filter(|s| s.n_probes() <= 20) {
        let f = pure_qfi(s);
        let scale = f.max(1.0);
        worst = worst.max((approx_qfi(s, 1.0) - f).abs() / scale);
        worst = worst.max((exact_qfi(s, 1.0).expect("N within cap") - f).abs() / scale);
    }
    check(
        "lossless-route-agreement",
        worst < 1e-10,
        format!("max relative deviation = {worst:.3e}"),
    )
}

/// Exact QFI is non-decreasing in η (loss at η′ < η factors through η).
pub fn check_channel_monotonicity(states: &[SymmetricState]) -> Check {
    let mut worst: f64 = f64::NEG_INFINITY;
    for s in states.iter().filter(|s| s.n_probes() <= 10) {
        let mut previous = 0.0;
        for &eta in &[0.15, 0.35, 0.55, 0.75, 0.95] {
            let f = exact_qfi(s, eta).expect("N within cap");
            worst = worst.max(previous - f);
            previous = f;
        }
    }
    check(
        "channel-monotonicity",
        worst <= 1e-9,
        format!("max decrease = {worst:.3e}"),
    )
}

/// Measured Ramsey precision never beats the quantum Cramér-Rao bound.
pub fn check_ramsey_against_crb(states: &[SymmetricState], etas: &[f64]) -> Check {
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut used = 0;
    for s in states {
        for &eta in etas {
            let Ok(dp) = ramsey_precision(s, eta) else {
                continue;
            };
            let f = exact_qfi(s, eta).expect("N within cap");
            let Ok(crb) = precision_from_qfi(f, 1) else {
                continue;
            };
            used += 1;
            worst = worst.max(crb - dp);
        }
    }
    check(
        "ramsey-respects-cramer-rao",
        worst <= 1e-9 && used > 0,
        format!("{used} cases, max (CRB - measured) = {worst:.3e}"),
    )
}

/// The MPS amplitude map stays finite and normalized at N = 500, D = 5 with
/// entry moduli spanning [0.1, 10].
pub fn check_mps_stability() -> Check {
    let mut rng = Pcg64::seed_from_u64(0xfeed);
    let mut ok = true;
    let mut detail = String::from("N = 500, D = 5 map finite and normalized");
    for _ in 0..10 {
        let sample = |rng: &mut Pcg64| {
            let mag = 0.1 * (100.0_f64).powf(uniform_unit(rng));
            Complex64::from_polar(mag, uniform_symmetric(rng, std::f64::consts::PI))
        };
        let diag0: Vec<Complex64> = (0..5).map(|_| sample(&mut rng)).collect();
        let diag1: Vec<Complex64> = (0..5).map(|_| sample(&mut rng)).collect();
        let mps = DiagonalMps::new(500, diag0, diag1).expect("valid input");
        match mps_amplitudes(&mps) {
            Ok(state) => {
                let finite = state
                    .amplitudes()
                    .iter()
                    .all(|z| z.re.is_finite() && z.im.is_finite());
                let norm: f64 = state.probabilities().iter().sum();
                if !finite || (norm - 1.0).abs() > 1e-10 {
                    ok = false;
                    detail = format!("non-finite or denormalized output (norm = {norm})");
                }
            }
            Err(e) => {
                ok = false;
                detail = format!("amplitude map failed: {e}");
            }
        }
    }
    check("mps-large-n-stability", ok, detail)
}

/// Best objective does not worsen when the bond dimension grows.
pub fn check_bond_monotonicity() -> Check {
    let objective = ObjectiveSpec::qfi_max(0.85).expect("valid eta");
    let opts = OptimizerOptions {
        starts: 3,
        max_iters: 2000,
        rel_tol: 1e-10,
        seed: 7,
        init_spread: 1.0,
    };
    let mut previous = f64::NEG_INFINITY;
    let mut worst: f64 = f64::NEG_INFINITY;
    for d in 1..=3usize {
        let res = optimize_mps(10, d, &objective, &opts).expect("optimization succeeds");
        worst = worst.max(previous - res.objective_value);
        previous = res.objective_value;
    }
    check(
        "bond-dimension-monotonicity",
        worst <= 1e-9,
        format!("max decrease across D = 1..3 at N = 10: {worst:.3e}"),
    )
}

/// Same seed, same inputs: bitwise identical optimization results.
pub fn check_determinism() -> Check {
    let objective = ObjectiveSpec::ramsey_min(0.9).expect("valid eta");
    let opts = OptimizerOptions {
        starts: 4,
        max_iters: 1500,
        rel_tol: 1e-10,
        seed: 4242,
        init_spread: 1.0,
    };
    let a = optimize_mps(8, 2, &objective, &opts).expect("optimization succeeds");
    let b = optimize_mps(8, 2, &objective, &opts).expect("optimization succeeds");
    let bitwise = a.objective_value.to_bits() == b.objective_value.to_bits()
        && a.state.amplitudes() == b.state.amplitudes()
        && a.iterations == b.iterations;
    check(
        "seeded-determinism",
        bitwise,
        format!(
            "repeat run objective bits {} vs {}",
            a.objective_value.to_bits(),
            b.objective_value.to_bits()
        ),
    )
}

/// Runs the full invariant suite with its standard batch sizes.
pub fn run_validation() -> ValidationReport {
    let wide = seeded_states(100, 200, 11);
    let mid = seeded_states(50, 20, 22);
    let small = seeded_states(20, 8, 33);
    let ipower = seeded_ipower_states(30, 20, 44);
    let etas = [0.3, 0.6, 0.9];

    let checks = vec![
        check_beta_completeness(),
        check_probability_completeness(&wide),
        check_telescoping(&wide),
        check_convexity(&mid, &etas),
        check_loss_bound(&mid, &etas),
        check_lossless_agreement(&mid),
        check_channel_monotonicity(&small),
        check_ramsey_against_crb(&ipower, &etas),
        check_mps_stability(),
        check_bond_monotonicity(),
        check_determinism(),
    ];
    ValidationReport { checks }
}
