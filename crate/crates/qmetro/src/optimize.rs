//! Multi-start derivative-free optimization of probe states.
//!
//! Two search spaces cover the same physics at very different cost: diagonal
//! MPS parameters (2D real or complex numbers) and the full Dicke amplitude
//! vector (N+1 parameters, the brute-force reference). Both are unnormalized;
//! normalization happens inside the objective, which keeps the search space
//! unconstrained. The local method is a Nelder-Mead simplex with the
//! dimension-adaptive coefficients of Gao and Han, restarted around the
//! incumbent while the iteration budget lasts, and every start owns a
//! deterministic random stream derived from (seed, start index), so results
//! are reproducible bit for bit regardless of how starts are scheduled.

use num_complex::Complex64;
use rand_core::SeedableRng;
use rand_pcg::Pcg64;
use rayon::prelude::*;
use thiserror::Error;

use crate::mps::{canonical_form, mps_amplitudes, DiagonalMps};
use crate::qfi::{approx_qfi, precision_from_qfi, ApproxQfiKernel};
use crate::ramsey::ramsey_precision;
use crate::symstate::{normalize, SymmetricState};
use crate::util::{derive_seed, uniform_symmetric, uniform_unit};

/// Direct optimization is quadratic-ish in N per evaluation and linear in N
/// in simplex dimension; beyond this cap use the MPS space.
pub const DIRECT_N_CAP: usize = 150;

/// Kernel caching threshold: below this N the branch weights (~N³/6 floats)
/// are materialized once per optimization run.
const KERNEL_N_CAP: usize = 200;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("objective {kind:?} cannot use gauge {gauge:?}")]
    IncompatibleGauge { kind: ObjectiveKind, gauge: Gauge },

    #[error("eta = {eta} invalid for objective {kind:?}")]
    EtaOutOfRange { kind: ObjectiveKind, eta: f64 },

    #[error("optimizer options invalid: {0}")]
    BadOptions(String),

    #[error("direct optimization capped at N <= {cap}, got N = {n}")]
    DirectCapExceeded { n: usize, cap: usize },

    #[error("all {0} starts failed to produce a finite objective")]
    AllStartsFailed(usize),

    #[error("probe count must be at least 1")]
    NoProbes,

    #[error("bond dimension must be at least 1")]
    ZeroBondDimension,

    #[error("optimum has non-positive Fisher information")]
    ZeroObjective,
}

/// Figure of merit to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// Maximize the approximate QFI F̃.
    ApproxQfiMax,
    /// Minimize the Ramsey uncertainty Δφ.
    RamseyMin,
}

/// Amplitude gauge the search runs in.
///
/// F̃ ignores all amplitude phases, so QFI optimization is restricted to real
/// nonnegative amplitudes. The Ramsey objective wants the collective spin
/// along +y, which the iⁿ·real gauge provides; the full complex
/// parameterization is available as an escape hatch for checking that no
/// further phase freedom helps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gauge {
    RealNonneg,
    IPowerReal,
    FullComplex,
}

/// Validated (objective, transmissivity, gauge) triple.
///
/// With no explicit gauge the search space defaults per parameterization:
/// QFI always uses real nonnegative amplitudes; Ramsey uses the iⁿ·real
/// gauge for the direct space (the optimum is a ground state of a matrix
/// that is real symmetric in that frame, so nothing is lost and the
/// dimension halves) but full complex diagonals for the MPS space, where
/// per-entry phases genuinely enlarge the family at fixed D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveSpec {
    kind: ObjectiveKind,
    eta: f64,
    gauge: Option<Gauge>,
}

impl ObjectiveSpec {
    pub fn new(
        kind: ObjectiveKind,
        eta: f64,
        gauge: Option<Gauge>,
    ) -> Result<Self, OptimizeError> {
        let eta_ok = match kind {
            ObjectiveKind::ApproxQfiMax => (0.0..=1.0).contains(&eta),
            ObjectiveKind::RamseyMin => 0.0 < eta && eta <= 1.0,
        };
        if !eta_ok || !eta.is_finite() {
            return Err(OptimizeError::EtaOutOfRange { kind, eta });
        }
        match (kind, gauge) {
            (ObjectiveKind::ApproxQfiMax, None | Some(Gauge::RealNonneg)) => {}
            (ObjectiveKind::ApproxQfiMax, Some(g)) => {
                return Err(OptimizeError::IncompatibleGauge { kind, gauge: g })
            }
            (ObjectiveKind::RamseyMin, Some(Gauge::RealNonneg)) => {
                // real amplitudes have <Jy> = 0: no signal to optimize
                return Err(OptimizeError::IncompatibleGauge {
                    kind,
                    gauge: Gauge::RealNonneg,
                });
            }
            (ObjectiveKind::RamseyMin, _) => {}
        }
        Ok(Self { kind, eta, gauge })
    }

    pub fn qfi_max(eta: f64) -> Result<Self, OptimizeError> {
        Self::new(ObjectiveKind::ApproxQfiMax, eta, None)
    }

    pub fn ramsey_min(eta: f64) -> Result<Self, OptimizeError> {
        Self::new(ObjectiveKind::RamseyMin, eta, None)
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Gauge of the direct (Dicke amplitude) search space.
    pub fn direct_gauge(&self) -> Gauge {
        match (self.kind, self.gauge) {
            (ObjectiveKind::ApproxQfiMax, _) => Gauge::RealNonneg,
            (ObjectiveKind::RamseyMin, None) => Gauge::IPowerReal,
            (ObjectiveKind::RamseyMin, Some(g)) => g,
        }
    }

    /// Gauge of the MPS search space.
    pub fn mps_gauge(&self) -> Gauge {
        match (self.kind, self.gauge) {
            (ObjectiveKind::ApproxQfiMax, _) => Gauge::RealNonneg,
            (ObjectiveKind::RamseyMin, None) => Gauge::FullComplex,
            (ObjectiveKind::RamseyMin, Some(g)) => g,
        }
    }
}

/// Knobs of the multi-start search. Defaults follow the artifact's own
/// calibration; no optimization method or tolerances are inherited from
/// elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Number of seeded random starts (structured starts run in addition).
    pub starts: usize,
    /// Iteration cap per start, restarts included.
    pub max_iters: u64,
    /// Relative objective spread declaring simplex convergence.
    pub rel_tol: f64,
    pub seed: u64,
    /// Half-width of the uniform initialization interval.
    pub init_spread: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iters: 20_000,
            rel_tol: 1e-10,
            seed: 0,
            init_spread: 1.0,
        }
    }
}

impl OptimizerOptions {
    fn validate(&self) -> Result<(), OptimizeError> {
        if self.starts == 0 {
            return Err(OptimizeError::BadOptions("starts must be >= 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(OptimizeError::BadOptions("rel_tol must be positive".into()));
        }
        if !(self.init_spread > 0.0) {
            return Err(OptimizeError::BadOptions(
                "init_spread must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Winning parameterization of an optimization run.
#[derive(Debug, Clone, PartialEq)]
pub enum BestParams {
    /// Canonical-form MPS.
    Mps(DiagonalMps),
    /// Direct Dicke-amplitude optimization.
    Direct(SymmetricState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub params: BestParams,
    /// Optimal state, gauge-enforced (real nonnegative amplitudes for QFI).
    pub state: SymmetricState,
    /// F̃ for the QFI objective, Δφ for Ramsey.
    pub objective_value: f64,
    /// 1/√F̃ for the QFI objective, equal to `objective_value` for Ramsey.
    pub delta_phi: f64,
    pub converged: bool,
    /// Simplex iterations spent by the winning start.
    pub iterations: u64,
    pub seed: u64,
}

/// Result plus the raw parameter vector of the winner; the parameters feed
/// zero-pair embeddings and cross-space warm starts inside the crate.
pub(crate) struct OptimizationOutcome {
    pub result: OptimizationResult,
    pub raw_params: Vec<f64>,
}

// ---------------------------------------------------------------------------
// parameter spaces and objective evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum ParamSpace {
    /// [a_1..a_D, b_1..b_D], real entries.
    MpsReal { bond_dim: usize },
    /// [Re a.., Im a.., Re b.., Im b..].
    MpsComplex { bond_dim: usize },
    /// [r_0..r_N], real entries.
    DirectReal,
    /// [Re α.., Im α..].
    DirectComplex,
}

impl ParamSpace {
    fn dim(&self, n_probes: usize) -> usize {
        match *self {
            ParamSpace::MpsReal { bond_dim } => 2 * bond_dim,
            ParamSpace::MpsComplex { bond_dim } => 4 * bond_dim,
            ParamSpace::DirectReal => n_probes + 1,
            ParamSpace::DirectComplex => 2 * (n_probes + 1),
        }
    }
}

fn space_for(objective: &ObjectiveSpec, bond_dim: Option<usize>) -> ParamSpace {
    match bond_dim {
        Some(d) => match objective.mps_gauge() {
            Gauge::FullComplex => ParamSpace::MpsComplex { bond_dim: d },
            _ => ParamSpace::MpsReal { bond_dim: d },
        },
        None => match objective.direct_gauge() {
            Gauge::FullComplex => ParamSpace::DirectComplex,
            _ => ParamSpace::DirectReal,
        },
    }
}

/// Multiplies amplitudes by iⁿ; exact quadrant rotations.
fn rotate_i_power(amplitudes: &[Complex64]) -> Vec<Complex64> {
    amplitudes
        .iter()
        .enumerate()
        .map(|(n, z)| match n % 4 {
            0 => *z,
            1 => Complex64::new(-z.im, z.re),
            2 => Complex64::new(-z.re, -z.im),
            _ => Complex64::new(z.im, -z.re),
        })
        .collect()
}

fn mps_from_params(space: ParamSpace, n_probes: usize, params: &[f64]) -> Option<DiagonalMps> {
    match space {
        ParamSpace::MpsReal { bond_dim } => {
            let diag0 = params[..bond_dim]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect();
            let diag1 = params[bond_dim..2 * bond_dim]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect();
            DiagonalMps::new(n_probes, diag0, diag1).ok()
        }
        ParamSpace::MpsComplex { bond_dim } => {
            let diag0 = (0..bond_dim)
                .map(|i| Complex64::new(params[i], params[bond_dim + i]))
                .collect();
            let diag1 = (0..bond_dim)
                .map(|i| Complex64::new(params[2 * bond_dim + i], params[3 * bond_dim + i]))
                .collect();
            DiagonalMps::new(n_probes, diag0, diag1).ok()
        }
        _ => None,
    }
}

/// State induced by a parameter vector, in the gauge of the objective.
fn state_from_params(
    space: ParamSpace,
    objective: &ObjectiveSpec,
    n_probes: usize,
    params: &[f64],
) -> Option<SymmetricState> {
    match space {
        ParamSpace::MpsReal { .. } | ParamSpace::MpsComplex { .. } => {
            let mps = mps_from_params(space, n_probes, params)?;
            let state = mps_amplitudes(&mps).ok()?;
            if matches!(space, ParamSpace::MpsReal { .. })
                && objective.mps_gauge() == Gauge::IPowerReal
            {
                normalize(&rotate_i_power(state.amplitudes())).ok()
            } else {
                Some(state)
            }
        }
        ParamSpace::DirectReal => {
            let raw: Vec<Complex64> = if objective.direct_gauge() == Gauge::IPowerReal {
                params
                    .iter()
                    .enumerate()
                    .map(|(n, &r)| match n % 4 {
                        0 => Complex64::new(r, 0.0),
                        1 => Complex64::new(0.0, r),
                        2 => Complex64::new(-r, 0.0),
                        _ => Complex64::new(0.0, -r),
                    })
                    .collect()
            } else {
                params.iter().map(|&r| Complex64::new(r, 0.0)).collect()
            };
            normalize(&raw).ok()
        }
        ParamSpace::DirectComplex => {
            let half = params.len() / 2;
            let raw: Vec<Complex64> = (0..half)
                .map(|i| Complex64::new(params[i], params[half + i]))
                .collect();
            normalize(&raw).ok()
        }
    }
}

/// Objective evaluator shared by all starts of one run.
struct Objective<'a> {
    spec: &'a ObjectiveSpec,
    n_probes: usize,
    space: ParamSpace,
    kernel: Option<ApproxQfiKernel>,
}

impl<'a> Objective<'a> {
    fn new(spec: &'a ObjectiveSpec, n_probes: usize, space: ParamSpace) -> Self {
        let kernel = match spec.kind() {
            ObjectiveKind::ApproxQfiMax if n_probes <= KERNEL_N_CAP => {
                Some(ApproxQfiKernel::new(n_probes, spec.eta()))
            }
            _ => None,
        };
        Self {
            spec,
            n_probes,
            space,
            kernel,
        }
    }

    fn qfi_from_probabilities(&self, u: &[f64]) -> f64 {
        match &self.kernel {
            Some(k) => k.eval(u),
            None => {
                // streaming path for large N; same arithmetic as the kernel
                let state = normalize(
                    &u.iter()
                        .map(|&p| Complex64::new(p.max(0.0).sqrt(), 0.0))
                        .collect::<Vec<_>>(),
                )
                .expect("u has positive mass");
                approx_qfi(&state, self.spec.eta())
            }
        }
    }

    /// Value to minimize; +inf encodes degenerate or infeasible parameters.
    fn eval(&self, params: &[f64]) -> f64 {
        match self.spec.kind() {
            ObjectiveKind::ApproxQfiMax => {
                let u = match self.space {
                    ParamSpace::DirectReal => {
                        let mass: f64 = params.iter().map(|r| r * r).sum();
                        if !(mass > 0.0) || !mass.is_finite() {
                            return f64::INFINITY;
                        }
                        let inv = 1.0 / mass;
                        params.iter().map(|r| r * r * inv).collect::<Vec<f64>>()
                    }
                    _ => match state_from_params(self.space, self.spec, self.n_probes, params)
                    {
                        Some(s) => s.probabilities(),
                        None => return f64::INFINITY,
                    },
                };
                -self.qfi_from_probabilities(&u)
            }
            ObjectiveKind::RamseyMin => {
                let Some(state) =
                    state_from_params(self.space, self.spec, self.n_probes, params)
                else {
                    return f64::INFINITY;
                };
                match ramsey_precision(&state, self.spec.eta()) {
                    Ok(dp) => dp,
                    Err(_) => f64::INFINITY,
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Nelder-Mead simplex
// ---------------------------------------------------------------------------

struct NmRun {
    x: Vec<f64>,
    value: f64,
    iterations: u64,
    converged: bool,
}

/// Simplex minimization with Gao-Han adaptive coefficients and incumbent
/// restarts. Deterministic given (f, x0).
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iters: u64,
    rel_tol: f64,
) -> NmRun {
    let dim = x0.len();
    let dimf = dim as f64;
    let (alpha, gamma, rho, sigma) = if dim >= 2 {
        (1.0, 1.0 + 2.0 / dimf, 0.75 - 0.5 / dimf, 1.0 - 1.0 / dimf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut best_x = x0.to_vec();
    let mut best_value = f (x0);
    let mut iterations: u64 = 0;
    let mut converged = false;
    let mut restart_step = step;

    'restarts: loop {
        // simplex around the incumbent
        let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        points.push(best_x.clone());
        for i in 0..dim {
            let mut v = best_x.clone();
            let h = (0.05 * v[i].abs()).max(0.1 * restart_step);
            v[i] += h;
            points.push(v);
        }
        let mut values: Vec<f64> = points.iter().map(|p| f(p)).collect();
        // order[0] is best
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let mut sum: Vec<f64> = (0..dim)
            .map(|k| points.iter().map(|p| p[k]).sum())
            .collect();

        let value_at_restart = best_value;
        loop {
            if iterations >= max_iters {
                break 'restarts;
            }
            iterations += 1;

            let best = order[0];
            let worst = order[dim];
            let second_worst = order[dim - 1];
            let spread = values[worst] - values[best];
            if spread.is_finite()
                && spread <= rel_tol * (values[best].abs() + rel_tol)
            {
                converged = true;
                break;
            }

            // centroid of all but the worst
            let centroid: Vec<f64> = (0..dim)
                .map(|k| (sum[k] - points[worst][k]) / dimf)
                .collect();
            let reflect: Vec<f64> = (0..dim)
                .map(|k| centroid[k] + alpha * (centroid[k] - points[worst][k]))
                .collect();
            let f_reflect = f(&reflect);

            enum Move {
                Replace(Vec<f64>, f64),
                Shrink,
            }
            let action = if f_reflect < values[order[0]] {
                let expand: Vec<f64> = (0..dim)
                    .map(|k| centroid[k] + gamma * (centroid[k] - points[worst][k]))
                    .collect();
                let f_expand = f(&expand);
                if f_expand < f_reflect {
                    Move::Replace(expand, f_expand)
                } else {
                    Move::Replace(reflect, f_reflect)
                }
            } else if f_reflect < values[second_worst] {
                Move::Replace(reflect, f_reflect)
            } else {
                let (contract, f_contract) = if f_reflect < values[worst] {
                    let c: Vec<f64> = (0..dim)
                        .map(|k| centroid[k] + rho * (reflect[k] - centroid[k]))
                        .collect();
                    let fc = f(&c);
                    if fc <= f_reflect {
                        (Some(c), fc)
                    } else {
                        (None, fc)
                    }
                } else {
                    let c: Vec<f64> = (0..dim)
                        .map(|k| centroid[k] + rho * (points[worst][k] - centroid[k]))
                        .collect();
                    let fc = f(&c);
                    if fc < values[worst] {
                        (Some(c), fc)
                    } else {
                        (None, fc)
                    }
                };
                match contract {
                    Some(c) => Move::Replace(c, f_contract),
                    None => Move::Shrink,
                }
            };

            match action {
                Move::Replace(x, value) => {
                    for k in 0..dim {
                        sum[k] += x[k] - points[worst][k];
                    }
                    points[worst] = x;
                    values[worst] = value;
                    // re-establish order by sifting the former worst down
                    let mut pos = dim;
                    while pos > 0 && values[order[pos]] < values[order[pos - 1]] {
                        order.swap(pos, pos - 1);
                        pos -= 1;
                    }
                }
                Move::Shrink => {
                    let anchor = points[order[0]].clone();
                    for &idx in &order[1..] {
                        for k in 0..dim {
                            points[idx][k] = anchor[k] + sigma * (points[idx][k] - anchor[k]);
                        }
                        values[idx] = f(&points[idx]);
                    }
                    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
                    for k in 0..dim {
                        sum[k] = points.iter().map(|p| p[k]).sum();
                    }
                }
            }
        }

        let incumbent = order[0];
        if values[incumbent] < best_value {
            best_value = values[incumbent];
            best_x = points[incumbent].clone();
        }
        if iterations >= max_iters || !best_value.is_finite() {
            break;
        }
        // restart while the simplex refresh keeps paying off
        let improvement = value_at_restart - best_value;
        if improvement <= 100.0 * rel_tol * (best_value.abs() + rel_tol) {
            break;
        }
        restart_step = (restart_step * 0.3).max(1e-3 * step);
    }

    NmRun {
        x: best_x,
        value: best_value,
        iterations,
        converged,
    }
}

// ---------------------------------------------------------------------------
// multi-start driver
// ---------------------------------------------------------------------------

/// Diagonal magnitudes 1.0 down to 0.3; optimal diagonals pair large against
/// small, so the complementary arrangement is a natural start.
fn complementary_profile(bond_dim: usize) -> Vec<f64> {
    (0..bond_dim)
        .map(|i| {
            if bond_dim == 1 {
                1.0
            } else {
                1.0 - 0.7 * i as f64 / (bond_dim - 1) as f64
            }
        })
        .collect()
}

fn structured_starts(space: ParamSpace, objective: &ObjectiveSpec, n_probes: usize) -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    match space {
        ParamSpace::MpsReal { bond_dim } => {
            // all-equal diagonals: the product (coherent) state
            starts.push(vec![1.0; 2 * bond_dim]);
            if bond_dim >= 2 {
                if objective.kind() == ObjectiveKind::ApproxQfiMax {
                    // N00N-like extremes
                    let mut v = vec![0.0; 2 * bond_dim];
                    v[0] = 1.0;
                    v[bond_dim + 1] = 1.0;
                    starts.push(v);
                }
                // complementary magnitude ladder
                let profile = complementary_profile(bond_dim);
                let mut v = vec![0.0; 2 * bond_dim];
                for i in 0..bond_dim {
                    v[i] = profile[i];
                    v[bond_dim + i] = profile[bond_dim - 1 - i];
                }
                starts.push(v);
            }
        }
        ParamSpace::MpsComplex { bond_dim } => {
            // a_d = i, b_d = 1: the bright +y direction
            let mut v = vec![0.0; 4 * bond_dim];
            for i in 0..bond_dim {
                v[bond_dim + i] = 1.0;
                v[2 * bond_dim + i] = 1.0;
            }
            starts.push(v);
            if bond_dim >= 2 {
                // complementary magnitudes in the bright gauge
                let profile = complementary_profile(bond_dim);
                let mut v = vec![0.0; 4 * bond_dim];
                for i in 0..bond_dim {
                    v[bond_dim + i] = profile[i];
                    v[2 * bond_dim + i] = profile[bond_dim - 1 - i];
                }
                starts.push(v);
                // phase-spread pairs a_d = i e^{i kappa_d}: squeezing comes
                // from interference of e^{i kappa n} components
                let mut v = vec![0.0; 4 * bond_dim];
                for i in 0..bond_dim {
                    let kappa = 0.5 * (i as f64 - 0.5 * (bond_dim - 1) as f64);
                    let a = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, kappa);
                    v[i] = a.re;
                    v[bond_dim + i] = a.im;
                    v[2 * bond_dim + i] = 1.0;
                }
                starts.push(v);
            }
        }
        ParamSpace::DirectReal => {
            let product: Vec<f64> = (0..=n_probes)
                .map(|n| {
                    (0.5 * crate::symstate::log_binomial(n_probes, n).expect("n <= N")
                        - 0.5 * n_probes as f64 * std::f64::consts::LN_2)
                        .exp()
                })
                .collect();
            starts.push(product);
            if objective.kind() == ObjectiveKind::ApproxQfiMax {
                let mut noon = vec![0.0; n_probes + 1];
                noon[0] = 1.0;
                noon[n_probes] = 1.0;
                starts.push(noon);
            }
        }
        ParamSpace::DirectComplex => {
            let mut v = vec![0.0; 2 * (n_probes + 1)];
            for n in 0..=n_probes {
                let mag = (0.5 * crate::symstate::log_binomial(n_probes, n).expect("n <= N")
                    - 0.5 * n_probes as f64 * std::f64::consts::LN_2)
                    .exp();
                match n % 4 {
                    0 => v[n] = mag,
                    1 => v[n_probes + 1 + n] = mag,
                    2 => v[n] = -mag,
                    _ => v[n_probes + 1 + n] = -mag,
                }
            }
            starts.push(v);
        }
    }
    starts
}

fn random_start(
    space: ParamSpace,
    objective: &ObjectiveSpec,
    dim: usize,
    seed: u64,
    spread: f64,
) -> Vec<f64> {
    let mut rng = Pcg64::seed_from_u64(seed);
    match (space, objective.kind()) {
        // positive amplitudes guarantee a nonzero signal slope
        (ParamSpace::DirectReal, ObjectiveKind::RamseyMin) => (0..dim)
            .map(|_| 0.05 + uniform_unit(&mut rng) * spread)
            .collect(),
        _ => (0..dim)
            .map(|_| uniform_symmetric(&mut rng, spread))
            .collect(),
    }
}

struct StartOutcome {
    index: usize,
    run: NmRun,
}

/// Seeded differential-evolution stage for the multimodal complex-diagonal
/// space: phase interference patterns sit in basins that simplex descent
/// from smooth starts does not reach. Classic rand/1/bin scheme with the
/// provided seeds injected into the initial population; returns the best
/// member for polishing.
fn differential_evolution(
    objective: &Objective<'_>,
    dim: usize,
    seeds: &[Vec<f64>],
    opts: &OptimizerOptions,
) -> Option<Vec<f64>> {
    const POPULATION: usize = 30;
    const MAX_GENERATIONS: usize = 6000;
    const STAGNATION_LIMIT: usize = 900;
    const WEIGHT: f64 = 0.7;
    const CROSSOVER: f64 = 0.9;

    let mut rng = Pcg64::seed_from_u64(derive_seed(opts.seed, 0xde));
    let mut population: Vec<Vec<f64>> = Vec::with_capacity(POPULATION);
    for s in seeds.iter().take(POPULATION / 2) {
        population.push(s.clone());
    }
    while population.len() < POPULATION {
        population.push(
            (0..dim)
                .map(|_| uniform_symmetric(&mut rng, opts.init_spread))
                .collect(),
        );
    }
    let mut values: Vec<f64> = population.iter().map(|x| objective.eval(x)).collect();

    let mut best = 0;
    for i in 1..POPULATION {
        if values[i] < values[best] {
            best = i;
        }
    }
    let mut since_improvement = 0;
    for _ in 0..MAX_GENERATIONS {
        for i in 0..POPULATION {
            let pick = |rng: &mut Pcg64, exclude: &[usize]| loop {
                let r = (uniform_unit(rng) * POPULATION as f64) as usize % POPULATION;
                if !exclude.contains(&r) {
                    return r;
                }
            };
            let r1 = pick(&mut rng, &[i]);
            let r2 = pick(&mut rng, &[i, r1]);
            let r3 = pick(&mut rng, &[i, r1, r2]);
            let forced = (uniform_unit(&mut rng) * dim as f64) as usize % dim;
            let trial: Vec<f64> = (0..dim)
                .map(|k| {
                    if k == forced || uniform_unit(&mut rng) < CROSSOVER {
                        population[r1][k] + WEIGHT * (population[r2][k] - population[r3][k])
                    } else {
                        population[i][k]
                    }
                })
                .collect();
            let value = objective.eval(&trial);
            if value < values[i] {
                population[i] = trial;
                values[i] = value;
                if value < values[best] {
                    best = i;
                    since_improvement = 0;
                }
            }
        }
        since_improvement += 1;
        if since_improvement > STAGNATION_LIMIT {
            break;
        }
    }
    values[best].is_finite().then(|| population[best].clone())
}

fn run_multistart(
    objective: &Objective<'_>,
    opts: &OptimizerOptions,
    warm: &[Vec<f64>],
) -> Result<StartOutcome, OptimizeError> {
    opts.validate()?;
    let dim = objective.space.dim(objective.n_probes);
    let mut starts = structured_starts(objective.space, objective.spec, objective.n_probes);
    for i in 0..opts.starts {
        starts.push(random_start(
            objective.space,
            objective.spec,
            dim,
            derive_seed(opts.seed, i as u64),
            opts.init_spread,
        ));
    }
    starts.extend(warm.iter().cloned());
    // a single diagonal pair has no interference structure to hunt for
    if matches!(objective.space, ParamSpace::MpsComplex { bond_dim } if bond_dim >= 2) {
        if let Some(incumbent) = differential_evolution(objective, dim, &starts, opts) {
            starts.push(incumbent);
        }
    }

    let outcomes: Vec<StartOutcome> = starts
        .into_par_iter()
        .enumerate()
        .map(|(index, x0)| {
            let run = nelder_mead(
                &|x| objective.eval(x),
                &x0,
                opts.init_spread,
                opts.max_iters,
                opts.rel_tol,
            );
            StartOutcome { index, run }
        })
        .collect();

    let n_starts = outcomes.len();
    let best = outcomes
        .into_iter()
        .min_by(|a, b| {
            a.run
                .value
                .total_cmp(&b.run.value)
                .then(a.index.cmp(&b.index))
        })
        .expect("at least one start");
    if !best.run.value.is_finite() {
        return Err(OptimizeError::AllStartsFailed(n_starts));
    }
    Ok(best)
}

fn finish(
    objective: &Objective<'_>,
    opts: &OptimizerOptions,
    best: StartOutcome,
) -> Result<OptimizationOutcome, OptimizeError> {
    let spec = objective.spec;
    let state = state_from_params(objective.space, spec, objective.n_probes, &best.run.x)
        .expect("winning start produced a valid state");

    let (params, state, objective_value, delta_phi) = match spec.kind() {
        ObjectiveKind::ApproxQfiMax => {
            let state = state.rephased_nonnegative();
            let value = approx_qfi(&state, spec.eta());
            let delta = precision_from_qfi(value, 1)
                .map_err(|_| OptimizeError::ZeroObjective)?;
            let params = match objective.space {
                ParamSpace::MpsReal { .. } | ParamSpace::MpsComplex { .. } => {
                    let mps = mps_from_params(objective.space, objective.n_probes, &best.run.x)
                        .expect("winning start produced a valid MPS");
                    BestParams::Mps(canonical_form(&mps).expect("winner is nondegenerate"))
                }
                _ => BestParams::Direct(state.clone()),
            };
            (params, state, value, delta)
        }
        ObjectiveKind::RamseyMin => {
            let value =
                ramsey_precision(&state, spec.eta()).expect("winning start has a signal");
            let params = match objective.space {
                ParamSpace::MpsReal { .. } | ParamSpace::MpsComplex { .. } => {
                    let mut mps =
                        mps_from_params(objective.space, objective.n_probes, &best.run.x)
                            .expect("winning start produced a valid MPS");
                    if objective.space
                        == (ParamSpace::MpsReal {
                            bond_dim: mps.bond_dim(),
                        })
                        && spec.mps_gauge() == Gauge::IPowerReal
                    {
                        // report the MPS that actually induces the i^n state
                        let diag0 = mps
                            .diag0()
                            .iter()
                            .map(|a| Complex64::new(-a.im, a.re))
                            .collect();
                        mps = DiagonalMps::new(objective.n_probes, diag0, mps.diag1().to_vec())
                            .expect("rotation preserves validity");
                    }
                    BestParams::Mps(canonical_form(&mps).expect("winner is nondegenerate"))
                }
                _ => BestParams::Direct(state.clone()),
            };
            (params, state, value, value)
        }
    };

    Ok(OptimizationOutcome {
        result: OptimizationResult {
            params,
            state,
            objective_value,
            delta_phi,
            converged: best.run.converged,
            iterations: best.run.iterations,
            seed: opts.seed,
        },
        raw_params: best.run.x,
    })
}

fn optimize_mps_core(
    n_probes: usize,
    bond_dim: usize,
    objective: &ObjectiveSpec,
    opts: &OptimizerOptions,
    warm: &[Vec<f64>],
) -> Result<OptimizationOutcome, OptimizeError> {
    let space = space_for(objective, Some(bond_dim));
    let obj = Objective::new(objective, n_probes, space);
    let best = run_multistart(&obj, opts, warm)?;
    finish(&obj, opts, best)
}

pub(crate) fn optimize_mps_outcome(
    n_probes: usize,
    bond_dim: usize,
    objective: &ObjectiveSpec,
    opts: &OptimizerOptions,
    warm: &[Vec<f64>],
) -> Result<OptimizationOutcome, OptimizeError> {
    if n_probes == 0 {
        return Err(OptimizeError::NoProbes);
    }
    if bond_dim == 0 {
        return Err(OptimizeError::ZeroBondDimension);
    }
    let mut warm = warm.to_vec();
    if warm.is_empty() && bond_dim > 1 {
        // ladder initialization: solve the cheaper bond dimensions first and
        // embed the incumbent upward; keeps the search out of the local
        // minima that plague a cold start in the full space
        let ladder_opts = OptimizerOptions {
            starts: (opts.starts / 2).max(2),
            ..*opts
        };
        let mut previous: Option<Vec<f64>> = None;
        for d in 1..bond_dim {
            let rung_warm: Vec<Vec<f64>> = previous
                .as_ref()
                .map(|p| vec![embed_params(d - 1, objective.mps_gauge(), p)])
                .unwrap_or_default();
            match optimize_mps_core(n_probes, d, objective, &ladder_opts, &rung_warm) {
                Ok(outcome) => previous = Some(outcome.raw_params),
                Err(_) => break,
            }
        }
        if let Some(p) = previous {
            warm.push(embed_params(bond_dim - 1, objective.mps_gauge(), &p));
        }
    }
    optimize_mps_core(n_probes, bond_dim, objective, opts, &warm)
}

pub(crate) fn optimize_direct_outcome(
    n_probes: usize,
    objective: &ObjectiveSpec,
    opts: &OptimizerOptions,
    warm: &[Vec<f64>],
) -> Result<OptimizationOutcome, OptimizeError> {
    if n_probes == 0 {
        return Err(OptimizeError::NoProbes);
    }
    if n_probes > DIRECT_N_CAP {
        return Err(OptimizeError::DirectCapExceeded {
            n: n_probes,
            cap: DIRECT_N_CAP,
        });
    }
    let space = space_for(objective, None);
    let obj = Objective::new(objective, n_probes, space);
    let best = run_multistart(&obj, opts, warm)?;
    finish(&obj, opts, best)
}

/// Optimizes a bond-dimension-D diagonal MPS for the given objective.
pub fn optimize_mps(
    n_probes: usize,
    bond_dim: usize,
    objective: &ObjectiveSpec,
    opts: &OptimizerOptions,
) -> Result<OptimizationResult, OptimizeError> {
    optimize_mps_outcome(n_probes, bond_dim, objective, opts, &[]).map(|o| o.result)
}

/// Brute-force reference: optimizes all N+1 Dicke amplitudes directly.
pub fn optimize_direct(
    n_probes: usize,
    objective: &ObjectiveSpec,
    opts: &OptimizerOptions,
) -> Result<OptimizationResult, OptimizeError> {
    optimize_direct_outcome(n_probes, objective, opts, &[]).map(|o| o.result)
}

/// Direct-space warm-start parameters from a state found elsewhere. For the
/// iⁿ·real gauge the state is rotated into the iⁿ frame and phase aligned
/// before taking real parts, so states that are only globally rotated away
/// from that gauge project without loss.
pub(crate) fn direct_params_from_state(state: &SymmetricState, gauge: Gauge) -> Vec<f64> {
    match gauge {
        Gauge::RealNonneg => state.amplitudes().iter().map(|a| a.norm()).collect(),
        Gauge::IPowerReal => {
            let framed: Vec<Complex64> = state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(n, a)| match n % 4 {
                    0 => *a,
                    1 => Complex64::new(a.im, -a.re),
                    2 => -*a,
                    _ => Complex64::new(-a.im, a.re),
                })
                .collect();
            let second: Complex64 = framed.iter().map(|z| z * z).sum();
            let align = if second.norm() > 0.0 {
                Complex64::from_polar(1.0, -0.5 * second.arg())
            } else {
                Complex64::new(1.0, 0.0)
            };
            framed.iter().map(|z| (z * align).re).collect()
        }
        Gauge::FullComplex => {
            let mut v: Vec<f64> = state.amplitudes().iter().map(|a| a.re).collect();
            v.extend(state.amplitudes().iter().map(|a| a.im));
            v
        }
    }
}

/// Zero-pair embedding of MPS parameters from bond dimension D to D+1.
pub(crate) fn embed_params(space_dim_d: usize, gauge: Gauge, params: &[f64]) -> Vec<f64> {
    let blocks = match gauge {
        Gauge::FullComplex => 4,
        _ => 2,
    };
    debug_assert_eq!(params.len(), blocks * space_dim_d);
    let mut out = Vec::with_capacity(blocks * (space_dim_d + 1));
    for b in 0..blocks {
        out.extend_from_slice(&params[b * space_dim_d..(b + 1) * space_dim_d]);
        out.push(0.0);
    }
    out
}

/// One rung of the bond-dimension ladder.
#[derive(Debug, Clone)]
pub struct BondDimPoint {
    pub bond_dim: usize,
    pub delta_phi: f64,
    /// (Δφ_MPS − Δφ_direct)/Δφ_direct.
    pub relative_gap: f64,
    pub result: OptimizationResult,
}

/// Outcome of the minimal-bond-dimension search; `d_star` is `None` when the
/// cap is reached without hitting the threshold (a report, not an error).
#[derive(Debug, Clone)]
pub struct MinBondDimReport {
    pub d_star: Option<usize>,
    pub threshold: f64,
    pub d_cap: usize,
    pub direct: OptimizationResult,
    pub ladder: Vec<BondDimPoint>,
}

/// Smallest bond dimension whose optimal precision is within `threshold`
/// (relative) of the direct optimization.
///
/// The MPS ladder runs first, ascending D = 1, 2, ... with each rung warm
/// started by the zero-pair embedding of the previous optimum. The direct
/// reference is then optimized with the best rung projected in as an extra
/// start: a cold high-dimensional simplex can stall above the MPS values,
/// which would fake small gaps and understate D*. Probing pauses once the
/// rung values plateau well below the threshold scale, resuming only if the
/// ladder has not met the threshold by then.
pub fn minimal_bond_dimension(
    n_probes: usize,
    objective: &ObjectiveSpec,
    threshold: f64,
    d_cap: usize,
    opts: &OptimizerOptions,
) -> Result<MinBondDimReport, OptimizeError> {
    if d_cap == 0 {
        return Err(OptimizeError::BadOptions("d_cap must be >= 1".into()));
    }
    let plateau = 0.1 * threshold.max(1e-5);
    let mut outcomes: Vec<OptimizationOutcome> = Vec::new();
    let mut previous: Option<Vec<f64>> = None;
    let probe = |outcomes: &mut Vec<OptimizationOutcome>,
                     previous: &mut Option<Vec<f64>>|
     -> Result<(), OptimizeError> {
        let bond_dim = outcomes.len() + 1;
        let warm: Vec<Vec<f64>> = previous
            .as_ref()
            .map(|p| vec![embed_params(bond_dim - 1, objective.mps_gauge(), p)])
            .unwrap_or_default();
        let outcome = optimize_mps_outcome(n_probes, bond_dim, objective, opts, &warm)?;
        *previous = Some(outcome.raw_params.clone());
        outcomes.push(outcome);
        Ok(())
    };

    // phase 1: ladder until the values flatten out or the cap is reached
    while outcomes.len() < d_cap {
        probe(&mut outcomes, &mut previous)?;
        let k = outcomes.len();
        if k >= 3 {
            let improvement = |i: usize| {
                let (a, b) = (
                    outcomes[i - 1].result.delta_phi,
                    outcomes[i].result.delta_phi,
                );
                (a - b) / a
            };
            if improvement(k - 1) < plateau && improvement(k - 2) < plateau {
                break;
            }
        }
    }

    // phase 2: direct reference, anchored at or below the best rung
    let best_state = outcomes
        .iter()
        .min_by(|a, b| a.result.delta_phi.total_cmp(&b.result.delta_phi))
        .map(|o| o.result.state.clone())
        .expect("at least one rung");
    let warm = vec![direct_params_from_state(
        &best_state,
        objective.direct_gauge(),
    )];
    let direct = optimize_direct_outcome(n_probes, objective, opts, &warm)?.result;

    // phase 3: first rung within threshold wins; resume probing if needed
    let gap_of = |outcome: &OptimizationOutcome| {
        (outcome.result.delta_phi - direct.delta_phi) / direct.delta_phi
    };
    let mut d_star = outcomes
        .iter()
        .position(|o| gap_of(o) <= threshold)
        .map(|i| i + 1);
    while d_star.is_none() && outcomes.len() < d_cap {
        probe(&mut outcomes, &mut previous)?;
        if gap_of(outcomes.last().expect("just pushed")) <= threshold {
            d_star = Some(outcomes.len());
        }
    }

    let keep = match d_star {
        Some(d) => d,
        None => outcomes.len(),
    };
    let ladder: Vec<BondDimPoint> = outcomes
        .iter()
        .take(keep)
        .enumerate()
        .map(|(i, o)| BondDimPoint {
            bond_dim: i + 1,
            delta_phi: o.result.delta_phi,
            relative_gap: gap_of(o),
            result: o.result.clone(),
        })
        .collect();
    Ok(MinBondDimReport {
        d_star,
        threshold,
        d_cap,
        direct,
        ladder,
    })
}
