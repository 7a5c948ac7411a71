//! Diagonal symmetric matrix product states.
//!
//! A site-independent MPS with two diagonal D×D matrices A₀ = diag(a_d),
//! A₁ = diag(b_d) describes the permutation-symmetric state
//!
//!   ∣Ψ⟩ ∝ Σₙ √C(N,n) · Σ_d a_dⁿ b_d^{N−n} ∣n, N−n⟩,
//!
//! parameterized by 2D complex numbers instead of N+1. The diagonal choice
//! makes the matrices commute, which is what permutation symmetry requires.
//! The map to Dicke amplitudes is evaluated per diagonal entry in
//! log-magnitude + phase form and the D terms are recombined after rescaling
//! by the largest log-magnitude, so N = 500 with entry moduli spanning
//! [0.1, 10] stays finite.
//!
//! Endpoint convention: 0⁰ ≡ 1, so an entry a_d = 0 contributes only at
//! n = 0 and b_d = 0 only at n = N. This is the convention under which
//! a = (1, 0), b = (0, 1) produces the N00N state, and under which appending
//! an all-zero pair leaves the amplitudes untouched (the nesting D ↪ D+1
//! used by the optimizer).

use num_complex::Complex64;
use thiserror::Error;

use crate::symstate::{log_binomial, normalize, SymmetricState};

/// Relative level below which a recombined amplitude is treated as an exact
/// cancellation and set to zero instead of keeping rounding residue.
const CANCEL_EPS: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum MpsError {
    #[error("bond dimension must be at least 1")]
    ZeroBondDimension,

    #[error("diagonals must share the bond dimension: |diag0| = {len0}, |diag1| = {len1}")]
    DiagonalLength { len0: usize, len1: usize },

    #[error("probe count must be at least 1")]
    NoProbes,

    #[error("matrix entries must be finite")]
    NonFinite,

    /// Every induced amplitude vanishes (all-zero diagonals or an exact
    /// cancellation).
    #[error("MPS induces an identically zero amplitude vector")]
    DegenerateMps,

    #[error("cannot parse MPS record: {0}")]
    Parse(String),
}

/// Diagonal symmetric MPS: bond dimension D and the diagonals of A₀, A₁.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMps {
    n_probes: usize,
    diag0: Vec<Complex64>,
    diag1: Vec<Complex64>,
}

impl DiagonalMps {
    pub fn new(
        n_probes: usize,
        diag0: Vec<Complex64>,
        diag1: Vec<Complex64>,
    ) -> Result<Self, MpsError> {
        if n_probes == 0 {
            return Err(MpsError::NoProbes);
        }
        if diag0.is_empty() {
            return Err(MpsError::ZeroBondDimension);
        }
        if diag0.len() != diag1.len() {
            return Err(MpsError::DiagonalLength {
                len0: diag0.len(),
                len1: diag1.len(),
            });
        }
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&diag0) || !finite(&diag1) {
            return Err(MpsError::NonFinite);
        }
        Ok(Self {
            n_probes,
            diag0,
            diag1,
        })
    }

    pub fn n_probes(&self) -> usize {
        self.n_probes
    }

    pub fn bond_dim(&self) -> usize {
        self.diag0.len()
    }

    /// Diagonal of A₀ (the a_d).
    pub fn diag0(&self) -> &[Complex64] {
        &self.diag0
    }

    /// Diagonal of A₁ (the b_d).
    pub fn diag1(&self) -> &[Complex64] {
        &self.diag1
    }

    /// Same state embedded at bond dimension D + extra by appending
    /// all-zero pairs, which contribute to no amplitude.
    pub fn embedded(&self, extra: usize) -> DiagonalMps {
        let mut diag0 = self.diag0.clone();
        let mut diag1 = self.diag1.clone();
        let zero = Complex64::new(0.0, 0.0);
        diag0.extend(std::iter::repeat(zero).take(extra));
        diag1.extend(std::iter::repeat(zero).take(extra));
        DiagonalMps {
            n_probes: self.n_probes,
            diag0,
            diag1,
        }
    }

    /// Plain text record: one header line `N D`, then D lines of
    /// `Re(a_d) Im(a_d) Re(b_d) Im(b_d)`. Floats are written with enough
    /// digits to round-trip exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_probes, self.bond_dim());
        for (a, b) in self.diag0.iter().zip(&self.diag1) {
            out.push_str(&format!("{} {} {} {}\n", a.re, a.im, b.re, b.im));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<DiagonalMps, MpsError> {
        let mut tokens = text.split_whitespace();
        let mut next_usize = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| MpsError::Parse(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| MpsError::Parse(format!("bad {what}: {e}")))
        };
        let n_probes = next_usize("probe count")?;
        let bond_dim = next_usize("bond dimension")?;
        let mut fields = Vec::with_capacity(4 * bond_dim);
        for tok in tokens {
            let x: f64 = tok
                .parse()
                .map_err(|e| MpsError::Parse(format!("bad field {tok:?}: {e}")))?;
            fields.push(x);
        }
        if fields.len() != 4 * bond_dim {
            return Err(MpsError::Parse(format!(
                "expected {} fields for D = {bond_dim}, got {}",
                4 * bond_dim,
                fields.len()
            )));
        }
        let diag0 = fields
            .chunks_exact(4)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        let diag1 = fields
            .chunks_exact(4)
            .map(|c| Complex64::new(c[2], c[3]))
            .collect();
        DiagonalMps::new(n_probes, diag0, diag1)
    }
}

/// Polar data of one diagonal pair, with the 0⁰ endpoint convention.
enum PairTerm {
    /// a ≠ 0, b ≠ 0: contributes at every n.
    General {
        ln_a: f64,
        arg_a: f64,
        ln_b: f64,
        arg_b: f64,
    },
    /// a = 0: contributes b^N at n = 0 only.
    OnlyAtZero { ln_b: f64, arg_b: f64 },
    /// b = 0: contributes a^N at n = N only.
    OnlyAtTop { ln_a: f64, arg_a: f64 },
}

impl PairTerm {
    fn classify(a: Complex64, b: Complex64) -> Option<PairTerm> {
        let (za, zb) = (a.norm_sqr() == 0.0, b.norm_sqr() == 0.0);
        match (za, zb) {
            (true, true) => None,
            (true, false) => Some(PairTerm::OnlyAtZero {
                ln_b: b.norm().ln(),
                arg_b: b.arg(),
            }),
            (false, true) => Some(PairTerm::OnlyAtTop {
                ln_a: a.norm().ln(),
                arg_a: a.arg(),
            }),
            (false, false) => Some(PairTerm::General {
                ln_a: a.norm().ln(),
                arg_a: a.arg(),
                ln_b: b.norm().ln(),
                arg_b: b.arg(),
            }),
        }
    }

    /// (ln magnitude, phase) of a_dⁿ b_d^{N−n}, or None off-support.
    fn eval(&self, n: usize, n_probes: usize) -> Option<(f64, f64)> {
        match *self {
            PairTerm::General {
                ln_a,
                arg_a,
                ln_b,
                arg_b,
            } => {
                let nf = n as f64;
                let mf = (n_probes - n) as f64;
                Some((nf * ln_a + mf * ln_b, nf * arg_a + mf * arg_b))
            }
            PairTerm::OnlyAtZero { ln_b, arg_b } => {
                let nf = n_probes as f64;
                (n == 0).then_some((nf * ln_b, nf * arg_b))
            }
            PairTerm::OnlyAtTop { ln_a, arg_a } => {
                let nf = n_probes as f64;
                (n == n_probes).then_some((nf * ln_a, nf * arg_a))
            }
        }
    }
}

/// Dicke amplitudes of a diagonal MPS, normalized.
pub fn mps_amplitudes(mps: &DiagonalMps) -> Result<SymmetricState, MpsError> {
    let n_probes = mps.n_probes;
    let terms: Vec<PairTerm> = mps
        .diag0
        .iter()
        .zip(&mps.diag1)
        .filter_map(|(&a, &b)| PairTerm::classify(a, b))
        .collect();

    let mut ln_mag = vec![f64::NEG_INFINITY; n_probes + 1];
    let mut phase = vec![0.0_f64; n_probes + 1];
    for n in 0..=n_probes {
        let mut scale = f64::NEG_INFINITY;
        for t in &terms {
            if let Some((l, _)) = t.eval(n, n_probes) {
                scale = scale.max(l);
            }
        }
        if scale == f64::NEG_INFINITY {
            continue;
        }
        let (mut re, mut im, mut gross) = (0.0_f64, 0.0_f64, 0.0_f64);
        for t in &terms {
            if let Some((l, theta)) = t.eval(n, n_probes) {
                let mag = (l - scale).exp();
                // phases accumulated as multiples of arg(a), arg(b) and
                // reduced mod 2pi only here
                let theta = theta.rem_euclid(std::f64::consts::TAU);
                re += mag * theta.cos();
                im += mag * theta.sin();
                gross += mag;
            }
        }
        let net = re.hypot(im);
        if net <= gross * CANCEL_EPS {
            continue;
        }
        ln_mag[n] = 0.5 * log_binomial(n_probes, n).expect("n <= N") + scale + net.ln();
        phase[n] = im.atan2(re);
    }

    let global = ln_mag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if global == f64::NEG_INFINITY {
        return Err(MpsError::DegenerateMps);
    }
    let raw: Vec<Complex64> = (0..=n_probes)
        .map(|n| {
            if ln_mag[n] == f64::NEG_INFINITY {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar((ln_mag[n] - global).exp(), phase[n])
            }
        })
        .collect();
    normalize(&raw).map_err(|_| MpsError::DegenerateMps)
}

/// Amplitude-preserving canonical form for reporting and comparing optima.
///
/// Pairs are sorted by descending ∣a_d∣ (ties by descending ∣b_d∣), every
/// entry is divided by the largest entry modulus, and all entries are rotated
/// by a single common phase chosen to make the leading nonzero a_d (or b_d
/// when all a_d vanish) real and nonnegative. Each step multiplies the
/// induced state by at most a global factor, so input and output amplitudes
/// agree up to global phase. Per-pair rescalings would not: scaling one pair
/// by c multiplies its term by c^{−N} and changes the state.
pub fn canonical_form(mps: &DiagonalMps) -> Result<DiagonalMps, MpsError> {
    // reject inputs mps_amplitudes rejects
    mps_amplitudes(mps)?;

    let mut pairs: Vec<(Complex64, Complex64)> = mps
        .diag0
        .iter()
        .copied()
        .zip(mps.diag1.iter().copied())
        .collect();
    pairs.sort_by(|x, y| {
        y.0.norm()
            .total_cmp(&x.0.norm())
            .then(y.1.norm().total_cmp(&x.1.norm()))
    });

    let largest = pairs
        .iter()
        .map(|(a, b)| a.norm().max(b.norm()))
        .fold(0.0_f64, f64::max);
    let inv = 1.0 / largest;

    let anchor = pairs
        .iter()
        .find(|(a, _)| a.norm_sqr() > 0.0)
        .map(|(a, _)| a.arg())
        .or_else(|| {
            pairs
                .iter()
                .find(|(_, b)| b.norm_sqr() > 0.0)
                .map(|(_, b)| b.arg())
        })
        .unwrap_or(0.0);
    let rotation = Complex64::from_polar(1.0, -anchor);

    let diag0 = pairs.iter().map(|(a, _)| a * inv * rotation).collect();
    let diag1 = pairs.iter().map(|(_, b)| b * inv * rotation).collect();
    DiagonalMps::new(mps.n_probes, diag0, diag1)
}
