//! Shared test oracles, independent of the library's evaluation paths.
#![allow(dead_code)] // each test target uses its own subset

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use qmetro::mps::DiagonalMps;
use qmetro::symstate::{normalize, SymmetricState};

pub fn uniform(rng: &mut Pcg64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn symmetric(rng: &mut Pcg64, spread: f64) -> f64 {
    (2.0 * uniform(rng) - 1.0) * spread
}

pub fn random_state(n: usize, rng: &mut Pcg64) -> SymmetricState {
    let raw: Vec<Complex64> = (0..=n)
        .map(|_| Complex64::new(symmetric(rng, 1.0), symmetric(rng, 1.0)))
        .collect();
    normalize(&raw).unwrap()
}

pub fn random_mps(n: usize, d: usize, rng: &mut Pcg64) -> DiagonalMps {
    let entry = |rng: &mut Pcg64| Complex64::new(symmetric(rng, 1.5), symmetric(rng, 1.5));
    let diag0: Vec<Complex64> = (0..d).map(|_| entry(rng)).collect();
    let diag1: Vec<Complex64> = (0..d).map(|_| entry(rng)).collect();
    DiagonalMps::new(n, diag0, diag1).unwrap()
}

pub fn seeded(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// double-double arithmetic (Dekker/Knuth), ~32 significant digits
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = r.hi / other.hi;
        let (hi, lo) = two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::from_f64(0.0);
        }
        let s = self.hi.sqrt();
        let sd = Dd::from_f64(s);
        // one Newton step in double-double
        let r = self.sub(sd.mul(sd)).hi / (2.0 * s);
        let (hi, lo) = two_sum(s, r);
        Dd { hi, lo }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn from_c64(z: Complex64) -> Self {
        DdComplex {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn one() -> Self {
        DdComplex {
            re: Dd::from_f64(1.0),
            im: Dd::from_f64(0.0),
        }
    }

    pub fn add(self, other: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.add(other.re),
            im: self.im.add(other.im),
        }
    }

    pub fn mul(self, other: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    pub fn scale(self, s: Dd) -> DdComplex {
        DdComplex {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    pub fn powi(self, n: usize) -> DdComplex {
        let mut acc = DdComplex::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Exact binomial coefficient as f64; valid while C(n,k) < 2^53 (n <= 55).
pub fn binomial_exact(n: usize, k: usize) -> f64 {
    let mut c: u128 = 1;
    let m = k.min(n - k);
    for i in 1..=m {
        c = c * (n - m + i) as u128 / i as u128;
    }
    assert!(c < (1u128 << 53), "binomial overflows exact f64 range");
    c as f64
}

/// Direct high-precision evaluation of the diagonal-MPS amplitude map:
/// alpha_n ∝ sqrt(C(N,n)) Σ_d a_d^n b_d^{N−n}, done term by term in
/// double-double arithmetic with plain repeated multiplication, then
/// normalized. No logarithms anywhere, so this is an independent route.
pub fn mps_amplitudes_dd(mps: &DiagonalMps) -> Vec<Complex64> {
    let n_probes = mps.n_probes();
    let mut raw: Vec<DdComplex> = Vec::with_capacity(n_probes + 1);
    for n in 0..=n_probes {
        let mut sum = DdComplex {
            re: Dd::from_f64(0.0),
            im: Dd::from_f64(0.0),
        };
        for (a, b) in mps.diag0().iter().zip(mps.diag1()) {
            let term = DdComplex::from_c64(*a)
                .powi(n)
                .mul(DdComplex::from_c64(*b).powi(n_probes - n));
            sum = sum.add(term);
        }
        let weight = Dd::from_f64(binomial_exact(n_probes, n)).sqrt();
        raw.push(sum.scale(weight));
    }
    let mut norm2 = Dd::from_f64(0.0);
    for z in &raw {
        norm2 = norm2.add(z.norm_sqr());
    }
    let inv = Dd::from_f64(1.0).div(norm2.sqrt());
    raw.into_iter().map(|z| z.scale(inv).to_c64()).collect()
}

// ---------------------------------------------------------------------------
// finite-difference fidelity QFI oracle
// ---------------------------------------------------------------------------

/// Naive sector density matrix of the lossy output at phase phi:
/// loss factors from plain binomials and powers, explicit e^{i n phi}.
fn sector_rho(state: &SymmetricState, eta: f64, lost: usize, phi: f64) -> DMatrix<Complex64> {
    let n = state.n_probes();
    let dim = n - lost + 1;
    let alpha = state.amplitudes();
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for l0 in 0..=lost {
        let l1 = lost - l0;
        let v: Vec<Complex64> = (0..dim)
            .map(|m| {
                let orig = m + l0;
                let b0 = binomial_exact(orig, l0)
                    * eta.powi((orig - l0) as i32)
                    * (1.0 - eta).powi(l0 as i32);
                let b1 = binomial_exact(n - orig, l1)
                    * eta.powi((n - orig - l1) as i32)
                    * (1.0 - eta).powi(l1 as i32);
                alpha[orig]
                    * Complex64::from_polar(1.0, orig as f64 * phi)
                    * (b0 * b1).sqrt()
            })
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    rho
}

/// Relative level below which an eigenvalue is rounding noise on an exact
/// zero mode. Square roots amplify such noise from 1e-16 to 1e-8, which
/// would bury the O(delta^2) fidelity deficit, so noise modes are dropped.
const EIGEN_NOISE_FLOOR: f64 = 1e-13;

fn psd_eigenvalues(m: &DMatrix<Complex64>) -> (SymmetricEigen<Complex64, nalgebra::Dyn>, f64) {
    let sym = (m.adjoint() + m).map(|z| 0.5 * z);
    let eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.iter().fold(0.0_f64, |a, &l| a.max(l));
    (eig, max)
}

fn matrix_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let (eig, max) = psd_eigenvalues(m);
    let mut d = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let l = eig.eigenvalues[i];
        let root = if l > EIGEN_NOISE_FLOOR * max { l.sqrt() } else { 0.0 };
        d[(i, i)] = Complex64::new(root, 0.0);
    }
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

fn trace_sqrt(m: &DMatrix<Complex64>) -> f64 {
    let (eig, max) = psd_eigenvalues(m);
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_NOISE_FLOOR * max)
        .map(|l| l.sqrt())
        .sum()
}

/// Step size for the finite-difference contraction. The baseline 1e-4 is
/// right for O(1) QFI; for small QFI the O(δ²) fidelity deficit sinks toward
/// the eigensolver noise floor, so δ grows like 1/√F, with the independent
/// branch-sum value standing in for the scale.
pub fn conditioned_delta(state: &SymmetricState, eta: f64) -> f64 {
    let scale = qmetro::qfi::approx_qfi(state, eta).max(1e-6);
    1e-4 * (0.5 / scale).sqrt().max(1.0)
}

/// QFI from the second-order contraction of the Bures fidelity,
/// F ≈ 8(1 − Fid(ρ₀, ρ_δ))/δ². The fidelity deficit is accumulated sector
/// by sector as Tr ρ₀ − Tr√(√ρ₀ ρ_δ √ρ₀), which keeps the cancellation at
/// the sector scale instead of against the global unit trace.
pub fn fidelity_qfi_oracle(state: &SymmetricState, eta: f64, delta: f64) -> f64 {
    let n = state.n_probes();
    let mut deficit = 0.0;
    for lost in 0..=n {
        let rho0 = sector_rho(state, eta, lost, 0.0);
        let rho1 = sector_rho(state, eta, lost, delta);
        let trace: f64 = (0..rho0.nrows()).map(|i| rho0[(i, i)].re).sum();
        if trace < 1e-300 {
            continue;
        }
        let root = matrix_sqrt(&rho0);
        deficit += trace - trace_sqrt(&(&root * &rho1 * &root));
    }
    8.0 * deficit / (delta * delta)
}
