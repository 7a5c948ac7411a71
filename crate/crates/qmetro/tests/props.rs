//! Property tests of the structural invariants.

mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use qmetro::loss::branch_probability;
use qmetro::mps::{canonical_form, mps_amplitudes, DiagonalMps};
use qmetro::qfi::approx_qfi;
use qmetro::symstate::normalize;

fn amplitude_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len..=len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
        .prop_filter("needs some mass", |v: &Vec<Complex64>| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-2
        })
}

fn mps_pairs(d: usize) -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
    (amplitude_vec(d), amplitude_vec(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent_and_positive_scaled(raw in amplitude_vec(9)) {
        let once = normalize(&raw).unwrap();
        let twice = normalize(once.amplitudes()).unwrap();
        for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
            prop_assert!((a - b).norm() <= 1e-14);
        }
        // output = input / positive scalar: cross ratios preserved
        let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (r, a) in raw.iter().zip(once.amplitudes()) {
            prop_assert!((r - a * norm).norm() <= 1e-12 * norm.max(1.0));
        }
    }

    #[test]
    fn variance_and_qfi_ignore_phases(
        raw in amplitude_vec(8),
        phases in prop::collection::vec(-3.2..3.2f64, 8..=8),
        eta in 0.05..1.0f64,
    ) {
        let plain = normalize(&raw).unwrap();
        let rotated: Vec<Complex64> = raw
            .iter()
            .zip(&phases)
            .map(|(z, &t)| z * Complex64::from_polar(1.0, t))
            .collect();
        let rotated = normalize(&rotated).unwrap();
        let (m0, v0) = plain.excitation_moments();
        let (m1, v1) = rotated.excitation_moments();
        prop_assert!((m0 - m1).abs() <= 1e-12);
        prop_assert!((v0 - v1).abs() <= 1e-12);
        let (f0, f1) = (approx_qfi(&plain, eta), approx_qfi(&rotated, eta));
        prop_assert!((f0 - f1).abs() <= 1e-11 * f0.max(1.0));
    }

    #[test]
    fn branch_probabilities_form_a_distribution(
        raw in amplitude_vec(7),
        eta in 0.0..=1.0f64,
    ) {
        let state = normalize(&raw).unwrap();
        let mut total = 0.0;
        for l0 in 0..=6usize {
            for l1 in 0..=6 - l0 {
                let p = branch_probability(&state, l0, l1, eta).unwrap();
                prop_assert!(p >= 0.0);
                total += p;
            }
        }
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn mps_permutation_invariance(
        (diag0, diag1) in mps_pairs(4),
        shift in 0usize..4,
    ) {
        let mps = DiagonalMps::new(6, diag0.clone(), diag1.clone()).unwrap();
        let rot = |v: &Vec<Complex64>| -> Vec<Complex64> {
            let mut r = v.clone();
            r.rotate_left(shift);
            r
        };
        let permuted = DiagonalMps::new(6, rot(&diag0), rot(&diag1)).unwrap();
        match (mps_amplitudes(&mps), mps_amplitudes(&permuted)) {
            (Ok(a), Ok(b)) => {
                for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                    prop_assert!((x - y).norm() <= 1e-12);
                }
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "permutation changed degeneracy"),
        }
    }

    #[test]
    fn zero_pair_embedding_leaves_amplitudes_unchanged(
        (diag0, diag1) in mps_pairs(3),
        extra in 1usize..3,
    ) {
        let mps = DiagonalMps::new(5, diag0, diag1).unwrap();
        let embedded = mps.embedded(extra);
        match (mps_amplitudes(&mps), mps_amplitudes(&embedded)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.amplitudes(), b.amplitudes()),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "embedding changed degeneracy"),
        }
    }

    #[test]
    fn canonical_form_preserves_state_up_to_global_phase(
        (diag0, diag1) in mps_pairs(3),
    ) {
        let mps = DiagonalMps::new(7, diag0, diag1).unwrap();
        let Ok(before) = mps_amplitudes(&mps) else {
            return Ok(());
        };
        let canon = canonical_form(&mps).unwrap();
        let after = mps_amplitudes(&canon).unwrap();
        let overlap: Complex64 = before
            .amplitudes()
            .iter()
            .zip(after.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        prop_assert!(overlap.norm() >= 1.0 - 1e-10);
    }
}
