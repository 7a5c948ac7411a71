//! Diagonal symmetric MPS: construction, amplitude map, canonical form,
//! and the plain-text serialization format.
//!
//! ```bash
//! cargo run --release --example mps_states
//! ```

use num_complex::Complex64;
use qmetro::mps::{canonical_form, mps_amplitudes, DiagonalMps};
use qmetro::qfi::pure_qfi;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() {
    // D = 1 with equal diagonals is the uncorrelated product state
    let product = DiagonalMps::new(6, vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
    let s = mps_amplitudes(&product).unwrap();
    println!("D = 1, a = b = 1 (product state): pure QFI = {} (= N)", pure_qfi(&s));

    // D = 2 with complementary extremes is exactly the N00N state
    let noon = DiagonalMps::new(
        6,
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0)],
    )
    .unwrap();
    let s = mps_amplitudes(&noon).unwrap();
    println!("D = 2, a = (1,0), b = (0,1) (N00N):  pure QFI = {} (= N^2)", pure_qfi(&s));

    // the amplitude map is stable far beyond f64 power ranges
    let wide = DiagonalMps::new(
        500,
        vec![c(9.5, 1.0), c(0.11, -0.05), c(3.0, 0.0)],
        vec![c(0.2, 0.0), c(7.5, 2.5), c(1.0, 1.0)],
    )
    .unwrap();
    let s = mps_amplitudes(&wide).unwrap();
    let norm: f64 = s.probabilities().iter().sum();
    println!("N = 500, |entries| in [0.1, 10]:     norm = {norm} (finite, exact)");

    // canonical form: sorted pairs, unit leading modulus, real leading a;
    // the induced state is unchanged up to a global phase
    let messy = DiagonalMps::new(
        6,
        vec![c(0.0, 0.4), c(-2.0, 1.0)],
        vec![c(3.0, 0.0), c(0.5, -0.5)],
    )
    .unwrap();
    let canon = canonical_form(&messy).unwrap();
    println!("\ncanonical form of a messy D = 2 MPS:");
    print!("{}", canon.to_text());

    // serialization round-trips exactly
    let text = canon.to_text();
    let back = DiagonalMps::from_text(&text).unwrap();
    assert_eq!(canon, back);
    println!("text round-trip exact: true");
}
