//! Building symmetric probe states and reading off their moments.
//!
//! ```bash
//! cargo run --release --example dicke_states
//! ```

use num_complex::Complex64;
use qmetro::qfi::pure_qfi;
use qmetro::symstate::{noon_state, normalize, product_state, ProductGauge};

fn main() {
    let n = 8;

    let noon = noon_state(n).unwrap();
    let product = product_state(n, ProductGauge::Real).unwrap();

    // any unnormalized vector works; normalize fixes the scale
    let raw: Vec<Complex64> = (0..=n)
        .map(|k| Complex64::new((k as f64 - n as f64 / 2.0).powi(2).exp().recip(), 0.0))
        .collect();
    let gaussian = normalize(&raw).unwrap();

    println!("N = {n}");
    println!("state     <n>      Var(n)   pure QFI  (N^2 = {})", n * n);
    for (name, state) in [
        ("noon", &noon),
        ("product", &product),
        ("gaussian", &gaussian),
    ] {
        let (mean, var) = state.excitation_moments();
        println!(
            "{name:<9} {mean:<8.4} {var:<8.4} {:<8.4}",
            pure_qfi(state)
        );
    }

    println!("\nN00N amplitudes concentrate on the extremes:");
    for (k, a) in noon.amplitudes().iter().enumerate() {
        if a.norm() > 1e-12 {
            println!("  alpha_{k} = {a}");
        }
    }

    // the product state in the i^n gauge points the collective spin along +y
    let bright = product_state(n, ProductGauge::IPower).unwrap();
    let m = qmetro::ramsey::collective_moments(&bright);
    println!("\nproduct state, i^n gauge: <Jy> = {:.4} (= N/2)", m.jy_mean);
}
