//! Without decoherence the optimizer rediscovers the N00N state.
//!
//! At eta = 1 the optimal QFI is N², achieved by (∣N,0⟩ + ∣0,N⟩)/√2 — a
//! bond-dimension-2 MPS. Starting from random diagonals, the D = 2 search
//! recovers it for every N.
//!
//! ```bash
//! cargo run --release --example noon_optimum
//! ```

use qmetro::optimize::{optimize_mps, BestParams, ObjectiveSpec, OptimizerOptions};

fn main() {
    let objective = ObjectiveSpec::qfi_max(1.0).unwrap();
    let opts = OptimizerOptions {
        starts: 8,
        seed: 7,
        ..OptimizerOptions::default()
    };

    println!("N    F~ found       N^2    rel error   Heisenberg dphi");
    for n in 2..=10 {
        let res = optimize_mps(n, 2, &objective, &opts).unwrap();
        let ideal = (n * n) as f64;
        println!(
            "{n:<4} {:<14.8} {ideal:<6} {:<11.2e} {:.6}",
            res.objective_value,
            (res.objective_value - ideal).abs() / ideal,
            res.delta_phi
        );
    }

    let res = optimize_mps(6, 2, &objective, &opts).unwrap();
    if let BestParams::Mps(mps) = &res.params {
        println!("\ncanonical optimal MPS at N = 6 (the N00N construction):");
        print!("{}", mps.to_text());
    }
    println!("\noptimal state probabilities |alpha_n|^2:");
    for (k, p) in res.state.probabilities().iter().enumerate() {
        if *p > 1e-9 {
            println!("  n = {k}: {p:.6}");
        }
    }
}
