//! How much bond dimension does a given loss level really need?
//!
//! Ascends D = 1, 2, … until the MPS optimum is within 1% of the direct
//! (brute force) optimum. Stronger loss needs less correlation, so the
//! minimal D at eta = 0.3 never exceeds the one at eta = 0.9.
//!
//! ```bash
//! cargo run --release --example min_bond_dim
//! ```

use qmetro::optimize::{minimal_bond_dimension, ObjectiveSpec, OptimizerOptions};

fn main() {
    let opts = OptimizerOptions {
        starts: 8,
        seed: 5,
        ..OptimizerOptions::default()
    };

    for n in [10usize, 30] {
        println!("N = {n}, QFI objective, threshold 1%");
        for eta in [0.3, 0.9] {
            let objective = ObjectiveSpec::qfi_max(eta).unwrap();
            let report = minimal_bond_dimension(n, &objective, 0.01, 12, &opts).unwrap();
            print!("  eta = {eta}: direct dphi = {:.6}; ", report.direct.delta_phi);
            for point in &report.ladder {
                print!("D{} gap {:+.2e}  ", point.bond_dim, point.relative_gap);
            }
            match report.d_star {
                Some(d) => println!("=> minimal D = {d}"),
                None => println!("=> not reached by D = {}", report.d_cap),
            }
        }
        println!();
    }
}
