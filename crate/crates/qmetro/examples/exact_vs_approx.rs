//! How tight is the branch-resolved QFI bound?
//!
//! The figure of merit the optimizer maximizes, F~, pretends the environment
//! reveals how many probes were lost from each mode; convexity makes it an
//! upper bound on the true QFI. This example measures the gap against the
//! exact symmetric-logarithmic-derivative oracle on optimized states, which
//! is the honest way to report how much the approximation gives away.
//!
//! ```bash
//! cargo run --release --example exact_vs_approx
//! ```

use qmetro::optimize::{optimize_direct, ObjectiveSpec, OptimizerOptions};
use qmetro::qfi::{approx_qfi, exact_qfi, precision_from_qfi};

fn main() {
    let n = 10;
    let opts = OptimizerOptions {
        starts: 8,
        seed: 1,
        ..OptimizerOptions::default()
    };

    println!("optimal F~ states at N = {n}, exact QFI of the same states\n");
    println!("eta    F~           F_exact      rel gap    dphi(F~)   dphi(exact)");
    for eta in [0.3, 0.5, 0.7, 0.9, 0.99] {
        let objective = ObjectiveSpec::qfi_max(eta).unwrap();
        let res = optimize_direct(n, &objective, &opts).unwrap();
        let f_approx = approx_qfi(&res.state, eta);
        let f_exact = exact_qfi(&res.state, eta).unwrap();
        let gap = (f_approx - f_exact) / f_exact;
        println!(
            "{eta:<6} {f_approx:<12.6} {f_exact:<12.6} {gap:<10.2e} {:<10.6} {:.6}",
            precision_from_qfi(f_approx, 1).unwrap(),
            precision_from_qfi(f_exact, 1).unwrap(),
        );
    }
    println!("\nF~ >= F_exact always (convexity); the loss information is");
    println!("nearly free at high eta and still cheap at strong loss.");
}
