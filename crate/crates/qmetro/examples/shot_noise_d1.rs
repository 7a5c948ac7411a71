//! The D = 1 family is classical: its Ramsey optimum is exactly 1/sqrt(eta N).
//!
//! Bond dimension 1 means no correlations between probes (coherent spin
//! states). Optimizing the two D = 1 parameters therefore lands on the shot
//! noise curve for every N and eta — an analytic line the optimizer must
//! reproduce to single-precision-like accuracy.
//!
//! ```bash
//! cargo run --release --example shot_noise_d1
//! ```

use qmetro::optimize::{optimize_mps, ObjectiveSpec, OptimizerOptions};
use qmetro::sweep::shot_noise_bound;

fn main() {
    let opts = OptimizerOptions {
        starts: 6,
        seed: 11,
        ..OptimizerOptions::default()
    };

    for eta in [0.3, 0.9] {
        let objective = ObjectiveSpec::ramsey_min(eta).unwrap();
        println!("eta = {eta}");
        println!("N     dphi (D=1 optimum)  1/sqrt(eta N)       rel error");
        for n in [1usize, 2, 5, 10, 20, 50, 100] {
            let res = optimize_mps(n, 1, &objective, &opts).unwrap();
            let reference = shot_noise_bound(n, eta);
            println!(
                "{n:<5} {:<19.12} {reference:<19.12} {:.2e}",
                res.delta_phi,
                (res.delta_phi - reference).abs() / reference
            );
        }
        println!();
    }
}
