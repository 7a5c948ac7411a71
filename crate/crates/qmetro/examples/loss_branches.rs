//! Decomposing the lossy channel output into loss-pattern branches.
//!
//! Every probe is transmitted with probability eta. Conditioned on losing
//! (l0, l1) probes from the two modes, the output is again pure; this example
//! tabulates the branch probabilities and conditional excitation
//! distributions for a small state and checks that they are complete.
//!
//! ```bash
//! cargo run --release --example loss_branches
//! ```

use qmetro::loss::{branch_probability, conditional_distribution};
use qmetro::symstate::noon_state;

fn main() {
    let n = 3;
    let eta = 0.8;
    let state = noon_state(n).unwrap();

    println!("N = {n} N00N state through a loss channel with eta = {eta}\n");
    println!("l0  l1  probability  conditional q(n) over surviving branch");
    let mut total = 0.0;
    for l0 in 0..=n {
        for l1 in 0..=n - l0 {
            let p = branch_probability(&state, l0, l1, eta).unwrap();
            total += p;
            match conditional_distribution(&state, l0, l1, eta) {
                Ok(branch) => {
                    let q: Vec<String> = branch
                        .support()
                        .map(|k| format!("q({k})={:.4}", branch.weight(k)))
                        .collect();
                    println!("{l0}   {l1}   {p:<12.6} {}", q.join("  "));
                }
                Err(_) => {
                    println!("{l0}   {l1}   {p:<12.6} (branch never occurs)");
                }
            }
        }
    }
    println!("\nsum of branch probabilities = {total:.12}");

    // Losing even one probe from a N00N state reveals which mode it came
    // from and destroys the superposition: the conditional distribution
    // collapses onto a single excitation number.
    let branch = conditional_distribution(&state, 1, 0, eta).unwrap();
    println!(
        "after losing one probe from mode 0: support = {:?}, q = {:?}",
        branch.support(),
        branch.weights()
    );
}
