//! Weighting the single-mode-superposition probe: how the total-variance
//! bound depends on the common amplitude, and where its minimum sits.
//!
//! ```bash
//! cargo run --example optimal_amplitude
//! ```

use multiphase::fisher::{optimal_family_variance, psi_s_variance, psi_w_variance};
use multiphase::probes::{balanced_alpha, optimal_alpha};
use multiphase::search::optimize_alpha;

fn main() -> multiphase::Result<()> {
    let d = 4;
    let photons = 16;

    println!("variance of the d = {d}, N = {photons} probe family against its amplitude:\n");
    println!("{:>8} {:>14}", "alpha", "bound");
    for step in 1..=12 {
        let alpha = step as f64 * 0.04;
        match optimal_family_variance(d, photons, alpha) {
            Ok(variance) => println!("{alpha:>8.3} {variance:>14.6}"),
            Err(_) => println!("{alpha:>8.3} {:>14}", "singular"),
        }
    }

    let optimum = optimize_alpha(d, photons)?;
    println!(
        "\nnumerical minimum: alpha = {:.9}, bound = {:.9}",
        optimum.alpha, optimum.total_variance
    );
    println!(
        "closed form:       alpha = {:.9}, bound = {:.9}",
        optimal_alpha(d),
        psi_s_variance(d, photons)
    );
    println!(
        "\nbalanced variant (alpha = beta = {:.6}) gives {:.9}, within a factor\n\
         of two of the optimum for large d and easier to prepare",
        balanced_alpha(d),
        psi_w_variance(d, photons)
    );
    Ok(())
}
