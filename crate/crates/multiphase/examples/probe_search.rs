//! Unconstrained numerical search for the best probe over every
//! configuration of N photons in d + 1 modes. The optimum keeps landing on
//! the single-mode-superposition family.
//!
//! ```bash
//! cargo run --release --example probe_search
//! ```

use multiphase::fisher::psi_s_variance;
use multiphase::probes::optimal_alpha;
use multiphase::search::{search_optimal_probe, ProbeSearchConfig};

fn main() -> multiphase::Result<()> {
    let config = ProbeSearchConfig::default();
    println!("multi-start search over the full amplitude simplex\n");
    println!(
        "{:>3} {:>3} {:>8} {:>14} {:>14} {:>9} {:>9}",
        "d", "N", "configs", "found", "closed form", "family?", "alpha"
    );
    for d in 1..=3usize {
        for photons in 1..=3u32 {
            let result = search_optimal_probe(d, photons, &config)?;
            println!(
                "{:>3} {:>3} {:>8} {:>14.8} {:>14.8} {:>9} {:>9.5}",
                d,
                photons,
                result.state.len(),
                result.total_variance,
                psi_s_variance(d, photons),
                result.matches_single_mode_family,
                result.family_alpha.unwrap_or(f64::NAN),
            );
        }
    }
    println!(
        "\nreference amplitudes: alpha*(d) = {:.5}, {:.5}, {:.5} for d = 1, 2, 3",
        optimal_alpha(1),
        optimal_alpha(2),
        optimal_alpha(3)
    );
    Ok(())
}
