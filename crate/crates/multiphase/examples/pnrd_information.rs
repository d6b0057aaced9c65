//! A realistic detection chain for the HB(1, d) probe: a second Fourier
//! multiport followed by photon-number-resolving detectors. The phase point
//! is optimized; the resulting information lands between the probe's quantum
//! bound and the two-mode strategy.
//!
//! ```bash
//! cargo run --release --example pnrd_information
//! ```

use multiphase::report::hb_cfi_sweep;
use multiphase::search::PhaseSearchConfig;

fn main() -> multiphase::Result<()> {
    println!("HB(1, d) probes measured by Fourier multiport + photon counting\n");
    println!(
        "{:>3} {:>4} {:>14} {:>14} {:>14} {:>14}",
        "d", "N", "detector", "quantum bound", "noon (exact)", "optimal probe"
    );
    let config = PhaseSearchConfig::default();
    for row in hb_cfi_sweep(2, 3, 1, &config)? {
        println!(
            "{:>3} {:>4} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
            row.d, row.photons, row.var_cfi_pnrd, row.var_qcrb_hb, row.var_noon, row.var_psi_s
        );
    }
    println!(
        "\nthe detector column is an achievable variance for a concrete counting\n\
         experiment at its best phase point: close to the quantum bound and\n\
         below the two-mode strategy at the same photon number"
    );
    Ok(())
}
