//! Holland-Burnett states out of a Fourier multiport, starting from the
//! Hong-Ou-Mandel pair, with the matrix permanent as an independent check on
//! the amplitudes.
//!
//! ```bash
//! cargo run --example hb_probe
//! ```

use multiphase::fock::{enumerate_configs, FockConfig};
use multiphase::probes::{
    make_hb_state, multiport_output, permanent_amplitude, MultiportUnitary,
};

fn main() -> multiphase::Result<()> {
    // two photons on a 50/50 splitter: the coincidence amplitude cancels
    let splitter = MultiportUnitary::qft(2);
    let pair = FockConfig::new(vec![1, 1])?;
    let out = multiport_output(&splitter, &pair)?;
    println!("1 photon into each port of a 50/50 splitter:");
    for (config, amp) in out.terms() {
        println!("    {config}  amplitude {:+.6}", amp.re);
    }
    println!("    (1,1) amplitude: {:.1e}  -- bunched, never coincident\n", out
        .amplitude(&pair)
        .norm());

    // the same interference pattern, checked against matrix permanents
    let port = MultiportUnitary::qft(3);
    let input = FockConfig::new(vec![1, 1, 1])?;
    let state = multiport_output(&port, &input)?;
    println!("HB(1,2): one photon into each port of a 3-mode Fourier multiport:");
    for output in enumerate_configs(3, 2)? {
        let amp = state.amplitude(&output);
        if amp.norm() < 1e-12 {
            continue;
        }
        let oracle = permanent_amplitude(&port, &input, &output)?;
        println!(
            "    {output}  amplitude {:+.6}  |permanent oracle| {:.6}",
            amp.re,
            oracle.norm()
        );
    }

    for (n, d) in [(1usize, 2usize), (1, 3), (2, 3), (3, 4)] {
        let psi = make_hb_state(n as u32, d)?;
        println!(
            "\nHB({n},{d}): N = {} photons over {} modes, {} configurations, norm deviation {:.1e}",
            psi.photons(),
            d + 1,
            psi.len(),
            (psi.vector().norm() - 1.0).abs()
        );
    }
    Ok(())
}
