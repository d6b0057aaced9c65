//! Working with states directly: phase evolution, derivative vectors, inner
//! products, and the JSON interchange format.
//!
//! ```bash
//! cargo run --example state_io
//! ```

use multiphase::fock::PhaseVector;
use multiphase::probes::make_noon_state;
use multiphase::ProbeState;

fn main() -> multiphase::Result<()> {
    let noon = make_noon_state(2, 1, 1)?;
    println!("two-photon N00N state:");
    for (config, amp) in noon.terms() {
        println!("    {config}  {:+.6} {:+.6}i", amp.re, amp.im);
    }

    let theta = PhaseVector::new(vec![std::f64::consts::FRAC_PI_2])?;
    let evolved = noon.apply_phases(&theta)?;
    println!("\nafter a pi/2 phase on mode 1 (two photons pick up a pi flip):");
    for (config, amp) in evolved.terms() {
        println!("    {config}  {:+.6} {:+.6}i", amp.re, amp.im);
    }

    let derivative = noon.derivative(&theta, 1)?;
    println!(
        "\nderivative along mode 1 has norm {:.4} = phase-mode occupation / sqrt(2)",
        derivative.norm()
    );
    println!(
        "overlap with the evolved state is purely imaginary: {:.2e} + {:.3}i",
        derivative.inner(evolved.vector())?.re,
        derivative.inner(evolved.vector())?.im
    );

    let text = evolved.to_json();
    println!("\nJSON interchange form:\n{text}");
    let back = ProbeState::from_json(&text)?;
    assert_eq!(back.d(), evolved.d());
    println!("round-trip preserved {} terms", back.len());
    Ok(())
}
