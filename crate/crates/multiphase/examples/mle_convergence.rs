//! Sampling detector outcomes and estimating the phases back by maximum
//! likelihood: the scaled estimation error approaches the Cramér-Rao bound
//! as the number of trials grows.
//!
//! ```bash
//! cargo run --release --example mle_convergence
//! ```

use multiphase::estimation::{mle_experiment, MleExperimentConfig};
use multiphase::fisher::{qcrb_total_variance, qfi_matrix};
use multiphase::fock::PhaseVector;
use multiphase::povm::upsilon_projectors;
use multiphase::probes::make_balanced_state;

fn main() -> multiphase::Result<()> {
    let psi = make_balanced_state(2, 2)?;
    let povm = upsilon_projectors(2, 2)?;
    let theta_true = PhaseVector::new(vec![0.2, -0.15])?;
    let bound = qcrb_total_variance(&qfi_matrix(&psi))?;

    let config = MleExperimentConfig {
        trial_ladder: vec![1_000, 10_000, 100_000],
        replications: 100,
        seed: 0,
    };
    let rows = mle_experiment(&psi, &theta_true, &povm, &config)?;

    println!(
        "balanced two-phase probe, staircase measurement, theta = (0.2, -0.15)\n\
         quantum bound on the total variance: {bound:.4} / M\n"
    );
    println!("{:>8} {:>16} {:>14}", "M", "M * mean sq error", "bound ratio");
    for &trials in &config.trial_ladder {
        let errors: Vec<f64> = rows
            .iter()
            .filter(|r| r.trials == trials)
            .map(|r| r.sq_error)
            .collect();
        let scaled = errors.iter().sum::<f64>() / errors.len() as f64 * trials as f64;
        println!("{trials:>8} {scaled:>16.4} {:>14.3}", scaled / bound);
    }
    println!("\na ratio near 1 means the estimator extracts the information the bound promises");
    Ok(())
}
