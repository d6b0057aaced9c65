//! Monte-Carlo measurement simulation and local maximum-likelihood
//! estimation, used to show the empirical approach to the Cramér-Rao bound.
//!
//! Estimation is local: the likelihood is maximized inside a `±pi/4` box
//! around the initial guess, sidestepping the 2-pi periodicity of the
//! outcome probabilities. That matches the local character of the bound
//! itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::{cfi_from_evaluator, qcrb_total_variance};
use crate::fock::{PhaseVector, ProbeState};
use crate::povm::{PovmEvaluator, PovmSet};
use crate::search::{nelder_mead, NelderMeadOptions};

/// Half-width of the likelihood search box around the initial guess.
pub const MLE_BOX_HALF_WIDTH: f64 = std::f64::consts::FRAC_PI_4;

/// Multinomial draw from the outcome distribution of `povm` on the evolved
/// probe. Counts are aligned with the set's outcome order and reproducible
/// from the seed.
pub fn sample_outcomes(
    psi: &ProbeState,
    theta_true: &PhaseVector,
    povm: &PovmSet,
    trials: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    let evaluator = povm.evaluator(psi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(&evaluator, theta_true, trials, &mut rng)
}

fn sample_with(
    evaluator: &PovmEvaluator,
    theta_true: &PhaseVector,
    trials: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u64>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let probs = evaluator.probabilities(theta_true)?;
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..trials {
        let draw: f64 = rng.random::<f64>() * total;
        let index = cdf.partition_point(|edge| *edge < draw);
        counts[index.min(probs.len() - 1)] += 1;
    }
    Ok(counts)
}

/// Local maximizer of the multinomial log-likelihood
/// `sum_k n_k ln p(k | theta)` inside the box around `theta_init`.
///
/// A singular classical Fisher matrix at the estimate means the measurement
/// pins only a hypersurface of phase values, and is reported as an error
/// rather than an arbitrary point on that surface.
pub fn mle_estimate(
    counts: &[u64],
    psi: &ProbeState,
    povm: &PovmSet,
    theta_init: &PhaseVector,
) -> Result<PhaseVector> {
    let evaluator = povm.evaluator(psi)?;
    mle_with(&evaluator, counts, theta_init)
}

fn mle_with(
    evaluator: &PovmEvaluator,
    counts: &[u64],
    theta_init: &PhaseVector,
) -> Result<PhaseVector> {
    if counts.len() != evaluator.outcome_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} counts supplied for {} outcomes",
            counts.len(),
            evaluator.outcome_count()
        )));
    }
    if counts.iter().sum::<u64>() == 0 {
        return Err(Error::InvalidArgument("counts are all zero".into()));
    }
    let negative_log_likelihood = |theta: &[f64]| -> f64 {
        let Ok(phases) = PhaseVector::new(theta.to_vec()) else {
            return f64::INFINITY;
        };
        let Ok(probs) = evaluator.probabilities(&phases) else {
            return f64::INFINITY;
        };
        let mut acc = 0.0;
        for (count, p) in counts.iter().zip(&probs) {
            if *count == 0 {
                continue;
            }
            if *p < 1e-300 {
                return f64::INFINITY;
            }
            acc -= *count as f64 * p.ln();
        }
        acc
    };

    let start = theta_init.as_slice().to_vec();
    let lower: Vec<f64> = start.iter().map(|t| t - MLE_BOX_HALF_WIDTH).collect();
    let upper: Vec<f64> = start.iter().map(|t| t + MLE_BOX_HALF_WIDTH).collect();
    let options = NelderMeadOptions {
        max_iters: 800,
        x_tol: 1e-9,
        f_tol: 1e-12,
        step: 0.05,
        lower: Some(lower),
        upper: Some(upper),
    };
    let (theta, _, _) = nelder_mead(&negative_log_likelihood, &start, &options);
    let estimate = PhaseVector::new(theta)?;

    let fisher = cfi_from_evaluator(evaluator, &estimate)?;
    if let Err(Error::SingularFisher { direction }) = qcrb_total_variance(&fisher) {
        return Err(Error::FlatLikelihood(format!(
            "classical information is singular along {direction:?}"
        )));
    }
    Ok(estimate)
}

/// Configuration of the bound-convergence experiment.
#[derive(Clone, Debug)]
pub struct MleExperimentConfig {
    /// Trial counts per replication, usually a growing ladder.
    pub trial_ladder: Vec<u64>,
    pub replications: usize,
    pub seed: u64,
}

impl Default for MleExperimentConfig {
    fn default() -> Self {
        Self {
            trial_ladder: vec![1_000, 10_000, 100_000],
            replications: 200,
            seed: 0,
        }
    }
}

/// One replication of the experiment.
#[derive(Clone, Debug, Serialize)]
pub struct MleExperimentRow {
    pub trials: u64,
    pub replication: usize,
    pub theta_hat: Vec<f64>,
    pub sq_error: f64,
}

/// Repeated sample-then-estimate runs across the trial ladder.
///
/// Replications run concurrently; replication `r` of ladder entry `t` uses
/// the ChaCha stream `(t << 32) | r` of the master seed, so results do not
/// depend on scheduling.
pub fn mle_experiment(
    psi: &ProbeState,
    theta_true: &PhaseVector,
    povm: &PovmSet,
    config: &MleExperimentConfig,
) -> Result<Vec<MleExperimentRow>> {
    let evaluator = povm.evaluator(psi)?;
    let mut rows = Vec::with_capacity(config.trial_ladder.len() * config.replications);
    for (ladder_index, &trials) in config.trial_ladder.iter().enumerate() {
        let batch: Vec<Result<MleExperimentRow>> = (0..config.replications)
            .into_par_iter()
            .map(|replication| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(((ladder_index as u64) << 32) | replication as u64);
                let counts = sample_with(&evaluator, theta_true, trials, &mut rng)?;
                let estimate = mle_with(&evaluator, &counts, theta_true)?;
                let sq_error: f64 = estimate
                    .as_slice()
                    .iter()
                    .zip(theta_true.as_slice())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                Ok(MleExperimentRow {
                    trials,
                    replication,
                    theta_hat: estimate.as_slice().to_vec(),
                    sq_error,
                })
            })
            .collect();
        for row in batch {
            rows.push(row?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{identity_povm, outcome_distribution, upsilon_projectors};
    use crate::probes::make_balanced_state;

    #[test]
    fn sampling_is_reproducible() {
        let psi = make_balanced_state(2, 2).unwrap();
        let povm = upsilon_projectors(2, 2).unwrap();
        let theta = PhaseVector::new(vec![0.2, -0.4]).unwrap();
        let a = sample_outcomes(&psi, &theta, &povm, 5_000, 42).unwrap();
        let b = sample_outcomes(&psi, &theta, &povm, 5_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().sum::<u64>(), 5_000);
    }

    #[test]
    fn deterministic_distribution_lands_on_one_outcome() {
        let psi = make_balanced_state(2, 2).unwrap();
        let povm = upsilon_projectors(2, 2).unwrap();
        let counts =
            sample_outcomes(&psi, &PhaseVector::zeros(2), &povm, 1_000, 7).unwrap();
        assert_eq!(counts[0], 1_000);
        assert!(counts[1..].iter().all(|c| *c == 0));
    }

    #[test]
    fn empirical_frequencies_track_probabilities() {
        let psi = make_balanced_state(2, 2).unwrap();
        let povm = upsilon_projectors(2, 2).unwrap();
        let theta = PhaseVector::new(vec![0.5, -0.8]).unwrap();
        let trials = 100_000u64;
        let counts = sample_outcomes(&psi, &theta, &povm, trials, 11).unwrap();
        let probs = outcome_distribution(&psi, &theta, &povm).unwrap();
        for (count, p) in counts.iter().zip(&probs) {
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt().max(1.0);
            let deviation = (*count as f64 - trials as f64 * p).abs();
            assert!(deviation < 5.0 * sigma, "count {count} vs p {p}");
        }
    }

    #[test]
    fn zero_phase_data_estimates_zero() {
        let psi = make_balanced_state(2, 2).unwrap();
        let povm = upsilon_projectors(2, 2).unwrap();
        let theta = PhaseVector::zeros(2);
        let counts = sample_outcomes(&psi, &theta, &povm, 10_000, 3).unwrap();
        let estimate = mle_estimate(&counts, &psi, &povm, &theta).unwrap();
        assert!(estimate.as_slice().iter().all(|t| t.abs() < 1e-4));
    }

    #[test]
    fn identity_measurement_gives_flat_likelihood() {
        let psi = make_balanced_state(2, 2).unwrap();
        let povm = identity_povm();
        let counts = vec![100u64];
        let err = mle_estimate(&counts, &psi, &povm, &PhaseVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::FlatLikelihood(_)));
    }

    #[test]
    fn estimate_stays_within_bound_scale() {
        let psi = make_balanced_state(2, 2).unwrap();
        let povm = upsilon_projectors(2, 2).unwrap();
        let theta = PhaseVector::new(vec![0.05, -0.04]).unwrap();
        let trials = 100_000u64;
        let counts = sample_outcomes(&psi, &theta, &povm, trials, 9).unwrap();
        let estimate = mle_estimate(&counts, &psi, &povm, &theta).unwrap();
        let qfi = crate::fisher::qfi_matrix(&psi);
        let bound = crate::fisher::qcrb_total_variance(&qfi).unwrap();
        let distance: f64 = estimate
            .as_slice()
            .iter()
            .zip(theta.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(distance < 5.0 * (bound / trials as f64).sqrt());
    }

    #[test]
    fn count_length_must_match_outcomes() {
        let psi = make_balanced_state(2, 2).unwrap();
        let povm = upsilon_projectors(2, 2).unwrap();
        let err = mle_estimate(&[1, 2], &psi, &povm, &PhaseVector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
