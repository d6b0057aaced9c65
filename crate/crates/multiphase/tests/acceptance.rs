//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured figure of merit (run with `-- --nocapture`
//! to see them).

mod common;

use std::time::Instant;

use common::{random_phases, random_probe};
use multiphase::estimation::{mle_experiment, MleExperimentConfig};
use multiphase::fisher::{
    cfi_matrix, noon_individual_bound, psi_s_variance, qcrb_total_variance, qfi_matrix,
    qfi_finite_difference, qfi_via_derivatives, sld_commutator_expectation,
    sld_product_expectation,
};
use multiphase::fock::{enumerate_configs, FockConfig, PhaseVector};
use multiphase::povm::{
    optimal_projectors_for, pnrd_measurement, upsilon_projectors,
};
use multiphase::probes::{
    make_balanced_state, make_hb_state, make_optimal_state, multiport_output, optimal_alpha,
    permanent_amplitude, MultiportUnitary,
};
use multiphase::search::{
    optimize_cfi_phase, search_optimal_probe, PhaseSearchConfig, ProbeSearchConfig,
};
use multiphase::SparseVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn finish(number: u32, name: &str, started: Instant, budget_secs: u64) {
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < budget_secs,
        "criterion {number} overran its {budget_secs}s budget: {elapsed:?}"
    );
    println!("acceptance {number:02} ({name}): PASS in {elapsed:.2?}");
}

/// Criterion 1: strategy-comparison table at N = 16 across d = 1..16.
#[test]
fn criterion_01_strategy_table() {
    let started = Instant::now();
    let photons = 16u32;
    let rows = multiphase::report::bounds_table(photons, 1, 16).unwrap();
    assert_eq!(rows.len(), 16);
    for row in &rows {
        let d = row.d;
        let df = d as f64;
        let expected_quantum = (1.0 + df.sqrt()).powi(2) * df / 1024.0;
        assert!((row.var_psi_s - expected_quantum).abs() < 1e-12, "d={d}");
        assert!(
            (row.var_classical - df * df / 16.0).abs() < 1e-12,
            "d={d}"
        );
        // exact allocation: n photons on d-r phases, n+1 on the rest
        let per = 16 / d as u64;
        let rem = 16 % d as u64;
        let expected_exact =
            (df - rem as f64) / (per * per) as f64 + rem as f64 / ((per + 1) * (per + 1)) as f64;
        assert!((row.var_noon_exact - expected_exact).abs() < 1e-12, "d={d}");

        // ordering: the first inequality is strict beyond a single phase, the
        // second (with the equal-split two-mode bound) is strict below d = N
        assert!(row.var_psi_s <= row.var_noon_exact + 1e-15);
        assert!(row.var_psi_s <= row.var_noon_approx + 1e-15);
        if d == 1 {
            assert!((row.var_psi_s - row.var_noon_exact).abs() < 1e-15);
        } else {
            assert!(row.var_psi_s < row.var_noon_exact);
            assert!(row.var_psi_s < row.var_noon_approx);
        }
        assert!(row.var_noon_approx <= row.var_classical + 1e-12);
        if d == 16 {
            assert!((row.var_noon_approx - row.var_classical).abs() < 1e-12);
        } else {
            assert!(row.var_noon_approx < row.var_classical);
        }
    }
    finish(1, "strategy table", started, 1);
}

/// Criterion 2: the information matrix against both derivative oracles on
/// randomized probes.
#[test]
fn criterion_02_qfi_oracles() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..50 {
        let d = rng.random_range(1..=4usize);
        let photons = rng.random_range(1..=4u32);
        let psi = random_probe(d, photons, &mut rng);
        let theta = random_phases(d, &mut rng);
        let direct = qfi_matrix(&psi);
        let overlap = qfi_via_derivatives(&psi, &theta).unwrap();
        assert!(
            direct.max_abs_diff(&overlap) < 1e-8,
            "case {case}: overlap oracle disagrees"
        );
        let finite = qfi_finite_difference(&psi, &theta, 1e-5).unwrap();
        assert!(
            direct.max_abs_diff(&finite) < 1e-4,
            "case {case}: finite-difference oracle disagrees"
        );
    }
    finish(2, "qfi oracles", started, 30);
}

/// Criterion 3: closed-form information of the single-mode-superposition
/// family and its trace-inverse at the two special amplitudes.
#[test]
fn criterion_03_closed_form_family() {
    let started = Instant::now();
    for d in 1..=8usize {
        let photons = 16u32;
        let n2 = (photons * photons) as f64;
        for alpha in [0.25, optimal_alpha(d), 1.0 / ((d + 1) as f64).sqrt()] {
            if (d as f64) * alpha * alpha > 1.0 {
                continue;
            }
            let psi = make_optimal_state(d, photons, alpha).unwrap();
            let fisher = qfi_matrix(&psi);
            for l in 0..d {
                for m in 0..d {
                    let delta = if l == m { 1.0 } else { 0.0 };
                    let expected = 4.0 * n2 * (delta * alpha * alpha - alpha.powi(4));
                    assert!((fisher.entry(l, m) - expected).abs() < 1e-10);
                }
            }
        }
        let df = d as f64;
        let at_optimum = qcrb_total_variance(&qfi_matrix(
            &make_optimal_state(d, photons, optimal_alpha(d)).unwrap(),
        ))
        .unwrap();
        assert!((at_optimum - (1.0 + df.sqrt()).powi(2) * df / (4.0 * n2)).abs() < 1e-10);
        let at_balanced = qcrb_total_variance(&qfi_matrix(
            &make_balanced_state(d, photons).unwrap(),
        ))
        .unwrap();
        assert!((at_balanced - df * (df + 1.0) / (2.0 * n2)).abs() < 1e-10);
    }
    finish(3, "closed-form family", started, 10);
}

/// Criterion 4: symmetric-logarithmic-derivative structure on randomized
/// probes: vanishing commutator expectation and real products.
#[test]
fn criterion_04_sld_structure() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..25 {
        let d = rng.random_range(1..=4usize);
        let photons = rng.random_range(1..=4u32);
        let psi = random_probe(d, photons, &mut rng);
        let theta = random_phases(d, &mut rng);
        for l in 1..=d {
            for m in 1..=d {
                let commutator = sld_commutator_expectation(&psi, &theta, l, m).unwrap();
                assert!(commutator.norm() < 1e-10);
                let product = sld_product_expectation(&psi, &theta, l, m).unwrap();
                assert!(product.im.abs() < 1e-10);
            }
        }
    }
    finish(4, "sld structure", started, 30);
}

/// Criterion 5: the projective sets saturate the quantum information at the
/// anchor point, and both published projector tables are reproduced.
#[test]
fn criterion_05_saturating_projectors() {
    let started = Instant::now();
    for d in 2..=4usize {
        let psi = make_balanced_state(d, 2).unwrap();
        let cfi = cfi_matrix(&psi, &PhaseVector::zeros(d), &upsilon_projectors(d, 2).unwrap())
            .unwrap();
        assert!(cfi.max_abs_diff(&qfi_matrix(&psi)) < 1e-6, "d={d}");
    }

    let photons = 2u32;
    let row =
        |state: &SparseVector| -> Vec<f64> {
            (0..4)
                .map(|m| {
                    state
                        .amplitude(&FockConfig::single_mode(4, m, photons).unwrap())
                        .re
                })
                .collect()
        };

    // staircase table for three phases, reference mode first
    let set = upsilon_projectors(3, photons).unwrap();
    let states = set.projector_states().unwrap();
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let balanced_table = [
        vec![0.5, 0.5, 0.5, 0.5],
        vec![-1.0 / s2, 1.0 / s2, 0.0, 0.0],
        vec![-1.0 / s6, -1.0 / s6, (2f64 / 3.0).sqrt(), 0.0],
        vec![-0.5 / s3, -0.5 / s3, -0.5 / s3, s3 / 2.0],
    ];
    for (state, expected) in states.iter().zip(&balanced_table) {
        for (value, want) in row(state).iter().zip(expected) {
            assert!((value - want).abs() < 1e-10, "staircase table entry");
        }
    }

    // tailored table for the optimally weighted probe; rows are projectors,
    // so each may come out with either overall sign
    let psi = make_optimal_state(3, photons, optimal_alpha(3)).unwrap();
    let set = optimal_projectors_for(&psi, &PhaseVector::zeros(3)).unwrap();
    let states = set.projector_states().unwrap();
    let optimal_table = [
        vec![
            1.0 / (1.0 + s3).sqrt(),
            1.0 / (3.0 + s3).sqrt(),
            1.0 / (3.0 + s3).sqrt(),
            1.0 / (3.0 + s3).sqrt(),
        ],
        vec![
            -((s3 - 1.0) / 2.0).sqrt(),
            ((3.0 - s3) / 2.0).sqrt(),
            0.0,
            0.0,
        ],
        vec![
            -3f64.powf(0.75) * (s3 - 1.0).sqrt() / (3.0 + s3),
            -(3.0 * (s3 - 1.0)).sqrt() / (3.0 + s3),
            (s3 - 1.0).sqrt(),
            0.0,
        ],
        vec![
            ((3.0 * s3 - 5.0) / 2.0).sqrt(),
            ((9.0 - 5.0 * s3) / 6.0).sqrt(),
            ((9.0 - 5.0 * s3) / 6.0).sqrt(),
            -((3.0 + s3) / 6.0).sqrt(),
        ],
    ];
    for (state, expected) in states.iter().zip(&optimal_table) {
        let values = row(state);
        let direct: f64 = values
            .iter()
            .zip(expected)
            .map(|(v, w)| (v - w).abs())
            .fold(0.0, f64::max);
        let flipped: f64 = values
            .iter()
            .zip(expected)
            .map(|(v, w)| (v + w).abs())
            .fold(0.0, f64::max);
        assert!(direct.min(flipped) < 1e-10, "tailored table row");
    }
    finish(5, "saturating projectors", started, 10);
}

/// Criterion 6: polynomial-expansion amplitudes equal permanent-formula
/// amplitudes on every small input, and the two-photon coincidence is
/// suppressed behind a balanced splitter.
#[test]
fn criterion_06_multiport_oracle() {
    let started = Instant::now();
    for modes in 2..=4usize {
        let unitary = MultiportUnitary::qft(modes);
        let d = modes - 1;
        for photons in 1..=4u32 {
            for input in enumerate_configs(photons, d).unwrap() {
                let state = multiport_output(&unitary, &input).unwrap();
                let outputs = enumerate_configs(photons, d).unwrap();
                let oracle: Vec<_> = outputs
                    .iter()
                    .map(|out| permanent_amplitude(&unitary, &input, out).unwrap())
                    .collect();
                let rotation = oracle
                    .iter()
                    .find(|a| a.norm() > 1e-12)
                    .map(|a| (a / a.norm()).conj())
                    .unwrap();
                for (out, amp) in outputs.iter().zip(&oracle) {
                    assert!(
                        (state.amplitude(out) - amp * rotation).norm() < 1e-10,
                        "modes={modes} input={input} output={out}"
                    );
                }
            }
        }
    }
    let hom = make_hb_state(1, 1).unwrap();
    assert!(hom
        .amplitude(&FockConfig::new(vec![1, 1]).unwrap())
        .norm()
        < 1e-12);
    finish(6, "multiport oracle", started, 60);
}

/// Criterion 7: Holland-Burnett bounds sit strictly between the optimal
/// probe and the two-mode strategy at equal photon number, drifting toward
/// the latter as the per-mode occupancy grows.
#[test]
fn criterion_07_hb_bound_sweep() {
    let started = Instant::now();
    let d = 4usize;
    let mut relative_positions = Vec::new();
    for n in 1..=3u32 {
        let psi = make_hb_state(n, d).unwrap();
        let photons = psi.photons();
        assert_eq!(photons, 5 * n);
        let hb = qcrb_total_variance(&qfi_matrix(&psi)).unwrap();
        let quantum = psi_s_variance(d, photons);
        let two_mode = noon_individual_bound(photons as u64, d, true).unwrap();
        assert!(quantum < hb, "n={n}: HB bound not above the optimal probe");
        assert!(hb < two_mode, "n={n}: HB bound not below the two-mode strategy");
        relative_positions.push((hb - quantum) / (two_mode - quantum));
    }
    assert!(
        relative_positions.windows(2).all(|w| w[0] < w[1]),
        "HB bound does not drift toward the two-mode curve: {relative_positions:?}"
    );
    finish(7, "hb bound sweep", started, 300);
}

/// Criterion 8: the optimized detector information of HB(1, d) behind a
/// Fourier multiport is sandwiched between its quantum bound and the
/// two-mode strategy.
#[test]
fn criterion_08_pnrd_information() {
    let started = Instant::now();
    for d in 2..=3usize {
        let psi = make_hb_state(1, d).unwrap();
        let photons = psi.photons() as u64;
        let quantum = qcrb_total_variance(&qfi_matrix(&psi)).unwrap();
        let povm = pnrd_measurement(MultiportUnitary::qft(d + 1));
        let result = optimize_cfi_phase(&psi, &povm, &PhaseSearchConfig::default()).unwrap();
        let two_mode = noon_individual_bound(photons, d, true).unwrap();
        assert!(
            result.total_variance >= quantum - 1e-8,
            "d={d}: detector variance beat the quantum bound"
        );
        assert!(
            result.total_variance <= two_mode,
            "d={d}: detector variance {} above the two-mode strategy {}",
            result.total_variance,
            two_mode
        );
    }
    finish(8, "pnrd information", started, 600);
}

/// Criterion 9: the numerical probe search recovers the
/// single-mode-superposition optimum on every small sector.
#[test]
fn criterion_09_probe_search() {
    let started = Instant::now();
    let config = ProbeSearchConfig {
        restarts: 8,
        ..Default::default()
    };
    for d in 1..=3usize {
        for photons in 1..=3u32 {
            let result = search_optimal_probe(d, photons, &config).unwrap();
            assert!(
                result.matches_single_mode_family,
                "d={d} N={photons}: optimum is not in the expected family"
            );
            let alpha = result.family_alpha.unwrap();
            assert!(
                (alpha - optimal_alpha(d)).abs() < 1e-4,
                "d={d} N={photons}: amplitude {alpha}"
            );
            let expected = psi_s_variance(d, photons);
            assert!(
                (result.total_variance - expected).abs() < 1e-6,
                "d={d} N={photons}: variance {} vs {expected}",
                result.total_variance
            );
        }
    }
    finish(9, "probe search", started, 600);
}

/// Criterion 10: the Monte-Carlo maximum-likelihood experiment reaches the
/// bound: scaled empirical variance within 20% at the largest trial count.
#[test]
fn criterion_10_mle_convergence() {
    let started = Instant::now();
    let psi = make_balanced_state(2, 2).unwrap();
    let povm = upsilon_projectors(2, 2).unwrap();
    let theta_true = PhaseVector::new(vec![0.05, -0.04]).unwrap();
    let config = MleExperimentConfig {
        trial_ladder: vec![100_000],
        replications: 200,
        seed: 0,
    };
    let rows = mle_experiment(&psi, &theta_true, &povm, &config).unwrap();
    assert_eq!(rows.len(), 200);
    let trials = 100_000f64;
    let scaled: f64 =
        rows.iter().map(|r| r.sq_error).sum::<f64>() / rows.len() as f64 * trials;
    let bound = qcrb_total_variance(&qfi_matrix(&psi)).unwrap();
    assert!(
        (scaled - bound).abs() <= 0.2 * bound,
        "scaled empirical variance {scaled} vs bound {bound}"
    );
    finish(10, "mle convergence", started, 600);
}
