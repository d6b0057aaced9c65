//! Numerical optimizers: the scalar amplitude optimum of the
//! single-mode-superposition family, a multi-start probe search over the full
//! configuration space, and phase-point optimization of the measured
//! information.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::{cfi_from_evaluator, optimal_family_variance, qcrb_total_variance, qfi_matrix};
use crate::fock::{enumerate_configs, FockConfig, PhaseVector, ProbeState, SparseVector};
use crate::povm::PovmSet;

/// Scalar optimum of the single-mode-superposition family.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub total_variance: f64,
}

/// Minimizes the closed-form total variance of the family over the amplitude.
///
/// A golden-section scan brackets the minimum and Newton steps on the
/// stationarity polynomial of the squared amplitude polish it to machine
/// precision.
pub fn optimize_alpha(d: usize, photons: u32) -> Result<AlphaOptimum> {
    if d == 0 || photons == 0 {
        return Err(Error::InvalidArgument(
            "need d >= 1 phases and N >= 1 photons".into(),
        ));
    }
    let df = d as f64;
    let objective = |alpha: f64| {
        optimal_family_variance(d, photons, alpha).unwrap_or(f64::INFINITY)
    };
    let (mut lo, mut hi) = (1e-6, (1.0 / df.sqrt()) * (1.0 - 1e-9));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    for _ in 0..120 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(x2);
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    // stationarity of the variance in x = alpha^2: d(d-1) x^2 - 2 d x + 1 = 0
    let mut x = (0.5 * (lo + hi)).powi(2);
    for _ in 0..60 {
        let value = df * (df - 1.0) * x * x - 2.0 * df * x + 1.0;
        let slope = 2.0 * df * (df - 1.0) * x - 2.0 * df;
        if slope.abs() < f64::MIN_POSITIVE {
            break;
        }
        let next = x - value / slope;
        if !(next.is_finite() && next > 0.0 && next < 1.0 / df) {
            break;
        }
        if (next - x).abs() < 1e-18 {
            x = next;
            break;
        }
        x = next;
    }
    let alpha = x.sqrt();
    Ok(AlphaOptimum {
        alpha,
        total_variance: optimal_family_variance(d, photons, alpha)?,
    })
}

/// Configuration of the multi-start probe search.
#[derive(Clone, Debug)]
pub struct ProbeSearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for ProbeSearchConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 4000,
            grad_tol: 1e-10,
            seed: 0,
        }
    }
}

/// Best probe found by [`search_optimal_probe`].
#[derive(Clone, Debug)]
pub struct ProbeSearchResult {
    pub state: ProbeState,
    pub total_variance: f64,
    pub converged: bool,
    /// Whether the state is, after sorting the phase-mode amplitudes, a
    /// single-mode-superposition with equal weights (tolerance 1e-4).
    pub matches_single_mode_family: bool,
    /// Common phase-mode amplitude when the family shape matched.
    pub family_alpha: Option<f64>,
}

/// Minimizes the total-variance bound over all real non-negative amplitude
/// vectors on the full configuration space.
///
/// The information matrix depends on amplitude moduli only, so the search
/// runs on the unit sphere (square-root simplex coordinates) with analytic
/// gradients and a Barzilai-Borwein step, restarted from random points.
pub fn search_optimal_probe(
    d: usize,
    photons: u32,
    config: &ProbeSearchConfig,
) -> Result<ProbeSearchResult> {
    if photons == 0 {
        return Err(Error::InvalidArgument(
            "probe needs at least one photon".into(),
        ));
    }
    let configs = enumerate_configs(photons, d)?;
    let occupations: Vec<DVector<f64>> = configs
        .iter()
        .map(|c| DVector::from_fn(d, |l, _| c.occupation(l + 1) as f64))
        .collect();
    let objective = QfiObjective {
        d,
        occupations: &occupations,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let starts: Vec<Vec<f64>> = (0..config.restarts.max(1))
        .map(|_| {
            (0..configs.len())
                .map(|_| rng.random_range(0.1..1.1))
                .collect()
        })
        .collect();

    let runs: Vec<(usize, Vec<f64>, f64, bool)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(index, start)| {
            let (z, value, converged) =
                minimize_on_sphere(&objective, start, config.max_iters, config.grad_tol);
            (index, z, value, converged)
        })
        .collect();
    let best = runs
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    if !best.2.is_finite() {
        return Err(Error::SingularFisher {
            direction: vec![0.0; d],
        });
    }

    let scale: f64 = best.1.iter().map(|z| z * z).sum::<f64>().sqrt();
    let terms: Vec<(FockConfig, C64)> = configs
        .iter()
        .zip(&best.1)
        .map(|(c, z)| (c.clone(), C64::new(z.abs() / scale, 0.0)))
        .collect();
    let state = ProbeState::new(SparseVector::from_terms(d, photons, terms)?.pruned(1e-12))?;
    let total_variance = qcrb_total_variance(&qfi_matrix(&state))?;

    let (matches, family_alpha) = family_shape(&state, 1e-4);
    Ok(ProbeSearchResult {
        state,
        total_variance,
        converged: best.3,
        matches_single_mode_family: matches,
        family_alpha,
    })
}

/// Checks the single-mode-superposition shape after canonicalization: no
/// weight outside the single-mode configurations and equal weights on the
/// phase modes, to `tol` per amplitude.
fn family_shape(state: &ProbeState, tol: f64) -> (bool, Option<f64>) {
    let d = state.d();
    let photons = state.photons();
    let modes = d + 1;
    let mut single = vec![0.0; modes];
    let mut stray: f64 = 0.0;
    for (config, amp) in state.terms() {
        let mode = (0..modes).find(|&m| config.occupation(m) == photons);
        match mode {
            Some(m) => single[m] = amp.norm(),
            None => stray = stray.max(amp.norm()),
        }
    }
    if stray > tol {
        return (false, None);
    }
    let mean = single[1..].iter().sum::<f64>() / d as f64;
    let equal = single[1..].iter().all(|a| (a - mean).abs() <= tol);
    if equal {
        (true, Some(mean))
    } else {
        (false, None)
    }
}

struct QfiObjective<'a> {
    d: usize,
    occupations: &'a [DVector<f64>],
}

impl QfiObjective<'_> {
    /// Value and gradient of `tr(F^-1)` in sphere coordinates; `None` when
    /// the information matrix is singular at this point.
    fn eval(&self, z: &[f64]) -> Option<(f64, Vec<f64>)> {
        let d = self.d;
        let scale: f64 = z.iter().map(|v| v * v).sum();
        let weights: Vec<f64> = z.iter().map(|v| v * v / scale).collect();

        let mut mean = DVector::<f64>::zeros(d);
        let mut second = DMatrix::<f64>::zeros(d, d);
        for (w, occ) in weights.iter().zip(self.occupations) {
            mean.axpy(*w, occ, 1.0);
            second.ger(*w, occ, occ, 1.0);
        }
        let fisher = 4.0 * (second - &mean * mean.transpose());
        let eigen = fisher.symmetric_eigen();
        let max_eig = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
        if eigen
            .eigenvalues
            .iter()
            .any(|v| *v <= 1e-12 * max_eig.max(f64::MIN_POSITIVE))
        {
            return None;
        }
        let value: f64 = eigen.eigenvalues.iter().map(|v| 1.0 / v).sum();

        // G = F^-2 through the same eigenbasis
        let mut inv_sq = DMatrix::<f64>::zeros(d, d);
        for (i, lambda) in eigen.eigenvalues.iter().enumerate() {
            let column = eigen.eigenvectors.column(i);
            inv_sq.ger(1.0 / (lambda * lambda), &column, &column, 1.0);
        }
        let pulled = &inv_sq * &mean;
        let grad_weights: Vec<f64> = self
            .occupations
            .iter()
            .map(|occ| {
                let quad = occ.dot(&(&inv_sq * occ));
                let cross = occ.dot(&pulled);
                -4.0 * (quad - 2.0 * cross)
            })
            .collect();
        let mixed: f64 = weights
            .iter()
            .zip(&grad_weights)
            .map(|(w, g)| w * g)
            .sum();
        let gradient = z
            .iter()
            .zip(&grad_weights)
            .map(|(zi, g)| 2.0 * zi * (g - mixed) / scale)
            .collect();
        Some((value, gradient))
    }
}

/// Projected gradient descent on the unit sphere with a Barzilai-Borwein
/// step and a monotone backtracking safeguard.
fn minimize_on_sphere(
    objective: &QfiObjective<'_>,
    start: Vec<f64>,
    max_iters: usize,
    grad_tol: f64,
) -> (Vec<f64>, f64, bool) {
    let normalize = |z: &mut Vec<f64>| {
        let norm: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in z.iter_mut() {
            *v /= norm;
        }
    };
    let mut z = start;
    normalize(&mut z);
    let Some((mut value, mut gradient)) = objective.eval(&z) else {
        return (z, f64::INFINITY, false);
    };
    let mut step = 1e-2;
    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..max_iters {
        let grad_norm: f64 = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm < grad_tol {
            return (z, value, true);
        }
        if let Some((prev_z, prev_g)) = &previous {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..z.len() {
                let dz = z[i] - prev_z[i];
                let dg = gradient[i] - prev_g[i];
                num += dz * dg;
                den += dg * dg;
            }
            if den > 0.0 && num.abs() > 0.0 {
                step = (num.abs() / den).clamp(1e-12, 1e3);
            }
        }
        let mut trial_step = step;
        let mut accepted = false;
        for _ in 0..50 {
            let mut trial: Vec<f64> = z
                .iter()
                .zip(&gradient)
                .map(|(zi, gi)| zi - trial_step * gi)
                .collect();
            normalize(&mut trial);
            if let Some((trial_value, trial_grad)) = objective.eval(&trial) {
                if trial_value < value {
                    previous = Some((z, gradient));
                    z = trial;
                    let plateau = (value - trial_value).abs() < 1e-16 * (1.0 + value.abs());
                    value = trial_value;
                    gradient = trial_grad;
                    accepted = true;
                    if plateau {
                        return (z, value, true);
                    }
                    break;
                }
            }
            trial_step *= 0.5;
        }
        if !accepted {
            // no descent direction left at float resolution
            return (z, value, grad_norm < 1e-6);
        }
    }
    (z, value, false)
}

/// Configuration of the phase-point optimization.
#[derive(Clone, Debug)]
pub struct PhaseSearchConfig {
    /// Per-axis resolution of the seeding grid over `[0, 2 pi)`.
    pub grid_resolution: usize,
    /// Number of local searches launched from the best grid points.
    pub starts: usize,
    pub max_iters: usize,
    pub x_tol: f64,
    pub f_tol: f64,
}

impl Default for PhaseSearchConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 8,
            starts: 4,
            max_iters: 600,
            x_tol: 1e-10,
            f_tol: 1e-13,
        }
    }
}

/// Best phase point found by [`optimize_cfi_phase`].
#[derive(Clone, Debug)]
pub struct PhaseSearchResult {
    pub theta: PhaseVector,
    pub total_variance: f64,
}

/// Minimizes the trace of the inverse classical Fisher information over the
/// phase point, seeding a derivative-free simplex search from a coarse grid.
/// Deterministic: the grid and the simplex updates involve no randomness.
pub fn optimize_cfi_phase(
    psi: &ProbeState,
    povm: &PovmSet,
    config: &PhaseSearchConfig,
) -> Result<PhaseSearchResult> {
    let d = psi.d();
    let evaluator = povm.evaluator(psi)?;
    let objective = |theta: &[f64]| -> f64 {
        let Ok(phases) = PhaseVector::new(theta.to_vec()) else {
            return f64::INFINITY;
        };
        match cfi_from_evaluator(&evaluator, &phases) {
            Ok(fisher) => qcrb_total_variance(&fisher).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };

    let resolution = config.grid_resolution.max(1);
    let spacing = 2.0 * std::f64::consts::PI / resolution as f64;
    let mut seeds: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut point = vec![0usize; d];
    loop {
        let theta: Vec<f64> = point.iter().map(|k| *k as f64 * spacing).collect();
        let value = objective(&theta);
        if value.is_finite() {
            seeds.push((theta, value));
        }
        // odometer increment over the grid
        let mut axis = 0;
        loop {
            if axis == d {
                break;
            }
            point[axis] += 1;
            if point[axis] < resolution {
                break;
            }
            point[axis] = 0;
            axis += 1;
        }
        if axis == d {
            break;
        }
    }
    if seeds.is_empty() {
        return Err(Error::AllStartsSingular {
            probe: format!("probe(d = {}, N = {}, {} terms)", d, psi.photons(), psi.len()),
            povm: povm.describe(),
        });
    }
    seeds.sort_by(|a, b| a.1.total_cmp(&b.1));
    seeds.truncate(config.starts.max(1));

    let mut best: Option<(Vec<f64>, f64)> = None;
    for (seed, seed_value) in seeds {
        let options = NelderMeadOptions {
            max_iters: config.max_iters,
            x_tol: config.x_tol,
            f_tol: config.f_tol,
            step: 0.25 * spacing,
            lower: None,
            upper: None,
        };
        let (theta, value, _) = nelder_mead(&objective, &seed, &options);
        let (theta, value) = if value <= seed_value {
            (theta, value)
        } else {
            (seed, seed_value)
        };
        match &best {
            Some((_, best_value)) if *best_value <= value => {}
            _ => best = Some((theta, value)),
        }
    }
    let (theta, total_variance) = best.expect("seeds were nonempty");
    if !total_variance.is_finite() {
        return Err(Error::AllStartsSingular {
            probe: format!("probe(d = {}, N = {}, {} terms)", d, psi.photons(), psi.len()),
            povm: povm.describe(),
        });
    }
    Ok(PhaseSearchResult {
        theta: PhaseVector::new(theta)?,
        total_variance,
    })
}

pub(crate) struct NelderMeadOptions {
    pub max_iters: usize,
    pub x_tol: f64,
    pub f_tol: f64,
    pub step: f64,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

/// Plain Nelder-Mead simplex minimizer with optional box clamping.
pub(crate) fn nelder_mead(
    objective: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    options: &NelderMeadOptions,
) -> (Vec<f64>, f64, bool) {
    let n = start.len();
    let clamp = |x: &mut Vec<f64>| {
        if let Some(lower) = &options.lower {
            for (xi, lo) in x.iter_mut().zip(lower) {
                *xi = xi.max(*lo);
            }
        }
        if let Some(upper) = &options.upper {
            for (xi, hi) in x.iter_mut().zip(upper) {
                *xi = xi.min(*hi);
            }
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut base = start.to_vec();
    clamp(&mut base);
    simplex.push((base.clone(), objective(&base)));
    for i in 0..n {
        let mut vertex = base.clone();
        vertex[i] += options.step;
        clamp(&mut vertex);
        let value = objective(&vertex);
        simplex.push((vertex, value));
    }

    let mut converged = false;
    for _ in 0..options.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = simplex
            .iter()
            .skip(1)
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= options.f_tol * (1.0 + best.abs()) && spread <= options.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let reflect = |factor: f64| -> (Vec<f64>, f64) {
            let mut point: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + factor * (c - w))
                .collect();
            clamp(&mut point);
            let value = objective(&point);
            (point, value)
        };

        let (reflected, reflected_value) = reflect(1.0);
        if reflected_value < simplex[0].1 {
            let (expanded, expanded_value) = reflect(2.0);
            simplex[n] = if expanded_value < reflected_value {
                (expanded, expanded_value)
            } else {
                (reflected, reflected_value)
            };
        } else if reflected_value < simplex[n - 1].1 {
            simplex[n] = (reflected, reflected_value);
        } else {
            let (contracted, contracted_value) = if reflected_value < simplex[n].1 {
                reflect(0.5)
            } else {
                reflect(-0.5)
            };
            if contracted_value < simplex[n].1.min(reflected_value) {
                simplex[n] = (contracted, contracted_value);
            } else {
                // shrink toward the best vertex
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let mut shrunk: Vec<f64> = vertex
                        .0
                        .iter()
                        .zip(&anchor)
                        .map(|(x, a)| a + 0.5 * (x - a))
                        .collect();
                    clamp(&mut shrunk);
                    let value = objective(&shrunk);
                    *vertex = (shrunk, value);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    (x, value, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::psi_s_variance;
    use crate::povm::{identity_povm, upsilon_projectors};
    use crate::probes::{make_balanced_state, optimal_alpha};

    #[test]
    fn alpha_optimum_matches_closed_form() {
        let result = optimize_alpha(4, 16).unwrap();
        assert!((result.alpha - 1.0 / 6f64.sqrt()).abs() < 1e-10);
        assert!((result.total_variance - 9.0 / 256.0).abs() < 1e-12);

        let result = optimize_alpha(1, 4).unwrap();
        assert!((result.alpha - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((result.total_variance - 1.0 / 16.0).abs() < 1e-12);

        let result = optimize_alpha(9, 9).unwrap();
        assert!((result.total_variance - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_optimum_is_stationary() {
        for d in [1usize, 2, 5, 8] {
            let result = optimize_alpha(d, 6).unwrap();
            let h = 1e-6;
            let plus = optimal_family_variance(d, 6, result.alpha + h).unwrap();
            let minus = optimal_family_variance(d, 6, result.alpha - h).unwrap();
            assert!(((plus - minus) / (2.0 * h)).abs() < 1e-8, "d = {d}");
        }
    }

    #[test]
    fn probe_search_recovers_noon_state() {
        let config = ProbeSearchConfig {
            restarts: 4,
            ..Default::default()
        };
        let result = search_optimal_probe(1, 2, &config).unwrap();
        assert!(result.matches_single_mode_family);
        assert!((result.total_variance - 0.25).abs() < 1e-6);
        let alpha = result.family_alpha.unwrap();
        assert!((alpha - 0.5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn probe_search_two_phases() {
        let config = ProbeSearchConfig {
            restarts: 6,
            ..Default::default()
        };
        let result = search_optimal_probe(2, 2, &config).unwrap();
        assert!(result.matches_single_mode_family);
        let expected = psi_s_variance(2, 2);
        assert!((result.total_variance - expected).abs() < 1e-6);
        assert!(result.total_variance > expected - 1e-9);
        let alpha = result.family_alpha.unwrap();
        assert!((alpha - optimal_alpha(2)).abs() < 1e-4);
    }

    #[test]
    fn phase_search_saturates_for_the_staircase_set() {
        let psi = make_balanced_state(1, 2).unwrap();
        let povm = upsilon_projectors(1, 2).unwrap();
        let result = optimize_cfi_phase(&psi, &povm, &PhaseSearchConfig::default()).unwrap();
        assert!((result.total_variance - 0.25).abs() < 1e-8);
    }

    #[test]
    fn phase_search_rejects_uninformative_measurements() {
        let psi = make_balanced_state(2, 2).unwrap();
        let result = optimize_cfi_phase(&psi, &identity_povm(), &PhaseSearchConfig::default());
        assert!(matches!(result, Err(Error::AllStartsSingular { .. })));
    }

    #[test]
    fn nelder_mead_minimizes_quadratic() {
        let objective =
            |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let options = NelderMeadOptions {
            max_iters: 500,
            x_tol: 1e-10,
            f_tol: 1e-14,
            step: 0.5,
            lower: None,
            upper: None,
        };
        let (x, value, converged) = nelder_mead(&objective, &[0.0, 0.0], &options);
        assert!(converged);
        assert!(value < 1e-12);
        assert!((x[0] - 1.5).abs() < 1e-5 && (x[1] + 0.5).abs() < 1e-5);
    }
}
