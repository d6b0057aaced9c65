//! Measurement sets: the staircase projector family that saturates the
//! quantum bound at a chosen phase point, and the Fourier-multiport plus
//! photon-number-resolving-detector model.
//!
//! Projector sets are completed to a literal POVM by a residual element
//! (identity minus the listed projectors on the photon-number sector). The
//! residual never fires for probes supported on the single-mode-occupied
//! configurations, but completeness then holds as stated, not approximately.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{config_count, enumerate_configs, FockConfig, PhaseVector, ProbeState, SparseVector};
use crate::probes::{multiport_raw, MultiportUnitary};

/// Orthonormality / completeness tolerance for validating a measurement set.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;

/// One photon-number-resolving detection pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct PnrdOutcome {
    pub counts: FockConfig,
}

/// A finite measurement set on the `N`-photon sector.
#[derive(Clone, Debug)]
pub struct PovmSet {
    kind: PovmKind,
}

#[derive(Clone, Debug)]
enum PovmKind {
    Projectors {
        d: usize,
        photons: u32,
        states: Vec<SparseVector>,
        with_residual: bool,
        label: String,
    },
    Pnrd {
        unitary: MultiportUnitary,
    },
    Identity,
}

impl PovmSet {
    /// Projectors onto the given unit vectors, optionally completed by the
    /// sector residual. The vectors must be orthonormal; that is what keeps
    /// the residual positive.
    pub fn from_projectors(states: Vec<SparseVector>, with_residual: bool) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyState)?;
        let (d, photons) = (first.d(), first.photons());
        let set = Self {
            kind: PovmKind::Projectors {
                d,
                photons,
                states,
                with_residual,
                label: "projector".into(),
            },
        };
        set.verify_complete(d, photons)?;
        Ok(set)
    }

    /// Fourier-multiport (or any passive network) followed by ideal
    /// photon-number-resolving detectors: one outcome per detection pattern.
    pub fn pnrd(unitary: MultiportUnitary) -> Self {
        Self {
            kind: PovmKind::Pnrd { unitary },
        }
    }

    /// The trivial single-element measurement; it carries no information.
    pub fn identity() -> Self {
        Self {
            kind: PovmKind::Identity,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            PovmKind::Projectors { states, label, .. } => {
                format!("{label} set ({} states + residual)", states.len())
            }
            PovmKind::Pnrd { unitary } => format!("pnrd({} modes)", unitary.dim()),
            PovmKind::Identity => "identity".into(),
        }
    }

    /// The projector state vectors of a projective set, in outcome order.
    pub fn projector_states(&self) -> Option<&[SparseVector]> {
        match &self.kind {
            PovmKind::Projectors { states, .. } => Some(states),
            _ => None,
        }
    }

    /// Checks that the set is complete on the sector of `photons` photons in
    /// `d + 1` modes to [`COMPLETENESS_TOLERANCE`].
    pub fn verify_complete(&self, d: usize, photons: u32) -> Result<()> {
        match &self.kind {
            PovmKind::Projectors {
                d: set_d,
                photons: set_photons,
                states,
                with_residual,
                ..
            } => {
                if *set_d != d || *set_photons != photons {
                    return Err(Error::DimensionMismatch(format!(
                        "measurement lives in (d = {set_d}, N = {set_photons}), probe in (d = {d}, N = {photons})"
                    )));
                }
                let mut deviation: f64 = 0.0;
                for (i, a) in states.iter().enumerate() {
                    for (j, b) in states.iter().enumerate() {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        let overlap = a.inner(b)?;
                        deviation = deviation.max((overlap - expected).norm());
                    }
                }
                if deviation > COMPLETENESS_TOLERANCE {
                    return Err(Error::IncompletePovm { deviation });
                }
                if !with_residual {
                    let sector = config_count(photons, d)?;
                    if states.len() as u64 != sector {
                        return Err(Error::IncompletePovm { deviation: 1.0 });
                    }
                }
                Ok(())
            }
            PovmKind::Pnrd { unitary } => {
                if unitary.dim() != d + 1 {
                    return Err(Error::DimensionMismatch(format!(
                        "multiport has {} modes, probe has {}",
                        unitary.dim(),
                        d + 1
                    )));
                }
                let deviation = unitary.unitarity_deviation();
                if deviation > COMPLETENESS_TOLERANCE {
                    return Err(Error::IncompletePovm { deviation });
                }
                config_count(photons, d)?;
                Ok(())
            }
            PovmKind::Identity => Ok(()),
        }
    }

    /// Detection patterns of the PNRD model for a `photons`-photon probe, in
    /// the lexicographic order used everywhere else.
    pub fn pnrd_outcomes(&self, photons: u32) -> Result<Vec<PnrdOutcome>> {
        match &self.kind {
            PovmKind::Pnrd { unitary } => Ok(enumerate_configs(photons, unitary.dim() - 1)?
                .into_iter()
                .map(|counts| PnrdOutcome { counts })
                .collect()),
            _ => Err(Error::InvalidArgument(
                "detection patterns exist only for the pnrd measurement".into(),
            )),
        }
    }

    /// Binds the measurement to a probe's sector and precomputes everything
    /// that does not depend on the phases.
    pub fn evaluator(&self, psi: &ProbeState) -> Result<PovmEvaluator> {
        let d = psi.d();
        let photons = psi.photons();
        self.verify_complete(d, photons)?;

        let support: Vec<FockConfig> = psi.terms().map(|(c, _)| c.clone()).collect();
        let amps: Vec<C64> = psi.terms().map(|(_, a)| *a).collect();
        let occupations: Vec<Vec<f64>> = support
            .iter()
            .map(|c| (1..=d).map(|m| c.occupation(m) as f64).collect())
            .collect();

        let (kind, labels) = match &self.kind {
            PovmKind::Projectors {
                states,
                with_residual,
                label,
                ..
            } => {
                let overlaps: Vec<Vec<C64>> = states
                    .iter()
                    .map(|state| support.iter().map(|c| state.amplitude(c).conj()).collect())
                    .collect();
                // <d_l psi | d_m psi> is phase-independent: occupation moments
                // of the fixed amplitude weights.
                let mut deriv_gram = DMatrix::<f64>::zeros(d, d);
                for (t, amp) in amps.iter().enumerate() {
                    let w = amp.norm_sqr();
                    for l in 0..d {
                        for m in 0..d {
                            deriv_gram[(l, m)] += w * occupations[t][l] * occupations[t][m];
                        }
                    }
                }
                let mut labels: Vec<String> = (0..states.len())
                    .map(|k| format!("{label}_{k}"))
                    .collect();
                if *with_residual {
                    labels.push("residual".into());
                }
                (
                    EvalKind::Projectors {
                        overlaps,
                        with_residual: *with_residual,
                        deriv_gram,
                    },
                    labels,
                )
            }
            PovmKind::Pnrd { unitary } => {
                let outcomes = enumerate_configs(photons, d)?;
                let index: std::collections::BTreeMap<&FockConfig, usize> =
                    outcomes.iter().enumerate().map(|(i, c)| (c, i)).collect();
                let mut transform = DMatrix::<C64>::zeros(outcomes.len(), support.len());
                for (t, config) in support.iter().enumerate() {
                    let image = multiport_raw(unitary, config)?;
                    for (out_config, amp) in image.terms() {
                        transform[(index[out_config], t)] = *amp;
                    }
                }
                let labels = outcomes.iter().map(|c| c.to_string()).collect();
                (EvalKind::Pnrd { transform }, labels)
            }
            PovmKind::Identity => (EvalKind::Identity, vec!["identity".into()]),
        };

        Ok(PovmEvaluator {
            d,
            support_amps: amps,
            occupations,
            kind,
            labels,
        })
    }
}

/// Probability, phase gradient, and limiting quadratic form of one outcome.
///
/// `quadratic[(l, m)] = 4 Re <d_l psi| Pi |d_m psi>` is the value the Fisher
/// term `grad_l grad_m / p` tends to where the probability vanishes — but
/// only when the derivative overlaps share a common phase, which makes the
/// limit direction-independent. `limit_valid` records that; where it fails
/// the information of the vanishing outcome has no single limiting value and
/// the outcome contributes nothing at the exact zero.
#[derive(Clone, Debug)]
pub struct OutcomeStat {
    pub probability: f64,
    pub gradient: DVector<f64>,
    pub quadratic: DMatrix<f64>,
    pub limit_valid: bool,
}

/// A measurement bound to a specific probe sector.
pub struct PovmEvaluator {
    d: usize,
    support_amps: Vec<C64>,
    occupations: Vec<Vec<f64>>,
    kind: EvalKind,
    labels: Vec<String>,
}

enum EvalKind {
    Projectors {
        overlaps: Vec<Vec<C64>>,
        with_residual: bool,
        deriv_gram: DMatrix<f64>,
    },
    Pnrd {
        transform: DMatrix<C64>,
    },
    Identity,
}

impl PovmEvaluator {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn outcome_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn evolved_amps(&self, theta: &PhaseVector) -> Result<Vec<C64>> {
        if theta.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{} phases supplied for {} phase modes",
                theta.d(),
                self.d
            )));
        }
        Ok(self
            .support_amps
            .iter()
            .zip(&self.occupations)
            .map(|(amp, occ)| {
                let dot: f64 = occ
                    .iter()
                    .zip(theta.as_slice())
                    .map(|(n, t)| n * t)
                    .sum();
                amp * C64::from_polar(1.0, dot)
            })
            .collect())
    }

    /// Outcome probabilities at `theta`, in the set's outcome order.
    pub fn probabilities(&self, theta: &PhaseVector) -> Result<Vec<f64>> {
        let evolved = self.evolved_amps(theta)?;
        match &self.kind {
            EvalKind::Projectors {
                overlaps,
                with_residual,
                ..
            } => {
                let mut probs: Vec<f64> = overlaps
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(&evolved)
                            .map(|(o, a)| o * a)
                            .sum::<C64>()
                            .norm_sqr()
                    })
                    .collect();
                if *with_residual {
                    let used: f64 = probs.iter().sum();
                    probs.push((1.0 - used).max(0.0));
                }
                Ok(probs)
            }
            EvalKind::Pnrd { transform } => {
                let amp = DVector::from_vec(evolved);
                Ok((transform * amp).iter().map(|x| x.norm_sqr()).collect())
            }
            EvalKind::Identity => Ok(vec![1.0]),
        }
    }

    /// Probability, gradient, and limiting quadratic form per outcome.
    pub fn outcome_stats(&self, theta: &PhaseVector) -> Result<Vec<OutcomeStat>> {
        let evolved = self.evolved_amps(theta)?;
        let d = self.d;
        // i * n_l weighted amplitudes: components of |d_l psi_theta>
        let derivative_amps: Vec<Vec<C64>> = (0..d)
            .map(|l| {
                evolved
                    .iter()
                    .zip(&self.occupations)
                    .map(|(a, occ)| a * C64::new(0.0, occ[l]))
                    .collect()
            })
            .collect();

        match &self.kind {
            EvalKind::Projectors {
                overlaps,
                with_residual,
                deriv_gram,
            } => {
                let mut stats = Vec::with_capacity(overlaps.len() + 1);
                let mut residual_prob = 1.0;
                let mut residual_grad = DVector::<f64>::zeros(d);
                let mut residual_cross = DMatrix::<C64>::zeros(d, d);
                for row in overlaps {
                    let amp0: C64 = row.iter().zip(&evolved).map(|(o, a)| o * a).sum();
                    let overlap_derivs: Vec<C64> = derivative_amps
                        .iter()
                        .map(|damps| row.iter().zip(damps).map(|(o, a)| o * a).sum())
                        .collect();
                    let stat = element_stat(amp0, &overlap_derivs);
                    residual_prob -= stat.probability;
                    residual_grad -= &stat.gradient;
                    for l in 0..d {
                        for m in 0..d {
                            residual_cross[(l, m)] +=
                                overlap_derivs[l].conj() * overlap_derivs[m];
                        }
                    }
                    stats.push(stat);
                }
                if *with_residual {
                    let mut quadratic = DMatrix::<f64>::zeros(d, d);
                    for l in 0..d {
                        for m in 0..d {
                            quadratic[(l, m)] =
                                4.0 * (deriv_gram[(l, m)] - residual_cross[(l, m)].re);
                        }
                    }
                    // a never-firing residual annihilates the derivative
                    // states too, so its limit form must be numerically zero;
                    // anything else has no direction-independent limit
                    let gram_scale = deriv_gram.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
                    let limit_valid = quadratic
                        .iter()
                        .all(|x| x.abs() <= 1e-9 * gram_scale);
                    stats.push(OutcomeStat {
                        probability: residual_prob.max(0.0),
                        gradient: residual_grad,
                        quadratic,
                        limit_valid,
                    });
                }
                Ok(stats)
            }
            EvalKind::Pnrd { transform } => {
                let amp = DVector::from_vec(evolved);
                let image = transform * amp;
                let derivative_images: Vec<DVector<C64>> = derivative_amps
                    .iter()
                    .map(|damps| transform * DVector::from_vec(damps.clone()))
                    .collect();
                let mut stats = Vec::with_capacity(image.len());
                for o in 0..image.len() {
                    let overlap_derivs: Vec<C64> =
                        derivative_images.iter().map(|col| col[o]).collect();
                    stats.push(element_stat(image[o], &overlap_derivs));
                }
                Ok(stats)
            }
            EvalKind::Identity => Ok(vec![OutcomeStat {
                probability: 1.0,
                gradient: DVector::zeros(d),
                quadratic: DMatrix::zeros(d, d),
                limit_valid: true,
            }]),
        }
    }
}

fn element_stat(amp0: C64, overlap_derivs: &[C64]) -> OutcomeStat {
    let d = overlap_derivs.len();
    let probability = amp0.norm_sqr();
    let gradient =
        DVector::from_fn(d, |l, _| 2.0 * (amp0.conj() * overlap_derivs[l]).re);
    let quadratic = DMatrix::from_fn(d, d, |l, m| {
        4.0 * (overlap_derivs[l].conj() * overlap_derivs[m]).re
    });
    let largest = overlap_derivs
        .iter()
        .cloned()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(C64::new(0.0, 0.0));
    let limit_valid = if largest.norm() == 0.0 {
        true
    } else {
        let reference = largest / largest.norm();
        overlap_derivs
            .iter()
            .all(|c| (c * reference.conj()).im.abs() <= 1e-8 * largest.norm())
    };
    OutcomeStat {
        probability,
        gradient,
        quadratic,
        limit_valid,
    }
}

/// Staircase projector set over the single-mode-occupied configurations.
///
/// Row 0 is uniform, `1/sqrt(d + 1)` on every configuration; row `l >= 1` has
/// `-1/sqrt(l (l + 1))` on modes `0..l`, `sqrt(l / (l + 1))` on mode `l`, and
/// zero beyond. Rows are orthonormal and each outcome probability involves
/// only the phases up to its own index.
pub fn upsilon_projectors(d: usize, photons: u32) -> Result<PovmSet> {
    if d == 0 {
        return Err(Error::InvalidArgument("need at least one phase mode".into()));
    }
    let modes = d + 1;
    let mut states = Vec::with_capacity(modes);
    let uniform = 1.0 / (modes as f64).sqrt();
    states.push(basis_combination(d, photons, &vec![uniform; modes])?);
    for l in 1..=d {
        let mut coeffs = vec![0.0; modes];
        let lf = l as f64;
        coeffs[..l].fill(-1.0 / (lf * (lf + 1.0)).sqrt());
        coeffs[l] = (lf / (lf + 1.0)).sqrt();
        states.push(basis_combination(d, photons, &coeffs)?);
    }
    let mut set = PovmSet::from_projectors(states, true)?;
    if let PovmKind::Projectors { label, .. } = &mut set.kind {
        *label = "upsilon".into();
    }
    Ok(set)
}

fn basis_combination(d: usize, photons: u32, coeffs: &[f64]) -> Result<SparseVector> {
    let modes = d + 1;
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > 0.0)
        .map(|(mode, c)| {
            Ok((
                FockConfig::single_mode(modes, mode, photons)?,
                C64::new(*c, 0.0),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    SparseVector::from_terms(d, photons, terms)
}

/// Projector set saturating the quantum bound for a single-mode-superposition
/// probe at the phase point `theta_s`.
///
/// The first element projects onto the evolved probe itself. Each further
/// element is built iteratively from the minimal number of basis
/// configurations needed to stay orthogonal to everything before it, walking
/// the modes in increasing order; the overall phase of each element makes its
/// last nonzero coefficient real and positive.
pub fn optimal_projectors_for(psi: &ProbeState, theta_s: &PhaseVector) -> Result<PovmSet> {
    let d = psi.d();
    let photons = psi.photons();
    let modes = d + 1;

    // probe must live on the single-mode-occupied configurations
    let mut probe_coeffs = vec![C64::new(0.0, 0.0); modes];
    for (config, amp) in psi.apply_phases(theta_s)?.terms() {
        let mode = (0..modes).find(|&m| config.occupation(m) == photons);
        match mode {
            Some(m) if config.total() == photons => probe_coeffs[m] = *amp,
            _ => return Err(Error::UnsupportedProbe),
        }
    }

    let mut elements: Vec<Vec<C64>> = vec![probe_coeffs];
    for l in 1..=d {
        // constraints: every earlier element restricted to modes 0..=l
        let constraints: Vec<Vec<C64>> = elements.iter().map(|e| e[..=l].to_vec()).collect();
        let basis = orthonormalize(&constraints);
        let mut accepted = None;
        for candidate_mode in (0..=l).rev() {
            let mut candidate = vec![C64::new(0.0, 0.0); l + 1];
            candidate[candidate_mode] = C64::new(1.0, 0.0);
            for w in &basis {
                let coeff = complex_inner(w, &candidate);
                for (c, wi) in candidate.iter_mut().zip(w) {
                    *c -= coeff * wi;
                }
            }
            let norm = complex_norm(&candidate);
            if norm > 1e-8 {
                for c in candidate.iter_mut() {
                    *c /= norm;
                }
                accepted = Some(candidate);
                break;
            }
        }
        let mut element = accepted.ok_or(Error::UnsupportedProbe)?;
        fix_phase(&mut element);
        element.resize(modes, C64::new(0.0, 0.0));
        elements.push(element);
    }

    let states = elements
        .iter()
        .map(|coeffs| {
            let terms = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > 1e-15)
                .map(|(mode, c)| Ok((FockConfig::single_mode(modes, mode, photons)?, *c)))
                .collect::<Result<Vec<_>>>()?;
            SparseVector::from_terms(d, photons, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    PovmSet::from_projectors(states, true)
}

fn complex_inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn complex_norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; near-dependent
/// inputs are dropped.
fn orthonormalize(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for vector in vectors {
        let mut v = vector.clone();
        for _ in 0..2 {
            for w in &basis {
                let coeff = complex_inner(w, &v);
                for (vi, wi) in v.iter_mut().zip(w) {
                    *vi -= coeff * wi;
                }
            }
        }
        let norm = complex_norm(&v);
        if norm > 1e-12 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

fn fix_phase(coeffs: &mut [C64]) {
    if let Some(last) = coeffs.iter().rev().find(|c| c.norm() > 1e-10) {
        let rot = (last / last.norm()).conj();
        for c in coeffs.iter_mut() {
            *c *= rot;
        }
    }
}

/// PNRD measurement behind a multiport.
pub fn pnrd_measurement(unitary: MultiportUnitary) -> PovmSet {
    PovmSet::pnrd(unitary)
}

/// The trivial one-element measurement.
pub fn identity_povm() -> PovmSet {
    PovmSet::identity()
}

/// Outcome probabilities of `povm` on the evolved probe, in the set's
/// deterministic outcome order.
pub fn outcome_distribution(
    psi: &ProbeState,
    theta: &PhaseVector,
    povm: &PovmSet,
) -> Result<Vec<f64>> {
    povm.evaluator(psi)?.probabilities(theta)
}
