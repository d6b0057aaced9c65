//! Quantum and classical Fisher information, Cramér-Rao bounds, and the
//! analytic variance bounds the strategy comparison is built on.
//!
//! The direct matrix builder works from amplitude moduli alone (occupation
//! moments). Two independent oracles cross-check it: one from analytic
//! derivative-state overlaps, one from central finite differences of the
//! evolved state (step `h`, error `O(h^2)`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{PhaseVector, ProbeState};
use crate::povm::{OutcomeStat, PovmEvaluator, PovmSet};

/// Outcomes with probability below this floor enter the classical Fisher
/// information through their limiting quadratic form instead of the raw
/// `grad^T grad / p` ratio, which is 0/0 there.
pub const CFI_PROBABILITY_FLOOR: f64 = 1e-12;

/// Relative eigenvalue cutoff below which a Fisher matrix counts as singular.
pub const SINGULAR_CUTOFF: f64 = 1e-10;

/// Real symmetric positive-semidefinite information matrix for `d` phases.
///
/// Row and column `i` correspond to phase mode `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FisherMatrix {
    d: usize,
    entries: DMatrix<f64>,
}

impl FisherMatrix {
    /// Validates symmetry (1e-10) and positive semidefiniteness
    /// (eigenvalues >= -1e-10), then stores the symmetrized matrix.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::NotFisher(format!(
                "matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = (&entries - entries.transpose())
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        if asym > 1e-10 {
            return Err(Error::NotFisher(format!(
                "asymmetry {asym:.3e} exceeds 1e-10"
            )));
        }
        let symmetrized = (&entries + entries.transpose()) * 0.5;
        let eigen = symmetrized.clone().symmetric_eigen();
        let min_eig = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::NotFisher(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self {
            d: symmetrized.nrows(),
            entries: symmetrized,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    /// Largest absolute entry difference to another matrix.
    pub fn max_abs_diff(&self, other: &FisherMatrix) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct FisherRepr {
    d: usize,
    entries: Vec<f64>,
}

impl Serialize for FisherMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = FisherRepr {
            d: self.d,
            entries: self
                .entries
                .row_iter()
                .flat_map(|r| r.iter().copied().collect::<Vec<_>>())
                .collect(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FisherMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FisherRepr::deserialize(d)?;
        if repr.entries.len() != repr.d * repr.d {
            return Err(D::Error::custom("entry count does not match dimension"));
        }
        FisherMatrix::new(DMatrix::from_row_slice(repr.d, repr.d, &repr.entries))
            .map_err(D::Error::custom)
    }
}

/// Quantum Fisher information of the evolved probe. Phases enter only through
/// unit-modulus factors, so the matrix is a pure second-moment expression in
/// the occupation numbers: `4 (E[n n^T] - E[n] E[n]^T)` over the amplitude
/// weights, with `n` running over the phase modes.
pub fn qfi_matrix(psi: &ProbeState) -> FisherMatrix {
    let d = psi.d();
    let mut first = DVector::<f64>::zeros(d);
    let mut second = DMatrix::<f64>::zeros(d, d);
    for (config, amp) in psi.terms() {
        let weight = amp.norm_sqr();
        for l in 0..d {
            let nl = config.occupation(l + 1) as f64;
            first[l] += weight * nl;
            for m in 0..=l {
                second[(l, m)] += weight * nl * config.occupation(m + 1) as f64;
            }
        }
    }
    let mut entries = DMatrix::<f64>::zeros(d, d);
    for l in 0..d {
        for m in 0..=l {
            let value = 4.0 * (second[(l, m)] - first[l] * first[m]);
            entries[(l, m)] = value;
            entries[(m, l)] = value;
        }
    }
    FisherMatrix::new(entries).expect("occupation covariance is symmetric PSD")
}

/// Independent oracle for [`qfi_matrix`] built from derivative-state
/// overlaps: `4 Re[<d_l psi|d_m psi> - <d_l psi|psi><psi|d_m psi>]`.
pub fn qfi_via_derivatives(psi: &ProbeState, theta: &PhaseVector) -> Result<FisherMatrix> {
    let d = psi.d();
    let evolved = psi.apply_phases(theta)?;
    let derivatives: Vec<_> = (1..=d)
        .map(|mode| psi.derivative(theta, mode))
        .collect::<Result<_>>()?;
    let mut entries = DMatrix::<f64>::zeros(d, d);
    for l in 0..d {
        let overlap_l = derivatives[l].inner(evolved.vector())?;
        for m in 0..=l {
            let cross = derivatives[l].inner(&derivatives[m])?;
            let overlap_m = evolved.vector().inner(&derivatives[m])?;
            let value = 4.0 * (cross - overlap_l * overlap_m).re;
            entries[(l, m)] = value;
            entries[(m, l)] = value;
        }
    }
    FisherMatrix::new(entries)
}

/// Finite-difference oracle: derivative states replaced by central
/// differences of the evolved state with step `step`.
pub fn qfi_finite_difference(
    psi: &ProbeState,
    theta: &PhaseVector,
    step: f64,
) -> Result<FisherMatrix> {
    let d = psi.d();
    let evolved = psi.apply_phases(theta)?;
    let half = C64::new(0.5 / step, 0.0);
    let mut derivatives = Vec::with_capacity(d);
    for mode in 0..d {
        let mut plus = theta.as_slice().to_vec();
        let mut minus = plus.clone();
        plus[mode] += step;
        minus[mode] -= step;
        let forward = psi.apply_phases(&PhaseVector::new(plus)?)?;
        let backward = psi.apply_phases(&PhaseVector::new(minus)?)?;
        let diff = forward
            .vector()
            .scaled(half)
            .try_add(&backward.vector().scaled(-half))?;
        derivatives.push(diff);
    }
    let mut entries = DMatrix::<f64>::zeros(d, d);
    for l in 0..d {
        let overlap_l = derivatives[l].inner(evolved.vector())?;
        for m in 0..=l {
            let cross = derivatives[l].inner(&derivatives[m])?;
            let overlap_m = evolved.vector().inner(&derivatives[m])?;
            let value = 4.0 * (cross - overlap_l * overlap_m).re;
            entries[(l, m)] = value;
            entries[(m, l)] = value;
        }
    }
    FisherMatrix::new(entries)
}

/// `<psi_theta| L_l L_m |psi_theta>` for the pure-state symmetric logarithmic
/// derivatives `L = 2(|d psi><psi| + |psi><d psi|)`.
pub fn sld_product_expectation(
    psi: &ProbeState,
    theta: &PhaseVector,
    l: usize,
    m: usize,
) -> Result<C64> {
    let evolved = psi.apply_phases(theta)?;
    let dl = psi.derivative(theta, l)?;
    let dm = psi.derivative(theta, m)?;
    let e_l = evolved.vector().inner(&dl)?;
    let e_m = evolved.vector().inner(&dm)?;
    let cross = dl.inner(&dm)?;
    Ok(4.0 * (e_l * e_m + e_l * e_m.conj() + cross + e_l.conj() * e_m.conj()))
}

/// Expectation of the SLD commutator, `<[L_l, L_m]>`. Vanishing for every
/// probe of this model is what lets one measurement saturate all phases at
/// once.
pub fn sld_commutator_expectation(
    psi: &ProbeState,
    theta: &PhaseVector,
    l: usize,
    m: usize,
) -> Result<C64> {
    Ok(sld_product_expectation(psi, theta, l, m)? - sld_product_expectation(psi, theta, m, l)?)
}

/// Lower bound on the summed phase variances together with the saturability
/// flag and the trial count it refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub total_variance: f64,
    pub saturable: bool,
    pub repetitions: u32,
}

/// Trace of the inverse Fisher matrix. Inversion goes through the
/// eigendecomposition; any eigenvalue below `1e-10` of the largest makes the
/// matrix singular and the insensitive direction is reported instead of being
/// silently pseudo-inverted.
pub fn qcrb_total_variance(fisher: &FisherMatrix) -> Result<f64> {
    let eigen = fisher.entries.clone().symmetric_eigen();
    let max_eig = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut min_index = 0;
    for (i, value) in eigen.eigenvalues.iter().enumerate() {
        if *value < eigen.eigenvalues[min_index] {
            min_index = i;
        }
    }
    let min_eig = eigen.eigenvalues[min_index];
    if min_eig <= SINGULAR_CUTOFF * max_eig.max(f64::MIN_POSITIVE) {
        let direction = eigen.eigenvectors.column(min_index).iter().copied().collect();
        return Err(Error::SingularFisher { direction });
    }
    Ok(eigen.eigenvalues.iter().map(|v| 1.0 / v).sum())
}

/// Quantum Cramér-Rao bound report for a probe: total variance from the QFI,
/// saturability from a numerical scan of the SLD commutators and
/// `Im <L_l L_m>` (both must vanish), and the single-trial convention.
pub fn qcrb_report(psi: &ProbeState) -> Result<BoundReport> {
    let fisher = qfi_matrix(psi);
    let total_variance = qcrb_total_variance(&fisher)?;
    let theta = PhaseVector::zeros(psi.d());
    let mut worst: f64 = 0.0;
    for l in 1..=psi.d() {
        for m in 1..=l {
            let product = sld_product_expectation(psi, &theta, l, m)?;
            worst = worst.max(product.im.abs());
            let commutator = sld_commutator_expectation(psi, &theta, l, m)?;
            worst = worst.max(commutator.norm());
        }
    }
    Ok(BoundReport {
        total_variance,
        saturable: worst < 1e-10,
        repetitions: 1,
    })
}

/// Minimum total variance reached by the single-mode-superposition family at
/// the optimal amplitude: `(1 + sqrt(d))^2 d / (4 N^2)`.
pub fn psi_s_variance(d: usize, photons: u32) -> f64 {
    let df = d as f64;
    let n = photons as f64;
    (1.0 + df.sqrt()).powi(2) * df / (4.0 * n * n)
}

/// Total variance of the balanced variant: `d (d + 1) / (2 N^2)`.
pub fn psi_w_variance(d: usize, photons: u32) -> f64 {
    let df = d as f64;
    let n = photons as f64;
    df * (df + 1.0) / (2.0 * n * n)
}

/// Closed-form trace of the inverse information matrix for the
/// single-mode-superposition family at amplitude `alpha`. The rank-one
/// structure of the matrix gives, via Sherman-Morrison,
/// `d (1 - (d-1) a^2) / (4 N^2 a^2 (1 - d a^2))`.
pub fn optimal_family_variance(d: usize, photons: u32, alpha: f64) -> Result<f64> {
    if d == 0 || photons == 0 {
        return Err(Error::InvalidArgument(
            "need d >= 1 phases and N >= 1 photons".into(),
        ));
    }
    let x = alpha * alpha;
    let df = d as f64;
    if alpha < 0.0 || df * x > 1.0 + 1e-12 {
        return Err(Error::AlphaOutOfRange { alpha, d });
    }
    if x < 1e-14 || 1.0 - df * x < 1e-14 {
        return Err(Error::SingularFisher {
            direction: vec![1.0 / df.sqrt(); d],
        });
    }
    let n = photons as f64;
    Ok(df * (1.0 - (df - 1.0) * x) / (4.0 * n * n * x * (1.0 - df * x)))
}

/// Total variance of estimating each phase with its own two-mode probe.
///
/// The approximate form is `d^3 / N^2` (equal split). The exact form uses
/// `n = floor(N / d)` photons on `d - r` phases and `n + 1` on the remaining
/// `r = N mod d`, giving `(d - r)/n^2 + r/(n + 1)^2`; it is never below the
/// approximate form, with equality exactly when `d` divides `N`.
pub fn noon_individual_bound(photons: u64, d: usize, exact: bool) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("need at least one phase".into()));
    }
    if photons < d as u64 {
        return Err(Error::PhotonAllocation {
            photons,
            phases: d,
        });
    }
    let df = d as f64;
    let n_total = photons as f64;
    if !exact {
        return Ok(df.powi(3) / (n_total * n_total));
    }
    let per_phase = photons / d as u64;
    let remainder = photons % d as u64;
    let base = per_phase as f64;
    Ok((df - remainder as f64) / (base * base)
        + remainder as f64 / ((base + 1.0) * (base + 1.0)))
}

/// Total variance of the best strategy restricted to uncorrelated coherent
/// states with `mean_photons` photons in total: `d^2 / N`.
pub fn classical_bound(mean_photons: f64, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("need at least one phase".into()));
    }
    if !(mean_photons > 0.0 && mean_photons.is_finite()) {
        return Err(Error::InvalidArgument(
            "mean photon number must be positive and finite".into(),
        ));
    }
    let df = d as f64;
    Ok(df * df / mean_photons)
}

/// Classical Fisher information of a measurement on the evolved probe.
///
/// Outcomes with probability below [`CFI_PROBABILITY_FLOOR`] contribute their
/// limiting value `4 Re <d_l psi| Pi |d_m psi>` instead of the raw 0/0 ratio,
/// provided that limit exists (phase-aligned derivative overlaps, as at a
/// saturation anchor); see [`crate::povm::OutcomeStat`].
pub fn cfi_matrix(psi: &ProbeState, theta: &PhaseVector, povm: &PovmSet) -> Result<FisherMatrix> {
    let evaluator = povm.evaluator(psi)?;
    cfi_from_evaluator(&evaluator, theta)
}

/// Same as [`cfi_matrix`] for a prebuilt evaluator; the phase-optimization
/// loop reuses one evaluator across many phase points.
pub fn cfi_from_evaluator(
    evaluator: &PovmEvaluator,
    theta: &PhaseVector,
) -> Result<FisherMatrix> {
    let stats = evaluator.outcome_stats(theta)?;
    cfi_from_stats(evaluator.d(), &stats)
}

fn cfi_from_stats(d: usize, stats: &[OutcomeStat]) -> Result<FisherMatrix> {
    let mut entries = DMatrix::<f64>::zeros(d, d);
    for stat in stats {
        if stat.probability >= CFI_PROBABILITY_FLOOR {
            for l in 0..d {
                for m in 0..d {
                    entries[(l, m)] += stat.gradient[l] * stat.gradient[m] / stat.probability;
                }
            }
        } else if stat.limit_valid {
            entries += &stat.quadratic;
        }
        // a vanishing outcome with direction-dependent limits contributes
        // nothing at the exact zero: it almost never occurs there, and any
        // single substitute would overstate the attainable information
    }
    FisherMatrix::new(entries)
}
