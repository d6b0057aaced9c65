//! Probe-state constructors: the single-mode-superposition family, N00N
//! states, and Holland-Burnett states produced by a Fourier multiport.
//!
//! Multiport amplitudes are computed by expanding the transformed
//! creation-operator polynomial mode by mode, which scales far better than
//! evaluating one matrix permanent per output configuration. The permanent
//! (Ryser's formula) is kept as an independent small-case oracle.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{config_count, FockConfig, ProbeState, SparseVector};

/// Amplitudes below this threshold after a multiport expansion are numerical
/// zeros left over from interference suppression and are dropped.
pub const EXPANSION_PRUNE: f64 = 1e-14;

/// Largest matrix dimension [`permanent`] accepts.
pub const PERMANENT_DIM_LIMIT: usize = 16;

/// A passive linear-optical network on `dim` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiportUnitary {
    entries: DMatrix<C64>,
}

impl MultiportUnitary {
    /// Validates unitarity to 1e-12 in the max-abs entry of `U^dag U - I`.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "multiport matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let deviation = unitarity_deviation(&entries);
        if deviation > 1e-12 {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { entries })
    }

    /// Quantum Fourier transform on `modes` modes: entries
    /// `omega^(j k) / sqrt(M)` with `omega = exp(2 pi i / M)`. For two modes
    /// this is a 50/50 beam splitter.
    pub fn qft(modes: usize) -> Self {
        let m = modes as f64;
        let scale = 1.0 / m.sqrt();
        let entries = DMatrix::from_fn(modes, modes, |j, k| {
            let cycles = ((j * k) % modes) as f64;
            C64::from_polar(scale, 2.0 * std::f64::consts::PI * cycles / m)
        });
        Self { entries }
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            entries: DMatrix::identity(modes, modes),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.entries)
    }
}

fn unitarity_deviation(entries: &DMatrix<C64>) -> f64 {
    let product = entries.adjoint() * entries;
    let identity = DMatrix::<C64>::identity(entries.nrows(), entries.ncols());
    (product - identity)
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max)
}

/// Amplitude that minimizes the total-variance bound for the
/// single-mode-superposition probe family: `1 / sqrt(d + sqrt(d))`.
pub fn optimal_alpha(d: usize) -> f64 {
    let d = d as f64;
    1.0 / (d + d.sqrt()).sqrt()
}

/// Amplitude of the balanced variant in which the reference carries the same
/// weight as every phase mode: `1 / sqrt(d + 1)`.
pub fn balanced_alpha(d: usize) -> f64 {
    1.0 / ((d + 1) as f64).sqrt()
}

/// Superposition of all `photons` bunched in one of the `d` phase modes
/// (amplitude `alpha` each) or in the reference (amplitude
/// `sqrt(1 - d alpha^2)`).
pub fn make_optimal_state(d: usize, photons: u32, alpha: f64) -> Result<ProbeState> {
    if d == 0 {
        return Err(Error::InvalidArgument("need at least one phase mode".into()));
    }
    if photons == 0 {
        return Err(Error::InvalidArgument(
            "probe needs at least one photon".into(),
        ));
    }
    let weight = d as f64 * alpha * alpha;
    if !(0.0..=1.0 + 1e-12).contains(&weight) || alpha < 0.0 {
        return Err(Error::AlphaOutOfRange { alpha, d });
    }
    let beta = (1.0 - weight).max(0.0).sqrt();
    let modes = d + 1;
    let mut terms = Vec::with_capacity(modes);
    if beta > 0.0 {
        terms.push((
            FockConfig::single_mode(modes, 0, photons)?,
            C64::new(beta, 0.0),
        ));
    }
    if alpha > 0.0 {
        for mode in 1..=d {
            terms.push((
                FockConfig::single_mode(modes, mode, photons)?,
                C64::new(alpha, 0.0),
            ));
        }
    }
    ProbeState::new(SparseVector::from_terms(d, photons, terms)?)
}

/// Balanced variant: every amplitude equals `1 / sqrt(d + 1)`.
pub fn make_balanced_state(d: usize, photons: u32) -> Result<ProbeState> {
    make_optimal_state(d, photons, balanced_alpha(d))
}

/// `(|N photons in reference> + |N photons in mode>) / sqrt(2)` embedded in
/// `d + 1` modes.
pub fn make_noon_state(photons: u32, mode: usize, d: usize) -> Result<ProbeState> {
    if mode == 0 || mode > d {
        return Err(Error::ModeOutOfRange { index: mode, max: d });
    }
    if photons == 0 {
        return Err(Error::InvalidArgument(
            "probe needs at least one photon".into(),
        ));
    }
    let modes = d + 1;
    let amp = C64::new(0.5f64.sqrt(), 0.0);
    let terms = [
        (FockConfig::single_mode(modes, 0, photons)?, amp),
        (FockConfig::single_mode(modes, mode, photons)?, amp),
    ];
    ProbeState::new(SparseVector::from_terms(d, photons, terms)?)
}

/// Permanent by Ryser's formula with Gray-code updates. Exact for integer
/// matrices; `O(2^n n)` so the dimension is capped.
pub fn permanent(matrix: &DMatrix<C64>) -> Result<C64> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "permanent needs a square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let n = matrix.nrows();
    if n > PERMANENT_DIM_LIMIT {
        return Err(Error::PermanentTooLarge {
            dim: n,
            limit: PERMANENT_DIM_LIMIT,
        });
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut prev_gray: u64 = 0;
    for index in 1u64..(1 << n) {
        let gray = index ^ (index >> 1);
        let changed = (gray ^ prev_gray).trailing_zeros() as usize;
        let added = gray & (1 << changed) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            let entry = matrix[(i, changed)];
            if added {
                *sum += entry;
            } else {
                *sum -= entry;
            }
        }
        prev_gray = gray;
        let product: C64 = row_sums.iter().product();
        let sign = if (n as u32 - gray.count_ones()) & 1 == 0 {
            1.0
        } else {
            -1.0
        };
        total += product * sign;
    }
    Ok(total)
}

/// Raw multiport image of a single input configuration, with exact relative
/// phases (no global-phase canonicalization). Linear pieces of superposition
/// transforms are built from this.
pub(crate) fn multiport_raw(u: &MultiportUnitary, input: &FockConfig) -> Result<SparseVector> {
    let modes = u.dim();
    if modes < 2 {
        return Err(Error::InvalidArgument(
            "multiport states need at least two modes (reference plus one phase)".into(),
        ));
    }
    if input.modes() != modes {
        return Err(Error::DimensionMismatch(format!(
            "input {input} has {} modes but the multiport has {modes}",
            input.modes()
        )));
    }
    let photons = input.total();
    config_count(photons, modes - 1)?;

    // Expand prod_j (sum_i U_ij x_i)^(n_j) applied to vacuum; the monomial
    // exponent vectors are output configurations.
    let mut poly: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
    poly.insert(vec![0; modes], C64::new(1.0, 0.0));
    for j in 0..modes {
        for _ in 0..input.occupation(j) {
            let mut next: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
            for (mono, coeff) in &poly {
                for i in 0..modes {
                    let factor = u.entry(i, j);
                    if factor.norm_sqr() == 0.0 {
                        continue;
                    }
                    let mut bumped = mono.clone();
                    bumped[i] += 1;
                    *next.entry(bumped).or_insert(C64::new(0.0, 0.0)) += coeff * factor;
                }
            }
            poly = next;
        }
    }

    let input_factorials: u128 = input
        .as_slice()
        .iter()
        .map(|&n| factorial_u128(n))
        .product();
    let mut terms = Vec::with_capacity(poly.len());
    for (occ, coeff) in poly {
        let output_factorials: u128 = occ.iter().map(|&n| factorial_u128(n)).product();
        let scale = (output_factorials as f64 / input_factorials as f64).sqrt();
        terms.push((FockConfig::new(occ)?, coeff * scale));
    }
    Ok(SparseVector::from_terms(modes - 1, photons, terms)?.pruned(EXPANSION_PRUNE))
}

/// Output state of the multiport for a single input configuration. The
/// global phase is fixed so the first surviving amplitude in lexicographic
/// order is real and non-negative.
pub fn multiport_output(u: &MultiportUnitary, input: &FockConfig) -> Result<ProbeState> {
    ProbeState::new(multiport_raw(u, input)?.canonical_phase())
}

/// Linear extension of the multiport to an arbitrary sector vector. Relative
/// phases between components are preserved; nothing is renormalized.
pub fn apply_multiport(u: &MultiportUnitary, vector: &SparseVector) -> Result<SparseVector> {
    if vector.d() + 1 != u.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector over {} modes but the multiport has {}",
            vector.d() + 1,
            u.dim()
        )));
    }
    let mut out = SparseVector::zero(vector.d(), vector.photons());
    for (config, amp) in vector.terms() {
        let image = multiport_raw(u, config)?;
        out = out.try_add(&image.scaled(*amp))?;
    }
    Ok(out.pruned(EXPANSION_PRUNE))
}

/// Holland-Burnett state: `n` photons into each port of a `(d + 1)`-mode
/// Fourier multiport, `N = n (d + 1)` photons in total.
pub fn make_hb_state(photons_per_mode: u32, d: usize) -> Result<ProbeState> {
    if photons_per_mode == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "Holland-Burnett states need n >= 1 photons per mode and d >= 1".into(),
        ));
    }
    let modes = d + 1;
    let input = FockConfig::new(vec![photons_per_mode; modes])?;
    multiport_output(&MultiportUnitary::qft(modes), &input)
}

fn factorial_u128(n: u32) -> u128 {
    (1..=n as u128).product::<u128>().max(1)
}

/// Permanent-based amplitude oracle: builds the matrix with column `j` of `u`
/// repeated `input[j]` times and row `i` repeated `output[i]` times, and
/// returns `perm / sqrt(prod_i output_i! prod_j input_j!)`.
pub fn permanent_amplitude(
    u: &MultiportUnitary,
    input: &FockConfig,
    output: &FockConfig,
) -> Result<C64> {
    if input.modes() != u.dim() || output.modes() != u.dim() {
        return Err(Error::DimensionMismatch(
            "permanent oracle: configuration modes must match the multiport".into(),
        ));
    }
    if input.total() != output.total() {
        return Err(Error::DimensionMismatch(
            "permanent oracle: photon totals must match".into(),
        ));
    }
    let n = input.total() as usize;
    let mut sub = DMatrix::<C64>::zeros(n, n);
    let mut row = 0;
    for i in 0..u.dim() {
        for _ in 0..output.occupation(i) {
            let mut col = 0;
            for j in 0..u.dim() {
                for _ in 0..input.occupation(j) {
                    sub[(row, col)] = u.entry(i, j);
                    col += 1;
                }
            }
            row += 1;
        }
    }
    let norm: f64 = {
        let num: u128 = output
            .as_slice()
            .iter()
            .map(|&m| factorial_u128(m))
            .product();
        let den: u128 = input.as_slice().iter().map(|&m| factorial_u128(m)).product();
        ((num as f64) * (den as f64)).sqrt()
    };
    Ok(permanent(&sub)? / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_configs;

    fn config(occ: &[u32]) -> FockConfig {
        FockConfig::new(occ.to_vec()).unwrap()
    }

    #[test]
    fn optimal_alpha_values() {
        assert!((optimal_alpha(1) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((optimal_alpha(3) - 0.459700843380983).abs() < 1e-12);
        assert!((optimal_alpha(4) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn optimal_state_reduces_to_noon_at_one_phase() {
        let a = make_optimal_state(1, 2, 0.5f64.sqrt()).unwrap();
        let b = make_noon_state(2, 1, 1).unwrap();
        assert_eq!(a.d(), b.d());
        for (config, amp) in b.terms() {
            assert!((a.amplitude(config) - amp).norm() < 1e-15);
        }
    }

    #[test]
    fn balanced_state_has_equal_terms() {
        let psi = make_balanced_state(3, 5).unwrap();
        assert_eq!(psi.len(), 4);
        for (_, amp) in psi.terms() {
            assert!((amp - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn alpha_out_of_range_is_rejected() {
        assert!(matches!(
            make_optimal_state(2, 3, 0.8),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            make_optimal_state(2, 3, -0.1),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn noon_state_embeds_in_larger_interferometers() {
        let psi = make_noon_state(3, 2, 3).unwrap();
        let amp = C64::new(0.5f64.sqrt(), 0.0);
        assert!((psi.amplitude(&config(&[3, 0, 0, 0])) - amp).norm() < 1e-15);
        assert!((psi.amplitude(&config(&[0, 0, 3, 0])) - amp).norm() < 1e-15);
        assert!((psi.vector().norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            make_noon_state(3, 4, 3),
            Err(Error::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn permanent_base_cases() {
        let one = DMatrix::from_row_slice(1, 1, &[C64::new(3.0, -1.0)]);
        assert!((permanent(&one).unwrap() - C64::new(3.0, -1.0)).norm() < 1e-15);

        let two = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(2.0, 0.0),
                C64::new(3.0, 0.0),
                C64::new(4.0, 0.0),
            ],
        );
        // perm [[a,b],[c,d]] = ad + bc
        assert!((permanent(&two).unwrap() - C64::new(10.0, 0.0)).norm() < 1e-12);

        let ones = DMatrix::from_element(3, 3, C64::new(1.0, 0.0));
        assert!((permanent(&ones).unwrap() - C64::new(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn permanent_dimension_guard() {
        let big = DMatrix::from_element(17, 17, C64::new(1.0, 0.0));
        assert!(matches!(
            permanent(&big),
            Err(Error::PermanentTooLarge { .. })
        ));
    }

    #[test]
    fn qft_is_unitary() {
        for modes in 1..=8 {
            assert!(MultiportUnitary::qft(modes).unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let bad = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(
            MultiportUnitary::new(bad),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn identity_multiport_passes_configs_through() {
        let u = MultiportUnitary::identity(3);
        let out = multiport_output(&u, &config(&[2, 1, 0])).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.amplitude(&config(&[2, 1, 0])) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hong_ou_mandel_suppression() {
        let out = multiport_output(&MultiportUnitary::qft(2), &config(&[1, 1])).unwrap();
        let inv_sqrt2 = 0.5f64.sqrt();
        assert!(out.amplitude(&config(&[1, 1])).norm() < 1e-12);
        assert!((out.amplitude(&config(&[0, 2])).norm() - inv_sqrt2).abs() < 1e-12);
        assert!((out.amplitude(&config(&[2, 0])).norm() - inv_sqrt2).abs() < 1e-12);
    }

    #[test]
    fn expansion_matches_permanent_oracle_for_three_mode_qft() {
        let u = MultiportUnitary::qft(3);
        let input = config(&[1, 1, 1]);
        let out = multiport_raw(&u, &input).unwrap();
        for output in enumerate_configs(3, 2).unwrap() {
            let oracle = permanent_amplitude(&u, &input, &output).unwrap();
            assert!(
                (out.amplitude(&output) - oracle).norm() < 1e-12,
                "mismatch at {output}"
            );
        }
        // balanced single photons through the three-mode Fourier port keep a
        // 1/sqrt(3) amplitude on the coincidence outcome
        let oracle = permanent_amplitude(&u, &input, &config(&[1, 1, 1])).unwrap();
        assert!((oracle.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hb_one_photon_pair_is_the_hom_state() {
        let psi = make_hb_state(1, 1).unwrap();
        let inv_sqrt2 = 0.5f64.sqrt();
        // canonical global phase: first config (0,2) rotated positive
        assert!((psi.amplitude(&config(&[0, 2])) - C64::new(inv_sqrt2, 0.0)).norm() < 1e-12);
        assert!((psi.amplitude(&config(&[2, 0])) - C64::new(-inv_sqrt2, 0.0)).norm() < 1e-12);
        assert!(psi.amplitude(&config(&[1, 1])).norm() < 1e-12);
    }

    #[test]
    fn hb_three_photons_over_three_modes() {
        let psi = make_hb_state(1, 2).unwrap();
        assert_eq!(psi.photons(), 3);
        assert!((psi.vector().norm_sqr() - 1.0).abs() < 1e-10);
        // bunched terms sqrt(2)/3, coincidence term -1/sqrt(3)
        let bunched = 2f64.sqrt() / 3.0;
        for occ in [[3, 0, 0], [0, 3, 0], [0, 0, 3]] {
            assert!((psi.amplitude(&config(&occ)) - C64::new(bunched, 0.0)).norm() < 1e-12);
        }
        assert!(
            (psi.amplitude(&config(&[1, 1, 1])) - C64::new(-1.0 / 3f64.sqrt(), 0.0)).norm()
                < 1e-12
        );
    }

    #[test]
    fn hb_total_photons() {
        let psi = make_hb_state(1, 3).unwrap();
        assert_eq!(psi.photons(), 4);
    }
}
