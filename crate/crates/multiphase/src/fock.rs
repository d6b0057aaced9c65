//! Multi-mode Fock configurations and sparse state vectors in a fixed
//! photon-number sector.
//!
//! A configuration lists the photon count of each of the `d + 1` modes of the
//! interferometer; mode 0 is the phase reference. States are stored as sparse
//! maps from configuration to complex amplitude, ordered lexicographically so
//! that every downstream table and matrix is reproducible.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard cap on the number of configurations any operation will enumerate.
pub const CONFIG_CAPACITY: u64 = 1_000_000;

/// Norm deviation accepted without repair.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Largest norm deviation a constructor silently renormalizes. Anything worse
/// signals a caller bug rather than accumulated rounding and is rejected.
pub const RENORM_LIMIT: f64 = 1e-6;

/// Photon occupation numbers for the modes of the interferometer.
///
/// Index 0 is the reference mode; indices `1..=d` carry the phases.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockConfig {
    occ: Vec<u32>,
}

impl FockConfig {
    pub fn new(occ: Vec<u32>) -> Result<Self> {
        if occ.is_empty() {
            return Err(Error::InvalidArgument(
                "a configuration needs at least one mode".into(),
            ));
        }
        Ok(Self { occ })
    }

    /// Configuration with all `photons` in `mode` and every other mode empty.
    pub fn single_mode(modes: usize, mode: usize, photons: u32) -> Result<Self> {
        if mode >= modes {
            return Err(Error::ModeOutOfRange {
                index: mode,
                max: modes.saturating_sub(1),
            });
        }
        let mut occ = vec![0; modes];
        occ[mode] = photons;
        Self::new(occ)
    }

    /// Number of modes, reference included.
    pub fn modes(&self) -> usize {
        self.occ.len()
    }

    /// Total photon number.
    pub fn total(&self) -> u32 {
        self.occ.iter().sum()
    }

    /// Photons in `mode` (0 = reference).
    pub fn occupation(&self, mode: usize) -> u32 {
        self.occ[mode]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.occ
    }
}

impl fmt::Debug for FockConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FockConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, n) in self.occ.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for FockConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.occ.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FockConfig {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let occ = Vec::<u32>::deserialize(deserializer)?;
        FockConfig::new(occ).map_err(D::Error::custom)
    }
}

/// `C(n, k)` with overflow detection.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// Number of ways to distribute `photons` over `d + 1` modes, guarded by
/// [`CONFIG_CAPACITY`].
pub fn config_count(photons: u32, d: usize) -> Result<u64> {
    let count = binomial(photons as u64 + d as u64, d as u64).ok_or(Error::CapacityExceeded {
        required: u128::MAX,
        limit: CONFIG_CAPACITY,
    })?;
    if count > CONFIG_CAPACITY as u128 {
        return Err(Error::CapacityExceeded {
            required: count,
            limit: CONFIG_CAPACITY,
        });
    }
    Ok(count as u64)
}

/// Every configuration of `photons` photons over `d + 1` modes, in ascending
/// lexicographic order.
pub fn enumerate_configs(photons: u32, d: usize) -> Result<Vec<FockConfig>> {
    if d == 0 {
        return Err(Error::InvalidArgument("need at least one phase mode".into()));
    }
    let count = config_count(photons, d)?;
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; d + 1];
    fill_configs(photons, 0, &mut current, &mut out);
    debug_assert_eq!(out.len() as u64, count);
    Ok(out)
}

fn fill_configs(remaining: u32, mode: usize, current: &mut Vec<u32>, out: &mut Vec<FockConfig>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(FockConfig {
            occ: current.clone(),
        });
        return;
    }
    for n in 0..=remaining {
        current[mode] = n;
        fill_configs(remaining - n, mode + 1, current, out);
    }
    current[mode] = 0;
}

/// Phases applied to modes `1..=d`, in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidArgument("need at least one phase".into()));
        }
        for (index, value) in theta.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinitePhase { index });
            }
        }
        Ok(Self(theta))
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    /// Number of phases.
    pub fn d(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Phase applied to `mode` (1-based; mode 0 carries no phase).
    pub fn phase(&self, mode: usize) -> f64 {
        self.0[mode - 1]
    }
}

/// Unnormalized sparse vector in the sector of `photons` photons over
/// `d + 1` modes. Derivative states and intermediate linear combinations
/// live here; normalized probes are [`ProbeState`].
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    d: usize,
    photons: u32,
    terms: BTreeMap<FockConfig, C64>,
}

impl SparseVector {
    pub fn zero(d: usize, photons: u32) -> Self {
        Self {
            d,
            photons,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a vector, validating that every configuration has `d + 1`
    /// modes and the right photon total. Duplicate configurations are summed.
    pub fn from_terms<I>(d: usize, photons: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockConfig, C64)>,
    {
        let mut map = BTreeMap::new();
        for (config, amp) in terms {
            if config.modes() != d + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "configuration {config} has {} modes, expected {}",
                    config.modes(),
                    d + 1
                )));
            }
            if config.total() != photons {
                return Err(Error::DimensionMismatch(format!(
                    "configuration {config} holds {} photons, expected {photons}",
                    config.total()
                )));
            }
            *map.entry(config).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        Ok(Self { d, photons, terms: map })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn photons(&self) -> u32 {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, config: &FockConfig) -> C64 {
        self.terms.get(config).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Terms in lexicographic configuration order.
    pub fn terms(&self) -> impl Iterator<Item = (&FockConfig, &C64)> {
        self.terms.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &SparseVector) -> Result<C64> {
        self.check_sector(other)?;
        let mut acc = C64::new(0.0, 0.0);
        for (config, amp) in &self.terms {
            acc += amp.conj() * other.amplitude(config);
        }
        Ok(acc)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, a)| (c.clone(), a * factor))
            .collect();
        Self {
            d: self.d,
            photons: self.photons,
            terms,
        }
    }

    pub fn try_add(&self, other: &SparseVector) -> Result<Self> {
        self.check_sector(other)?;
        let mut terms = self.terms.clone();
        for (config, amp) in &other.terms {
            *terms.entry(config.clone()).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        Ok(Self {
            d: self.d,
            photons: self.photons,
            terms,
        })
    }

    /// Phase evolution: each amplitude gains `exp(i * sum_m occ[m] theta_m)`
    /// with the sum over the phase modes `1..=d` only.
    pub fn apply_phases(&self, theta: &PhaseVector) -> Result<Self> {
        if theta.d() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{} phases supplied for {} phase modes",
                theta.d(),
                self.d
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|(config, amp)| {
                let dot: f64 = (1..=self.d)
                    .map(|m| config.occupation(m) as f64 * theta.phase(m))
                    .sum();
                (config.clone(), amp * C64::from_polar(1.0, dot))
            })
            .collect();
        Ok(Self {
            d: self.d,
            photons: self.photons,
            terms,
        })
    }

    /// Action of `i * N_mode` on the vector: each term is multiplied by
    /// `i` times its occupation of `mode`. Terms with empty `mode` drop out.
    pub fn number_derivative(&self, mode: usize) -> Result<Self> {
        if mode == 0 || mode > self.d {
            return Err(Error::ModeOutOfRange {
                index: mode,
                max: self.d,
            });
        }
        let terms = self
            .terms
            .iter()
            .filter(|(config, _)| config.occupation(mode) > 0)
            .map(|(config, amp)| {
                let n = config.occupation(mode) as f64;
                (config.clone(), amp * C64::new(0.0, n))
            })
            .collect();
        Ok(Self {
            d: self.d,
            photons: self.photons,
            terms,
        })
    }

    /// Drops terms with |amplitude| below `eps`.
    pub fn pruned(mut self, eps: f64) -> Self {
        self.terms.retain(|_, amp| amp.norm() >= eps);
        self
    }

    /// Rotates the global phase so the first term (lexicographic order) with
    /// a nonzero amplitude becomes real and non-negative.
    pub fn canonical_phase(mut self) -> Self {
        let phase = self
            .terms
            .values()
            .find(|a| a.norm() > 0.0)
            .map(|a| a / a.norm());
        if let Some(phase) = phase {
            let rot = phase.conj();
            for amp in self.terms.values_mut() {
                *amp *= rot;
            }
        }
        self
    }

    fn check_sector(&self, other: &SparseVector) -> Result<()> {
        if self.d != other.d || self.photons != other.photons {
            return Err(Error::DimensionMismatch(format!(
                "sectors differ: (d = {}, N = {}) vs (d = {}, N = {})",
                self.d, self.photons, other.d, other.photons
            )));
        }
        Ok(())
    }
}

/// Normalized pure probe state with fixed total photon number.
///
/// Immutable after construction; all operations return new values.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeState {
    vector: SparseVector,
}

impl ProbeState {
    /// Validates and, if the norm is within [`RENORM_LIMIT`] of 1, repairs
    /// normalization. A worse deviation is rejected.
    pub fn new(vector: SparseVector) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::EmptyState);
        }
        let norm = vector.norm();
        let deviation = (norm - 1.0).abs();
        if deviation <= NORM_TOLERANCE {
            return Ok(Self { vector });
        }
        if deviation <= RENORM_LIMIT {
            let vector = vector.scaled(C64::new(1.0 / norm, 0.0));
            return Ok(Self { vector });
        }
        Err(Error::NotNormalized { deviation })
    }

    pub fn vector(&self) -> &SparseVector {
        &self.vector
    }

    pub fn d(&self) -> usize {
        self.vector.d
    }

    pub fn photons(&self) -> u32 {
        self.vector.photons
    }

    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }

    pub fn amplitude(&self, config: &FockConfig) -> C64 {
        self.vector.amplitude(config)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockConfig, &C64)> {
        self.vector.terms()
    }

    /// Evolved state after the phase shifts. Unit-modulus factors preserve
    /// the norm exactly up to rounding, so no re-validation happens here.
    pub fn apply_phases(&self, theta: &PhaseVector) -> Result<ProbeState> {
        Ok(Self {
            vector: self.vector.apply_phases(theta)?,
        })
    }

    /// Derivative of the evolved state with respect to the phase of `mode`
    /// (1-based). The result is not normalized.
    pub fn derivative(&self, theta: &PhaseVector, mode: usize) -> Result<SparseVector> {
        self.vector.apply_phases(theta)?.number_derivative(mode)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &ProbeState) -> Result<C64> {
        self.vector.inner(&other.vector)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("probe state serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad state JSON: {e}")))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    occ: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    d: usize,
    #[serde(rename = "N")]
    photons: u32,
    terms: Vec<TermRepr>,
}

impl Serialize for ProbeState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = StateRepr {
            d: self.d(),
            photons: self.photons(),
            terms: self
                .terms()
                .map(|(config, amp)| TermRepr {
                    occ: config.as_slice().to_vec(),
                    re: amp.re,
                    im: amp.im,
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProbeState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StateRepr::deserialize(deserializer)?;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| Ok((FockConfig::new(t.occ)?, C64::new(t.re, t.im))))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let vector =
            SparseVector::from_terms(repr.d, repr.photons, terms).map_err(D::Error::custom)?;
        ProbeState::new(vector).map_err(D::Error::custom)
    }
}
