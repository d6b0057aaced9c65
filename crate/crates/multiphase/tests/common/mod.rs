//! Shared oracles and generators for the integration suites.
//
// Each test binary compiles its own copy, so not every helper is used
// everywhere.
#![allow(dead_code)]

use multiphase::fock::{enumerate_configs, FockConfig, PhaseVector, ProbeState, SparseVector};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Independent binomial oracle built from Pascal's triangle.
pub fn binomial_oracle(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128];
        for i in 1..row.len() {
            next.push(row[i - 1] + row[i]);
        }
        next.push(1);
        row = next;
    }
    row[k as usize]
}

/// Random normalized probe on a random subset of the sector configurations.
pub fn random_probe(d: usize, photons: u32, rng: &mut ChaCha8Rng) -> ProbeState {
    let configs = enumerate_configs(photons, d).unwrap();
    let support = rng.random_range(2..=configs.len().clamp(2, 8));
    let mut picked: Vec<FockConfig> = Vec::new();
    while picked.len() < support {
        let candidate = configs[rng.random_range(0..configs.len())].clone();
        if !picked.contains(&candidate) {
            picked.push(candidate);
        }
    }
    let mut terms: Vec<(FockConfig, C64)> = picked
        .into_iter()
        .map(|c| {
            (
                c,
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    let norm: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
    for (_, a) in terms.iter_mut() {
        *a /= norm;
    }
    ProbeState::new(SparseVector::from_terms(d, photons, terms).unwrap()).unwrap()
}

pub fn random_phases(d: usize, rng: &mut ChaCha8Rng) -> PhaseVector {
    PhaseVector::new((0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap()
}

/// Haar-ish random unitary from the QR factorization of a complex Gaussian
/// matrix (Box-Muller normals).
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let mut normal = || {
        let u1: f64 = rng.random::<f64>().max(1e-12);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let gaussian = DMatrix::from_fn(dim, dim, |_, _| C64::new(normal(), normal()));
    gaussian.qr().q()
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(matrix: &DMatrix<f64>) -> f64 {
    matrix
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}
