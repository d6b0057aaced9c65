//! Simultaneous estimation of several optical phases with a fixed photon
//! budget, at desk scale.
//!
//! A `(d + 1)`-mode interferometer carries `N` photons through a prepared
//! probe state, one unknown phase per mode (mode 0 is the reference). This
//! crate builds the probe families of interest, computes quantum and
//! classical Fisher information matrices and the Cramér-Rao bounds they
//! imply, constructs measurement sets that saturate those bounds, and runs
//! Monte-Carlo maximum-likelihood experiments against them.
//!
//! # Modules
//!
//! - [`fock`] — occupation configurations, sparse sector vectors, phase
//!   evolution.
//! - [`probes`] — probe constructors: single-mode superpositions, N00N
//!   states, Holland-Burnett states from a Fourier multiport, permanents.
//! - [`fisher`] — QFI/CFI matrices, derivative oracles, SLD diagnostics,
//!   variance bounds for the quantum, two-mode, and coherent strategies.
//! - [`povm`] — saturating projector sets and the multiport + PNRD model.
//! - [`search`] — amplitude, probe, and phase-point optimizers.
//! - [`estimation`] — multinomial sampling and local maximum likelihood.
//! - [`report`] — table/sweep data products and CSV/JSON emission.
//!
//! # Example
//!
//! ```
//! use multiphase::fisher::{qcrb_total_variance, qfi_matrix};
//! use multiphase::probes::{make_optimal_state, optimal_alpha};
//!
//! // four phases, sixteen photons, optimally weighted probe
//! let psi = make_optimal_state(4, 16, optimal_alpha(4))?;
//! let bound = qcrb_total_variance(&qfi_matrix(&psi))?;
//! assert!((bound - 9.0 / 256.0).abs() < 1e-12);
//! # Ok::<(), multiphase::Error>(())
//! ```
//!
//! Each major capability also has a runnable demonstration under
//! `examples/`; start with `cargo run --example bounds_table`.

pub mod error;
pub mod estimation;
pub mod fisher;
pub mod fock;
pub mod povm;
pub mod probes;
pub mod report;
pub mod search;

pub use error::{Error, Result};
pub use fisher::FisherMatrix;
pub use fock::{FockConfig, PhaseVector, ProbeState, SparseVector};
pub use povm::PovmSet;
pub use probes::MultiportUnitary;
