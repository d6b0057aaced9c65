use thiserror::Error;

/// Errors produced by state construction, measurement evaluation, and the
/// numerical optimizers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("configuration space too large: {required} configurations exceed the capacity of {limit}")]
    CapacityExceeded { required: u128, limit: u64 },

    #[error("state norm deviates from 1 by {deviation:.3e}; refusing to renormalize")]
    NotNormalized { deviation: f64 },

    #[error("a state needs at least one term with nonzero amplitude")]
    EmptyState,

    #[error("mode index {index} out of range 1..={max}")]
    ModeOutOfRange { index: usize, max: usize },

    #[error("alpha = {alpha} violates 0 <= d*alpha^2 <= 1 for d = {d}")]
    AlphaOutOfRange { alpha: f64, d: usize },

    #[error("photon budget N = {photons} cannot serve d = {phases} phases with one two-mode probe each")]
    PhotonAllocation { photons: u64, phases: usize },

    #[error("matrix is not unitary: max |U^dag U - I| entry is {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not a Fisher information matrix: {0}")]
    NotFisher(String),

    #[error("Fisher matrix is singular: insensitive phase direction {direction:?}")]
    SingularFisher { direction: Vec<f64> },

    #[error("POVM is not complete on the photon-number sector: max deviation {deviation:.3e}")]
    IncompletePovm { deviation: f64 },

    #[error("probe is not supported on the single-mode-occupied configurations")]
    UnsupportedProbe,

    #[error("permanent dimension {dim} exceeds the limit of {limit}")]
    PermanentTooLarge { dim: usize, limit: usize },

    #[error("phase optimization failed for {probe} with {povm}: every start produced a singular information matrix")]
    AllStartsSingular { probe: String, povm: String },

    #[error("likelihood is flat at the estimate: the outcomes pin a hypersurface in phase space, not a point ({0})")]
    FlatLikelihood(String),

    #[error("non-finite phase entry at index {index}")]
    NonFinitePhase { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
