use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is defective: repeated eigenvalue with a single eigenvector")]
    DegenerateSpectrum,

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not normal (commutator norm {deviation:e})")]
    NotNormal { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("pre- and post-selected states are (nearly) orthogonal: |<psi_f|psi_S>| = {overlap:e}")]
    VanishingOverlap { overlap: f64 },

    #[error("coupling gt = {gt} exceeds the first-order weakness bound {bound}")]
    CouplingTooStrong { gt: f64, bound: f64 },

    #[error("post-selection probability {probability:e} underflowed at step {step}")]
    PostSelectionStarved { step: usize, probability: f64 },

    #[error("no eigenvalue dominates in modulus (gap {gap:e} within band {band:e})")]
    NoDominantEigenvalue { gap: f64, band: f64 },

    #[error("initial state has no weight on the dominant eigenvector (weight {weight:e})")]
    UnstableManifoldStart { weight: f64 },

    #[error("operation needs at least two eigenvalues, found {found}")]
    DimensionTooSmall { found: usize },

    #[error("meter observable is degenerate")]
    DegenerateMeterObservable,

    #[error("fit window contains a divergence of tau at phi = {phi}")]
    WindowContainsCriticalPoint { phi: f64 },

    #[error("power-law fit rejected: r^2 = {r_squared} below {threshold} (slope {slope})")]
    PoorFit { r_squared: f64, threshold: f64, slope: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Kraus operator is not of the form c*I + d*sigma_x")]
    NotQubitForm,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateSpectrum => "DegenerateSpectrum",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotNormal { .. } => "NotNormal",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::VanishingOverlap { .. } => "VanishingOverlap",
            Error::CouplingTooStrong { .. } => "CouplingTooStrong",
            Error::PostSelectionStarved { .. } => "PostSelectionStarved",
            Error::NoDominantEigenvalue { .. } => "NoDominantEigenvalue",
            Error::UnstableManifoldStart { .. } => "UnstableManifoldStart",
            Error::DimensionTooSmall { .. } => "DimensionTooSmall",
            Error::DegenerateMeterObservable => "DegenerateMeterObservable",
            Error::WindowContainsCriticalPoint { .. } => "WindowContainsCriticalPoint",
            Error::PoorFit { .. } => "PoorFit",
            Error::InvalidState(_) => "InvalidState",
            Error::NotQubitForm => "NotQubitForm",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
