use thiserror::Error;

/// Errors shared across the simulation engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was handed parameters outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A state vector failed a contract it must satisfy (normalization,
    /// dimension match).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A fixed-step integration was requested with a step too coarse for the
    /// operator norm: `h_norm * dt` must stay below 0.1 rad.
    #[error("step too coarse: |H|*dt = {h_dt:.3e} rad exceeds {limit:.3e} rad")]
    StepTooCoarse { h_dt: f64, limit: f64 },

    /// Norm drift exceeded the hard failure tolerance during integration.
    #[error("integration failure at t = {t:.6} us: norm deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    IntegrationFailure {
        t: f64,
        deviation: f64,
        tolerance: f64,
    },

    /// Exact diagonalization could not identify the dressed branch connected
    /// to the unperturbed state (total overlap below 0.5).
    #[error("ambiguous branch: best eigenvalue cluster holds only {overlap:.3} of |{label}|")]
    AmbiguousBranch { overlap: f64, label: String },

    /// A curve fit did not describe the data well enough to report a value.
    #[error("unreliable fit: {0}")]
    UnreliableFit(String),

    /// Two traces cannot be compared (different ensembles or disjoint grids).
    #[error("trace mismatch: {0}")]
    TraceMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
