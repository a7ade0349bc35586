use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field violates its invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A scenario file failed to parse; carries the offending key and line.
    #[error("scenario parse error at line {line}: {message}")]
    ScenarioParse { line: usize, message: String },

    /// Fixed-point iteration hit its cap before the residual dropped below tol.
    #[error(
        "no convergence after {iterations} iterations (residual {residual:.3e}, tol {tol:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    /// The double-obstacle contact equation has no root on [0, pi/2]:
    /// switching is never worth its cost for these parameters.
    #[error("obstacle never reached: contact equation has no root on [0, pi/2] (left side at pi/2 = {at_half_pi:.6e} <= c_bar = {c_bar:.6e})")]
    ObstacleNeverReached { at_half_pi: f64, c_bar: f64 },

    /// A serialized value-field artifact is malformed.
    #[error("malformed field artifact: {0}")]
    MalformedField(String),

    /// A field artifact was produced under different parameters than the
    /// scenario in hand.
    #[error("parameter hash mismatch: field artifact {artifact}, scenario {scenario}")]
    HashMismatch { artifact: String, scenario: String },

    /// Simulation state became non-finite (diverged dynamics or bad input).
    #[error("non-finite simulation state at step {step}")]
    NonFiniteState { step: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
