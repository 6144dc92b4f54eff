use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A NaN or infinite component was handed to a public operation.
    #[error("non-finite component in input")]
    NonFinite,

    /// Index outside the valid range of the operation.
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// Wrong vector or matrix dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The simultaneous root finder hit its sweep cap.
    #[error("root finder did not converge within {0} sweeps")]
    RootsNonConvergence(usize),

    /// Linear solve hit a (numerically) singular matrix. For Newton polishing
    /// this signals a solution of multiplicity larger than one.
    #[error("singular Jacobian")]
    SingularJacobian,

    /// Newton iteration exhausted its budget without meeting the tolerance.
    #[error("no convergence within {0} Newton iterations")]
    MaxIterations(usize),

    /// Orbit iteration escaped the working region.
    #[error("orbit escape: component modulus exceeded {0:e}")]
    Overflow(f64),

    /// Interpolation nodes violate the pairwise-distinctness precondition.
    #[error("interpolation nodes must be pairwise distinct")]
    RepeatedNodes,

    /// Homotopy paths still failing after the retry pass.
    #[error("{failed} of {total} homotopy paths failed after retry")]
    TrackingFailed { failed: usize, total: usize },

    /// Two eigenvalues of the recurrence coincide within the guard threshold.
    #[error("degenerate eigenvalues: lambda_{n} and lambda_{m} coincide")]
    DegenerateEigenvalues { n: usize, m: usize },

    /// Two flow components collided (came within the pairwise-distance guard).
    #[error("collision: flow components closer than the distance guard")]
    Collision,

    /// A point fails an admissibility precondition.
    #[error("inadmissible point: {0}")]
    Inadmissible(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
