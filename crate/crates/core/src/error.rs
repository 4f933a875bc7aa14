//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors surfaced by the estimation pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix or sequence had inconsistent or unusable dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A numeric parameter violated a precondition, e.g. the ESPRIT window
    /// constraint `S <= L <= M+1-S`.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Minimum separation is undefined for a single atom; callers dividing
    /// by the separation must branch on this.
    #[error("separation undefined for single atom")]
    SingleAtomSeparation,

    /// The measure failed a structural invariant (mismatched lengths,
    /// repeated support points, all-zero amplitudes).
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// Separated-clumps parameters violate the model invariants.
    #[error("invalid clumps config: {0}")]
    ClumpsInvalid(String),

    /// The clumps cannot be packed onto the torus.
    #[error("clumps config infeasible: {0}")]
    ClumpsInfeasible(String),

    /// Jacobi SVD failed to orthogonalize within the sweep budget.
    #[error("svd did not converge after {sweeps} sweeps")]
    SvdNonConvergence { sweeps: usize },

    /// QR eigenvalue iteration failed to deflate within the iteration budget.
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigNonConvergence { iterations: usize },

    /// Fewer than `S` local minima in the MUSIC imaging function; the noise
    /// has overwhelmed the subspace gap.
    #[error("MUSIC peak deficit: found {found} local minima, need {needed}")]
    MusicPeakDeficit { found: usize, needed: usize },

    /// Amplitude recovery was asked to solve for repeated support nodes.
    #[error("repeated estimated nodes at indices {0} and {1}")]
    RepeatedNodes(usize, usize),

    /// The uncertainty constant may be infinite below `N = S`.
    #[error("uncertainty constant may be infinite below N = S (N = {n}, S = {s})")]
    UncertaintyWindowTooShort { n: usize, s: usize },

    /// Input/output failure while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
