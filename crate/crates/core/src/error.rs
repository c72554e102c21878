//! Error types shared across the crate.

use thiserror::Error;

/// Errors surfaced by validation, construction, and certification routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix or vector had an unexpected shape.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch {
        /// Shape the operation required, e.g. `"3x3"`.
        expected: String,
        /// Shape actually supplied.
        got: String,
    },

    /// A compression level `k` fell outside `[1, max]`.
    #[error("k = {k} out of range [1, {max}]")]
    KOutOfRange {
        /// Requested level.
        k: usize,
        /// Largest admissible level.
        max: usize,
    },

    /// A matrix failed the Hermitian check.
    #[error("matrix is not Hermitian: max |A - A^*| = {deviation:.3e} > {tolerance:.3e}")]
    NotHermitian {
        /// Largest entrywise deviation from the adjoint.
        deviation: f64,
        /// Tolerance the check used.
        tolerance: f64,
    },

    /// A matrix failed the projector check (idempotence or trace).
    #[error("matrix is not a rank-{expected_rank} projector: {detail}")]
    NotProjector {
        /// Rank the caller claimed.
        expected_rank: usize,
        /// Which property failed and by how much.
        detail: String,
    },

    /// A frame was used where a unit Hilbert–Schmidt norm is required.
    #[error("frame not normalized: ‖F‖ = {trace:.12} (> {tolerance:.3e} from 1)")]
    NotNormalized {
        /// Hilbert–Schmidt norm actually found.
        trace: f64,
        /// Tolerance the check used.
        tolerance: f64,
    },

    /// Two frames in a decomposition were not orthogonal.
    #[error("frames {first} and {second} not orthogonal: |tr(F_a^* F_b)| = {overlap:.3e}")]
    NotOrthogonal {
        /// Index of the first frame in the combined list.
        first: usize,
        /// Index of the second frame.
        second: usize,
        /// Magnitude of the Hilbert–Schmidt inner product.
        overlap: f64,
    },

    /// A decomposition carried more terms than the space admits.
    #[error("too many terms: {count} > d1*d2 = {max}")]
    TooManyTerms {
        /// Number of frames supplied.
        count: usize,
        /// Dimension of the frame space.
        max: usize,
    },

    /// A parameter fell outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A certification theorem's precondition failed; the caller should use
    /// a different route (e.g. the direct eigenvalue check at k = d).
    #[error("theorem inapplicable: {0}")]
    Inapplicable(String),

    /// An iterative kernel failed to converge within its sweep budget.
    #[error("no convergence after {sweeps} sweeps in {kernel}")]
    NoConvergence {
        /// Which kernel gave up.
        kernel: &'static str,
        /// Sweep budget that was exhausted.
        sweeps: usize,
    },

    /// Malformed input encountered while decoding a JSON document.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Shorthand for shape errors.
    pub fn shape(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }
}
