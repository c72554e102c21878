//! Library-wide tolerance record.
//!
//! All validation and decision thresholds live in one struct so callers can
//! tighten or loosen the whole stack coherently. Defaults are meaningful for
//! `f64`; `f32` users should widen them (see [`Tolerances::widened`]).

use crate::scalar::{real, Real};

/// Numerical thresholds used across validation and certification.
#[derive(Clone, Debug)]
pub struct Tolerances<R> {
    /// Max-entry deviation allowed for Hermitian-tagged matrices (1e-12).
    pub hermitian: R,
    /// Projector / normalization / orthogonality validation bound (1e-10).
    pub validation: R,
    /// Relative threshold on s1 for the numerical rank of a matrix (1e-9).
    pub rank_relative: R,
    /// Relative threshold on the largest coefficient for Schmidt rank (1e-10).
    pub schmidt_relative: R,
    /// Slack on minimum eigenvalues in direct PSD checks (1e-12).
    pub psd: R,
    /// Margin for variational block-positivity decisions (1e-8).
    pub block_positive: R,
    /// Threshold below which a witness expectation counts as a violation (1e-10).
    pub detection: R,
    /// Relative slack for boundary ties in certificate comparisons (1e-12).
    pub tie_relative: R,
}

impl<R: Real> Default for Tolerances<R> {
    fn default() -> Self {
        Self {
            hermitian: real(1e-12),
            validation: real(1e-10),
            rank_relative: real(1e-9),
            schmidt_relative: real(1e-10),
            psd: real(1e-12),
            block_positive: real(1e-8),
            detection: real(1e-10),
            tie_relative: real(1e-12),
        }
    }
}

impl<R: Real> Tolerances<R> {
    /// Returns a copy with every threshold multiplied by `factor`.
    ///
    /// Useful for `f32` runs, where the `f64` defaults sit far below the
    /// working precision.
    pub fn widened(&self, factor: R) -> Self {
        Self {
            hermitian: self.hermitian * factor,
            validation: self.validation * factor,
            rank_relative: self.rank_relative * factor,
            schmidt_relative: self.schmidt_relative * factor,
            psd: self.psd * factor,
            block_positive: self.block_positive * factor,
            detection: self.detection * factor,
            tie_relative: self.tie_relative * factor,
        }
    }

    /// Returns a copy with the validation-group thresholds replaced.
    ///
    /// This is the knob exposed on the command line: it rescales the
    /// projector/normalization/orthogonality bound while leaving the
    /// decision margins untouched.
    pub fn with_validation(&self, validation: R) -> Self {
        Self {
            validation,
            ..self.clone()
        }
    }
}
