//! Numerical core for constructing linear maps between matrix algebras from
//! spectral data and certifying their positivity properties.
//!
//! The library works with maps `φ: M_{d1} → M_{d2}` presented as signed sums
//! `φ(a) = Σ_α λ_α F_α a F_α^* − Σ_β λ_β G_β a G_β^*` over orthonormal
//! coefficient–frame pairs. From the singular-value profile of the frames it
//! derives sufficient conditions for `φ` to be k-positive, or explicit
//! Schmidt-rank-k witnesses showing it is not, and applies those certificates
//! to classify entanglement depth of states and to maps on multipartite
//! algebras that are positive on separable elements.
//!
//! Everything is generic over the real scalar (`f64`/`f32`) through the
//! [`scalar::Real`] trait; the aliases at the crate root fix the common
//! concrete choices.

#![forbid(unsafe_code)]
#![deny(missing_docs)]

pub mod certificates;
pub mod choi;
pub mod error;
pub mod io;
pub mod matrix;
pub mod multipartite;
pub mod oracle;
pub mod scalar;
pub mod tolerance;

pub mod eigen;
pub mod sampling;
pub mod spectral;
pub mod states;
pub mod svd;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use scalar::Real;
pub use tolerance::Tolerances;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Single-precision complex scalar.
pub type C32 = num_complex::Complex<f32>;
/// Double-precision dense complex matrix.
pub type Matrix64 = ComplexMatrix<f64>;
/// Single-precision dense complex matrix.
pub type Matrix32 = ComplexMatrix<f32>;
/// Double-precision frame (matrix viewed as a bipartite vector).
pub type Frame64 = spectral::Frame<f64>;
/// Single-precision frame.
pub type Frame32 = spectral::Frame<f32>;
