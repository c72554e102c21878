//! Frames, rank-k projectors, and the spectral quantities the certificates
//! consume: Ky Fan norms, k-overlaps, and compressions of projectors.
//!
//! A *frame* is a `d2 x d1` complex matrix `F`, identified with the vector
//! `vec(F)` in `C^{d1} ⊗ C^{d2}` via `vec(F)[i·d2 + r] = F[r, i]`. Unit
//! Hilbert–Schmidt norm for `F` is unit Euclidean norm for `vec(F)`, and the
//! Schmidt coefficients of `vec(F)` are exactly the singular values of `F`.


use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{real, Real};
use crate::svd::{singular_values, svd};
use crate::tolerance::Tolerances;

/// Sum of the `k` largest singular values (Ky Fan k-norm).
///
/// `k` is clamped to the number of singular values; `k = 0` is rejected.
pub fn ky_fan_norm<R: Real>(a: &ComplexMatrix<R>, k: usize) -> Result<R> {
    let s = singular_values(a)?;
    check_k(k, s.len())?;
    Ok(s.iter().take(k).copied().sum())
}

/// Sum of the squares of the `k` largest singular values.
///
/// For a unit-norm frame `F` this is the largest overlap `tr(p F F^*)`
/// achievable by a rank-`k` projector `p`, i.e. the squared norm of the
/// best rank-`k` approximation of `vec(F)` by a Schmidt-rank-`k` vector.
pub fn ky_fan_overlap<R: Real>(a: &ComplexMatrix<R>, k: usize) -> Result<R> {
    let s = singular_values(a)?;
    check_k(k, s.len())?;
    Ok(s.iter().take(k).map(|&x| x * x).sum())
}

fn check_k(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    Ok(())
}

/// Number of singular values exceeding `rel · s_max` (numerical rank).
pub fn numerical_rank<R: Real>(a: &ComplexMatrix<R>, rel: R) -> Result<usize> {
    let s = singular_values(a)?;
    let cut = match s.first() {
        Some(&top) => top * rel,
        None => return Ok(0),
    };
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// A `d2 x d1` matrix regarded as a vector in `C^{d1} ⊗ C^{d2}`.
///
/// Carries a flag recording whether its Hilbert–Schmidt norm is 1 within the
/// validation tolerance; the projector construction requires it.
#[derive(Clone, Debug)]
pub struct Frame<R: Real> {
    matrix: ComplexMatrix<R>,
    unit_norm: bool,
}

impl<R: Real> Frame<R> {
    /// Wrap a matrix, recording whether it is unit-norm within `tol`.
    pub fn new(matrix: ComplexMatrix<R>, tol: &Tolerances<R>) -> Self {
        let norm = matrix.frobenius_norm();
        let unit_norm = (norm - R::one()).abs() <= tol.validation;
        Frame { matrix, unit_norm }
    }

    /// Wrap a matrix with the default tolerances.
    pub fn from_matrix(matrix: ComplexMatrix<R>) -> Self {
        Self::new(matrix, &Tolerances::default())
    }

    /// Rescale to unit Hilbert–Schmidt norm. Fails on (near-)zero input.
    pub fn normalized(matrix: ComplexMatrix<R>) -> Result<Self> {
        let norm = matrix.frobenius_norm();
        if norm <= real::<R>(1e-12) {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero matrix".into(),
            ));
        }
        Ok(Frame {
            matrix: matrix.scale(R::one() / norm),
            unit_norm: true,
        })
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.matrix
    }

    /// Whether the Hilbert–Schmidt norm is 1 within the recorded tolerance.
    pub fn is_unit_norm(&self) -> bool {
        self.unit_norm
    }

    /// Output dimension `d2` (rows).
    pub fn d2(&self) -> usize {
        self.matrix.rows()
    }

    /// Input dimension `d1` (columns).
    pub fn d1(&self) -> usize {
        self.matrix.cols()
    }

    /// Singular values in descending order (Schmidt coefficients of `vec(F)`).
    pub fn schmidt_coefficients(&self) -> Result<Vec<R>> {
        singular_values(&self.matrix)
    }

    /// Numerical rank, i.e. Schmidt rank of `vec(F)`.
    pub fn rank(&self, tol: &Tolerances<R>) -> Result<usize> {
        numerical_rank(&self.matrix, tol.rank_relative)
    }

    /// Largest overlap with a Schmidt-rank-`k` unit vector (squared reading).
    pub fn overlap(&self, k: usize) -> Result<R> {
        ky_fan_overlap(&self.matrix, k)
    }
}

/// `vec(F)` as a `d1·d2 x 1` column: `vec(F)[i·d2 + r] = F[r, i]`.
pub fn frame_to_vector<R: Real>(f: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let (d2, d1) = (f.rows(), f.cols());
    let mut v = ComplexMatrix::zeros(d1 * d2, 1);
    for i in 0..d1 {
        for r in 0..d2 {
            v.set(i * d2 + r, 0, f.at(r, i));
        }
    }
    v
}

/// Inverse of [`frame_to_vector`]: reshape a `d1·d2` column into `d2 x d1`.
pub fn vector_to_frame<R: Real>(v: &ComplexMatrix<R>, d1: usize, d2: usize) -> Result<ComplexMatrix<R>> {
    if v.cols() != 1 || v.rows() != d1 * d2 {
        return Err(Error::shape(
            format!("{}x1", d1 * d2),
            format!("{}x{}", v.rows(), v.cols()),
        ));
    }
    let mut f = ComplexMatrix::zeros(d2, d1);
    for i in 0..d1 {
        for r in 0..d2 {
            f.set(r, i, v.at(i * d2 + r, 0));
        }
    }
    Ok(f)
}

/// Rank-one projector `|vec(F)⟩⟨vec(F)|` on `C^{d1} ⊗ C^{d2}`.
///
/// Requires a unit-norm frame; in block form the `(i, j)` block of size
/// `d2 x d2` is `F e_{ij} F^*`, i.e. entry `[(i·d2 + r), (j·d2 + c)]` equals
/// `F[r, i] · conj(F[c, j])`.
pub fn frame_to_projector<R: Real>(f: &Frame<R>) -> Result<ComplexMatrix<R>> {
    if !f.is_unit_norm() {
        return Err(Error::NotNormalized {
            trace: crate::scalar::to_f64(f.matrix().frobenius_norm()),
            tolerance: 0.0,
        });
    }
    let v = frame_to_vector(f.matrix());
    Ok(v.matmul(&v.adjoint()))
}

/// An orthogonal projector of known rank on `C^d`.
#[derive(Clone, Debug)]
pub struct RankKProjector<R: Real> {
    matrix: ComplexMatrix<R>,
    k: usize,
}

impl<R: Real> RankKProjector<R> {
    /// Validate that `matrix` is Hermitian, idempotent, and of trace `k`.
    pub fn new(matrix: ComplexMatrix<R>, k: usize, tol: &Tolerances<R>) -> Result<Self> {
        let d = matrix.dim()?;
        if k == 0 || k > d {
            return Err(Error::KOutOfRange { k, max: d });
        }
        matrix.require_hermitian(tol.validation)?;
        let idem = (&matrix.matmul(&matrix) - &matrix).max_abs();
        if idem > tol.validation {
            return Err(Error::NotProjector {
                expected_rank: k,
                detail: format!("not idempotent (deviation {:.3e})", crate::scalar::to_f64(idem)),
            });
        }
        let trace = matrix.trace().re;
        if (trace - real::<R>(k as f64)).abs() > tol.validation * real::<R>(d as f64) {
            return Err(Error::NotProjector {
                expected_rank: k,
                detail: format!("trace {:.6} differs from rank", crate::scalar::to_f64(trace)),
            });
        }
        Ok(RankKProjector { matrix, k })
    }

    /// Projector onto the span of the first `k` columns of `basis`
    /// (columns must be orthonormal; this is not re-validated).
    pub fn from_orthonormal_columns(basis: &ComplexMatrix<R>, k: usize) -> Result<Self> {
        let d = basis.rows();
        if k == 0 || k > basis.cols() {
            return Err(Error::KOutOfRange { k, max: basis.cols() });
        }
        let mut p = ComplexMatrix::zeros(d, d);
        for j in 0..k {
            let col = basis.column(j);
            p = &p + &col.matmul(&col.adjoint());
        }
        Ok(RankKProjector { matrix: p, k })
    }

    /// The projector matrix.
    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.matrix
    }

    /// The rank.
    pub fn k(&self) -> usize {
        self.k
    }
}

/// Spectral norm of the compression `q P q` of projector `p` by projector `q`
/// (equal to that of `p q p`, and to the squared cosine of the principal
/// angle between the ranges).
pub fn projector_overlap_norm<R: Real>(p: &RankKProjector<R>, q: &RankKProjector<R>) -> Result<R> {
    let qpq = q.matrix().matmul(p.matrix()).matmul(q.matrix());
    spectral_norm(&qpq)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm<R: Real>(a: &ComplexMatrix<R>) -> Result<R> {
    let s = singular_values(a)?;
    Ok(s.first().copied().unwrap_or_else(R::zero))
}

/// Best rank-`k` left singular projector of `f`, together with the captured
/// overlap `Σ_{i<k} s_i²`.
pub fn top_k_left_projector<R: Real>(f: &ComplexMatrix<R>, k: usize) -> Result<(RankKProjector<R>, R)> {
    let dec = svd(f)?;
    check_k(k, f.rows())?;
    let p = RankKProjector::from_orthonormal_columns(&dec.u, k)?;
    let overlap = dec.values.iter().take(k.min(dec.values.len())).map(|&s| s * s).sum();
    Ok((p, overlap))
}
