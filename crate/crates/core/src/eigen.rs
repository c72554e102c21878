//! Hermitian eigendecomposition via cyclic complex Jacobi rotations.
//!
//! Matrices here are small (at most 81x81 in any workflow), so the quadratic
//! convergence and high relative accuracy of Jacobi outweigh its cubic sweep
//! cost. The rotation kernel is shared with the one-sided Jacobi SVD.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{cre, ComplexMatrix};
use crate::scalar::{real, Real};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `H = V diag(values) V^*` of a Hermitian matrix.
///
/// `values` are sorted ascending; column `i` of `vectors` is the eigenvector
/// for `values[i]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<R: Real> {
    /// Eigenvalues, ascending.
    pub values: Vec<R>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix<R>,
}

/// Unitary 2x2 rotation parameters `(c, s)` diagonalizing the Hermitian
/// block `[[a, h], [conj(h), b]]`. The transformation on a column pair is
/// `p' = c*p - conj(s)*q`, `q' = s*p + c*q`; the rotated diagonal becomes
/// `(a - t*|h|, b + t*|h|)` where `t = s.norm()/c`.
pub(crate) fn hermitian_rotation<R: Real>(a: R, b: R, h: Complex<R>) -> (R, Complex<R>, R) {
    let g = h.norm();
    debug_assert!(g > R::zero(), "rotation requested for a zero off-diagonal");
    let phase = h / cre(g);
    let tau = (b - a) / (real::<R>(2.0) * g);
    let t = if tau >= R::zero() {
        R::one() / (tau + (R::one() + tau * tau).sqrt())
    } else {
        R::one() / (tau - (R::one() + tau * tau).sqrt())
    };
    let c = R::one() / (R::one() + t * t).sqrt();
    let s = phase * cre(c * t);
    (c, s, t)
}

/// Computes the eigendecomposition of a Hermitian matrix.
///
/// The input is trusted to be Hermitian up to rounding (callers validate
/// with [`ComplexMatrix::require_hermitian`] where it matters); only the
/// Hermitian part of the data participates in the iteration.
pub fn hermitian_eigen<R: Real>(h: &ComplexMatrix<R>) -> Result<HermitianEigen<R>> {
    let n = h.dim()?;
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let mut w = h.hermitian_part();
    let mut v = ComplexMatrix::<R>::identity(n);
    let scale = w.frobenius_norm();
    if scale == R::zero() {
        return Ok(HermitianEigen {
            values: vec![R::zero(); n],
            vectors: v,
        });
    }
    let target = scale * R::epsilon() * real::<R>(n as f64);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&w) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let hpq = w.at(p, q);
                if hpq.norm() <= R::min_positive_value() {
                    continue;
                }
                rotate_hermitian(&mut w, &mut v, p, q, hpq);
            }
        }
    }
    if !converged && off_diagonal_norm(&w) > target {
        return Err(Error::NoConvergence {
            kernel: "hermitian Jacobi eigensolver",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<R> = (0..n).map(|i| w.at(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let values: Vec<R> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v.at(r, order[c]));
    Ok(HermitianEigen { values, vectors })
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<R: Real>(h: &ComplexMatrix<R>) -> Result<R> {
    Ok(hermitian_eigen(h)?.values[0])
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue<R: Real>(h: &ComplexMatrix<R>) -> Result<R> {
    let eig = hermitian_eigen(h)?;
    Ok(*eig.values.last().expect("non-empty spectrum"))
}

fn off_diagonal_norm<R: Real>(w: &ComplexMatrix<R>) -> R {
    let n = w.rows();
    let mut acc = R::zero();
    for p in 0..n {
        for q in 0..n {
            if p != q {
                acc += w.at(p, q).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate_hermitian<R: Real>(
    w: &mut ComplexMatrix<R>,
    v: &mut ComplexMatrix<R>,
    p: usize,
    q: usize,
    hpq: Complex<R>,
) {
    let n = w.rows();
    let a = w.at(p, p).re;
    let b = w.at(q, q).re;
    let (c, s, t) = hermitian_rotation(a, b, hpq);
    let g = hpq.norm();
    let cc = cre(c);
    let s_conj = s.conj();

    // Column update W <- W J.
    for r in 0..n {
        let wp = w.at(r, p);
        let wq = w.at(r, q);
        w.set(r, p, wp * cc - wq * s_conj);
        w.set(r, q, wp * s + wq * cc);
    }
    // Row update W <- J^* W.
    for col in 0..n {
        let wp = w.at(p, col);
        let wq = w.at(q, col);
        w.set(p, col, wp * cc - wq * s);
        w.set(q, col, wp * s_conj + wq * cc);
    }
    // Rotated entries are known analytically; pin them to kill rounding drift.
    w.set(p, p, cre(a - t * g));
    w.set(q, q, cre(b + t * g));
    w.set(p, q, cre(R::zero()));
    w.set(q, p, cre(R::zero()));

    // Accumulate eigenvectors V <- V J.
    for r in 0..n {
        let vp = v.at(r, p);
        let vq = v.at(r, q);
        v.set(r, p, vp * cc - vq * s_conj);
        v.set(r, q, vp * s + vq * cc);
    }
}
