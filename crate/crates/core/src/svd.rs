//! Singular value decomposition via one-sided Jacobi rotations.
//!
//! One-sided Jacobi works directly on the matrix columns, so singular values
//! come out with high relative accuracy — a deliberately different route from
//! the Hermitian eigensolver, letting tests cross-check the two (singular
//! values of A against eigenvalues of A^*A).

use num_complex::Complex;

use crate::eigen::hermitian_rotation;
use crate::error::{Error, Result};
use crate::matrix::{cre, ComplexMatrix};
use crate::scalar::{real, Real};

const MAX_SWEEPS: usize = 100;

/// Thin decomposition `A = U diag(values) V^*` with `values` sorted
/// non-increasing. `U` is `rows x min`, `V` is `cols x min`; both have
/// orthonormal columns (zero singular directions are completed
/// deterministically from the canonical basis).
#[derive(Clone, Debug)]
pub struct Svd<R: Real> {
    /// Left singular vectors as orthonormal columns.
    pub u: ComplexMatrix<R>,
    /// Singular values, non-increasing.
    pub values: Vec<R>,
    /// Right singular vectors as orthonormal columns (`A = U diag(values) V^*`).
    pub v: ComplexMatrix<R>,
}

/// Full SVD of a rectangular complex matrix.
pub fn svd<R: Real>(a: &ComplexMatrix<R>) -> Result<Svd<R>> {
    compute(a, true)
}

/// Singular values only (skips the accumulation of singular vectors).
pub fn singular_values<R: Real>(a: &ComplexMatrix<R>) -> Result<Vec<R>> {
    Ok(compute(a, false)?.values)
}

fn compute<R: Real>(a: &ComplexMatrix<R>, want_vectors: bool) -> Result<Svd<R>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::shape("non-empty matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    let transposed = a.rows() < a.cols();
    let mut b = if transposed { a.adjoint() } else { a.clone() };
    let (m, n) = (b.rows(), b.cols());
    let mut v = if want_vectors {
        ComplexMatrix::<R>::identity(n)
    } else {
        ComplexMatrix::zeros(0, 0)
    };

    let eps = R::epsilon();
    // Convergence threshold for the normalized column overlap. The rounding
    // floor of an m-term inner product of unit columns is ~sqrt(m)·eps;
    // demanding less than that can cycle forever on nearly rank-deficient
    // inputs. Computed via sqrt(α)·sqrt(β) so tiny column norms cannot
    // underflow the product.
    let threshold = eps * real::<R>((m as f64).sqrt());
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (alpha, beta, gamma) = column_gram(&b, p, q);
                if alpha == R::zero() || beta == R::zero() {
                    continue;
                }
                let g = gamma.norm();
                if g <= threshold * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                let (c, s, _) = hermitian_rotation(alpha, beta, gamma);
                rotate_columns(&mut b, p, q, c, s);
                if want_vectors {
                    rotate_columns(&mut v, p, q, c, s);
                }
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            kernel: "one-sided Jacobi SVD",
            sweeps: MAX_SWEEPS,
        });
    }

    // Column norms are the singular values; sort descending (stable).
    let mut norms: Vec<R> = (0..n)
        .map(|j| {
            let mut acc = R::zero();
            for r in 0..m {
                acc += b.at(r, j).norm_sqr();
            }
            acc.sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite singular values"));
    norms = order.iter().map(|&j| norms[j]).collect();

    if !want_vectors {
        return Ok(Svd {
            u: ComplexMatrix::zeros(0, 0),
            values: norms,
            v: ComplexMatrix::zeros(0, 0),
        });
    }

    let s_max = norms[0];
    let zero_cut = s_max * eps * real::<R>((m + n) as f64);
    let mut u = ComplexMatrix::<R>::zeros(m, n);
    let mut filled: Vec<usize> = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[slot] > zero_cut {
            let inv = R::one() / norms[slot];
            for r in 0..m {
                u.set(r, slot, b.at(r, j) * cre(inv));
            }
            filled.push(slot);
        }
    }
    // Complete zero singular directions with canonical-basis Gram-Schmidt so
    // U always has n orthonormal columns.
    for slot in 0..n {
        if norms[slot] > zero_cut {
            continue;
        }
        let col = orthonormal_completion_column(&u, &filled, m);
        for r in 0..m {
            u.set(r, slot, col[r]);
        }
        filled.push(slot);
    }

    let v_sorted = ComplexMatrix::from_fn(n, n, |r, c| v.at(r, order[c]));
    v = v_sorted;

    if transposed {
        // A = B^* = V diag U^*: swap the roles.
        Ok(Svd { u: v, values: norms, v: u })
    } else {
        Ok(Svd { u, values: norms, v })
    }
}

fn column_gram<R: Real>(b: &ComplexMatrix<R>, p: usize, q: usize) -> (R, R, Complex<R>) {
    let mut alpha = R::zero();
    let mut beta = R::zero();
    let mut gamma = Complex::new(R::zero(), R::zero());
    for r in 0..b.rows() {
        let bp = b.at(r, p);
        let bq = b.at(r, q);
        alpha += bp.norm_sqr();
        beta += bq.norm_sqr();
        gamma += bp.conj() * bq;
    }
    (alpha, beta, gamma)
}

fn rotate_columns<R: Real>(b: &mut ComplexMatrix<R>, p: usize, q: usize, c: R, s: Complex<R>) {
    let cc = cre(c);
    let s_conj = s.conj();
    for r in 0..b.rows() {
        let bp = b.at(r, p);
        let bq = b.at(r, q);
        b.set(r, p, bp * cc - bq * s_conj);
        b.set(r, q, bp * s + bq * cc);
    }
}

/// Picks the canonical basis vector with the largest residual against the
/// already-filled columns, orthogonalizes twice, and normalizes.
fn orthonormal_completion_column<R: Real>(
    u: &ComplexMatrix<R>,
    filled: &[usize],
    m: usize,
) -> Vec<Complex<R>> {
    let mut best: Option<(R, Vec<Complex<R>>)> = None;
    for cand in 0..m {
        let mut col = vec![Complex::new(R::zero(), R::zero()); m];
        col[cand] = cre(R::one());
        for _ in 0..2 {
            for &j in filled {
                let mut overlap = Complex::new(R::zero(), R::zero());
                for r in 0..m {
                    overlap += u.at(r, j).conj() * col[r];
                }
                for r in 0..m {
                    let uj = u.at(r, j);
                    col[r] -= uj * overlap;
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
        if best.as_ref().map_or(true, |(bn, _)| norm > *bn) {
            best = Some((norm, col));
        }
    }
    let (norm, mut col) = best.expect("at least one candidate");
    assert!(norm > R::zero(), "cannot complete an orthonormal basis");
    let inv = cre(R::one() / norm);
    for z in &mut col {
        *z *= inv;
    }
    col
}
