//! Dense complex matrices in row-major order.
//!
//! Everything downstream (frames, Choi operators, certificates) is built on
//! this type. Shapes are validated in the `Result`-returning constructors;
//! the arithmetic helpers assert shape agreement because their inputs are
//! produced internally.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Complex entry shorthand.
#[inline]
pub fn cx<R: Real>(re: R, im: R) -> Complex<R> {
    Complex::new(re, im)
}

/// Real entry promoted to a complex number.
#[inline]
pub fn cre<R: Real>(re: R) -> Complex<R> {
    Complex::new(re, R::zero())
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    /// Builds a matrix from row-major data; errors when the length is wrong.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<R>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                format!("{} entries for {rows}x{cols}", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(R::zero(), R::zero()); rows * cols],
        }
    }

    /// Identity matrix of size `d`.
    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.set(i, i, cre(R::one()));
        }
        m
    }

    /// Matrix built entry-by-entry from a closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<R>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// The matrix unit `e_ij` on a `d`-dimensional space (1 at `(i, j)`).
    pub fn matrix_unit(d: usize, i: usize, j: usize) -> Self {
        assert!(i < d && j < d, "matrix unit index out of range");
        let mut m = Self::zeros(d, d);
        m.set(i, j, cre(R::one()));
        m
    }

    /// Standard basis column vector `e_i` of length `d`.
    pub fn basis_vector(d: usize, i: usize) -> Self {
        assert!(i < d, "basis index out of range");
        let mut m = Self::zeros(d, 1);
        m.set(i, 0, cre(R::one()));
        m
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether the matrix is square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::shape("square matrix", format!("{}x{}", self.rows, self.cols)))
        }
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Complex<R>] {
        &self.data
    }

    /// Entry `(r, c)`.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex<R> {
        self.data[r * self.cols + c]
    }

    /// Overwrite entry `(r, c)`.
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex<R>) {
        self.data[r * self.cols + c] = v;
    }

    /// Add `v` to entry `(r, c)`.
    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, v: Complex<R>) {
        self.data[r * self.cols + c] += v;
    }

    /// Column `j` as a `rows x 1` matrix.
    pub fn column(&self, j: usize) -> Self {
        assert!(j < self.cols, "column index out of range");
        Self::from_fn(self.rows, 1, |r, _| self.at(r, j))
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).conj())
    }

    /// Scales by a real factor.
    pub fn scale(&self, s: R) -> Self {
        self.map(|z| z * cre(s))
    }

    /// Scales by a complex factor.
    pub fn scale_complex(&self, s: Complex<R>) -> Self {
        self.map(|z| z * s)
    }

    /// Entrywise map.
    pub fn map(&self, f: impl Fn(Complex<R>) -> Complex<R>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| f(*z)).collect(),
        }
    }

    /// Matrix product (shapes asserted).
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.at(k, c);
                }
            }
        }
        out
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex<R> {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut t = Complex::new(R::zero(), R::zero());
        for i in 0..self.rows {
            t += self.at(i, i);
        }
        t
    }

    /// Kronecker (tensor) product.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.at(r1, c1);
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.set(r1 * other.rows + r2, c1 * other.cols + c2, a * other.at(r2, c2));
                    }
                }
            }
        }
        out
    }

    /// Hilbert–Schmidt inner product `tr(self^* other)`.
    pub fn frobenius_inner(&self, other: &Self) -> Complex<R> {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "inner product shape mismatch"
        );
        let mut acc = Complex::new(R::zero(), R::zero());
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            acc += a.conj() * *b;
        }
        acc
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> R {
        let mut acc = R::zero();
        for z in &self.data {
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> R {
        let mut m = R::zero();
        for z in &self.data {
            let n = z.norm();
            if n > m {
                m = n;
            }
        }
        m
    }

    /// Max-entry deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> R {
        assert!(self.is_square(), "hermitian deviation of a non-square matrix");
        let mut dev = R::zero();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let d = (self.at(r, c) - self.at(c, r).conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    /// Errors unless `‖A - A^*‖_max ≤ tol`.
    pub fn require_hermitian(&self, tol: R) -> Result<()> {
        if !self.is_square() {
            return Err(Error::shape("square matrix", format!("{}x{}", self.rows, self.cols)));
        }
        let dev = self.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: to_f64(dev),
                tolerance: to_f64(tol),
            });
        }
        Ok(())
    }

    /// Hermitian part `(A + A^*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self.at(r, c) + adj.at(r, c)) * cre(real_half::<R>())
        })
    }

    /// True when every entry modulus is at most `tol`.
    pub fn is_zero_within(&self, tol: R) -> bool {
        self.max_abs() <= tol
    }

    /// Partial trace over tensor factor `traced` of a square matrix whose
    /// side is the product of `dims`.
    pub fn partial_trace(&self, dims: &[usize], traced: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !self.is_square() || self.rows != total {
            return Err(Error::shape(
                format!("{total}x{total} for dims {dims:?}"),
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        if traced >= dims.len() {
            return Err(Error::InvalidParameter(format!(
                "traced factor {traced} out of range for {} factors",
                dims.len()
            )));
        }
        let kept: Vec<usize> = (0..dims.len()).filter(|&i| i != traced).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
        let out_dim: usize = kept_dims.iter().product::<usize>().max(1);
        let mut out = Self::zeros(out_dim, out_dim);

        let strides = strides_of(dims);
        let kept_strides = strides_of(&kept_dims);
        for a in 0..out_dim {
            let a_multi = decompose(a, &kept_dims, &kept_strides);
            for b in 0..out_dim {
                let b_multi = decompose(b, &kept_dims, &kept_strides);
                let mut acc = Complex::new(R::zero(), R::zero());
                for x in 0..dims[traced] {
                    let row = compose_with(&a_multi, &kept, traced, x, &strides);
                    let col = compose_with(&b_multi, &kept, traced, x, &strides);
                    acc += self.at(row, col);
                }
                out.set(a, b, acc);
            }
        }
        Ok(out)
    }

    /// Partial trace over every factor except `keep`.
    pub fn partial_trace_keep(&self, dims: &[usize], keep: usize) -> Result<Self> {
        let mut m = self.clone();
        let mut dims = dims.to_vec();
        let mut keep = keep;
        while dims.len() > 1 {
            let traced = if keep == 0 { dims.len() - 1 } else { 0 };
            m = m.partial_trace(&dims, traced)?;
            if traced < keep {
                keep -= 1;
            }
            dims.remove(traced);
        }
        Ok(m)
    }
}

#[inline]
fn real_half<R: Real>() -> R {
    R::one() / (R::one() + R::one())
}

/// Row-major strides for a list of factor dimensions.
fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

/// Splits a linear index into its multi-index components.
fn decompose(index: usize, dims: &[usize], strides: &[usize]) -> Vec<usize> {
    dims.iter()
        .zip(strides.iter())
        .map(|(&d, &s)| (index / s) % d)
        .collect()
}

/// Rebuilds a linear index from kept components plus one inserted factor.
fn compose_with(
    kept_multi: &[usize],
    kept_positions: &[usize],
    inserted_position: usize,
    inserted_value: usize,
    full_strides: &[usize],
) -> usize {
    let mut idx = inserted_value * full_strides[inserted_position];
    for (component, &position) in kept_multi.iter().zip(kept_positions.iter()) {
        idx += component * full_strides[position];
    }
    idx
}

impl<R: Real> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = Complex<R>;

    fn index(&self, (r, c): (usize, usize)) -> &Self::Output {
        &self.data[r * self.cols + c]
    }
}

impl<R: Real> Add for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn add(self, other: Self) -> ComplexMatrix<R> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<R: Real> Sub for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn sub(self, other: Self) -> ComplexMatrix<R> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<R: Real> Mul for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn mul(self, other: Self) -> ComplexMatrix<R> {
        self.matmul(other)
    }
}

impl<R: Real> fmt::Debug for ComplexMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.at(r, c);
                write!(f, "{:?}+{:?}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn new_rejects_wrong_length() {
        assert!(M::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn identity_and_trace() {
        let i3 = M::identity(3);
        assert_eq!(i3.trace(), c(3.0, 0.0));
        assert_eq!(i3.at(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn matmul_against_hand_computation() {
        // [[1, i], [0, 2]] * [[1, 0], [1, 1]] = [[1+i, i], [2, 2]]
        let a = M::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        let b = M::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let p = a.matmul(&b);
        assert_eq!(p.at(0, 0), c(1.0, 1.0));
        assert_eq!(p.at(0, 1), c(0.0, 1.0));
        assert_eq!(p.at(1, 0), c(2.0, 0.0));
        assert_eq!(p.at(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = M::new(1, 2, vec![c(1.0, 2.0), c(3.0, -4.0)]).unwrap();
        let ad = a.adjoint();
        assert_eq!(ad.rows(), 2);
        assert_eq!(ad.at(0, 0), c(1.0, -2.0));
        assert_eq!(ad.at(1, 0), c(3.0, 4.0));
    }

    #[test]
    fn kron_matches_block_structure() {
        let a = M::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        let b = M::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.at(0, 0), c(1.0, 0.0));
        assert_eq!(k.at(1, 1), c(1.0, 0.0));
        assert_eq!(k.at(2, 2), c(2.0, 0.0));
        assert_eq!(k.at(3, 3), c(2.0, 0.0));
        assert_eq!(k.at(0, 2), c(0.0, 0.0));
    }

    #[test]
    fn hermitian_check() {
        let h = M::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        assert!(h.require_hermitian(1e-12).is_ok());
        let g = M::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)]).unwrap();
        assert!(g.require_hermitian(1e-12).is_err());
    }

    #[test]
    fn partial_trace_of_kron_factors() {
        // tr_2(A ⊗ B) = tr(B) * A and tr_1(A ⊗ B) = tr(A) * B.
        let a = M::new(2, 2, vec![c(1.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(3.0, 0.0)]).unwrap();
        let b = M::new(3, 3, {
            let mut v = vec![c(0.0, 0.0); 9];
            v[0] = c(2.0, 0.0);
            v[4] = c(1.0, 0.0);
            v[8] = c(4.0, 0.0);
            v[1] = c(0.0, 1.0);
            v[3] = c(0.0, -1.0);
            v
        })
        .unwrap();
        let k = a.kron(&b);
        let t2 = k.partial_trace(&[2, 3], 1).unwrap();
        let expect = a.scale(7.0); // tr(B) = 7
        assert!((&t2 - &expect).max_abs() < 1e-14);
        let t1 = k.partial_trace(&[2, 3], 0).unwrap();
        let expect = b.scale(4.0); // tr(A) = 4
        assert!((&t1 - &expect).max_abs() < 1e-14);
    }

    #[test]
    fn partial_trace_keep_singles_out_a_factor() {
        let a = M::identity(2).scale(0.5);
        let b = M::new(2, 2, vec![c(0.25, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.75, 0.0)]).unwrap();
        let d = M::identity(2).scale(0.5);
        let full = a.kron(&b).kron(&d);
        let kept = full.partial_trace_keep(&[2, 2, 2], 1).unwrap();
        // tr(A) = 1, tr(D) = 1 → keeps B exactly.
        assert!((&kept - &b).max_abs() < 1e-14);
    }

    #[test]
    fn frobenius_inner_is_conjugate_linear_in_first_slot() {
        let a = M::new(1, 2, vec![c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        let b = M::new(1, 2, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        // <a, b> = conj(i)*1 + conj(1)*0 = -i
        assert_eq!(a.frobenius_inner(&b), c(0.0, -1.0));
    }
}
