//! Seeded random fixtures: Gaussian matrices, unitaries, projectors, states.
//!
//! Everything is driven by ChaCha8, whose output stream is specified and
//! stable across platforms and releases — results are reproducible bit for
//! bit from a `u64` seed. Gaussians come from Box–Muller over the raw
//! 53-bit uniform, avoiding any dependence on distribution-crate internals.

use num_complex::Complex;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{cre, ComplexMatrix};
use crate::scalar::{real, Real};
use crate::spectral::Frame;

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for restart `index` derived from `seed` via SplitMix64, so
/// parallel restarts are independent of scheduling order.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform sample in `[0, 1)` with 53 bits of precision.
pub fn uniform<R: Real>(rng: &mut ChaCha8Rng) -> R {
    let x = rng.next_u64() >> 11;
    real::<R>(x as f64 / 9_007_199_254_740_992.0)
}

/// Standard normal sample (Box–Muller).
pub fn standard_normal<R: Real>(rng: &mut ChaCha8Rng) -> R {
    let mut u1: R = uniform(rng);
    let tiny = real::<R>(1e-300);
    if u1 < tiny {
        u1 = tiny;
    }
    let u2: R = uniform(rng);
    let two_pi = real::<R>(std::f64::consts::TAU);
    (-(R::one() + R::one()) * u1.ln()).sqrt() * (two_pi * u2).cos()
}

/// Standard complex Gaussian: independent N(0, 1/2) real and imaginary parts,
/// so E|z|^2 = 1.
pub fn gaussian_complex<R: Real>(rng: &mut ChaCha8Rng) -> Complex<R> {
    let scale = real::<R>(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(standard_normal::<R>(rng) * scale, standard_normal::<R>(rng) * scale)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn gaussian_matrix<R: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix<R> {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, gaussian_complex(rng));
        }
    }
    m
}

/// Random Hermitian matrix `(G + G^*)/2` with Gaussian `G`.
pub fn random_hermitian<R: Real>(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix<R> {
    gaussian_matrix::<R>(rng, d, d).hermitian_part()
}

/// Haar-ish random unitary: Gram-Schmidt of a Gaussian matrix.
pub fn random_unitary<R: Real>(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix<R> {
    loop {
        let g = gaussian_matrix::<R>(rng, d, d);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

/// Random rank-`k` orthogonal projector on `C^d`.
pub fn random_rank_k_projector<R: Real>(rng: &mut ChaCha8Rng, d: usize, k: usize) -> ComplexMatrix<R> {
    assert!(k >= 1 && k <= d, "projector rank out of range");
    let q = random_unitary::<R>(rng, d);
    let mut p = ComplexMatrix::zeros(d, d);
    for j in 0..k {
        let col = q.column(j);
        let outer = col.matmul(&col.adjoint());
        p = &p + &outer;
    }
    p
}

/// Random unit column vector in `C^n`.
pub fn random_state_vector<R: Real>(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix<R> {
    loop {
        let g = gaussian_matrix::<R>(rng, n, 1);
        let norm = g.frobenius_norm();
        if norm > real::<R>(1e-6) {
            return g.scale(R::one() / norm);
        }
    }
}

/// Random density matrix (normalized Wishart `GG^*/tr`).
pub fn random_density_matrix<R: Real>(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix<R> {
    let g = gaussian_matrix::<R>(rng, d, d);
    let w = g.matmul(&g.adjoint());
    let t = w.trace().re;
    w.scale(R::one() / t)
}

/// Random frame of shape `d2 x d1` with unit Hilbert–Schmidt norm.
pub fn random_normalized_frame<R: Real>(rng: &mut ChaCha8Rng, d2: usize, d1: usize) -> Frame<R> {
    loop {
        let g = gaussian_matrix::<R>(rng, d2, d1);
        if let Ok(f) = Frame::normalized(g) {
            return f;
        }
    }
}

/// Random frame of numerical rank exactly `k`, unit Hilbert–Schmidt norm.
pub fn random_rank_k_frame<R: Real>(rng: &mut ChaCha8Rng, d2: usize, d1: usize, k: usize) -> Frame<R> {
    assert!(k >= 1 && k <= d1.min(d2), "frame rank out of range");
    let left = gaussian_matrix::<R>(rng, d2, k);
    let right = gaussian_matrix::<R>(rng, k, d1);
    Frame::normalized(left.matmul(&right)).expect("generic product has nonzero norm")
}

/// Modified Gram-Schmidt; `None` when the input is numerically singular.
fn gram_schmidt<R: Real>(g: &ComplexMatrix<R>) -> Option<ComplexMatrix<R>> {
    let d = g.rows();
    let mut q = g.clone();
    for j in 0..d {
        for _ in 0..2 {
            for i in 0..j {
                let mut overlap = Complex::new(R::zero(), R::zero());
                for r in 0..d {
                    overlap += q.at(r, i).conj() * q.at(r, j);
                }
                for r in 0..d {
                    let qi = q.at(r, i);
                    let qj = q.at(r, j);
                    q.set(r, j, qj - qi * overlap);
                }
            }
        }
        let mut norm = R::zero();
        for r in 0..d {
            norm += q.at(r, j).norm_sqr();
        }
        let norm = norm.sqrt();
        if norm < real::<R>(1e-8) {
            return None;
        }
        let inv = cre(R::one() / norm);
        for r in 0..d {
            let qj = q.at(r, j);
            q.set(r, j, qj * inv);
        }
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn rng_is_reproducible() {
        let mut a = rng(99);
        let mut b = rng(99);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn stream_rngs_differ_per_index() {
        let mut a = stream_rng(7, 0);
        let mut b = stream_rng(7, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(4);
        let u = random_unitary::<f64>(&mut r, 5);
        let gram = u.adjoint().matmul(&u);
        assert!((&gram - &M::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn projector_is_projector_with_right_rank() {
        let mut r = rng(8);
        let p = random_rank_k_projector::<f64>(&mut r, 6, 2);
        assert!(p.hermitian_deviation() < 1e-12);
        let p2 = p.matmul(&p);
        assert!((&p2 - &p).max_abs() < 1e-12);
        assert!((p.trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_has_unit_trace() {
        let mut r = rng(21);
        let rho = random_density_matrix::<f64>(&mut r, 4);
        assert!((rho.trace().re - 1.0).abs() < 1e-13);
        assert!(rho.hermitian_deviation() < 1e-13);
    }

    #[test]
    fn normal_samples_have_plausible_moments() {
        let mut r = rng(1);
        let n = 20_000;
        let mut sum = 0.0f64;
        let mut sumsq = 0.0f64;
        for _ in 0..n {
            let x: f64 = standard_normal(&mut r);
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean = {mean}");
        assert!((var - 1.0).abs() < 0.05, "var = {var}");
    }
}
