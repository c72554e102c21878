//! Bipartite state machinery: Schmidt decompositions, the projector-mixture
//! state family, and two independent Schmidt-number classifiers.
//!
//! The exact classifier reads the Schmidt number of a mixture directly off
//! the overlap ladder of its defining frames. The lower-bound classifier
//! knows nothing about the mixture's structure: it pairs the state against a
//! grid of positivity-certified detector maps and reports the highest level
//! it can exclude. Agreement between the two is a meaningful cross-check.

use crate::choi::{choi_of_map, generalized_choi_map, maximally_entangled_frame, ChoiOperator};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{real, to_f64, Real};
use crate::spectral::{frame_to_projector, ky_fan_overlap, vector_to_frame, Frame};
use crate::svd::svd;
use crate::tolerance::Tolerances;

/// Schmidt decomposition `ψ = Σ_α s_α a_α ⊗ b_α` of a bipartite unit vector.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition<R: Real> {
    /// Schmidt coefficients, non-increasing; all `min(d1, d2)` of them.
    pub coefficients: Vec<R>,
    /// Domain-side orthonormal vectors `a_α` as columns of a `d1 x min` matrix.
    pub left: ComplexMatrix<R>,
    /// Codomain-side orthonormal vectors `b_α` as columns of a `d2 x min` matrix.
    pub right: ComplexMatrix<R>,
    /// Number of coefficients above the relative significance cut.
    pub rank: usize,
}

/// Schmidt-decompose a unit vector in `C^{d1} ⊗ C^{d2}`.
///
/// The vector is reshaped into its `d2 x d1` frame, whose singular values
/// are exactly the Schmidt coefficients; the Schmidt rank is the frame rank.
pub fn schmidt_decompose<R: Real>(
    psi: &ComplexMatrix<R>,
    d1: usize,
    d2: usize,
    tol: &Tolerances<R>,
) -> Result<SchmidtDecomposition<R>> {
    let frame = vector_to_frame(psi, d1, d2)?;
    let norm = frame.frobenius_norm();
    if (norm - R::one()).abs() > tol.validation {
        return Err(Error::NotNormalized {
            trace: to_f64(norm),
            tolerance: to_f64(tol.validation),
        });
    }
    let dec = svd(&frame)?;
    let min = d1.min(d2);
    let top = dec.values.first().copied().unwrap_or_else(R::zero);
    let cut = top * tol.schmidt_relative;
    let rank = dec.values.iter().take(min).filter(|&&s| s > cut).count();
    // ψ = Σ_α s_α conj(v_α) ⊗ u_α in the (domain, codomain) layout.
    let mut left = ComplexMatrix::zeros(d1, min);
    let mut right = ComplexMatrix::zeros(d2, min);
    for alpha in 0..min {
        for i in 0..d1 {
            left.set(i, alpha, dec.v.at(i, alpha).conj());
        }
        for r in 0..d2 {
            right.set(r, alpha, dec.u.at(r, alpha));
        }
    }
    Ok(SchmidtDecomposition {
        coefficients: dec.values.into_iter().take(min).collect(),
        left,
        right,
        rank,
    })
}

/// Pair a state against a Hermitian operator: `Re tr(σ · c)`.
///
/// Validates that `σ` is Hermitian with unit trace and the right size. A
/// strictly negative value against the Choi operator of a k-positive map
/// proves the Schmidt number of `σ` exceeds `k`.
pub fn witness_expectation<R: Real>(
    sigma: &ComplexMatrix<R>,
    c: &ChoiOperator<R>,
    tol: &Tolerances<R>,
) -> Result<R> {
    let n = c.total_dim();
    if sigma.rows() != n || sigma.cols() != n {
        return Err(Error::shape(format!("{n}x{n}"), format!("{}x{}", sigma.rows(), sigma.cols())));
    }
    let deviation = sigma.hermitian_deviation();
    if deviation > tol.validation {
        return Err(Error::NotHermitian {
            deviation: to_f64(deviation),
            tolerance: to_f64(tol.validation),
        });
    }
    let trace = sigma.trace();
    if (trace.re - R::one()).abs() > tol.validation || trace.im.abs() > tol.validation {
        return Err(Error::InvalidInput(format!(
            "state must have unit trace, got {} + {}i",
            to_f64(trace.re),
            to_f64(trace.im)
        )));
    }
    Ok(sigma.matmul(c.matrix()).trace().re)
}

/// The state `σ_μ = (1−μ)/(d²−m) · (I − P) + (μ/m) · P` on `C^d ⊗ C^d`,
/// where `P` is the rank-m projector spanned by the vectorized frames.
#[derive(Clone, Debug)]
pub struct ProjectorMixture<R: Real> {
    matrix: ComplexMatrix<R>,
    mu: R,
    rank: usize,
}

impl<R: Real> ProjectorMixture<R> {
    /// The density matrix.
    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.matrix
    }

    /// Mixing weight `μ = tr(P σ_μ)`.
    pub fn mu(&self) -> R {
        self.mu
    }

    /// Rank `m` of the distinguished projector.
    pub fn projector_rank(&self) -> usize {
        self.rank
    }
}

/// Build a projector mixture from `m` mutually orthogonal unit frames.
///
/// Requires `0 ≤ μ ≤ 1` and `m < d²`; the result has unit trace, is
/// positive semidefinite, and satisfies `tr(P σ_μ) = μ` exactly.
pub fn projector_mixture<R: Real>(
    d: usize,
    mu: R,
    frames: &[Frame<R>],
    tol: &Tolerances<R>,
) -> Result<ProjectorMixture<R>> {
    if !(R::zero()..=R::one()).contains(&mu) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mixing weight must lie in [0, 1], got {}",
            to_f64(mu)
        )));
    }
    let m = frames.len();
    if m == 0 || m >= d * d {
        return Err(Error::InvalidParameter(format!(
            "need between 1 and {} frames, got {m}",
            d * d - 1
        )));
    }
    let mut projector = ComplexMatrix::zeros(d * d, d * d);
    for (a, f) in frames.iter().enumerate() {
        if f.matrix().rows() != d || f.matrix().cols() != d {
            return Err(Error::shape(
                format!("{d}x{d}"),
                format!("{}x{}", f.matrix().rows(), f.matrix().cols()),
            ));
        }
        for (b, g) in frames.iter().enumerate().skip(a + 1) {
            let overlap = f.matrix().frobenius_inner(g.matrix()).norm();
            if overlap > tol.validation {
                return Err(Error::NotOrthogonal { first: a, second: b, overlap: to_f64(overlap) });
            }
        }
        projector = &projector + &frame_to_projector(f)?;
    }
    let complement_weight = (R::one() - mu) / real::<R>((d * d - m) as f64);
    let projector_weight = mu / real::<R>(m as f64);
    let identity = ComplexMatrix::identity(d * d);
    let matrix = &(&identity - &projector).scale(complement_weight)
        + &projector.scale(projector_weight);
    Ok(ProjectorMixture { matrix, mu, rank: m })
}

/// The overlap ladder `f̃_k = Σ_α ‖F_α‖²ₖ` for `k = 1, …, d`.
///
/// For a single maximally entangled frame this is `k/d`; for `m` mutually
/// orthogonal maximally entangled frames, `m·k/d`.
pub fn overlap_ladder<R: Real>(d: usize, frames: &[Frame<R>]) -> Result<Vec<R>> {
    let mut ladder = Vec::with_capacity(d);
    for k in 1..=d {
        let mut rung = R::zero();
        for f in frames {
            rung += ky_fan_overlap(f.matrix(), k)?;
        }
        ladder.push(rung);
    }
    Ok(ladder)
}

/// Exact Schmidt number of the projector mixture, read off the overlap
/// ladder: it is the smallest `k` with `μ ≤ f̃_k`.
///
/// Defined for `0 < μ ≤ f̃_d`; outside that window the structural
/// classification does not apply and an error is returned.
pub fn schmidt_number_class<R: Real>(
    d: usize,
    mu: R,
    frames: &[Frame<R>],
    tol: &Tolerances<R>,
) -> Result<usize> {
    if frames.is_empty() || frames.len() >= d * d {
        return Err(Error::InvalidParameter(format!(
            "need between 1 and {} frames, got {}",
            d * d - 1,
            frames.len()
        )));
    }
    let ladder = overlap_ladder(d, frames)?;
    let slack = tol.tie_relative;
    if mu <= R::zero() || mu > ladder[d - 1] + slack {
        return Err(Error::InvalidParameter(format!(
            "mixing weight {} outside the classified window (0, {}]",
            to_f64(mu),
            to_f64(ladder[d - 1])
        )));
    }
    for (idx, &rung) in ladder.iter().enumerate() {
        if mu <= rung + slack {
            return Ok(idx + 1);
        }
    }
    unreachable!("μ ≤ f̃_d was checked above")
}

/// One fired detector inside [`sn_lower_bound_with_witnesses`].
#[derive(Clone, Debug)]
pub struct Detection<R: Real> {
    /// Positivity level of the detector map that fired; the state's Schmidt
    /// number exceeds this.
    pub level: usize,
    /// Family parameter of the detector map.
    pub lambda: R,
    /// The strictly negative pairing value.
    pub expectation: R,
}

/// Structure-blind Schmidt-number lower bound via a detector grid.
///
/// For each `k = 1, …, d−1` the map `φ_λ` with `λ = (d/k)(1 − 10⁻⁶)` is
/// k-positive by the spectral certificate, so a negative pairing with its
/// Choi operator proves the Schmidt number exceeds `k`. Returns the largest
/// such exclusion plus one, or 1 when nothing fires.
pub fn sn_lower_bound<R: Real>(
    sigma: &ComplexMatrix<R>,
    d: usize,
    tol: &Tolerances<R>,
) -> Result<usize> {
    sn_lower_bound_with_witnesses(sigma, d, tol).map(|(bound, _)| bound)
}

/// As [`sn_lower_bound`], also returning every fired detector.
pub fn sn_lower_bound_with_witnesses<R: Real>(
    sigma: &ComplexMatrix<R>,
    d: usize,
    tol: &Tolerances<R>,
) -> Result<(usize, Vec<Detection<R>>)> {
    if d < 2 {
        return Err(Error::InvalidParameter("need d ≥ 2 for a detector grid".into()));
    }
    let f1 = maximally_entangled_frame::<R>(d);
    let margin = R::one() - real::<R>(1e-6);
    let mut detections = Vec::new();
    let mut bound = 1;
    for k in 1..d {
        let lambda = real::<R>(d as f64 / k as f64) * margin;
        let map = generalized_choi_map(d, lambda, &f1)?;
        let choi = choi_of_map(&map)?;
        let value = witness_expectation(sigma, &choi, tol)?;
        if value < -tol.detection {
            detections.push(Detection { level: k, lambda, expectation: value });
            bound = bound.max(k + 1);
        }
    }
    Ok((bound, detections))
}
