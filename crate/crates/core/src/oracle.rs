//! Variational oracle for block positivity.
//!
//! Minimizes the Choi expectation `⟨ξ|C|ξ⟩` over unit vectors of Schmidt
//! rank at most `k` by projected gradient descent with multiple seeded
//! restarts. The vector is parametrized as `ξ = vec(G)` for a `d2 x d1`
//! matrix `G` of rank ≤ k and unit Hilbert–Schmidt norm; the feasible-set
//! retraction truncates the singular value decomposition and renormalizes.
//!
//! The oracle shares no formulas with the spectral certificates — it sees
//! only the assembled Choi matrix — so agreement between the two routes is
//! meaningful evidence rather than a tautology.

use rayon::prelude::*;

use crate::choi::ChoiOperator;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::sampling;
use crate::scalar::{real, Real};
use crate::spectral::{frame_to_vector, Frame};
use crate::svd::svd;
use crate::tolerance::Tolerances;

/// Knobs for the variational search.
#[derive(Clone, Copy, Debug)]
pub struct OracleOptions<R: Real> {
    /// Number of independent random restarts.
    pub restarts: usize,
    /// Base seed; restart `i` draws from an independent stream derived from
    /// `(seed, i)`, so results are reproducible regardless of thread order.
    pub seed: u64,
    /// Hard cap on gradient iterations per restart.
    pub max_iterations: usize,
    /// Stop when the value changes by less than this, relative to
    /// `max(1, |value|)`.
    pub relative_tolerance: R,
}

impl<R: Real> Default for OracleOptions<R> {
    fn default() -> Self {
        OracleOptions {
            restarts: 32,
            seed: 1,
            max_iterations: 10_000,
            relative_tolerance: real(1e-12),
        }
    }
}

/// Outcome of the variational search.
#[derive(Clone, Debug)]
pub struct OracleResult<R: Real> {
    /// Best (smallest) expectation found across all restarts.
    pub min_value: R,
    /// The minimizing frame `G` with `ξ = vec(G)`; unit norm, rank ≤ k.
    pub argmin: Frame<R>,
    /// Number of restarts performed.
    pub restarts: usize,
    /// Whether the winning restart met the relative tolerance before the
    /// iteration cap.
    pub converged: bool,
    /// Seed the search was run with.
    pub seed: u64,
}

/// Minimize `⟨vec G | C | vec G⟩` over unit-norm frames `G` of rank ≤ k.
///
/// Returns the best value across restarts together with the minimizer. The
/// true rank-constrained minimum is never below the bottom eigenvalue of
/// `C`, and equals it when `k = min(d1, d2)`.
pub fn min_block_eigenvalue<R: Real>(
    c: &ChoiOperator<R>,
    k: usize,
    opts: &OracleOptions<R>,
) -> Result<OracleResult<R>> {
    if c.dims().len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "expected a bipartite operator, got {} factors",
            c.dims().len()
        )));
    }
    let (d1, d2) = (c.dims()[0], c.dims()[1]);
    let max = d1.min(d2);
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }

    let runs: Vec<Result<(R, ComplexMatrix<R>, bool)>> = (0..opts.restarts)
        .into_par_iter()
        .map(|idx| {
            let mut rng = sampling::stream_rng(opts.seed, idx as u64);
            let start = sampling::random_rank_k_frame::<R>(&mut rng, d2, d1, k);
            let coarse = descend(c.matrix(), start.matrix().clone(), k, opts);
            polish(c.matrix(), coarse, k)
        })
        .collect();

    // Deterministic winner: strict improvement only, so the lowest restart
    // index wins ties independent of scheduling.
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for idx in 1..runs.len() {
        if runs[idx].0 < runs[best].0 {
            best = idx;
        }
    }
    let (min_value, argmin, converged) = runs.into_iter().nth(best).expect("restarts ≥ 1");
    Ok(OracleResult {
        min_value,
        argmin: Frame::from_matrix(argmin),
        restarts: opts.restarts,
        converged,
        seed: opts.seed,
    })
}

/// Alternating exact refinement of a descent result.
///
/// Alternates two exactly solvable subproblems: fix the rank-k left singular
/// subspace `V` of the current frame and take the bottom eigenvector of the
/// compressed operator `(I ⊗ V)^* C (I ⊗ V)` (whose lift back has rank ≤ k
/// by construction), then recompute `V` from the new frame. Both half-steps
/// are exact minimizations over sets containing the current iterate, so the
/// value never increases; iteration stops once it stalls.
fn polish<R: Real>(
    c: &ComplexMatrix<R>,
    coarse: (R, ComplexMatrix<R>, bool),
    k: usize,
) -> Result<(R, ComplexMatrix<R>, bool)> {
    let (mut value, mut g, mut converged) = coarse;
    let (d2, d1) = (g.rows(), g.cols());
    let stall = real::<R>(1e-13);
    for _ in 0..64 {
        let basis = svd(&g)?.u;
        let mut v = ComplexMatrix::zeros(d2, k);
        for col in 0..k {
            for row in 0..d2 {
                v.set(row, col, basis.at(row, col));
            }
        }
        let lift = ComplexMatrix::identity(d1).kron(&v);
        let compressed = lift.adjoint().matmul(&c.matmul(&lift)).hermitian_part();
        let eig = crate::eigen::hermitian_eigen(&compressed)?;
        let candidate_value = eig.values[0];
        if candidate_value >= value - stall * R::one().max(value.abs()) {
            converged = true;
            break;
        }
        let xi = lift.matmul(&eig.vectors.column(0));
        g = retract(&xi, d2, d1, k);
        value = expectation(c, &frame_to_vector(&g));
    }
    Ok((value, g, converged))
}

/// One projected-gradient run from a feasible starting frame.
fn descend<R: Real>(
    c: &ComplexMatrix<R>,
    start: ComplexMatrix<R>,
    k: usize,
    opts: &OracleOptions<R>,
) -> (R, ComplexMatrix<R>, bool) {
    let armijo = real::<R>(1e-4);
    let mut g = start;
    let mut xi = frame_to_vector(&g);
    let mut value = expectation(c, &xi);
    let mut converged = false;

    for _ in 0..opts.max_iterations {
        // Tangent residual of the Rayleigh quotient on the unit sphere.
        let image = c.matmul(&xi);
        let residual = &image - &xi.scale(value);

        let mut eta = R::one();
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = retract(&(&xi - &residual.scale(eta)), g.rows(), g.cols(), k);
            let candidate_xi = frame_to_vector(&candidate);
            let candidate_value = expectation(c, &candidate_xi);
            // Sufficient decrease relative to the movement actually made:
            // the retraction can absorb most of the raw step, so the ambient
            // slope would be the wrong yardstick here.
            let moved = (&candidate_xi - &xi).frobenius_norm();
            if candidate_value <= value - (armijo / eta) * moved * moved
                && candidate_value < value
            {
                let delta = value - candidate_value;
                g = candidate;
                xi = candidate_xi;
                let prev = value;
                value = candidate_value;
                accepted = true;
                if delta <= opts.relative_tolerance * R::one().max(prev.abs()) {
                    converged = true;
                }
                break;
            }
            eta = eta * real::<R>(0.5);
        }
        if !accepted {
            // No descent direction at working precision: stationary.
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }
    (value, g, converged)
}

fn expectation<R: Real>(c: &ComplexMatrix<R>, xi: &ComplexMatrix<R>) -> R {
    xi.frobenius_inner(&c.matmul(xi)).re
}

/// Project a vectorized step back onto the unit-norm rank-≤k frames.
fn retract<R: Real>(xi: &ComplexMatrix<R>, d2: usize, d1: usize, k: usize) -> ComplexMatrix<R> {
    let mut m = ComplexMatrix::zeros(d2, d1);
    for i in 0..d1 {
        for r in 0..d2 {
            m.set(r, i, xi.at(i * d2 + r, 0));
        }
    }
    if k < d1.min(d2) {
        let decomposition = svd(&m).expect("descent iterates stay finite");
        let mut truncated = ComplexMatrix::zeros(d2, d1);
        for (idx, &s) in decomposition.values.iter().take(k).enumerate() {
            let u = decomposition.u.column(idx);
            let v = decomposition.v.column(idx);
            let outer = u.matmul(&v.adjoint()).scale(s);
            truncated = &truncated + &outer;
        }
        m = truncated;
    }
    let norm = m.frobenius_norm();
    if norm <= real::<R>(1e-300) {
        // Degenerate step; fall back to a fixed feasible point.
        let mut e = ComplexMatrix::zeros(d2, d1);
        e.set(0, 0, num_complex::Complex::new(R::one(), R::zero()));
        return e;
    }
    m.scale(R::one() / norm)
}

/// Decide k-block positivity by the variational route alone.
///
/// Returns the boolean verdict (`min ≥ −tol.block_positive`) together with
/// the full search result for inspection.
pub fn is_k_block_positive<R: Real>(
    c: &ChoiOperator<R>,
    k: usize,
    opts: &OracleOptions<R>,
    tol: &Tolerances<R>,
) -> Result<(bool, OracleResult<R>)> {
    let result = min_block_eigenvalue(c, k, opts)?;
    let positive = result.min_value >= -tol.block_positive;
    Ok((positive, result))
}

/// Brute-force minimum of `⟨x⊗y|C|x⊗y⟩` over a Bloch-sphere grid, for 2×2
/// systems at level 1.
///
/// Each qubit ranges over `θ_i = π·i/(g−1)`, `φ_j = 2π·j/g`. The result is
/// an upper bound on the true product minimum that converges as the grid
/// refines; it exists purely to cross-examine the gradient search.
pub fn exhaustive_check_2x2<R: Real>(c: &ChoiOperator<R>, grid: usize) -> Result<R> {
    if c.dims() != [2, 2] {
        return Err(Error::InvalidParameter(format!(
            "expected factor dimensions [2, 2], got {:?}",
            c.dims()
        )));
    }
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least two points".into()));
    }
    let pi = real::<R>(std::f64::consts::PI);
    let two_pi = real::<R>(std::f64::consts::TAU);
    let steps = grid;
    let bloch = |i: usize, j: usize| -> (num_complex::Complex<R>, num_complex::Complex<R>) {
        let theta = pi * real::<R>(i as f64) / real::<R>((steps - 1) as f64);
        let phi = two_pi * real::<R>(j as f64) / real::<R>(steps as f64);
        let half = theta * real::<R>(0.5);
        (
            num_complex::Complex::new(half.cos(), R::zero()),
            num_complex::Complex::from_polar(half.sin(), phi),
        )
    };
    let mut best = R::infinity();
    for xi_ in 0..steps {
        for xj in 0..steps {
            let (x0, x1) = bloch(xi_, xj);
            for yi in 0..steps {
                for yj in 0..steps {
                    let (y0, y1) = bloch(yi, yj);
                    // ξ = x ⊗ y in the (domain, codomain) vec layout.
                    let mut xi_vec = ComplexMatrix::zeros(4, 1);
                    xi_vec.set(0, 0, x0 * y0);
                    xi_vec.set(1, 0, x0 * y1);
                    xi_vec.set(2, 0, x1 * y0);
                    xi_vec.set(3, 0, x1 * y1);
                    let value = expectation(c.matrix(), &xi_vec);
                    if value < best {
                        best = value;
                    }
                }
            }
        }
    }
    Ok(best)
}
