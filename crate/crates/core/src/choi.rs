//! Signed coefficient–frame decompositions of linear maps, the
//! Choi correspondence between maps and Hermitian operators, duality,
//! transpose composition, and the built-in map families.
//!
//! A map `φ: M_{d1} → M_{d2}` is stored as
//! `φ(a) = Σ_α λ_α F_α a F_α^* − Σ_β λ_β G_β a G_β^*` with `λ ≥ 0` and the
//! combined frame list orthonormal in the Hilbert–Schmidt inner product.
//! Its Choi operator `φ̂ = Σ_ij e_ij ⊗ φ(e_ij)` is then the signed sum of
//! mutually orthogonal rank-1 projectors `|vec F_α⟩⟨vec F_α|`, which is what
//! the spectral certificates consume.

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{real, to_f64, Real};
use crate::spectral::{frame_to_vector, vector_to_frame, Frame};
use crate::tolerance::Tolerances;

/// One coefficient–frame term `λ F · F^*` of a decomposition.
#[derive(Clone, Debug)]
pub struct MapTerm<R: Real> {
    /// Non-negative coefficient.
    pub lambda: R,
    /// Unit Hilbert–Schmidt norm frame of shape `d2 x d1`.
    pub frame: Frame<R>,
}

impl<R: Real> MapTerm<R> {
    /// Convenience constructor.
    pub fn new(lambda: R, frame: Frame<R>) -> Self {
        MapTerm { lambda, frame }
    }
}

/// A map `φ = φ₊ − φ₋` in canonical orthogonal-frame form.
#[derive(Clone, Debug)]
pub struct MapDecomposition<R: Real> {
    d1: usize,
    d2: usize,
    positive: Vec<MapTerm<R>>,
    negative: Vec<MapTerm<R>>,
}

impl<R: Real> MapDecomposition<R> {
    /// Validate and build a decomposition.
    ///
    /// Checks: dimensions positive; every frame of shape `d2 x d1` with unit
    /// Hilbert–Schmidt norm; every coefficient finite and non-negative; at
    /// most `d1·d2` terms in total; all frames mutually orthogonal.
    pub fn new(
        d1: usize,
        d2: usize,
        positive: Vec<MapTerm<R>>,
        negative: Vec<MapTerm<R>>,
        tol: &Tolerances<R>,
    ) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidParameter("dimensions must be positive".into()));
        }
        let count = positive.len() + negative.len();
        if count > d1 * d2 {
            return Err(Error::TooManyTerms { count, max: d1 * d2 });
        }
        let all: Vec<&MapTerm<R>> = positive.iter().chain(negative.iter()).collect();
        for term in &all {
            if !term.lambda.is_finite() || term.lambda < R::zero() {
                return Err(Error::InvalidParameter(format!(
                    "coefficients must be finite and non-negative, got {:?}",
                    term.lambda
                )));
            }
            let m = term.frame.matrix();
            if m.rows() != d2 || m.cols() != d1 {
                return Err(Error::shape(
                    format!("{d2}x{d1}"),
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
            let norm = m.frobenius_norm();
            if (norm - R::one()).abs() > tol.validation {
                return Err(Error::NotNormalized {
                    trace: to_f64(norm),
                    tolerance: to_f64(tol.validation),
                });
            }
        }
        for a in 0..all.len() {
            for b in (a + 1)..all.len() {
                let overlap = all[a]
                    .frame
                    .matrix()
                    .frobenius_inner(all[b].frame.matrix())
                    .norm();
                if overlap > tol.validation {
                    return Err(Error::NotOrthogonal {
                        first: a,
                        second: b,
                        overlap: to_f64(overlap),
                    });
                }
            }
        }
        Ok(MapDecomposition { d1, d2, positive, negative })
    }

    /// Domain dimension.
    pub fn d1(&self) -> usize {
        self.d1
    }

    /// Codomain dimension.
    pub fn d2(&self) -> usize {
        self.d2
    }

    /// Positive-part terms.
    pub fn positive(&self) -> &[MapTerm<R>] {
        &self.positive
    }

    /// Negative-part terms.
    pub fn negative(&self) -> &[MapTerm<R>] {
        &self.negative
    }

    /// Number of stored terms (both signs).
    pub fn term_count(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    /// Dimension `d1·d2` of the frame space.
    pub fn frame_space_dim(&self) -> usize {
        self.d1 * self.d2
    }

    /// Whether the negative part vanishes identically (all `λ = 0` or no
    /// terms), i.e. the map is completely positive by construction.
    pub fn is_cp_form(&self) -> bool {
        self.negative.iter().all(|t| t.lambda == R::zero())
    }

    /// Evaluate `φ(a) = Σ₊ λ F a F^* − Σ₋ λ G a G^*`.
    pub fn apply(&self, a: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
        if a.rows() != self.d1 || a.cols() != self.d1 {
            return Err(Error::shape(
                format!("{0}x{0}", self.d1),
                format!("{}x{}", a.rows(), a.cols()),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.d2, self.d2);
        for (sign, terms) in [(R::one(), &self.positive), (-R::one(), &self.negative)] {
            for term in terms.iter() {
                if term.lambda == R::zero() {
                    continue;
                }
                let f = term.frame.matrix();
                let contrib = f.matmul(a).matmul(&f.adjoint());
                out = &out + &contrib.scale(sign * term.lambda);
            }
        }
        Ok(out)
    }

    /// The dual map `φ^♯: M_{d2} → M_{d1}` with `tr[φ(a) b] = tr[a φ^♯(b)]`,
    /// obtained by replacing every frame by its adjoint.
    pub fn dual(&self) -> MapDecomposition<R> {
        let flip = |terms: &[MapTerm<R>]| {
            terms
                .iter()
                .map(|t| MapTerm::new(t.lambda, Frame::from_matrix(t.frame.matrix().adjoint())))
                .collect()
        };
        MapDecomposition {
            d1: self.d2,
            d2: self.d1,
            positive: flip(&self.positive),
            negative: flip(&self.negative),
        }
    }
}

/// A Hermitian operator on a tensor product, tagged with factor dimensions.
#[derive(Clone, Debug)]
pub struct ChoiOperator<R: Real> {
    dims: Vec<usize>,
    matrix: ComplexMatrix<R>,
}

impl<R: Real> ChoiOperator<R> {
    /// Validate Hermiticity and the size `Π dims` and build.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix<R>, tol: &Tolerances<R>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter(
                "factor dimensions must be positive".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if matrix.rows() != total || matrix.cols() != total {
            return Err(Error::shape(
                format!("{total}x{total}"),
                format!("{}x{}", matrix.rows(), matrix.cols()),
            ));
        }
        matrix.require_hermitian(tol.hermitian)?;
        Ok(ChoiOperator { dims, matrix })
    }

    /// Factor dimensions `(d1, …, dn)`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total dimension `Π dims`.
    pub fn total_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// The operator matrix.
    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.matrix
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<R> {
        crate::eigen::min_eigenvalue(&self.matrix)
    }
}

/// Choi operator `φ̂ = Σ_ij e_ij ⊗ φ(e_ij)` of a bipartite decomposition.
///
/// Evaluated from the defining sum (through [`MapDecomposition::apply`]), not
/// from the frame projectors, so it cross-checks the projector route in tests.
pub fn choi_of_map<R: Real>(m: &MapDecomposition<R>) -> Result<ChoiOperator<R>> {
    let (d1, d2) = (m.d1(), m.d2());
    let mut out = ComplexMatrix::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d1 {
            let block = m.apply(&ComplexMatrix::matrix_unit(d1, i, j))?;
            for r in 0..d2 {
                for c in 0..d2 {
                    out.set(i * d2 + r, j * d2 + c, block.at(r, c));
                }
            }
        }
    }
    // The defining sum is Hermitian only up to rounding; symmetrize the
    // eps-scale residue so downstream validation at 1e-12 is meaningful.
    let out = out.hermitian_part();
    ChoiOperator::new(vec![d1, d2], out, &Tolerances::default())
}

/// Inverse of the Choi correspondence for bipartite operators.
///
/// Eigendecomposes the matrix, drops eigenvalues with `|λ| ≤ 1e-10·‖c‖`, and
/// reshapes the remaining eigenvectors into frames; positive eigenvalues feed
/// the positive part, negative ones (as `|λ|`) the negative part.
pub fn map_of_choi<R: Real>(c: &ChoiOperator<R>) -> Result<MapDecomposition<R>> {
    if c.dims().len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "expected exactly two factors, got {}",
            c.dims().len()
        )));
    }
    let (d1, d2) = (c.dims()[0], c.dims()[1]);
    let eig = hermitian_eigen(c.matrix())?;
    let scale = eig
        .values
        .iter()
        .fold(R::zero(), |acc, &v| acc.max(v.abs()));
    let cut = scale * real::<R>(1e-10);
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (idx, &value) in eig.values.iter().enumerate() {
        if value.abs() <= cut {
            continue;
        }
        let frame = Frame::from_matrix(vector_to_frame(&eig.vectors.column(idx), d1, d2)?);
        if value > R::zero() {
            positive.push(MapTerm::new(value, frame));
        } else {
            negative.push(MapTerm::new(-value, frame));
        }
    }
    MapDecomposition::new(d1, d2, positive, negative, &Tolerances::default())
}

/// Choi operator of `a ↦ φ(aᵀ)`; the map is completely co-positive exactly
/// when this operator is positive semidefinite.
pub fn compose_with_transpose<R: Real>(m: &MapDecomposition<R>) -> Result<ChoiOperator<R>> {
    if m.d1() != m.d2() {
        return Err(Error::shape(
            "square domain (d1 = d2)".to_string(),
            format!("d1 = {}, d2 = {}", m.d1(), m.d2()),
        ));
    }
    let d = m.d1();
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            // (e_ij)ᵀ = e_ji.
            let block = m.apply(&ComplexMatrix::matrix_unit(d, j, i))?;
            for r in 0..d {
                for c in 0..d {
                    out.set(i * d + r, j * d + c, block.at(r, c));
                }
            }
        }
    }
    let out = out.hermitian_part();
    ChoiOperator::new(vec![d, d], out, &Tolerances::default())
}

/// The family `φ_λ(a) = I_d · tr(a) − λ F₁ a F₁^*` in canonical split form.
///
/// Using a Hilbert–Schmidt orthonormal basis `{F₁, F₂, …, F_{d²}}` of `M_d`
/// containing `F₁`, the trace term expands as `Σ_α F_α a F_α^*`, so the net
/// coefficient on `F₁` is `1 − λ`: the split has coefficient 1 on every
/// completion frame plus `(1−λ, F₁)` on the positive side when `λ < 1`, a
/// zero negative term at `λ = 1`, and `(λ−1, F₁)` on the negative side when
/// `λ > 1`. Its Choi operator is `I ⊗ I − λ |vec F₁⟩⟨vec F₁|`.
pub fn generalized_choi_map<R: Real>(
    d: usize,
    lambda: R,
    f1: &Frame<R>,
) -> Result<MapDecomposition<R>> {
    rank_m_family(d, lambda, std::slice::from_ref(f1))
}

/// The rank-m generalization `φ_λ(a) = I_d · tr(a) − λ Σ_{α≤m} F_α a F_α^*`.
///
/// Same canonical split as [`generalized_choi_map`], with net coefficient
/// `1 − λ` on each of the `m` distinguished frames; its Choi operator is
/// `I ⊗ I − λ P` with `P` the rank-m projector spanned by the `vec F_α`.
pub fn rank_m_family<R: Real>(
    d: usize,
    lambda: R,
    frames: &[Frame<R>],
) -> Result<MapDecomposition<R>> {
    let tol = Tolerances::default();
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !lambda.is_finite() || lambda < R::zero() {
        return Err(Error::InvalidParameter(
            "family parameter must be finite and non-negative".into(),
        ));
    }
    if frames.is_empty() || frames.len() >= d * d {
        return Err(Error::InvalidParameter(format!(
            "need between 1 and {} distinguished frames, got {}",
            d * d - 1,
            frames.len()
        )));
    }
    let vectors: Vec<ComplexMatrix<R>> = frames
        .iter()
        .map(|f| {
            if f.matrix().rows() != d || f.matrix().cols() != d {
                return Err(Error::shape(
                    format!("{d}x{d}"),
                    format!("{}x{}", f.matrix().rows(), f.matrix().cols()),
                ));
            }
            Ok(frame_to_vector(f.matrix()))
        })
        .collect::<Result<_>>()?;
    let completion = orthonormal_completion(&vectors, d * d)?;

    let mut positive: Vec<MapTerm<R>> = completion
        .into_iter()
        .map(|v| Ok(MapTerm::new(R::one(), Frame::from_matrix(vector_to_frame(&v, d, d)?))))
        .collect::<Result<_>>()?;
    let mut negative = Vec::new();
    let net = R::one() - lambda;
    for f in frames {
        if net >= R::zero() {
            positive.push(MapTerm::new(net, f.clone()));
        } else {
            negative.push(MapTerm::new(-net, f.clone()));
        }
    }
    if negative.is_empty() && lambda == R::one() {
        // Keep the distinguished frames addressable as the (vanishing)
        // negative part so certificate preconditions can still locate them.
        for _ in frames {
            let term = positive.pop().expect("frames were just appended");
            negative.push(term);
        }
    }
    MapDecomposition::new(d, d, positive, negative, &tol)
}

/// Deterministically extend an orthonormal set of column vectors in `C^n`
/// to a full orthonormal basis, returning only the added vectors.
///
/// Candidates are the canonical basis vectors; at each step the one with the
/// largest residual after projecting out the current span is orthogonalized
/// (twice, for stability) and appended. Ties break toward the lowest index,
/// so the completion is reproducible.
pub(crate) fn orthonormal_completion<R: Real>(
    given: &[ComplexMatrix<R>],
    n: usize,
) -> Result<Vec<ComplexMatrix<R>>> {
    let mut basis: Vec<ComplexMatrix<R>> = Vec::with_capacity(n);
    for v in given {
        if v.rows() != n || v.cols() != 1 {
            return Err(Error::shape(format!("{n}x1"), format!("{}x{}", v.rows(), v.cols())));
        }
        basis.push(v.clone());
    }
    if basis.len() > n {
        return Err(Error::TooManyTerms { count: basis.len(), max: n });
    }
    let mut added = Vec::with_capacity(n - basis.len());
    while basis.len() < n {
        let mut best: Option<(R, usize)> = None;
        for i in 0..n {
            let e = ComplexMatrix::basis_vector(n, i);
            let res = residual_norm_sq(&e, &basis);
            if best.map_or(true, |(b, _)| res > b) {
                best = Some((res, i));
            }
        }
        let (res, idx) = best.expect("n > 0");
        if res <= real::<R>(1e-12) {
            return Err(Error::InvalidParameter(
                "given vectors are not orthonormal: no residual direction left".into(),
            ));
        }
        let mut v = ComplexMatrix::basis_vector(n, idx);
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.frobenius_inner(&v);
                v = &v - &b.scale_complex(overlap);
            }
        }
        let norm = v.frobenius_norm();
        let v = v.scale(R::one() / norm);
        basis.push(v.clone());
        added.push(v);
    }
    Ok(added)
}

fn residual_norm_sq<R: Real>(v: &ComplexMatrix<R>, basis: &[ComplexMatrix<R>]) -> R {
    let mut remaining = v.frobenius_norm();
    remaining = remaining * remaining;
    for b in basis {
        let overlap = b.frobenius_inner(v).norm_sqr();
        remaining = remaining - overlap;
    }
    remaining.max(R::zero())
}

/// The frame `I_d / √d` whose projector is the canonical maximally entangled
/// state.
pub fn maximally_entangled_frame<R: Real>(d: usize) -> Frame<R> {
    let scale = real::<R>(1.0 / (d as f64).sqrt());
    Frame::from_matrix(ComplexMatrix::identity(d).scale(scale))
}

/// `tr(σ · c)` for a Hermitian `σ`, discarding the eps-scale imaginary part.
pub fn pairing<R: Real>(c: &ChoiOperator<R>, sigma: &ComplexMatrix<R>) -> Result<R> {
    if sigma.rows() != c.total_dim() || sigma.cols() != c.total_dim() {
        return Err(Error::shape(
            format!("{0}x{0}", c.total_dim()),
            format!("{}x{}", sigma.rows(), sigma.cols()),
        ));
    }
    let value = sigma.matmul(c.matrix()).trace();
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cx;
    use crate::sampling;
    use crate::spectral::frame_to_projector;

    type M = ComplexMatrix<f64>;

    fn tolerances() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn random_decomposition(rng: &mut rand_chacha::ChaCha8Rng, d: usize, negatives: usize) -> MapDecomposition<f64> {
        // Random orthonormal frame family from a Haar-ish unitary on C^{d²}.
        let u = sampling::random_unitary::<f64>(rng, d * d);
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for idx in 0..d * d {
            let frame = Frame::from_matrix(
                vector_to_frame(&u.column(idx), d, d).unwrap(),
            );
            let lambda = 0.25 + sampling::uniform::<f64>(rng);
            if idx < negatives {
                negative.push(MapTerm::new(lambda, frame));
            } else {
                positive.push(MapTerm::new(lambda, frame));
            }
        }
        MapDecomposition::new(d, d, positive, negative, &tolerances()).unwrap()
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let tol = tolerances();
        let good = Frame::normalized(M::identity(2)).unwrap();
        // Non-normalized frame.
        let double = Frame::from_matrix(M::identity(2));
        assert!(matches!(
            MapDecomposition::new(2, 2, vec![MapTerm::new(1.0, double)], vec![], &tol),
            Err(Error::NotNormalized { .. })
        ));
        // Negative coefficient.
        assert!(MapDecomposition::new(2, 2, vec![MapTerm::new(-1.0, good.clone())], vec![], &tol).is_err());
        // Non-orthogonal duplicate frames.
        assert!(matches!(
            MapDecomposition::new(
                2,
                2,
                vec![MapTerm::new(1.0, good.clone()), MapTerm::new(1.0, good.clone())],
                vec![],
                &tol
            ),
            Err(Error::NotOrthogonal { .. })
        ));
        // Too many terms.
        let units: Vec<MapTerm<f64>> = (0..5)
            .map(|i| {
                MapTerm::new(
                    1.0,
                    Frame::from_matrix(M::matrix_unit(2, i % 2, (i / 2) % 2)),
                )
            })
            .collect();
        assert!(matches!(
            MapDecomposition::new(2, 2, units, vec![], &tol),
            Err(Error::TooManyTerms { .. })
        ));
    }

    #[test]
    fn apply_single_term_is_sandwich() {
        let tol = tolerances();
        let f = Frame::normalized(M::from_fn(2, 2, |r, c| cx((r + c) as f64, r as f64))).unwrap();
        let m = MapDecomposition::new(2, 2, vec![MapTerm::new(1.0, f.clone())], vec![], &tol).unwrap();
        let a = M::matrix_unit(2, 0, 0);
        let want = f.matrix().matmul(&a).matmul(&f.matrix().adjoint());
        let got = m.apply(&a).unwrap();
        assert!((&got - &want).max_abs() < 1e-15);
    }

    #[test]
    fn reduction_map_doubles_identity() {
        // I tr(a) − a at λ = d.
        let d = 3;
        let m = generalized_choi_map(d, d as f64, &maximally_entangled_frame(d)).unwrap();
        let out = m.apply(&M::identity(d)).unwrap();
        assert!((&out - &M::identity(d).scale(2.0)).max_abs() < 1e-12);
        // And on random Hermitian inputs it is I tr a − a entrywise.
        let mut rng = sampling::rng(3);
        let a = sampling::random_hermitian::<f64>(&mut rng, d);
        let want = &M::identity(d).scale(a.trace().re) - &a;
        assert!((&m.apply(&a).unwrap() - &want).max_abs() < 1e-12);
    }

    #[test]
    fn choi_family_on_matrix_unit() {
        // φ_{3/2}(e11) = I − 0.5·e11 for d = 3, F₁ = I/√3.
        let m = generalized_choi_map(3, 1.5, &maximally_entangled_frame(3)).unwrap();
        let got = m.apply(&M::matrix_unit(3, 0, 0)).unwrap();
        let want = &M::identity(3) - &M::matrix_unit(3, 0, 0).scale(0.5);
        assert!((&got - &want).max_abs() < 1e-12);
    }

    #[test]
    fn choi_operator_of_family_is_identity_minus_lambda_projector() {
        let d = 3;
        let lambda = 1.5;
        let f1 = maximally_entangled_frame::<f64>(d);
        let m = generalized_choi_map(d, lambda, &f1).unwrap();
        let c = choi_of_map(&m).unwrap();
        let p1 = frame_to_projector(&f1).unwrap();
        let want = &M::identity(d * d) - &p1.scale(lambda);
        assert!((c.matrix() - &want).max_abs() < 1e-12);
    }

    #[test]
    fn choi_of_single_term_is_frame_projector() {
        let tol = tolerances();
        let f = Frame::normalized(M::identity(2)).unwrap();
        let m = MapDecomposition::new(2, 2, vec![MapTerm::new(1.0, f.clone())], vec![], &tol).unwrap();
        let c = choi_of_map(&m).unwrap();
        let p = frame_to_projector(&f).unwrap();
        assert!((c.matrix() - &p).max_abs() < 1e-14);
    }

    #[test]
    fn transpose_map_choi_is_swap() {
        // T(a) = aᵀ on M₂ decomposes over the symmetric/antisymmetric frames;
        // its Choi operator must be the swap.
        let tol = tolerances();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sym = Frame::from_matrix(M::from_fn(2, 2, |r, c| {
            if r != c { cx(s, 0.0) } else { cx(0.0, 0.0) }
        }));
        let asym = Frame::from_matrix(M::from_fn(2, 2, |r, c| {
            if (r, c) == (0, 1) {
                cx(s, 0.0)
            } else if (r, c) == (1, 0) {
                cx(-s, 0.0)
            } else {
                cx(0.0, 0.0)
            }
        }));
        let positive = vec![
            MapTerm::new(1.0, Frame::from_matrix(M::matrix_unit(2, 0, 0))),
            MapTerm::new(1.0, Frame::from_matrix(M::matrix_unit(2, 1, 1))),
            MapTerm::new(1.0, sym),
        ];
        let negative = vec![MapTerm::new(1.0, asym)];
        let m = MapDecomposition::new(2, 2, positive, negative, &tol).unwrap();
        // Sanity: the decomposition really is the transpose.
        let mut rng = sampling::rng(9);
        let a = sampling::gaussian_matrix::<f64>(&mut rng, 2, 2);
        assert!((&m.apply(&a).unwrap() - &a.transpose()).max_abs() < 1e-12);
        let c = choi_of_map(&m).unwrap();
        let swap = M::from_fn(4, 4, |row, col| {
            let (i, r) = (row / 2, row % 2);
            let (j, q) = (col / 2, col % 2);
            if i == q && r == j { cx(1.0, 0.0) } else { cx(0.0, 0.0) }
        });
        assert!((c.matrix() - &swap).max_abs() < 1e-13);
    }

    #[test]
    fn map_of_choi_recovers_maximally_entangled_term() {
        let tol = tolerances();
        let f = maximally_entangled_frame::<f64>(2);
        let p = frame_to_projector(&f).unwrap();
        let c = ChoiOperator::new(vec![2, 2], p, &tol).unwrap();
        let m = map_of_choi(&c).unwrap();
        assert_eq!(m.positive().len(), 1);
        assert!(m.negative().is_empty());
        assert!((m.positive()[0].lambda - 1.0).abs() < 1e-12);
        // Frame equals I/√2 up to a global phase.
        let overlap = m.positive()[0].frame.matrix().frobenius_inner(f.matrix()).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_of_choi_splits_family_by_sign() {
        let tol = tolerances();
        let d = 3;
        let p1 = frame_to_projector(&maximally_entangled_frame::<f64>(d)).unwrap();
        let c = ChoiOperator::new(vec![d, d], &M::identity(d * d) - &p1.scale(1.5), &tol).unwrap();
        let m = map_of_choi(&c).unwrap();
        assert_eq!(m.positive().len(), 8);
        assert_eq!(m.negative().len(), 1);
        for t in m.positive() {
            assert!((t.lambda - 1.0).abs() < 1e-10);
        }
        assert!((m.negative()[0].lambda - 0.5).abs() < 1e-10);
    }

    #[test]
    fn choi_round_trip_on_random_decompositions() {
        let mut rng = sampling::rng(2);
        for trial in 0..10 {
            let m = random_decomposition(&mut rng, 3, trial % 3);
            let c = choi_of_map(&m).unwrap();
            let m2 = map_of_choi(&c).unwrap();
            let c2 = choi_of_map(&m2).unwrap();
            assert!(
                (c.matrix() - c2.matrix()).max_abs() < 1e-10,
                "round trip drifted on trial {trial}"
            );
        }
    }

    #[test]
    fn apply_agrees_with_partial_trace_reconstruction() {
        // φ(a) = tr₁[(aᵀ ⊗ I) φ̂].
        let mut rng = sampling::rng(14);
        let m = random_decomposition(&mut rng, 3, 1);
        let c = choi_of_map(&m).unwrap();
        let a = sampling::gaussian_matrix::<f64>(&mut rng, 3, 3);
        let lifted = a.transpose().kron(&M::identity(3));
        let recon = lifted.matmul(c.matrix()).partial_trace(&[3, 3], 0).unwrap();
        let direct = m.apply(&a).unwrap();
        assert!((&recon - &direct).max_abs() < 1e-10);
    }

    #[test]
    fn dual_satisfies_trace_pairing() {
        let mut rng = sampling::rng(21);
        let m = random_decomposition(&mut rng, 3, 2);
        let dual = m.dual();
        for _ in 0..10 {
            let a = sampling::gaussian_matrix::<f64>(&mut rng, 3, 3);
            let b = sampling::gaussian_matrix::<f64>(&mut rng, 3, 3);
            let lhs = m.apply(&a).unwrap().matmul(&b).trace();
            let rhs = a.matmul(&dual.apply(&b).unwrap()).trace();
            assert!((lhs - rhs).norm() < 1e-11);
        }
    }

    #[test]
    fn dual_of_single_term_on_identity_is_gram() {
        let tol = tolerances();
        let f = Frame::normalized(M::from_fn(2, 2, |r, c| cx(r as f64, c as f64 + 1.0))).unwrap();
        let m = MapDecomposition::new(2, 2, vec![MapTerm::new(1.0, f.clone())], vec![], &tol).unwrap();
        let got = m.dual().apply(&M::identity(2)).unwrap();
        let want = f.matrix().adjoint().matmul(f.matrix());
        assert!((&got - &want).max_abs() < 1e-14);
    }

    #[test]
    fn reduction_map_is_self_dual() {
        let m = generalized_choi_map(3, 3.0, &maximally_entangled_frame::<f64>(3)).unwrap();
        let dual = m.dual();
        let mut rng = sampling::rng(33);
        for _ in 0..5 {
            let a = sampling::gaussian_matrix::<f64>(&mut rng, 3, 3);
            let direct = m.apply(&a).unwrap();
            let via_dual = dual.apply(&a).unwrap();
            assert!((&direct - &via_dual).max_abs() < 1e-12);
        }
    }

    #[test]
    fn reduction_map_is_completely_co_positive() {
        let m = generalized_choi_map(3, 3.0, &maximally_entangled_frame::<f64>(3)).unwrap();
        let composed = compose_with_transpose(&m).unwrap();
        assert!(composed.min_eigenvalue().unwrap() >= -1e-12);
    }

    #[test]
    fn identity_map_composed_with_transpose_is_swap() {
        let tol = tolerances();
        let f = maximally_entangled_frame::<f64>(2);
        let m = MapDecomposition::new(2, 2, vec![MapTerm::new(2.0, f)], vec![], &tol).unwrap();
        // Sanity: λ = d on I/√d is the identity map.
        let mut rng = sampling::rng(40);
        let a = sampling::gaussian_matrix::<f64>(&mut rng, 2, 2);
        assert!((&m.apply(&a).unwrap() - &a).max_abs() < 1e-13);
        let c = compose_with_transpose(&m).unwrap();
        let mut eigs = hermitian_eigen(c.matrix()).unwrap().values;
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [-1.0, 1.0, 1.0, 1.0];
        for (got, want) in eigs.iter().zip(want.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_frame_cp_map_stays_psd_under_transpose() {
        // Frames of rank 1 give a Choi operator that is a mixture of product
        // projectors, so it stays positive under the transpose composition.
        let tol = tolerances();
        let m = MapDecomposition::new(
            2,
            2,
            vec![
                MapTerm::new(1.0, Frame::from_matrix(M::matrix_unit(2, 0, 0))),
                MapTerm::new(0.5, Frame::from_matrix(M::matrix_unit(2, 1, 0))),
            ],
            vec![],
            &tol,
        )
        .unwrap();
        let c = compose_with_transpose(&m).unwrap();
        assert!(c.min_eigenvalue().unwrap() >= -1e-12);
    }

    #[test]
    fn family_at_lambda_zero_is_trace_channel() {
        let m = generalized_choi_map(3, 0.0, &maximally_entangled_frame::<f64>(3)).unwrap();
        assert!(m.is_cp_form());
        assert!(m.negative().is_empty());
        let mut rng = sampling::rng(8);
        let a = sampling::gaussian_matrix::<f64>(&mut rng, 3, 3);
        let want = M::identity(3).scale_complex(a.trace());
        assert!((&m.apply(&a).unwrap() - &want).max_abs() < 1e-12);
    }

    #[test]
    fn family_at_lambda_one_keeps_distinguished_frame_addressable() {
        let f1 = maximally_entangled_frame::<f64>(3);
        let m = generalized_choi_map(3, 1.0, &f1).unwrap();
        assert_eq!(m.negative().len(), 1);
        assert_eq!(m.negative()[0].lambda, 0.0);
        assert!(m.is_cp_form());
        let overlap = m.negative()[0].frame.matrix().frobenius_inner(f1.matrix()).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_m_family_projector_structure() {
        // Two orthogonal maximally entangled frames: I/√d and the cyclic
        // shift divided by √d.
        let d = 3;
        let shift = M::from_fn(d, d, |r, c| if r == (c + 1) % d { cx(1.0, 0.0) } else { cx(0.0, 0.0) });
        let frames = [
            maximally_entangled_frame::<f64>(d),
            Frame::normalized(shift).unwrap(),
        ];
        let lambda = 1.5;
        let m = rank_m_family(d, lambda, &frames).unwrap();
        let c = choi_of_map(&m).unwrap();
        // Choi = I − λP with P the rank-2 projector over the two frames.
        let p = {
            let p1 = frame_to_projector(&frames[0]).unwrap();
            let p2 = frame_to_projector(&frames[1]).unwrap();
            &p1 + &p2
        };
        assert!((p.trace().re - 2.0).abs() < 1e-12);
        assert!((&p.matmul(&p) - &p).max_abs() < 1e-10);
        let want = &M::identity(d * d) - &p.scale(lambda);
        assert!((c.matrix() - &want).max_abs() < 1e-12);
        // Eigenvalues {1 (×7), 1−λ (×2)} via the independent eigensolver.
        let eigs = hermitian_eigen(c.matrix()).unwrap().values;
        assert!((eigs[0] - (1.0 - lambda)).abs() < 1e-12);
        assert!((eigs[1] - (1.0 - lambda)).abs() < 1e-12);
        for &e in &eigs[2..] {
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_family_matches_generalized_choi() {
        let f1 = Frame::normalized(M::from_fn(3, 3, |r, c| cx((r * 3 + c) as f64 + 1.0, 0.0))).unwrap();
        let a = generalized_choi_map(3, 2.0, &f1).unwrap();
        let b = rank_m_family(3, 2.0, std::slice::from_ref(&f1)).unwrap();
        let ca = choi_of_map(&a).unwrap();
        let cb = choi_of_map(&b).unwrap();
        assert!((ca.matrix() - cb.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn choi_psd_exactly_when_no_negative_part() {
        let mut rng = sampling::rng(77);
        for negatives in 0..3 {
            let m = random_decomposition(&mut rng, 2, negatives);
            let c = choi_of_map(&m).unwrap();
            let min = c.min_eigenvalue().unwrap();
            if negatives == 0 {
                assert!(min >= -1e-12, "CP map with negative Choi eigenvalue {min}");
            } else {
                assert!(min < -1e-6, "negative part should break PSD, min = {min}");
            }
        }
    }

    #[test]
    fn completion_produces_orthonormal_basis() {
        let f1 = maximally_entangled_frame::<f64>(3);
        let given = vec![frame_to_vector(f1.matrix())];
        let added = orthonormal_completion(&given, 9).unwrap();
        assert_eq!(added.len(), 8);
        let mut all = given;
        all.extend(added);
        for i in 0..all.len() {
            for j in 0..all.len() {
                let overlap = all[i].frobenius_inner(&all[j]).norm();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (overlap - want).abs() < 1e-12,
                    "gram deviation at ({i},{j}): {overlap}"
                );
            }
        }
    }

    #[test]
    fn completion_is_deterministic() {
        let f1 = Frame::normalized(M::from_fn(2, 2, |r, c| cx(r as f64 + 0.3, c as f64))).unwrap();
        let given = vec![frame_to_vector(f1.matrix())];
        let a = orthonormal_completion(&given, 4).unwrap();
        let b = orthonormal_completion(&given, 4).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).max_abs() == 0.0);
        }
    }

    #[test]
    fn pairing_on_family_matches_scalar_formula() {
        // tr(φ̂_λ · I/(d₁d₂)) = (d² − λ)/d².
        let d = 3;
        let lambda = 1.5;
        let m = generalized_choi_map(d, lambda, &maximally_entangled_frame::<f64>(d)).unwrap();
        let c = choi_of_map(&m).unwrap();
        let sigma = M::identity(d * d).scale(1.0 / (d * d) as f64);
        let got = pairing(&c, &sigma).unwrap();
        assert!((got - (9.0 - lambda) / 9.0).abs() < 1e-12);
    }
}
