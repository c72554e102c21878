//! JSON wire formats and a canonical, byte-stable writer.
//!
//! Matrices travel as `{"rows": n, "cols": m, "data": [[re, im], …]}` in
//! row-major order; maps as `{"d1", "d2", "positive": [{"lambda", "F"}, …],
//! "negative": […]}`; Choi operators as `{"dims": […], "matrix": …}`.
//! Parsing validates the same invariants the in-memory constructors enforce
//! (shapes, normalization, orthogonality, Hermiticity), so a file that
//! parses is safe to compute with.
//!
//! [`to_canonical_json`] renders any serializable report with sorted object
//! keys, floats at 17 significant digits (`-0.0` normalized to `0.0`,
//! non-finite values rejected), and integers verbatim — byte-identical
//! across runs for identical data.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certificates::{Certificate, Witness};
use crate::choi::{ChoiOperator, MapDecomposition, MapTerm};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::multipartite::SepNormResult;
use crate::oracle::OracleResult;
use crate::scalar::{real, to_f64, Real};
use crate::spectral::Frame;
use crate::tolerance::Tolerances;
use num_complex::Complex;

/// Wire form of a dense complex matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    /// Number of rows.
    pub rows: usize,
    /// Number of columns.
    pub cols: usize,
    /// Row-major entries as `[re, im]` pairs.
    pub data: Vec<[f64; 2]>,
}

/// Wire form of one coefficient–frame term.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    /// Non-negative coefficient.
    pub lambda: f64,
    /// The frame, a `d2 × d1` matrix of unit Hilbert–Schmidt norm.
    #[serde(rename = "F")]
    pub frame: MatrixJson,
}

/// Wire form of a map in canonical coefficient–frame form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    /// Domain dimension.
    pub d1: usize,
    /// Codomain dimension.
    pub d2: usize,
    /// Terms entering with a plus sign.
    pub positive: Vec<TermJson>,
    /// Terms entering with a minus sign.
    pub negative: Vec<TermJson>,
}

/// Wire form of a Choi operator with its tensor factorization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChoiJson {
    /// Tensor factor dimensions, domain first.
    pub dims: Vec<usize>,
    /// The Hermitian matrix on the full tensor space.
    pub matrix: MatrixJson,
}

/// Wire form of a rank-k projector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectorJson {
    /// The projector matrix.
    pub matrix: MatrixJson,
    /// Its rank.
    pub k: usize,
}

/// Wire form of a violation witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    /// Unit vector on which the quadratic form is negative.
    pub xi0: MatrixJson,
    /// The compression projector that produced it.
    pub p0: ProjectorJson,
    /// The certified negative value.
    pub value: f64,
}

/// Wire form of a positivity certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    /// One of `K_POSITIVE_CERTIFIED`, `NOT_K_POSITIVE_CERTIFIED`,
    /// `INCONCLUSIVE`.
    pub verdict: String,
    /// Compression level the verdict refers to.
    pub k: usize,
    /// Certification threshold, when defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    /// Refutation threshold, when defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Explicit witness backing a refutation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

/// Wire form of a variational oracle result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleJson {
    /// Best (smallest) compressed expectation found.
    pub min_value: f64,
    /// Frame attaining it.
    pub argmin: MatrixJson,
    /// Number of random restarts.
    pub restarts: usize,
    /// Whether the winning restart converged before its iteration cap.
    pub converged: bool,
    /// Base seed of the restart streams.
    pub seed: u64,
}

/// Wire form of a product-overlap maximization result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SepNormJson {
    /// Best product overlap found (a lower bound on the true value).
    pub value: f64,
    /// Rank-one factor projectors of the maximizing product.
    pub factors: Vec<MatrixJson>,
    /// Number of random restarts.
    pub restarts: usize,
    /// Whether the winning restart converged before the sweep cap.
    pub converged: bool,
    /// Base seed of the restart streams.
    pub seed: u64,
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidInput(format!("{what} must be finite, got {x}")))
    }
}

/// Convert a matrix to its wire form.
pub fn matrix_to_wire<R: Real>(m: &ComplexMatrix<R>) -> MatrixJson {
    MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        data: m.data().iter().map(|z| [to_f64(z.re), to_f64(z.im)]).collect(),
    }
}

/// Rebuild a matrix from its wire form, rejecting shape mismatches and
/// non-finite entries.
pub fn matrix_from_wire<R: Real>(w: &MatrixJson) -> Result<ComplexMatrix<R>> {
    if w.rows == 0 || w.cols == 0 {
        return Err(Error::InvalidInput(format!(
            "matrix dimensions must be positive, got {}x{}",
            w.rows, w.cols,
        )));
    }
    if w.data.len() != w.rows * w.cols {
        return Err(Error::shape(
            format!("{} entries for a {}x{} matrix", w.rows * w.cols, w.rows, w.cols),
            format!("{} entries", w.data.len()),
        ));
    }
    let mut data = Vec::with_capacity(w.data.len());
    for (idx, pair) in w.data.iter().enumerate() {
        let re = finite(pair[0], &format!("entry {idx} (real part)"))?;
        let im = finite(pair[1], &format!("entry {idx} (imaginary part)"))?;
        data.push(Complex::new(real::<R>(re), real::<R>(im)));
    }
    ComplexMatrix::new(w.rows, w.cols, data)
}

/// Convert a map decomposition to its wire form.
pub fn map_to_wire<R: Real>(m: &MapDecomposition<R>) -> MapJson {
    let terms = |list: &[MapTerm<R>]| {
        list.iter()
            .map(|t| TermJson { lambda: to_f64(t.lambda), frame: matrix_to_wire(t.frame.matrix()) })
            .collect()
    };
    MapJson {
        d1: m.d1(),
        d2: m.d2(),
        positive: terms(m.positive()),
        negative: terms(m.negative()),
    }
}

/// Rebuild a map decomposition from its wire form, running full canonical
/// validation (shapes, coefficient signs, normalization, orthogonality).
pub fn map_from_wire<R: Real>(w: &MapJson, tol: &Tolerances<R>) -> Result<MapDecomposition<R>> {
    let terms = |list: &[TermJson]| -> Result<Vec<MapTerm<R>>> {
        list.iter()
            .map(|t| {
                let lambda = finite(t.lambda, "coefficient")?;
                let frame = matrix_from_wire::<R>(&t.frame)?;
                Ok(MapTerm::new(real::<R>(lambda), Frame::from_matrix(frame)))
            })
            .collect()
    };
    MapDecomposition::new(w.d1, w.d2, terms(&w.positive)?, terms(&w.negative)?, tol)
}

/// Convert a Choi operator to its wire form.
pub fn choi_to_wire<R: Real>(c: &ChoiOperator<R>) -> ChoiJson {
    ChoiJson { dims: c.dims().to_vec(), matrix: matrix_to_wire(c.matrix()) }
}

/// Rebuild a Choi operator from its wire form, validating dimensions and
/// Hermiticity.
pub fn choi_from_wire<R: Real>(w: &ChoiJson, tol: &Tolerances<R>) -> Result<ChoiOperator<R>> {
    ChoiOperator::new(w.dims.clone(), matrix_from_wire(&w.matrix)?, tol)
}

fn witness_to_wire<R: Real>(w: &Witness<R>) -> WitnessJson {
    WitnessJson {
        xi0: matrix_to_wire(&w.vector),
        p0: ProjectorJson { matrix: matrix_to_wire(w.projector.matrix()), k: w.projector.k() },
        value: to_f64(w.value),
    }
}

/// Convert a certificate to its wire form.
pub fn certificate_to_wire<R: Real>(c: &Certificate<R>) -> CertificateJson {
    CertificateJson {
        verdict: c.verdict.as_str().to_owned(),
        k: c.k,
        nu: c.nu.map(to_f64),
        mu: c.mu.map(to_f64),
        witness: c.witness.as_ref().map(witness_to_wire),
    }
}

/// Convert an oracle result to its wire form.
pub fn oracle_to_wire<R: Real>(r: &OracleResult<R>) -> OracleJson {
    OracleJson {
        min_value: to_f64(r.min_value),
        argmin: matrix_to_wire(r.argmin.matrix()),
        restarts: r.restarts,
        converged: r.converged,
        seed: r.seed,
    }
}

/// Convert a product-overlap result to its wire form.
pub fn sep_norm_to_wire<R: Real>(r: &SepNormResult<R>) -> SepNormJson {
    SepNormJson {
        value: to_f64(r.value),
        factors: r.argmax.factors().iter().map(matrix_to_wire).collect(),
        restarts: r.restarts,
        converged: r.converged,
        seed: r.seed,
    }
}

/// Parse a JSON document into any wire struct, with a line/column
/// diagnostic on failure.
pub fn parse_wire<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("JSON parse error: {e}")))
}

/// Parse and validate a matrix document.
pub fn parse_matrix<R: Real>(text: &str) -> Result<ComplexMatrix<R>> {
    matrix_from_wire(&parse_wire::<MatrixJson>(text)?)
}

/// Parse and validate a map document.
pub fn parse_map<R: Real>(text: &str, tol: &Tolerances<R>) -> Result<MapDecomposition<R>> {
    map_from_wire(&parse_wire::<MapJson>(text)?, tol)
}

/// Parse and validate a Choi operator document.
pub fn parse_choi<R: Real>(text: &str, tol: &Tolerances<R>) -> Result<ChoiOperator<R>> {
    choi_from_wire(&parse_wire::<ChoiJson>(text)?, tol)
}

/// Render any serializable value as canonical JSON: object keys sorted,
/// floats at 17 significant digits with `-0.0` normalized, integers
/// verbatim, non-finite numbers rejected.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let tree = serde_json::to_value(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_canonical(&mut out, &tree)?;
    Ok(out)
}

fn write_canonical(out: &mut String, v: &serde_json::Value) -> Result<()> {
    match v {
        serde_json::Value::Null => out.push_str("null"),
        serde_json::Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let x = n.as_f64().ok_or_else(|| {
                    Error::InvalidInput(format!("unrepresentable number {n}"))
                })?;
                if !x.is_finite() {
                    return Err(Error::InvalidInput("non-finite number in output".into()));
                }
                let x = if x == 0.0 { 0.0 } else { x };
                let _ = write!(out, "{x:.16e}");
            }
        }
        serde_json::Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
        }
        serde_json::Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(out, item)?;
            }
            out.push(']');
        }
        serde_json::Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("strings always serialize"));
                out.push(':');
                write_canonical(out, &map[*key])?;
            }
            out.push('}');
        }
    }
    Ok(())
}

/// Schema-and-invariant diagnostics for a JSON document, without failing
/// fast: every violation found is reported.
///
/// The document kind is inferred from its top-level fields (`d1` → map,
/// `dims` → Choi operator, `rows` → matrix). An empty list means the file
/// is valid.
pub fn file_diagnostics<R: Real>(text: &str, tol: &Tolerances<R>) -> Vec<String> {
    let tree: serde_json::Value = match serde_json::from_str(text) {
        Ok(t) => t,
        Err(e) => return vec![format!("JSON parse error: {e}")],
    };
    let Some(object) = tree.as_object() else {
        return vec!["top-level value must be a JSON object".into()];
    };
    if object.contains_key("d1") {
        match serde_json::from_value::<MapJson>(tree.clone()) {
            Ok(w) => map_diagnostics::<R>(&w, tol),
            Err(e) => vec![format!("map schema error: {e}")],
        }
    } else if object.contains_key("dims") {
        match serde_json::from_value::<ChoiJson>(tree.clone()) {
            Ok(w) => choi_diagnostics::<R>(&w, tol),
            Err(e) => vec![format!("Choi operator schema error: {e}")],
        }
    } else if object.contains_key("rows") {
        match serde_json::from_value::<MatrixJson>(tree.clone()) {
            Ok(w) => match matrix_from_wire::<R>(&w) {
                Ok(_) => Vec::new(),
                Err(e) => vec![e.to_string()],
            },
            Err(e) => vec![format!("matrix schema error: {e}")],
        }
    } else {
        vec!["unrecognized document: expected a map (d1/d2), a Choi operator (dims), or a matrix (rows/cols)".into()]
    }
}

fn map_diagnostics<R: Real>(w: &MapJson, tol: &Tolerances<R>) -> Vec<String> {
    let mut notes = Vec::new();
    if w.d1 == 0 || w.d2 == 0 {
        notes.push(format!("dimensions must be positive, got d1 = {}, d2 = {}", w.d1, w.d2));
        return notes;
    }
    let total = w.positive.len() + w.negative.len();
    if total > w.d1 * w.d2 {
        notes.push(format!(
            "too many terms: {} > d1*d2 = {}",
            total,
            w.d1 * w.d2,
        ));
    }
    let mut frames: Vec<(String, Option<ComplexMatrix<R>>)> = Vec::new();
    for (sign, list) in [("positive", &w.positive), ("negative", &w.negative)] {
        for (i, term) in list.iter().enumerate() {
            let label = format!("{sign}[{i}]");
            if !term.lambda.is_finite() || term.lambda < 0.0 {
                notes.push(format!(
                    "{label}: coefficient must be finite and non-negative, got {}",
                    term.lambda,
                ));
            }
            if term.frame.rows != w.d2 || term.frame.cols != w.d1 {
                notes.push(format!(
                    "{label}: frame must be {}x{}, got {}x{}",
                    w.d2, w.d1, term.frame.rows, term.frame.cols,
                ));
                frames.push((label, None));
                continue;
            }
            match matrix_from_wire::<R>(&term.frame) {
                Ok(m) => {
                    let norm = m.frobenius_norm();
                    if (norm - R::one()).abs() > tol.validation {
                        notes.push(format!(
                            "{label}: frame not normalized: ‖F‖ = {:.12}",
                            to_f64(norm),
                        ));
                    }
                    frames.push((label, Some(m)));
                }
                Err(e) => {
                    notes.push(format!("{label}: {e}"));
                    frames.push((label, None));
                }
            }
        }
    }
    for a in 0..frames.len() {
        for b in (a + 1)..frames.len() {
            if let (Some(fa), Some(fb)) = (&frames[a].1, &frames[b].1) {
                let overlap = fa.frobenius_inner(fb).norm();
                if overlap > tol.validation {
                    notes.push(format!(
                        "frames {} and {} not orthogonal: |tr(F_a^* F_b)| = {:.3e}",
                        frames[a].0,
                        frames[b].0,
                        to_f64(overlap),
                    ));
                }
            }
        }
    }
    notes
}

fn choi_diagnostics<R: Real>(w: &ChoiJson, tol: &Tolerances<R>) -> Vec<String> {
    let mut notes = Vec::new();
    if w.dims.is_empty() || w.dims.iter().any(|&d| d == 0) {
        notes.push(format!("tensor dimensions must be positive, got {:?}", w.dims));
        return notes;
    }
    let total: usize = w.dims.iter().product();
    if w.matrix.rows != total || w.matrix.cols != total {
        notes.push(format!(
            "matrix must be {total}x{total} for dims {:?}, got {}x{}",
            w.dims, w.matrix.rows, w.matrix.cols,
        ));
        return notes;
    }
    match matrix_from_wire::<R>(&w.matrix) {
        Ok(m) => {
            let dev = m.hermitian_deviation();
            if dev > tol.hermitian {
                notes.push(format!(
                    "matrix is not Hermitian: max |A - A^*| = {:.3e}",
                    to_f64(dev),
                ));
            }
        }
        Err(e) => notes.push(e.to_string()),
    }
    notes
}
