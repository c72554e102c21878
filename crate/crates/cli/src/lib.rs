//! Command implementations behind the `kpos` binary.
//!
//! Every command reads JSON documents in the wire formats of
//! `kpos_core::io`, runs the corresponding library routine, and prints one
//! canonical JSON report (sorted keys, 17-significant-digit floats), so
//! identical inputs and seeds produce byte-identical output.
//!
//! Exit codes: `0` — the command ran (negative verdicts included); `2` —
//! validation or usage error; `3` — a certificate's applicability
//! conditions failed (distinct from a certified negative verdict).

#![forbid(unsafe_code)]
#![deny(missing_docs)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use kpos_core::certificates::{certify_k_positive, positivity_window, Verdict};
use kpos_core::choi::{choi_of_map, generalized_choi_map, maximally_entangled_frame};
use kpos_core::io;
use kpos_core::multipartite::{
    antisymmetric_example_map, certify_sep_positive, generalized_choi_operator,
    product_block_positivity, sep_norm, sep_positive_window,
};
use kpos_core::oracle::{min_block_eigenvalue, OracleOptions};
use kpos_core::spectral::{ky_fan_norm, ky_fan_overlap};
use kpos_core::states::{
    projector_mixture, schmidt_number_class, sn_lower_bound_with_witnesses, Detection,
};
use kpos_core::tolerance::Tolerances;
use kpos_core::Error;

/// Exit code for validation and usage errors.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code when a certificate's applicability conditions fail.
pub const EXIT_INAPPLICABLE: i32 = 3;

/// Spectral positivity certificates for linear maps between matrix
/// algebras.
#[derive(Debug, Parser)]
#[command(name = "kpos", version, about)]
pub struct Cli {
    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,

    /// Base seed for randomized searches; drawn from the system clock when
    /// absent. Always recorded in the report.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Number of random restarts for variational searches.
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,

    /// Scale factor applied to all numerical thresholds.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tolerance: f64,
}

/// All `kpos` subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ky Fan k-norm and squared k-overlap of a matrix.
    Norms {
        /// Path to a matrix document.
        #[arg(long)]
        matrix: PathBuf,
        /// Number of leading singular values to sum.
        #[arg(long)]
        k: usize,
    },
    /// Assemble the Choi operator of a map.
    Choi {
        /// Path to a map document.
        #[arg(long)]
        map: PathBuf,
        /// Write the operator here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify or refute k-positivity; without --k, report every level.
    Certify {
        /// Path to a map document.
        #[arg(long)]
        map: PathBuf,
        /// Single compression level to report.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Variational minimum of the rank-k compressed expectation.
    Oracle {
        /// Path to a Choi operator document.
        #[arg(long)]
        choi: PathBuf,
        /// Schmidt-rank bound on the search space.
        #[arg(long)]
        k: usize,
    },
    /// Schmidt-number classification and witness detection.
    Schmidt {
        /// Path to a bipartite density-matrix document.
        #[arg(long, conflicts_with = "family")]
        state: Option<PathBuf>,
        /// Built-in projector mixture, e.g. "d=3,mu=0.5,P=plus".
        #[arg(long)]
        family: Option<String>,
    },
    /// Largest overlap of a matrix with a product projector on the listed
    /// codomain factors.
    Sepnorm {
        /// Path to a matrix document (rows = product of the factors).
        #[arg(long)]
        matrix: PathBuf,
        /// Comma-separated codomain factor dimensions, e.g. "3,3".
        #[arg(long)]
        dims: String,
    },
    /// Certify or refute positivity on product elements of a split
    /// codomain.
    CertifySep {
        /// Path to a map document.
        #[arg(long)]
        map: PathBuf,
        /// Domain and codomain factors as "d1:f2,f3", e.g. "9:3,3".
        #[arg(long)]
        dims: String,
    },
    /// Reproducible reports for the built-in example families.
    Demo {
        /// Which example family to report on.
        #[command(subcommand)]
        which: DemoCommand,
    },
    /// Check a JSON document against its schema and invariants.
    Validate {
        /// Path to the document.
        path: PathBuf,
    },
}

/// Built-in example families for `kpos demo`.
#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// One-parameter family from the maximally entangled frame on M_d:
    /// certified k-positive exactly up to λ = d/k.
    Choi {
        /// Local dimension.
        #[arg(long)]
        d: usize,
        /// Family parameter.
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
    },
    /// Antisymmetrizer family on M_{d²} against the split codomain
    /// C^d ⊗ C^d, positive on products but not positive on a window.
    F0 {
        /// Local dimension of each codomain factor.
        #[arg(long)]
        d: usize,
        /// Family parameter.
        #[arg(long)]
        lambda: f64,
    },
}

/// A command failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    /// Process exit code (2 = validation, 3 = inapplicable).
    pub code: i32,
    /// Human-readable diagnostic.
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inapplicable(_) => EXIT_INAPPLICABLE,
            _ => EXIT_VALIDATION,
        };
        CliError { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_VALIDATION, message: message.into() }
}

/// What a successful command produced: the report text (already canonical)
/// and the exit code to finish with.
pub struct Outcome {
    /// Canonical JSON report for stdout; may be empty when the report was
    /// written to a file instead.
    pub report: String,
    /// Process exit code.
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn canonical(value: &impl serde::Serialize) -> Result<String, CliError> {
    Ok(io::to_canonical_json(value)?)
}

fn tolerances_report(tol: &Tolerances<f64>) -> serde_json::Value {
    json!({
        "hermitian": tol.hermitian,
        "validation": tol.validation,
        "rank_relative": tol.rank_relative,
        "schmidt_relative": tol.schmidt_relative,
        "psd": tol.psd,
        "block_positive": tol.block_positive,
        "detection": tol.detection,
        "tie_relative": tol.tie_relative,
    })
}

fn detections_report(detections: &[Detection<f64>]) -> serde_json::Value {
    serde_json::Value::Array(
        detections
            .iter()
            .map(|d| {
                json!({
                    "level": d.level,
                    "lambda": d.lambda,
                    "expectation": d.expectation,
                })
            })
            .collect(),
    )
}

fn parse_csv_dims(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("invalid dimension {part:?} in {text:?}")))
        })
        .collect()
}

fn parse_split_dims(text: &str) -> Result<Vec<usize>, CliError> {
    let (head, tail) = text
        .split_once(':')
        .ok_or_else(|| usage(format!("expected \"d1:f2,f3,...\", got {text:?}")))?;
    let d1 = head
        .trim()
        .parse::<usize>()
        .map_err(|_| usage(format!("invalid domain dimension {head:?}")))?;
    let mut dims = vec![d1];
    dims.extend(parse_csv_dims(tail)?);
    Ok(dims)
}

fn parse_family_spec(text: &str) -> Result<(usize, f64, String), CliError> {
    let mut d = None;
    let mut mu = None;
    let mut projector = "plus".to_owned();
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value, got {part:?}")))?;
        match key.trim() {
            "d" => {
                d = Some(value.trim().parse::<usize>().map_err(|_| {
                    usage(format!("invalid d in family spec: {value:?}"))
                })?);
            }
            "mu" => {
                mu = Some(value.trim().parse::<f64>().map_err(|_| {
                    usage(format!("invalid mu in family spec: {value:?}"))
                })?);
            }
            "P" => projector = value.trim().to_owned(),
            other => return Err(usage(format!("unknown family key {other:?}"))),
        }
    }
    let d = d.ok_or_else(|| usage("family spec needs d=<int>"))?;
    let mu = mu.ok_or_else(|| usage("family spec needs mu=<float>"))?;
    Ok((d, mu, projector))
}

fn entropy_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
        ^ u64::from(std::process::id())
}

/// Run one parsed command line to completion.
pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    if !cli.tolerance.is_finite() || cli.tolerance <= 0.0 {
        return Err(usage(format!(
            "--tolerance must be a positive finite scale factor, got {}",
            cli.tolerance,
        )));
    }
    let tol = Tolerances::<f64>::default().widened(cli.tolerance);
    let seed = cli.seed.unwrap_or_else(entropy_seed);
    let opts = OracleOptions { restarts: cli.restarts, seed, ..OracleOptions::default() };

    match cli.command {
        Command::Norms { matrix, k } => {
            let m = io::parse_matrix::<f64>(&read(&matrix)?)?;
            let report = json!({
                "ky_fan": ky_fan_norm(&m, k)?,
                "overlap": ky_fan_overlap(&m, k)?,
            });
            Ok(Outcome { report: canonical(&report)?, code: 0 })
        }
        Command::Choi { map, out } => {
            let m = io::parse_map::<f64>(&read(&map)?, &tol)?;
            let choi = choi_of_map(&m)?;
            let text = canonical(&io::choi_to_wire(&choi))?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text + "\n").map_err(|e| {
                        usage(format!("cannot write {}: {e}", path.display()))
                    })?;
                    Ok(Outcome { report: String::new(), code: 0 })
                }
                None => Ok(Outcome { report: text, code: 0 }),
            }
        }
        Command::Certify { map, k } => {
            let m = io::parse_map::<f64>(&read(&map)?, &tol)?;
            let window = positivity_window(&m, &tol)?;
            let report = match k {
                Some(level) => {
                    let cert = window.get(level.wrapping_sub(1)).ok_or_else(|| {
                        usage(format!(
                            "k = {level} out of range [1, {}]",
                            window.len(),
                        ))
                    })?;
                    canonical(&io::certificate_to_wire(cert))?
                }
                None => {
                    let certs: Vec<_> =
                        window.iter().map(io::certificate_to_wire).collect();
                    canonical(&json!({ "window": certs }))?
                }
            };
            Ok(Outcome { report, code: 0 })
        }
        Command::Oracle { choi, k } => {
            let c = io::parse_choi::<f64>(&read(&choi)?, &tol)?;
            let result = min_block_eigenvalue(&c, k, &opts)?;
            Ok(Outcome { report: canonical(&io::oracle_to_wire(&result))?, code: 0 })
        }
        Command::Schmidt { state, family } => {
            let report = match (state, family) {
                (Some(path), None) => {
                    let sigma = io::parse_matrix::<f64>(&read(&path)?)?;
                    let n = sigma.rows();
                    let d = (n as f64).sqrt().round() as usize;
                    if d * d != n || !sigma.is_square() {
                        return Err(usage(format!(
                            "state must live on C^d ⊗ C^d with equal factors; got a {}x{} matrix",
                            sigma.rows(),
                            sigma.cols(),
                        )));
                    }
                    let (bound, detections) =
                        sn_lower_bound_with_witnesses(&sigma, d, &tol)?;
                    json!({
                        "d": d,
                        "schmidt_number_lower_bound": bound,
                        "detections": detections_report(&detections),
                    })
                }
                (None, Some(spec)) => {
                    let (d, mu, projector) = parse_family_spec(&spec)?;
                    if projector != "plus" {
                        return Err(usage(format!(
                            "unknown projector {projector:?}; only P=plus (maximally entangled) is built in",
                        )));
                    }
                    let frames = [maximally_entangled_frame::<f64>(d)];
                    let mixture = projector_mixture(d, mu, &frames, &tol)?;
                    let class = schmidt_number_class(d, mu, &frames, &tol)?;
                    let (bound, detections) =
                        sn_lower_bound_with_witnesses(mixture.matrix(), d, &tol)?;
                    json!({
                        "d": d,
                        "mu": mu,
                        "projector": "plus",
                        "schmidt_number": class,
                        "schmidt_number_lower_bound": bound,
                        "detections": detections_report(&detections),
                    })
                }
                _ => {
                    return Err(usage("pass exactly one of --state or --family"));
                }
            };
            Ok(Outcome { report: canonical(&report)?, code: 0 })
        }
        Command::Sepnorm { matrix, dims } => {
            let m = io::parse_matrix::<f64>(&read(&matrix)?)?;
            let factors = parse_csv_dims(&dims)?;
            let result = sep_norm(&m, &factors, &opts)?;
            Ok(Outcome { report: canonical(&io::sep_norm_to_wire(&result))?, code: 0 })
        }
        Command::CertifySep { map, dims } => {
            let m = io::parse_map::<f64>(&read(&map)?, &tol)?;
            let dims = parse_split_dims(&dims)?;
            let cert = certify_sep_positive(&m, &dims, &opts, &tol)?;
            Ok(Outcome { report: canonical(&io::certificate_to_wire(&cert))?, code: 0 })
        }
        Command::Demo { which } => demo(which, seed, &opts, &tol),
        Command::Validate { path } => {
            let diagnostics = io::file_diagnostics::<f64>(&read(&path)?, &tol);
            let code = if diagnostics.is_empty() { 0 } else { EXIT_VALIDATION };
            let report = json!({
                "path": path.display().to_string(),
                "diagnostics": diagnostics,
            });
            Ok(Outcome { report: canonical(&report)?, code })
        }
    }
}

fn demo(
    which: DemoCommand,
    seed: u64,
    opts: &OracleOptions<f64>,
    tol: &Tolerances<f64>,
) -> Result<Outcome, CliError> {
    match which {
        DemoCommand::Choi { d, lambda } => {
            let frame = maximally_entangled_frame::<f64>(d);
            let m = generalized_choi_map(d, lambda, &frame)?;
            let choi = choi_of_map(&m)?;
            let window: Vec<_> = positivity_window(&m, tol)?
                .iter()
                .map(io::certificate_to_wire)
                .collect();
            let report = json!({
                "command": "demo choi",
                "version": env!("CARGO_PKG_VERSION"),
                "seed": seed,
                "tolerances": tolerances_report(tol),
                "d": d,
                "lambda": lambda,
                "min_eigenvalue": choi.min_eigenvalue()?,
                "window": window,
            });
            Ok(Outcome { report: canonical(&report)?, code: 0 })
        }
        DemoCommand::F0 { d, lambda } => {
            let m = antisymmetric_example_map::<f64>(d, lambda)?;
            let dims = [d * d, d, d];
            let (sep, refute) = sep_positive_window(&m, &dims, opts, tol)?;
            let bipartite = certify_k_positive(&m, 1, tol)?;
            let positive = match (bipartite.verdict, refute.verdict) {
                (Verdict::KPositive, _) => Some(true),
                (_, Verdict::NotKPositive) => Some(false),
                _ => None,
            };
            let choi = generalized_choi_operator(&m, &dims, tol)?;
            let product = product_block_positivity(&choi, opts)?;
            let pair = (d * (d - 1)) as f64;
            let report = json!({
                "command": "demo f0",
                "version": env!("CARGO_PKG_VERSION"),
                "seed": seed,
                "tolerances": tolerances_report(tol),
                "d": d,
                "lambda": lambda,
                "window": [1.0 / (pair - 1.0), 2.0 / (pair - 2.0)],
                "sep_positive": verdict_flag(sep.verdict),
                "positive": positive,
                "sep_certificate": io::certificate_to_wire(&sep),
                "bipartite_certificate": io::certificate_to_wire(&refute),
                "product_minimum": io::oracle_to_wire(&product),
            });
            Ok(Outcome { report: canonical(&report)?, code: 0 })
        }
    }
}

fn verdict_flag(v: Verdict) -> Option<bool> {
    match v {
        Verdict::KPositive => Some(true),
        Verdict::NotKPositive => Some(false),
        Verdict::Inconclusive => None,
    }
}

/// Format a top-level error for stderr.
pub fn render_error(e: &CliError) -> String {
    let mut out = String::new();
    let _ = write!(out, "error: {}", e.message);
    out
}
