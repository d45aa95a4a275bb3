//! Column projections and the empirical check of the decomposition inequality
//!
//! ```text
//! (n - 1) K(x) <= sum_i a_i K(pi_i(x)) + O(log m)
//! ```
//!
//! where `pi_i` removes column `i` from every row of `x`, together with the
//! matching upper bound `sum_i a_i K(pi_i(x)) <= n (K(x) + M) sup(a)` when a
//! program bound `M` is supplied.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{CodecError, CompressorBackend, TupleDataset};
use crate::estimator::{self, ComplexityEstimate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("column index {index} is outside 1..={n_cols}")]
    Bounds { index: usize, n_cols: usize },
    #[error("column index {0} appears twice")]
    Duplicate(usize),
    #[error("a projection must keep at least one of the {0} columns")]
    DropsAll(usize),
    #[error("decomposition needs at least 2 columns, got {0}")]
    TooFewColumns(usize),
    #[error("expected {expected} coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("coefficient {index} is {value}; coefficients must be finite and non-zero")]
    BadCoefficient { index: usize, value: f64 },
    #[error("program bound must be finite and non-negative, got {0}")]
    BadProgramBound(f64),
    #[error("schedule must be strictly increasing with every n >= 2")]
    BadSchedule,
}

/// Columns to remove, 1-based, stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectionSpec {
    pub dropped_cols: Vec<usize>,
}

impl ProjectionSpec {
    pub fn new(cols: impl IntoIterator<Item = usize>) -> Result<Self, DecompositionError> {
        let mut dropped_cols: Vec<usize> = cols.into_iter().collect();
        dropped_cols.sort_unstable();
        for w in dropped_cols.windows(2) {
            if w[0] == w[1] {
                return Err(DecompositionError::Duplicate(w[0]));
            }
        }
        if dropped_cols.first() == Some(&0) {
            return Err(DecompositionError::Bounds { index: 0, n_cols: 0 });
        }
        Ok(Self { dropped_cols })
    }

    /// The canonical projection removing column `i`.
    pub fn drop(i: usize) -> Self {
        Self { dropped_cols: vec![i] }
    }

    fn validate(&self, n_cols: usize) -> Result<(), DecompositionError> {
        if let Some(&bad) = self.dropped_cols.iter().find(|&&i| i == 0 || i > n_cols) {
            return Err(DecompositionError::Bounds { index: bad, n_cols });
        }
        if self.dropped_cols.len() >= n_cols {
            return Err(DecompositionError::DropsAll(n_cols));
        }
        Ok(())
    }
}

/// Removes the spec's columns from every row, keeping row order.
pub fn project(d: &TupleDataset, p: &ProjectionSpec) -> Result<TupleDataset, DecompositionError> {
    let n = d.n_cols();
    p.validate(n)?;
    let keep: Vec<usize> = (0..n)
        .filter(|c| p.dropped_cols.binary_search(&(c + 1)).is_err())
        .collect();
    let mut out = TupleDataset::with_capacity(keep.len(), d.m_rows())?;
    let mut row = Vec::with_capacity(keep.len());
    for src in d.rows() {
        row.clear();
        row.extend(keep.iter().map(|&c| src[c]));
        out.push_row(&row)?;
    }
    Ok(out)
}

/// `[drop{1}, ..., drop{n}]`.
pub fn canonical_family(n: usize) -> Result<Vec<ProjectionSpec>, DecompositionError> {
    if n < 2 {
        return Err(DecompositionError::TooFewColumns(n));
    }
    Ok((1..=n).map(ProjectionSpec::drop).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    /// Weights `a_i`; `None` means all ones.
    pub coefficients: Option<Vec<f64>>,
    /// Program upper bound `M` in bytes. Without it the upper check is skipped.
    pub program_bound: Option<f64>,
    /// Bytes per `log2(m)`.
    pub slack_log: f64,
    /// Constant bytes.
    pub slack_const: f64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            coefficients: None,
            program_bound: None,
            slack_log: 8.0,
            slack_const: 64.0,
        }
    }
}

impl DecompositionConfig {
    /// `c1 * log2(m) + c2`, with `log2` of 0 or 1 rows taken as 0.
    pub fn slack(&self, m_rows: usize) -> f64 {
        let log_m = if m_rows > 1 { (m_rows as f64).log2() } else { 0.0 };
        self.slack_log * log_m + self.slack_const
    }

    /// Coefficients for `n` projections: the configured prefix, or ones.
    pub fn coefficients_for(&self, n: usize) -> Result<Vec<f64>, DecompositionError> {
        let coeffs = match &self.coefficients {
            None => vec![1.0; n],
            Some(c) if c.len() == n => c.clone(),
            Some(c) => {
                return Err(DecompositionError::CoefficientCount {
                    expected: n,
                    found: c.len(),
                })
            }
        };
        validate_coefficients(&coeffs)?;
        Ok(coeffs)
    }
}

pub fn validate_coefficients(coeffs: &[f64]) -> Result<(), DecompositionError> {
    match coeffs.iter().enumerate().find(|(_, a)| **a == 0.0 || !a.is_finite()) {
        Some((i, &value)) => Err(DecompositionError::BadCoefficient { index: i + 1, value }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionEstimate {
    pub spec: ProjectionSpec,
    pub estimate: ComplexityEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub m: usize,
    pub k_full: ComplexityEstimate,
    pub per_projection: Vec<ProjectionEstimate>,
    pub weighted_sum: f64,
    /// `(n - 1) * k_full`.
    pub lhs: f64,
    /// `weighted_sum / k_full`; lies near `n - 1` when the decomposition is tight.
    pub ratio: f64,
    pub lower_ok: bool,
    /// `None` when no program bound was configured.
    pub upper_ok: Option<bool>,
    pub slack_used: f64,
    pub backend_id: String,
    /// 1-based columns whose projection estimate exceeded `k_full + slack(raw_len)`.
    pub map_bound_violations: Vec<usize>,
}

/// Estimates `d` and all of its canonical projections and evaluates both
/// sides of the inequality.
pub fn verify_decomposition(
    d: &TupleDataset,
    cfg: &DecompositionConfig,
    backend: &CompressorBackend,
) -> Result<DecompositionReport, DecompositionError> {
    let n = d.n_cols();
    let family = canonical_family(n)?;
    let coeffs = cfg.coefficients_for(n)?;
    if let Some(m) = cfg.program_bound {
        if !(m.is_finite() && m >= 0.0) {
            return Err(DecompositionError::BadProgramBound(m));
        }
    }

    let (k_full, per_projection) = rayon::join(
        || estimator::estimate(d, backend),
        || {
            family
                .par_iter()
                .map(|spec| {
                    let estimate = estimator::estimate(&project(d, spec)?, backend)?;
                    Ok(ProjectionEstimate {
                        spec: spec.clone(),
                        estimate,
                    })
                })
                .collect::<Result<Vec<_>, DecompositionError>>()
        },
    );
    let k_full = k_full?;
    let per_projection = per_projection?;

    let weighted_sum: f64 = coeffs
        .iter()
        .zip(&per_projection)
        .map(|(a, p)| a * p.estimate.k_hat as f64)
        .sum();
    let k = k_full.k_hat as f64;
    let lhs = (n - 1) as f64 * k;
    let slack_used = cfg.slack(d.m_rows());
    let sup = coeffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let upper_ok = cfg
        .program_bound
        .map(|m| weighted_sum <= n as f64 * (k + m) * sup + slack_used);
    let map_bound_violations = per_projection
        .iter()
        .filter(|p| !estimator::check_map_bound(&k_full, &p.estimate).holds)
        .map(|p| p.spec.dropped_cols[0])
        .collect();

    Ok(DecompositionReport {
        n,
        m: d.m_rows(),
        weighted_sum,
        lhs,
        ratio: weighted_sum / k,
        lower_ok: weighted_sum + slack_used >= lhs,
        upper_ok,
        slack_used,
        backend_id: k_full.backend_id.clone(),
        k_full,
        per_projection,
        map_bound_violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub n: usize,
    /// `|k_full - sum a_i / (n - 1) * k_i|`.
    pub residual_n_minus_1: f64,
    /// `|k_full - sum a_i / n * k_i|`.
    pub residual_n: f64,
}

/// Residuals of the two normalized sums for each `n` in the schedule.
///
/// Report-only: nothing here asserts that either residual shrinks.
pub fn convergence_probe<G>(
    mut generate: G,
    n_schedule: &[usize],
    cfg: &DecompositionConfig,
    backend: &CompressorBackend,
) -> Result<Vec<ConvergencePoint>, DecompositionError>
where
    G: FnMut(usize) -> Result<TupleDataset, DecompositionError>,
{
    if n_schedule.iter().any(|&n| n < 2) || n_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DecompositionError::BadSchedule);
    }
    let mut out = Vec::with_capacity(n_schedule.len());
    for &n in n_schedule {
        let d = generate(n)?;
        if d.n_cols() != n {
            return Err(DecompositionError::CoefficientCount {
                expected: n,
                found: d.n_cols(),
            });
        }
        let coeffs = match &cfg.coefficients {
            Some(c) if c.len() >= n => c[..n].to_vec(),
            Some(c) => {
                return Err(DecompositionError::CoefficientCount {
                    expected: n,
                    found: c.len(),
                })
            }
            None => vec![1.0; n],
        };
        let cfg_n = DecompositionConfig {
            coefficients: Some(coeffs.clone()),
            ..cfg.clone()
        };
        let report = verify_decomposition(&d, &cfg_n, backend)?;
        let k = report.k_full.k_hat as f64;
        let nf = n as f64;
        out.push(ConvergencePoint {
            n,
            residual_n_minus_1: (k - report.weighted_sum / (nf - 1.0)).abs(),
            residual_n: (k - report.weighted_sum / nf).abs(),
        });
    }
    Ok(out)
}
