//! FCC_STF fuzzy co-clustering.
//!
//! Documents and words both receive fuzzy memberships over `C` co-clusters.
//! Document memberships `U` (C x N) sum to one over clusters for every
//! document; word memberships `V` (C x K) sum to one over words for every
//! cluster. Each iteration recomputes `V` from `U`, then `U` from `V`, using
//! closed-form updates in which the Lagrange multipliers of both sum
//! constraints have been eliminated. Negative memberships produced by the
//! closed forms are clipped to zero and the affected row or column is
//! renormalized. The loop stops when no document membership moves by more
//! than `E`.

mod objective;
mod run;
mod trace;
mod updates;

pub use objective::objective;
pub use run::{init_memberships, run_fcc_stf, run_fcc_stf_observed, IterationState};
pub use trace::{export_trace, parse_trace, IterationRecord, IterationTrace, TRACE_DECIMALS};
pub use updates::{
    clip_renormalize, compute_doc_update_terms, compute_word_update_terms,
    update_doc_memberships, update_word_memberships,
};

use crate::grid::{self, GridError};
use ndarray::Array2;

/// Tolerance for the sum-to-one checks on membership matrices.
pub const RUSPINI_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_DENOM_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FccStfError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{}", degenerate_msg(*.cluster, *.iteration))]
    DegenerateCluster {
        cluster: usize,
        iteration: Option<usize>,
    },
    #[error("every entry was clipped to zero")]
    AllClipped,
    #[error("non-finite {what} at iteration {iteration}")]
    NonFinite { iteration: usize, what: &'static str },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("membership matrix violates its constraints: {0}")]
    InvalidMembership(String),
    #[error("trace is empty")]
    EmptyTrace,
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error(transparent)]
    Format(#[from] GridError),
}

fn degenerate_msg(cluster: usize, iteration: Option<usize>) -> String {
    match iteration {
        Some(t) => format!(
            "degenerate cluster {} at iteration {t}: update denominator vanished",
            cluster + 1
        ),
        None => format!(
            "degenerate cluster {}: update denominator vanished",
            cluster + 1
        ),
    }
}

/// Parameters of one FCC_STF run.
#[derive(Debug, Clone, PartialEq)]
pub struct FccStfConfig {
    /// Number of co-clusters `C`.
    pub clusters: usize,
    /// Document fuzziness `Tu`; also the `T` used when logging the objective.
    pub tu: f64,
    /// Word fuzziness `Tv`.
    pub tv: f64,
    /// Convergence threshold `E` on `max |U(t+1) - U(t)|`.
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub denom_guard: f64,
    /// `(cluster, word)` pairs recorded in the trace; `None` records all of `V`.
    pub tracked_v: Option<Vec<(usize, usize)>>,
}

impl Default for FccStfConfig {
    fn default() -> Self {
        Self {
            clusters: 2,
            tu: 1.0,
            tv: 1.0,
            epsilon: 1e-6,
            max_iters: 100,
            seed: 0,
            denom_guard: DEFAULT_DENOM_GUARD,
            tracked_v: None,
        }
    }
}

impl FccStfConfig {
    pub fn with_clusters(clusters: usize) -> Self {
        Self {
            clusters,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FccStfError> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(FccStfError::InvalidConfig(format!(
                    "{name} must be a finite positive number, got {x}"
                )))
            }
        };
        if self.clusters == 0 {
            return Err(FccStfError::InvalidConfig("C must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(FccStfError::InvalidConfig(
                "max_iters must be at least 1".into(),
            ));
        }
        positive("Tu", self.tu)?;
        positive("Tv", self.tv)?;
        positive("E", self.epsilon)?;
        positive("denom_guard", self.denom_guard)
    }
}

fn check_stochastic(values: &Array2<f64>, by_column: bool, label: &str) -> Result<(), FccStfError> {
    if values.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(FccStfError::InvalidMembership(format!(
            "{label} has entries outside [0, 1]"
        )));
    }
    let lanes = if by_column {
        values.columns()
    } else {
        values.rows()
    };
    for (idx, lane) in lanes.into_iter().enumerate() {
        let s = lane.sum();
        if (s - 1.0).abs() >= RUSPINI_TOLERANCE {
            return Err(FccStfError::InvalidMembership(format!(
                "{label} {} sums to {s}",
                idx + 1
            )));
        }
    }
    Ok(())
}

/// C x N document memberships; every column sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DocMembershipMatrix(Array2<f64>);

impl DocMembershipMatrix {
    /// Validates range and column sums.
    pub fn new(values: Array2<f64>) -> Result<Self, FccStfError> {
        check_stochastic(&values, true, "document column")?;
        Ok(Self(values))
    }

    pub(crate) fn from_raw(values: Array2<f64>) -> Self {
        Self(values)
    }

    pub fn clusters(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_docs(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, cluster: usize, doc: usize) -> f64 {
        self.0[[cluster, doc]]
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    /// Index of the cluster with the largest membership for `doc` (first on ties).
    pub fn argmax(&self, doc: usize) -> usize {
        argmax(self.0.column(doc).iter().copied())
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `C,N` header then C rows of N values.
    pub fn to_csv(&self) -> String {
        grid::write_grid(&self.0)
    }

    pub fn from_csv(text: &str) -> Result<Self, FccStfError> {
        Self::new(grid::parse_grid(text)?)
    }
}

/// C x K word memberships; every row sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WordMembershipMatrix(Array2<f64>);

impl WordMembershipMatrix {
    /// Validates range and row sums.
    pub fn new(values: Array2<f64>) -> Result<Self, FccStfError> {
        check_stochastic(&values, false, "cluster row")?;
        Ok(Self(values))
    }

    pub(crate) fn from_raw(values: Array2<f64>) -> Self {
        Self(values)
    }

    pub fn clusters(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_terms(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, cluster: usize, term: usize) -> f64 {
        self.0[[cluster, term]]
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    /// `C,K` header then C rows of K values.
    pub fn to_csv(&self) -> String {
        grid::write_grid(&self.0)
    }

    pub fn from_csv(text: &str) -> Result<Self, FccStfError> {
        Self::new(grid::parse_grid(text)?)
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Number of columns of `U` and rows of `V` that needed clipping in one iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClipCounts {
    pub doc_columns: usize,
    pub word_rows: usize,
}

impl ClipCounts {
    pub fn any(&self) -> bool {
        self.doc_columns + self.word_rows > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoClusterResult {
    pub u: DocMembershipMatrix,
    pub v: WordMembershipMatrix,
    pub trace: IterationTrace,
    pub converged: bool,
    pub iterations_run: usize,
    /// Clipping performed during the last iteration.
    pub last_clipping: ClipCounts,
}

impl CoClusterResult {
    pub fn final_objective(&self) -> f64 {
        self.trace.records.last().map_or(f64::NAN, |r| r.objective)
    }

    pub fn final_max_delta_u(&self) -> f64 {
        self.trace.records.last().map_or(f64::NAN, |r| r.max_delta_u)
    }

    /// Largest `|sum - 1|` over document columns and word rows.
    pub fn constraint_residual(&self) -> f64 {
        let doc = self
            .u
            .values()
            .columns()
            .into_iter()
            .map(|c| (c.sum() - 1.0).abs());
        let word = self
            .v
            .values()
            .rows()
            .into_iter()
            .map(|r| (r.sum() - 1.0).abs());
        doc.chain(word).fold(0.0, f64::max)
    }
}
