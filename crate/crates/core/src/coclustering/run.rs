use super::updates::{update_doc_memberships_counted, update_word_memberships_counted};
use super::{
    objective, ClipCounts, CoClusterResult, DocMembershipMatrix, FccStfConfig, FccStfError,
    IterationRecord, IterationTrace, WordMembershipMatrix,
};
use crate::corpus::CorrelationMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform (0, 1) entries from a seeded ChaCha8 stream, filled document by
/// document, then each document column scaled to sum to one.
pub fn init_memberships(clusters: usize, n_docs: usize, seed: u64) -> DocMembershipMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = Array2::zeros((clusters, n_docs));
    for mut col in u.columns_mut() {
        for x in col.iter_mut() {
            *x = loop {
                let r: f64 = rng.gen();
                if r > 0.0 {
                    break r;
                }
            };
        }
        let total = col.sum();
        col.mapv_inplace(|x| x / total);
    }
    DocMembershipMatrix::from_raw(u)
}

/// State handed to an observer after every completed iteration.
#[derive(Debug)]
pub struct IterationState<'a> {
    pub iteration: usize,
    pub u: &'a DocMembershipMatrix,
    pub v: &'a WordMembershipMatrix,
    pub objective: f64,
    pub max_delta_u: f64,
    pub clipping: ClipCounts,
}

pub fn run_fcc_stf(config: &FccStfConfig, d: &CorrelationMatrix) -> Result<CoClusterResult, FccStfError> {
    run_fcc_stf_observed(config, d, |_| {})
}

/// Runs the alternating updates, calling `observer` once per iteration.
pub fn run_fcc_stf_observed<F>(
    config: &FccStfConfig,
    d: &CorrelationMatrix,
    mut observer: F,
) -> Result<CoClusterResult, FccStfError>
where
    F: FnMut(&IterationState<'_>),
{
    config.validate()?;
    let (n, k, c_count) = (d.n_docs(), d.n_terms(), config.clusters);
    if n == 0 || k == 0 {
        return Err(FccStfError::DimensionMismatch(format!(
            "correlation matrix must be non-empty, got {n}x{k}"
        )));
    }
    if c_count > n {
        return Err(FccStfError::InvalidConfig(format!(
            "C = {c_count} exceeds the number of documents {n}"
        )));
    }
    let tracked = match &config.tracked_v {
        Some(pairs) => {
            if let Some(&(c, j)) = pairs.iter().find(|&&(c, j)| c >= c_count || j >= k) {
                return Err(FccStfError::InvalidConfig(format!(
                    "tracked entry v_{}_{} outside {c_count}x{k}",
                    c + 1,
                    j + 1
                )));
            }
            pairs.clone()
        }
        None => (0..c_count).flat_map(|c| (0..k).map(move |j| (c, j))).collect(),
    };

    let at = |iteration: usize| {
        move |e: FccStfError| match e {
            FccStfError::DegenerateCluster { cluster, .. } => FccStfError::DegenerateCluster {
                cluster,
                iteration: Some(iteration),
            },
            other => other,
        }
    };

    let mut u = init_memberships(c_count, n, config.seed);
    let mut trace = IterationTrace::new(tracked);
    let mut converged = false;
    let mut last_clipping = ClipCounts::default();
    let mut v = WordMembershipMatrix::from_raw(Array2::zeros((c_count, k)));

    for iteration in 1..=config.max_iters {
        let (new_v, word_rows) =
            update_word_memberships_counted(&u, d, config.tv, config.denom_guard).map_err(at(iteration))?;
        ensure_finite(new_v.values(), iteration, "word membership")?;
        v = new_v;

        // With a single word every cluster row of V is one-hot and J does not
        // depend on U, so the document update has no defined value: keep U.
        let (new_u, doc_columns) = if k == 1 {
            (u.clone(), 0)
        } else {
            update_doc_memberships_counted(&v, d, config.tu, config.denom_guard).map_err(at(iteration))?
        };
        ensure_finite(new_u.values(), iteration, "document membership")?;

        let max_delta_u = new_u.max_abs_diff(&u);
        u = new_u;
        let j = objective(&u, &v, d, config.tu)?;
        if !j.is_finite() {
            return Err(FccStfError::NonFinite { iteration, what: "objective" });
        }
        last_clipping = ClipCounts { doc_columns, word_rows };

        trace.records.push(IterationRecord {
            iteration,
            objective: j,
            max_delta_u,
            v_snapshot: trace.tracked.iter().map(|&(c, jj)| v.get(c, jj)).collect(),
        });
        observer(&IterationState {
            iteration,
            u: &u,
            v: &v,
            objective: j,
            max_delta_u,
            clipping: last_clipping,
        });

        if max_delta_u < config.epsilon {
            converged = true;
            break;
        }
    }

    Ok(CoClusterResult {
        iterations_run: trace.len(),
        u,
        v,
        trace,
        converged,
        last_clipping,
    })
}

fn ensure_finite(values: &Array2<f64>, iteration: usize, what: &'static str) -> Result<(), FccStfError> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(FccStfError::NonFinite { iteration, what })
    }
}
