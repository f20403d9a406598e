//! Closed-form membership updates.
//!
//! Document update, for cluster `c` and document `i`:
//!
//! ```text
//! den_c  = 2 Tu (sum_j v_cj^2 - 1)
//! num_ci = den_c - sum_j v_cj d_ij
//! A1     = 1 - sum_d num_di / den_d
//! B1     = sum_d 1 / den_d
//! u_ci   = (num_ci + A1 / B1) / den_c
//! ```
//!
//! Word update, for cluster `c` and word `j`:
//!
//! ```text
//! den_c  = 2 Tv (1 - 2 sum_i u_ci + sum_i u_ci^2)
//! num_cj = 2 Tv (sum_i u_ci^2 - sum_i u_ci) - sum_i u_ci d_ij
//! A2     = 1 - sum_q num_cq / den_c
//! B2     = K / den_c
//! v_cj   = (num_cj + A2 / B2) / den_c
//! ```
//!
//! `A1/B1` and `A2/B2` are the eliminated multipliers: they make every
//! document column of `U` and every cluster row of `V` sum to one before
//! clipping.

use super::{DocMembershipMatrix, FccStfError, WordMembershipMatrix};
use crate::corpus::CorrelationMatrix;
use ndarray::{Array1, Array2, ArrayViewMut1, Axis};

fn check_dims(
    d: &CorrelationMatrix,
    n_docs: Option<usize>,
    n_terms: Option<usize>,
) -> Result<(), FccStfError> {
    if let Some(n) = n_docs {
        if n != d.n_docs() {
            return Err(FccStfError::DimensionMismatch(format!(
                "memberships cover {n} documents, correlation matrix has {}",
                d.n_docs()
            )));
        }
    }
    if let Some(k) = n_terms {
        if k != d.n_terms() {
            return Err(FccStfError::DimensionMismatch(format!(
                "memberships cover {k} words, correlation matrix has {}",
                d.n_terms()
            )));
        }
    }
    Ok(())
}

/// Per-cluster `2 Tu (sum_j v_cj^2 - 1)`, guarded.
fn doc_denominators(v: &WordMembershipMatrix, tu: f64, guard: f64) -> Result<Array1<f64>, FccStfError> {
    let mut dens = Array1::zeros(v.clusters());
    for (c, row) in v.values().rows().into_iter().enumerate() {
        let den = 2.0 * tu * (row.dot(&row) - 1.0);
        if !(den.abs() >= guard) {
            return Err(FccStfError::DegenerateCluster {
                cluster: c,
                iteration: None,
            });
        }
        dens[c] = den;
    }
    Ok(dens)
}

/// `(A1, B1)` for document `doc`.
pub fn compute_doc_update_terms(
    doc: usize,
    v: &WordMembershipMatrix,
    d: &CorrelationMatrix,
    tu: f64,
    denom_guard: f64,
) -> Result<(f64, f64), FccStfError> {
    check_dims(d, None, Some(v.n_terms()))?;
    if doc >= d.n_docs() {
        return Err(FccStfError::DimensionMismatch(format!(
            "document index {doc} out of range for {} documents",
            d.n_docs()
        )));
    }
    let dens = doc_denominators(v, tu, denom_guard)?;
    let weighted = v.values().dot(&d.values().row(doc));
    Ok(doc_terms(&dens, &weighted))
}

fn doc_terms(dens: &Array1<f64>, weighted: &Array1<f64>) -> (f64, f64) {
    let mut ratio_sum = 0.0;
    let mut inv_sum = 0.0;
    for (den, w) in dens.iter().zip(weighted.iter()) {
        ratio_sum += (den - w) / den;
        inv_sum += 1.0 / den;
    }
    (1.0 - ratio_sum, inv_sum)
}

pub fn update_doc_memberships(
    v: &WordMembershipMatrix,
    d: &CorrelationMatrix,
    tu: f64,
    denom_guard: f64,
) -> Result<DocMembershipMatrix, FccStfError> {
    update_doc_memberships_counted(v, d, tu, denom_guard).map(|(u, _)| u)
}

pub(super) fn update_doc_memberships_counted(
    v: &WordMembershipMatrix,
    d: &CorrelationMatrix,
    tu: f64,
    denom_guard: f64,
) -> Result<(DocMembershipMatrix, usize), FccStfError> {
    check_dims(d, None, Some(v.n_terms()))?;
    let (c_count, n) = (v.clusters(), d.n_docs());
    // One cluster: the column constraint leaves a single feasible point.
    if c_count == 1 {
        return Ok((DocMembershipMatrix::from_raw(Array2::ones((1, n))), 0));
    }
    let dens = doc_denominators(v, tu, denom_guard)?;
    // weighted[[c, i]] = sum_j v_cj d_ij
    let weighted = v.values().dot(&d.values().t());

    let mut u = Array2::zeros((c_count, n));
    let mut clipped = 0;
    for i in 0..n {
        let col_weighted = weighted.column(i).to_owned();
        let (a1, b1) = doc_terms(&dens, &col_weighted);
        let multiplier = a1 / b1;
        let mut col = u.column_mut(i);
        for c in 0..c_count {
            col[c] = (dens[c] - col_weighted[c] + multiplier) / dens[c];
        }
        if clip_in_place(col)? {
            clipped += 1;
        }
    }
    Ok((DocMembershipMatrix::from_raw(u), clipped))
}

/// Per-cluster `(sum_i u_ci, sum_i u_ci^2, 2 Tv (1 - 2 sum_i u_ci + sum_i u_ci^2))`.
fn word_denominator(u_row: ndarray::ArrayView1<f64>, tv: f64) -> (f64, f64, f64) {
    let s1 = u_row.sum();
    let s2 = u_row.dot(&u_row);
    (s1, s2, 2.0 * tv * (1.0 - 2.0 * s1 + s2))
}

/// `(A2, B2)` for cluster `cluster`.
pub fn compute_word_update_terms(
    cluster: usize,
    u: &DocMembershipMatrix,
    d: &CorrelationMatrix,
    tv: f64,
    denom_guard: f64,
) -> Result<(f64, f64), FccStfError> {
    check_dims(d, Some(u.n_docs()), None)?;
    if cluster >= u.clusters() {
        return Err(FccStfError::DimensionMismatch(format!(
            "cluster index {cluster} out of range for {} clusters",
            u.clusters()
        )));
    }
    let row = u.values().row(cluster);
    let (s1, s2, den) = word_denominator(row, tv);
    if !(den.abs() >= denom_guard) {
        return Err(FccStfError::DegenerateCluster {
            cluster,
            iteration: None,
        });
    }
    let weighted = d.values().t().dot(&row);
    Ok(word_terms(s1, s2, den, tv, &weighted))
}

fn word_terms(s1: f64, s2: f64, den: f64, tv: f64, weighted: &Array1<f64>) -> (f64, f64) {
    let base = 2.0 * tv * (s2 - s1);
    let ratio_sum: f64 = weighted.iter().map(|w| (base - w) / den).sum();
    (1.0 - ratio_sum, weighted.len() as f64 / den)
}

pub fn update_word_memberships(
    u: &DocMembershipMatrix,
    d: &CorrelationMatrix,
    tv: f64,
    denom_guard: f64,
) -> Result<WordMembershipMatrix, FccStfError> {
    update_word_memberships_counted(u, d, tv, denom_guard).map(|(v, _)| v)
}

pub(super) fn update_word_memberships_counted(
    u: &DocMembershipMatrix,
    d: &CorrelationMatrix,
    tv: f64,
    denom_guard: f64,
) -> Result<(WordMembershipMatrix, usize), FccStfError> {
    check_dims(d, Some(u.n_docs()), None)?;
    let (c_count, k) = (u.clusters(), d.n_terms());
    // One word: the row constraint leaves a single feasible point.
    if k == 1 {
        return Ok((WordMembershipMatrix::from_raw(Array2::ones((c_count, 1))), 0));
    }
    // weighted[[c, j]] = sum_i u_ci d_ij
    let weighted = u.values().dot(d.values());

    let mut v = Array2::zeros((c_count, k));
    let mut clipped = 0;
    for (c, mut row) in v.axis_iter_mut(Axis(0)).enumerate() {
        let (s1, s2, den) = word_denominator(u.values().row(c), tv);
        if !(den.abs() >= denom_guard) {
            return Err(FccStfError::DegenerateCluster {
                cluster: c,
                iteration: None,
            });
        }
        let row_weighted = weighted.row(c).to_owned();
        let (a2, b2) = word_terms(s1, s2, den, tv, &row_weighted);
        let multiplier = a2 / b2;
        let base = 2.0 * tv * (s2 - s1);
        for j in 0..k {
            row[j] = (base - row_weighted[j] + multiplier) / den;
        }
        if clip_in_place(row)? {
            clipped += 1;
        }
    }
    Ok((WordMembershipMatrix::from_raw(v), clipped))
}

/// Clips and renormalizes `lane` only when it holds a negative entry.
/// Returns whether clipping happened.
fn clip_in_place(mut lane: ArrayViewMut1<f64>) -> Result<bool, FccStfError> {
    if !lane.iter().any(|&x| x < 0.0) {
        return Ok(false);
    }
    let clipped = clip_renormalize(&lane.to_vec())?;
    lane.iter_mut().zip(clipped).for_each(|(dst, src)| *dst = src);
    Ok(true)
}

/// Sets negative entries to zero and rescales so the entries sum to one.
pub fn clip_renormalize(row: &[f64]) -> Result<Vec<f64>, FccStfError> {
    let clipped: Vec<f64> = row.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(FccStfError::AllClipped);
    }
    Ok(clipped.into_iter().map(|x| x / total).collect())
}
