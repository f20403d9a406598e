use super::{DocMembershipMatrix, FccStfError, WordMembershipMatrix};
use crate::corpus::CorrelationMatrix;

/// Aggregation plus single-term fuzzifier:
///
/// ```text
/// J = sum_{c,i,j} u_ci v_cj d_ij + T sum_{c,i,j} ((u_ci + v_cj) - u_ci v_cj)^2
/// ```
///
/// The multiplier terms are zero while both sum constraints hold and are not
/// included. The inner sum over words is evaluated in closed form using
/// `(u + v - uv)^2 = u^2 + 2uv(1 - u) + v^2 (1 - u)^2`.
pub fn objective(
    u: &DocMembershipMatrix,
    v: &WordMembershipMatrix,
    d: &CorrelationMatrix,
    t: f64,
) -> Result<f64, FccStfError> {
    if u.clusters() != v.clusters() || u.n_docs() != d.n_docs() || v.n_terms() != d.n_terms() {
        return Err(FccStfError::DimensionMismatch(format!(
            "U is {}x{}, V is {}x{}, D is {}x{}",
            u.clusters(),
            u.n_docs(),
            v.clusters(),
            v.n_terms(),
            d.n_docs(),
            d.n_terms()
        )));
    }
    let k = d.n_terms() as f64;
    // weighted[[c, i]] = sum_j v_cj d_ij
    let weighted = v.values().dot(&d.values().t());

    let mut aggregation = 0.0;
    let mut fuzzifier = 0.0;
    for (c, v_row) in v.values().rows().into_iter().enumerate() {
        let s1 = v_row.sum();
        let s2 = v_row.dot(&v_row);
        for (i, &uci) in u.values().row(c).iter().enumerate() {
            aggregation += uci * weighted[[c, i]];
            let rest = 1.0 - uci;
            fuzzifier += k * uci * uci + 2.0 * uci * rest * s1 + rest * rest * s2;
        }
    }
    Ok(aggregation + t * fuzzifier)
}
