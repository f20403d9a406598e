//! Per-iteration record of the objective, the largest document-membership
//! change and a snapshot of word memberships, with CSV export suitable for
//! plotting `J` against any tracked `v_cj`.

use super::FccStfError;
use std::fmt::Write as _;

/// Fractional digits written for every real-valued trace field.
pub const TRACE_DECIMALS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub max_delta_u: f64,
    /// Values of the tracked `v_cj`, in the order of [`IterationTrace::tracked`].
    pub v_snapshot: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    /// Zero-based `(cluster, word)` pairs captured in each snapshot.
    pub tracked: Vec<(usize, usize)>,
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn new(tracked: Vec<(usize, usize)>) -> Self {
        Self {
            tracked,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `(v_cj, J)` pairs across iterations for one tracked entry.
    pub fn series(&self, cluster: usize, word: usize) -> Option<Vec<(f64, f64)>> {
        let col = self.tracked.iter().position(|&p| p == (cluster, word))?;
        Some(
            self.records
                .iter()
                .map(|r| (r.v_snapshot[col], r.objective))
                .collect(),
        )
    }
}

/// Header `iteration,J,max_delta_u,v_<c>_<j>...` with one-based cluster and
/// word numbers, then one row per iteration.
pub fn export_trace(trace: &IterationTrace) -> Result<String, FccStfError> {
    if trace.is_empty() {
        return Err(FccStfError::EmptyTrace);
    }
    let mut out = String::from("iteration,J,max_delta_u");
    for (c, j) in &trace.tracked {
        let _ = write!(out, ",v_{}_{}", c + 1, j + 1);
    }
    out.push('\n');
    for r in &trace.records {
        let _ = write!(
            out,
            "{},{:.p$},{:.p$}",
            r.iteration,
            r.objective,
            r.max_delta_u,
            p = TRACE_DECIMALS
        );
        for v in &r.v_snapshot {
            let _ = write!(out, ",{:.p$}", v, p = TRACE_DECIMALS);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_trace(text: &str) -> Result<IterationTrace, FccStfError> {
    let bad = |msg: String| FccStfError::MalformedTrace(msg);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[..3] != ["iteration", "J", "max_delta_u"] {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let tracked = cols[3..]
        .iter()
        .map(|name| {
            let parts: Vec<&str> = name.split('_').collect();
            match parts.as_slice() {
                ["v", c, j] => match (c.parse::<usize>(), j.parse::<usize>()) {
                    (Ok(c), Ok(j)) if c >= 1 && j >= 1 => Ok((c - 1, j - 1)),
                    _ => Err(bad(format!("bad column `{name}`"))),
                },
                _ => Err(bad(format!("bad column `{name}`"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut trace = IterationTrace::new(tracked);
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(bad(format!(
                "row {} has {} fields, expected {}",
                n + 1,
                fields.len(),
                cols.len()
            )));
        }
        let iteration = fields[0]
            .parse::<usize>()
            .map_err(|_| bad(format!("bad iteration `{}`", fields[0])))?;
        let reals = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| bad(format!("bad number `{f}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        trace.records.push(IterationRecord {
            iteration,
            objective: reals[0],
            max_delta_u: reals[1],
            v_snapshot: reals[2..].to_vec(),
        });
    }
    if trace.is_empty() {
        return Err(FccStfError::EmptyTrace);
    }
    Ok(trace)
}
