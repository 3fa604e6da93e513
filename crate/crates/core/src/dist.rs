//! Distribution utilities: normalization and total-variation distance.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("entry {index} is negative or not a number ({value})")]
    InvalidEntry { index: usize, value: f64 },
    #[error("counts sum to zero")]
    ZeroTotal,
}

/// Total-variation distance `(1/2) sum |p(n) - q(n)|` over the union of
/// supports; a missing entry counts as zero.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64, DistError> {
    for v in [p, q] {
        if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| x.is_nan() || **x < 0.0) {
            return Err(DistError::InvalidEntry { index, value });
        }
    }
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let l1: f64 = (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum();
    Ok(0.5 * l1)
}

/// Per-index absolute differences over the union of supports.
pub(crate) fn abs_diffs(p: &[f64], q: &[f64]) -> Vec<f64> {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    (0..len).map(|i| (at(p, i) - at(q, i)).abs()).collect()
}

/// `counts / sum(counts)`, index-aligned (the overflow bucket included).
pub fn normalize_counts(counts: &[u64]) -> Result<Vec<f64>, DistError> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(DistError::ZeroTotal);
    }
    let total = total as f64;
    Ok(counts.iter().map(|&c| c as f64 / total).collect())
}
