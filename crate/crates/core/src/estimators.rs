//! Finite-sample estimators of entropy, conditional entropy, and
//! conditional mutual information over categorical datasets.
//!
//! Two estimators sit behind [`EstimatorKind`]: the plug-in estimator
//! and its Miller-Madow bias correction. Conditional quantities are
//! entropy differences clamped at zero. Joint values are counted into an
//! associative map and summed in a fixed key order, so results do not
//! depend on row order or thread count.

use std::collections::HashMap;

use crate::data::Dataset;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EstimatorError {
    #[error("column sets overlap")]
    OverlappingSets,
    #[error("column index {0} out of range for {1} columns")]
    ColumnOutOfRange(usize, usize),
}

/// Entropy estimator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Maximum-likelihood plug-in estimator.
    PlugIn,
    /// Plug-in plus the Miller-Madow correction `(m - 1) / (2n)`, where
    /// `m` counts observed distinct joint values.
    MillerMadow,
}

fn check_columns(ds: &Dataset, sets: &[&[usize]]) -> Result<(), EstimatorError> {
    let mut seen = vec![false; ds.d()];
    for set in sets {
        for &c in *set {
            if c >= ds.d() {
                return Err(EstimatorError::ColumnOutOfRange(c, ds.d()));
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(EstimatorError::OverlappingSets);
            }
        }
    }
    Ok(())
}

/// Counts of observed joint values over the columns `s`, keyed by the
/// value tuple, in mixed-radix order (first column fastest).
fn joint_counts(ds: &Dataset, s: &[usize]) -> Vec<(Vec<u16>, u64)> {
    let mut counts: HashMap<Vec<u16>, u64> = HashMap::new();
    let mut key = vec![0u16; s.len()];
    for row in ds.rows() {
        for (slot, &c) in key.iter_mut().zip(s) {
            *slot = row[c];
        }
        *counts.entry(key.clone()).or_insert(0) += 1;
    }
    let mut out: Vec<(Vec<u16>, u64)> = counts.into_iter().collect();
    out.sort_unstable_by(|(a, _), (b, _)| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// Empirical entropy of the joint value of columns `s`, in nats.
/// The empty set has entropy 0.
pub fn empirical_entropy(ds: &Dataset, s: &[usize], kind: EstimatorKind) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let counts = joint_counts(ds, s);
    let n = ds.n() as f64;
    let mut h = 0.0;
    for &(_, c) in &counts {
        let f = c as f64 / n;
        h -= f * f.ln();
    }
    match kind {
        EstimatorKind::PlugIn => h,
        EstimatorKind::MillerMadow => h + (counts.len() as f64 - 1.0) / (2.0 * n),
    }
}

/// Conditional entropy estimate `H(k | a) = H(k, a) - H(a)`, clamped to
/// be non-negative (the Miller-Madow difference can dip below zero).
pub fn cond_entropy_hat(
    ds: &Dataset,
    k: &[usize],
    a: &[usize],
    kind: EstimatorKind,
) -> Result<f64, EstimatorError> {
    check_columns(ds, &[k, a])?;
    let ka = crate::oracle::union(k, a);
    Ok((empirical_entropy(ds, &ka, kind) - empirical_entropy(ds, a, kind)).max(0.0))
}

/// Conditional mutual information estimate
/// `I(k; l | a) = H(l, a) - H(k, l, a) - H(a) + H(k, a)`,
/// clamped to be non-negative.
pub fn cmi_hat(
    ds: &Dataset,
    k: &[usize],
    l: &[usize],
    a: &[usize],
    kind: EstimatorKind,
) -> Result<f64, EstimatorError> {
    check_columns(ds, &[k, l, a])?;
    let ka = crate::oracle::union(k, a);
    let la = crate::oracle::union(l, a);
    let kla = crate::oracle::union(&ka, l);
    Ok((empirical_entropy(ds, &la, kind) - empirical_entropy(ds, &kla, kind)
        - empirical_entropy(ds, a, kind)
        + empirical_entropy(ds, &ka, kind))
    .max(0.0))
}

/// Squared error scale of entropy estimation over a state space of
/// exponent `p` with `n` samples: `(2^p / (n p))^2 + p^2 / n`, unit
/// constant. Consumed by the data-dependent threshold tuner.
pub fn error_scale_delta(p: u32, n: usize) -> f64 {
    let n = n as f64;
    let p = p as f64;
    let first = 2f64.powf(p) / (n * p);
    first * first + p * p / n
}
