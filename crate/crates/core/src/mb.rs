//! Markov boundary search against an [`InfoSource`]: forward-greedy PPS
//! and the backward IAMB phase.

use crate::info::InfoSource;
use crate::oracle::normalize_set;

/// Outcome of a PPS run.
#[derive(Debug, Clone, PartialEq)]
pub struct PpsResult {
    /// Recovered boundary, ascending.
    pub boundary: Vec<usize>,
    /// `H(k | boundary)` as reported by the source.
    pub cond_entropy: f64,
    /// `(added node, CMI at addition)` in addition order; every traced
    /// CMI exceeded `kappa`.
    pub trace: Vec<(usize, f64)>,
}

/// Forward-greedy possible-parental-set search.
///
/// Repeatedly estimates `I(l; k | m)` for every candidate `l` not yet
/// selected and adds the argmax (smallest index on ties) while the
/// estimate strictly exceeds `kappa`. Returns the selected set together
/// with `H(k | m)`.
pub fn pps(src: &InfoSource, k: usize, a: &[usize], kappa: f64) -> PpsResult {
    let a = normalize_set(a);
    debug_assert!(!a.contains(&k), "target must not be a candidate");
    let mut boundary: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for &l in a.iter().filter(|l| !boundary.contains(l)) {
            let v = src.cmi(k, &[l], &boundary);
            // strictly-greater keeps the smallest index on ties
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((l, v));
            }
        }
        match best {
            Some((l, v)) if v > kappa => {
                let pos = boundary.partition_point(|&x| x < l);
                boundary.insert(pos, l);
                trace.push((l, v));
            }
            _ => break,
        }
    }
    let cond_entropy = src.cond_entropy(k, &boundary);
    PpsResult {
        boundary,
        cond_entropy,
        trace,
    }
}

/// Backward IAMB phase, run to a fixpoint.
///
/// Starts from `m = a` and removes, scanning members in ascending index
/// order, every `l` with `I(l; k | m \ l) < kappa`; removals take effect
/// immediately and passes repeat until one removes nothing.
pub fn iamb_backward(src: &InfoSource, k: usize, a: &[usize], kappa: f64) -> Vec<usize> {
    let mut m = normalize_set(a);
    debug_assert!(!m.contains(&k), "target must not be a candidate");
    loop {
        let mut removed = false;
        let mut i = 0;
        while i < m.len() {
            let l = m[i];
            let rest: Vec<usize> = m.iter().copied().filter(|&x| x != l).collect();
            if src.cmi(k, &[l], &rest) < kappa {
                m.remove(i);
                removed = true;
            } else {
                i += 1;
            }
        }
        if !removed {
            return m;
        }
    }
}

/// Single-shot backward phase: evaluates every member against the full
/// current set simultaneously and removes all below `kappa` at once.
pub fn iamb_backward_once(src: &InfoSource, k: usize, a: &[usize], kappa: f64) -> Vec<usize> {
    let m = normalize_set(a);
    debug_assert!(!m.contains(&k), "target must not be a candidate");
    m.iter()
        .copied()
        .filter(|&l| {
            let rest: Vec<usize> = m.iter().copied().filter(|&x| x != l).collect();
            src.cmi(k, &[l], &rest) >= kappa
        })
        .collect()
}

/// Candidate set fed to the backward phase in [`pps_then_backward`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackwardSeed {
    /// Prune the PPS output (forward-then-backward IAMB composition).
    PpsOutput,
    /// Ignore the forward phase and prune the full candidate set
    /// (the no-PPS mode used when the greedy-search condition may fail).
    FullCandidates,
}

/// PPS followed by the backward phase.
pub fn pps_then_backward(
    src: &InfoSource,
    k: usize,
    a: &[usize],
    kappa: f64,
    seed: BackwardSeed,
) -> Vec<usize> {
    match seed {
        BackwardSeed::PpsOutput => {
            let fwd = pps(src, k, a, kappa);
            iamb_backward(src, k, &fwd.boundary, kappa)
        }
        BackwardSeed::FullCandidates => iamb_backward(src, k, a, kappa),
    }
}
