//! Exact population oracle for small tabular Bayesian networks.
//!
//! [`TabularBN`] pairs a [`Dag`] with one conditional probability table
//! per node; [`JointDist`] is its fully enumerated joint, the source of
//! exact entropies, conditional mutual information, Markov boundaries,
//! and minimal I-maps. All entropies are in nats.
//!
//! Configurations are encoded in mixed radix with node 0 as the
//! fastest-varying digit; CPT rows use the same convention over the
//! node's sorted parents. This fixes the table layout byte-exactly.

use rand::Rng;

use crate::data::Dataset;
use crate::graph::{Dag, GraphError};
use crate::rng::seeded;

use std::fmt::Write as _;

use thiserror::Error;

/// Default cap on the number of joint configurations.
pub const DEFAULT_STATE_CAP: usize = 1 << 24;
/// Default cap on the candidate-set size of the exhaustive boundary search.
pub const DEFAULT_BOUNDARY_CAP: usize = 20;
/// Exact quantities this far from zero are treated as zero.
pub const ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid CPT for node {node}: {reason}")]
    BadCpt { node: usize, reason: String },
    #[error("state space {states} exceeds cap {cap}")]
    StateSpaceCap { states: u128, cap: usize },
    #[error("boundary candidate set of size {0} exceeds cap {1}")]
    BoundaryCap(usize, usize),
    #[error("node {0} must not be in the candidate set")]
    TargetInCandidates(usize),
    #[error("ordering is not a permutation of the nodes")]
    BadOrdering,
    #[error("malformed network text: {0}")]
    Parse(String),
}

/// Conditional probability table of one node: one probability row per
/// configuration of its sorted parents (lowest-index parent fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub rows: Vec<Vec<f64>>,
}

/// A DAG with per-node support sizes and CPTs.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularBN {
    dag: Dag,
    supports: Vec<usize>,
    cpts: Vec<Cpt>,
}

impl TabularBN {
    pub fn new(dag: Dag, supports: Vec<usize>, cpts: Vec<Cpt>) -> Result<Self, OracleError> {
        let d = dag.node_count();
        let check = |cond: bool, node: usize, reason: String| {
            if cond {
                Ok(())
            } else {
                Err(OracleError::BadCpt { node, reason })
            }
        };
        check(supports.len() == d, 0, format!("{} supports for {} nodes", supports.len(), d))?;
        check(cpts.len() == d, 0, format!("{} CPTs for {} nodes", cpts.len(), d))?;
        for k in 0..d {
            check(supports[k] >= 2, k, format!("support {} < 2", supports[k]))?;
            let expected_rows: usize = dag.parents(k).iter().map(|&p| supports[p]).product();
            check(
                cpts[k].rows.len() == expected_rows,
                k,
                format!("{} rows, expected {}", cpts[k].rows.len(), expected_rows),
            )?;
            for (r, row) in cpts[k].rows.iter().enumerate() {
                check(
                    row.len() == supports[k],
                    k,
                    format!("row {r} has {} entries, support is {}", row.len(), supports[k]),
                )?;
                check(
                    row.iter().all(|&p| p >= 0.0 && p.is_finite()),
                    k,
                    format!("row {r} has a negative or non-finite entry"),
                )?;
                let sum: f64 = row.iter().sum();
                check(
                    (sum - 1.0).abs() <= 1e-12,
                    k,
                    format!("row {r} sums to {sum}"),
                )?;
            }
        }
        Ok(TabularBN { dag, supports, cpts })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn supports(&self) -> &[usize] {
        &self.supports
    }

    pub fn cpt(&self, k: usize) -> &Cpt {
        &self.cpts[k]
    }

    pub fn node_count(&self) -> usize {
        self.dag.node_count()
    }

    /// True iff every CPT entry is positive, which makes the joint
    /// strictly positive and Markov boundaries unique.
    pub fn strictly_positive(&self) -> bool {
        self.cpts
            .iter()
            .all(|c| c.rows.iter().all(|r| r.iter().all(|&p| p > 0.0)))
    }

    /// Row index into node `k`'s CPT for the given full configuration.
    fn cpt_row(&self, k: usize, config: &[u16]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for &p in self.dag.parents(k) {
            idx += config[p] as usize * stride;
            stride *= self.supports[p];
        }
        idx
    }

    /// Fully enumerated joint distribution, capped at [`DEFAULT_STATE_CAP`]
    /// configurations.
    pub fn joint(&self) -> Result<JointDist, OracleError> {
        self.joint_capped(DEFAULT_STATE_CAP)
    }

    pub fn joint_capped(&self, cap: usize) -> Result<JointDist, OracleError> {
        let states_wide: u128 = self.supports.iter().map(|&k| k as u128).product();
        if states_wide > cap as u128 {
            return Err(OracleError::StateSpaceCap { states: states_wide, cap });
        }
        let states = states_wide as usize;
        let d = self.node_count();
        let mut probs = vec![0.0f64; states];
        // Each entry is an independent product, so parallel evaluation is
        // bit-identical to the sequential one.
        let chunk = 1usize << 14;
        rayon::scope(|s| {
            for (ci, block) in probs.chunks_mut(chunk).enumerate() {
                let base = ci * chunk;
                let bn = &*self;
                s.spawn(move |_| {
                    let mut config = vec![0u16; d];
                    for (off, slot) in block.iter_mut().enumerate() {
                        let mut idx = base + off;
                        for (k, digit) in config.iter_mut().enumerate() {
                            *digit = (idx % bn.supports[k]) as u16;
                            idx /= bn.supports[k];
                        }
                        let mut p = 1.0f64;
                        for k in 0..d {
                            p *= bn.cpts[k].rows[bn.cpt_row(k, &config)][config[k] as usize];
                        }
                        *slot = p;
                    }
                });
            }
        });
        Ok(JointDist {
            supports: self.supports.clone(),
            probs,
        })
    }

    /// Draws `n` i.i.d. rows by forward sampling in topological order.
    /// Deterministic given `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Dataset {
        let d = self.node_count();
        let order = self.dag.topological_order().expect("dag is acyclic");
        let mut rng = seeded(seed);
        let mut values = vec![0u16; n * d];
        let mut config = vec![0u16; d];
        for i in 0..n {
            for &k in &order {
                let row = &self.cpts[k].rows[self.cpt_row(k, &config)];
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut v = row.len() - 1;
                for (j, &p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        v = j;
                        break;
                    }
                }
                config[k] = v as u16;
            }
            values[i * d..(i + 1) * d].copy_from_slice(&config);
        }
        Dataset::new(values, d, self.supports.clone()).expect("sampled values are in support")
    }

    /// Serializes to the network text format. Probabilities are printed
    /// with 17 significant digits and round-trip bit-exactly.
    pub fn to_text(&self) -> String {
        let mut s = format!("bn d={}\n", self.node_count());
        let _ = write!(s, "supports");
        for k in &self.supports {
            let _ = write!(s, " {}", k);
        }
        s.push('\n');
        let edges = self.dag.edges();
        let _ = writeln!(s, "edges {}", edges.len());
        for (u, v) in edges {
            let _ = writeln!(s, "{} {}", u, v);
        }
        for k in 0..self.node_count() {
            let _ = writeln!(s, "cpt {}", k);
            for row in &self.cpts[k].rows {
                let cells: Vec<String> = row.iter().map(|p| format!("{:.16e}", p)).collect();
                s.push_str(&cells.join(" "));
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, OracleError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let parse_err = |m: String| OracleError::Parse(m);
        let header = lines.next().ok_or_else(|| parse_err("empty input".into()))?;
        let d: usize = header
            .trim()
            .strip_prefix("bn d=")
            .ok_or_else(|| parse_err(format!("expected 'bn d=<int>', got '{header}'")))?
            .parse()
            .map_err(|e| parse_err(format!("bad node count: {e}")))?;
        let sup_line = lines.next().ok_or_else(|| parse_err("missing supports".into()))?;
        let supports: Vec<usize> = sup_line
            .trim()
            .strip_prefix("supports")
            .ok_or_else(|| parse_err("missing 'supports' line".into()))?
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(format!("bad support: {e}")))?;
        let edge_line = lines.next().ok_or_else(|| parse_err("missing edges".into()))?;
        let n_edges: usize = edge_line
            .trim()
            .strip_prefix("edges")
            .ok_or_else(|| parse_err("missing 'edges' line".into()))?
            .trim()
            .parse()
            .map_err(|e| parse_err(format!("bad edge count: {e}")))?;
        let mut edges = Vec::with_capacity(n_edges);
        for _ in 0..n_edges {
            let line = lines.next().ok_or_else(|| parse_err("truncated edge list".into()))?;
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .ok_or_else(|| parse_err(format!("bad edge '{line}'")))?
                .parse()
                .map_err(|e| parse_err(format!("{e}")))?;
            let v: usize = it
                .next()
                .ok_or_else(|| parse_err(format!("bad edge '{line}'")))?
                .parse()
                .map_err(|e| parse_err(format!("{e}")))?;
            edges.push((u, v));
        }
        let dag = Dag::new(d, &edges)?;
        let mut cpts = Vec::with_capacity(d);
        for k in 0..d {
            let head = lines.next().ok_or_else(|| parse_err(format!("missing cpt {k}")))?;
            if head.trim() != format!("cpt {k}") {
                return Err(parse_err(format!("expected 'cpt {k}', got '{head}'")));
            }
            let n_rows: usize = dag.parents(k).iter().map(|&p| supports[p]).product();
            let mut rows = Vec::with_capacity(n_rows);
            for _ in 0..n_rows {
                let line = lines.next().ok_or_else(|| parse_err(format!("truncated cpt {k}")))?;
                let row: Vec<f64> = line
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|e| parse_err(format!("bad probability: {e}")))?;
                rows.push(row);
            }
            cpts.push(Cpt { rows });
        }
        TabularBN::new(dag, supports, cpts)
    }
}

/// Dense joint probability table indexed by mixed-radix configuration
/// codes (node 0 fastest-varying).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    supports: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDist {
    /// Builds a joint from raw probabilities; entries must be
    /// non-negative and sum to 1 within 1e-10.
    pub fn new(supports: Vec<usize>, probs: Vec<f64>) -> Result<Self, OracleError> {
        let states: usize = supports.iter().product();
        if probs.len() != states {
            return Err(OracleError::Parse(format!(
                "{} probabilities for {} states",
                probs.len(),
                states
            )));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(OracleError::Parse("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(OracleError::Parse(format!("total mass {total}")));
        }
        Ok(JointDist { supports, probs })
    }

    pub fn num_vars(&self) -> usize {
        self.supports.len()
    }

    pub fn supports(&self) -> &[usize] {
        &self.supports
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// Marginal table over the set `s` (deduplicated, ascending order of
    /// node index defines the digit order of the result).
    pub fn marginal(&self, s: &[usize]) -> Vec<f64> {
        let s = normalize_set(s);
        let m_states: usize = s.iter().map(|&k| self.supports[k]).product();
        let mut strides = Vec::with_capacity(s.len());
        let mut acc = 1usize;
        for &k in &s {
            let mut st = 1usize;
            for j in 0..k {
                st *= self.supports[j];
            }
            strides.push((st, self.supports[k], acc));
            acc *= self.supports[k];
        }
        let mut out = vec![0.0f64; m_states];
        for (idx, &p) in self.probs.iter().enumerate() {
            let mut m_idx = 0usize;
            for &(st, sup, m_st) in &strides {
                m_idx += ((idx / st) % sup) * m_st;
            }
            out[m_idx] += p;
        }
        out
    }

    /// Shannon entropy of the marginal over `s`, in nats. `0 ln 0 = 0`.
    pub fn entropy(&self, s: &[usize]) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        let marg = self.marginal(s);
        -marg
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// Conditional entropy `H(k | a) = H(k ∪ a) - H(a)`, clamped to be
    /// non-negative. Inputs are treated as sets; overlaps are absorbed
    /// by the union.
    pub fn cond_entropy(&self, k: &[usize], a: &[usize]) -> f64 {
        let ka = union(k, a);
        (self.entropy(&ka) - self.entropy(a)).max(0.0)
    }

    /// Conditional mutual information
    /// `I(k; l | a) = H(k ∪ a) + H(l ∪ a) - H(k ∪ l ∪ a) - H(a)`,
    /// clamped to be non-negative. With `k = l` this is the conditional
    /// entropy of `k` given `a` (self-information).
    pub fn cmi(&self, k: &[usize], l: &[usize], a: &[usize]) -> f64 {
        let ka = union(k, a);
        let la = union(l, a);
        let kla = union(&ka, l);
        (self.entropy(&ka) + self.entropy(&la) - self.entropy(&kla) - self.entropy(a)).max(0.0)
    }

    /// Exact Markov boundary of `k` within the candidate set `s`: the
    /// smallest `m ⊆ s` with `I(k; s∖m | m) = 0` (tolerance
    /// [`ZERO_TOL`]), searched by subset size then lexicographically.
    ///
    /// Unique when the joint is strictly positive; otherwise the
    /// deterministic search order picks one minimal blanket and a
    /// warning is logged.
    pub fn markov_boundary(&self, k: usize, s: &[usize]) -> Result<Vec<usize>, OracleError> {
        self.markov_boundary_capped(k, s, DEFAULT_BOUNDARY_CAP)
    }

    pub fn markov_boundary_capped(
        &self,
        k: usize,
        s: &[usize],
        cap: usize,
    ) -> Result<Vec<usize>, OracleError> {
        let s = normalize_set(s);
        if s.contains(&k) {
            return Err(OracleError::TargetInCandidates(k));
        }
        if s.len() > cap {
            return Err(OracleError::BoundaryCap(s.len(), cap));
        }
        if !self.strictly_positive() {
            log::warn!(
                "markov_boundary: joint is not strictly positive; boundary may be non-unique"
            );
        }
        let target = [k];
        for size in 0..=s.len() {
            let mut found: Option<Vec<usize>> = None;
            for_each_combination(&s, size, &mut |m| {
                if found.is_some() {
                    return;
                }
                let rest: Vec<usize> = s.iter().copied().filter(|v| !m.contains(v)).collect();
                if self.cmi(&target, &rest, m) <= ZERO_TOL {
                    found = Some(m.to_vec());
                }
            });
            if let Some(m) = found {
                return Ok(m);
            }
        }
        unreachable!("m = s always satisfies the boundary test");
    }

    /// Minimal I-map for the given node ordering: parents of each node
    /// are its Markov boundary within its predecessors.
    pub fn minimal_imap(&self, ordering: &[usize]) -> Result<Dag, OracleError> {
        let d = self.num_vars();
        let mut seen = vec![false; d];
        if ordering.len() != d || !ordering.iter().all(|&k| k < d && !std::mem::replace(&mut seen[k], true)) {
            return Err(OracleError::BadOrdering);
        }
        let mut edges = Vec::new();
        for (i, &k) in ordering.iter().enumerate() {
            let preds = normalize_set(&ordering[..i]);
            for p in self.markov_boundary(k, &preds)? {
                edges.push((p, k));
            }
        }
        Ok(Dag::new(d, &edges)?)
    }
}

/// Sorted, deduplicated copy of a node set.
pub(crate) fn normalize_set(s: &[usize]) -> Vec<usize> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

pub(crate) fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    normalize_set(&v)
}

/// Calls `f` on every `size`-subset of `items` in lexicographic order.
pub(crate) fn for_each_combination(
    items: &[usize],
    size: usize,
    f: &mut impl FnMut(&[usize]),
) {
    fn rec(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        let remaining = size - cur.len();
        for i in start..=items.len().saturating_sub(remaining) {
            cur.push(items[i]);
            rec(items, size, i + 1, cur, f);
            cur.pop();
        }
    }
    if size <= items.len() {
        rec(items, size, 0, &mut Vec::with_capacity(size), f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli(p1: f64) -> TabularBN {
        TabularBN::new(
            Dag::edgeless(1),
            vec![2],
            vec![Cpt { rows: vec![vec![1.0 - p1, p1]] }],
        )
        .unwrap()
    }

    /// X1 ~ Ber(0.2); X2 = -X1 + Z2 with Z2 ~ Ber(0.1), shift-encoded to {0,1,2}.
    fn shifted_pair() -> TabularBN {
        TabularBN::new(
            Dag::new(2, &[(0, 1)]).unwrap(),
            vec![2, 3],
            vec![
                Cpt { rows: vec![vec![0.8, 0.2]] },
                Cpt {
                    rows: vec![vec![0.0, 0.9, 0.1], vec![0.9, 0.1, 0.0]],
                },
            ],
        )
        .unwrap()
    }

    /// Strictly positive chain 0 -> 1 -> 2.
    fn chain() -> TabularBN {
        TabularBN::new(
            Dag::new(3, &[(0, 1), (1, 2)]).unwrap(),
            vec![2, 2, 2],
            vec![
                Cpt { rows: vec![vec![0.7, 0.3]] },
                Cpt { rows: vec![vec![0.8, 0.2], vec![0.3, 0.7]] },
                Cpt { rows: vec![vec![0.9, 0.1], vec![0.25, 0.75]] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn joint_of_single_bernoulli() {
        let j = bernoulli(0.2).joint().unwrap();
        assert_eq!(j.probs(), &[0.8, 0.2]);
    }

    #[test]
    fn joint_of_independent_pair_is_uniform() {
        let bn = TabularBN::new(
            Dag::edgeless(2),
            vec![2, 2],
            vec![
                Cpt { rows: vec![vec![0.5, 0.5]] },
                Cpt { rows: vec![vec![0.5, 0.5]] },
            ],
        )
        .unwrap();
        let j = bn.joint().unwrap();
        for &p in j.probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn shifted_pair_marginal_matches_hand_computation() {
        let j = shifted_pair().joint().unwrap();
        let m = j.marginal(&[1]);
        assert!((m[0] - 0.18).abs() < 1e-15);
        assert!((m[1] - 0.74).abs() < 1e-15);
        assert!((m[2] - 0.08).abs() < 1e-15);
    }

    #[test]
    fn entropy_values() {
        let j = bernoulli(0.2).joint().unwrap();
        let h = j.entropy(&[0]);
        assert!((h - 0.5004024235381879).abs() < 1e-12);
        assert!((h - 0.500).abs() < 1e-3);

        // deterministic node
        let det = TabularBN::new(
            Dag::edgeless(1),
            vec![2],
            vec![Cpt { rows: vec![vec![1.0, 0.0]] }],
        )
        .unwrap();
        assert_eq!(det.joint().unwrap().entropy(&[0]), 0.0);
        assert!(!det.strictly_positive());

        // X3 = Z1 + Z3, both Ber(0.2): H = 0.778998
        let sum = TabularBN::new(
            Dag::new(2, &[(0, 1)]).unwrap(),
            vec![2, 3],
            vec![
                Cpt { rows: vec![vec![0.8, 0.2]] },
                Cpt {
                    rows: vec![vec![0.8, 0.2, 0.0], vec![0.0, 0.8, 0.2]],
                },
            ],
        )
        .unwrap();
        let h3 = sum.joint().unwrap().entropy(&[1]);
        assert!((h3 - 0.7789977492971931).abs() < 1e-12);
        assert!((h3 - 0.778).abs() < 1e-3);
    }

    #[test]
    fn cond_entropy_and_cmi() {
        let j = shifted_pair().joint().unwrap();
        // H(X2 | X1) = h(0.1)
        assert!((j.cond_entropy(&[1], &[0]) - 0.3250829733914482).abs() < 1e-12);

        // self-information: I(X;X) = H(X)
        assert!((j.cmi(&[0], &[0], &[]) - j.entropy(&[0])).abs() < 1e-15);

        // independent nodes have zero mutual information
        let ind = TabularBN::new(
            Dag::edgeless(2),
            vec![2, 2],
            vec![
                Cpt { rows: vec![vec![0.6, 0.4]] },
                Cpt { rows: vec![vec![0.3, 0.7]] },
            ],
        )
        .unwrap();
        assert!(ind.joint().unwrap().cmi(&[0], &[1], &[]) <= 1e-12);
    }

    #[test]
    fn markov_boundary_on_chain() {
        let j = chain().joint().unwrap();
        assert_eq!(j.markov_boundary(2, &[0, 1]).unwrap(), vec![1]);
        assert_eq!(j.markov_boundary(0, &[]).unwrap(), Vec::<usize>::new());
        assert!(j.markov_boundary(2, &[1, 2]).is_err());
        assert!(j.markov_boundary_capped(2, &[0, 1], 1).is_err());
    }

    #[test]
    fn minimal_imap_recovers_chain_both_ways() {
        let j = chain().joint().unwrap();
        let fwd = j.minimal_imap(&[0, 1, 2]).unwrap();
        assert_eq!(fwd.edges(), vec![(0, 1), (1, 2)]);
        let rev = j.minimal_imap(&[2, 1, 0]).unwrap();
        assert_eq!(rev.edges(), vec![(1, 0), (2, 1)]);
        assert!(j.minimal_imap(&[0, 0, 1]).is_err());

        // independent nodes: any ordering gives the edgeless graph
        let ind = TabularBN::new(
            Dag::edgeless(2),
            vec![2, 2],
            vec![
                Cpt { rows: vec![vec![0.6, 0.4]] },
                Cpt { rows: vec![vec![0.3, 0.7]] },
            ],
        )
        .unwrap();
        assert_eq!(ind.joint().unwrap().minimal_imap(&[1, 0]).unwrap().edge_count(), 0);
    }

    #[test]
    fn sampling_is_deterministic_and_consistent() {
        let bn = chain();
        let a = bn.sample(64, 7);
        let b = bn.sample(64, 7);
        assert_eq!(a, b);

        let det = TabularBN::new(
            Dag::edgeless(1),
            vec![2],
            vec![Cpt { rows: vec![vec![0.0, 1.0]] }],
        )
        .unwrap();
        let ds = det.sample(32, 1);
        assert!(ds.rows().all(|r| r == [1]));

        let freq = bernoulli(0.2)
            .sample(100_000, 11)
            .rows()
            .filter(|r| r[0] == 1)
            .count() as f64
            / 100_000.0;
        assert!((freq - 0.2).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn state_space_cap_is_enforced() {
        let bn = chain();
        assert!(matches!(
            bn.joint_capped(4),
            Err(OracleError::StateSpaceCap { .. })
        ));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let bn = chain();
        let text = bn.to_text();
        let back = TabularBN::from_text(&text).unwrap();
        assert_eq!(back, bn);
        // probabilities with no short decimal representation
        let odd = TabularBN::new(
            Dag::edgeless(1),
            vec![2],
            vec![Cpt { rows: vec![vec![1.0 - 0.1234567890123456, 0.1234567890123456]] }],
        )
        .unwrap();
        assert_eq!(TabularBN::from_text(&odd.to_text()).unwrap(), odd);
        assert!(TabularBN::from_text("garbage").is_err());
    }

    #[test]
    fn cpt_validation() {
        let bad = TabularBN::new(
            Dag::edgeless(1),
            vec![2],
            vec![Cpt { rows: vec![vec![0.5, 0.6]] }],
        );
        assert!(matches!(bad, Err(OracleError::BadCpt { .. })));
        let wrong_rows = TabularBN::new(
            Dag::new(2, &[(0, 1)]).unwrap(),
            vec![2, 2],
            vec![
                Cpt { rows: vec![vec![0.5, 0.5]] },
                Cpt { rows: vec![vec![0.5, 0.5]] },
            ],
        );
        assert!(matches!(wrong_rows, Err(OracleError::BadCpt { .. })));
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(&[1, 3, 5], 2, &mut |m| seen.push(m.to_vec()));
        assert_eq!(seen, vec![vec![1, 3], vec![1, 5], vec![3, 5]]);
    }
}
