//! Exact certification of the identifiability and greedy-search
//! conditions on enumerable tabular networks, plus the population gap
//! quantities that bound valid thresholds.
//!
//! All checks run on the exact joint; strict inequalities are certified
//! with a 1e-9 tolerance on the evaluated quantities.

use std::fmt::Write as _;

use crate::graph::{Dag, LayerDecomposition};
use crate::info::InfoSource;
use crate::oracle::{for_each_combination, JointDist, OracleError, TabularBN, ZERO_TOL};
use crate::rng::seeded;

use rand::Rng;

/// Cap on the boundary size of the exhaustive subset checks.
pub const PPS_SUBSET_CAP: usize = 12;
/// Largest dimension for which every topological ordering is enumerated.
pub const ORDERING_ENUM_CAP: usize = 7;
/// Seed of the randomized ancestral-set sampler in [`Verifier::report`].
const NONDEGENERACY_SEED: u64 = 0x5eed_ab1e;

/// Witness sets for one `(node, ancestral index)` pair: the important
/// ancestors in layer `j + 1` with strictly smaller conditional entropy
/// and positive conditional mutual information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witnesses {
    pub node: usize,
    pub j: usize,
    pub witnesses: Vec<usize>,
    /// Set when the node has no ancestor at all in layer `j + 1`. Layer
    /// decompositions never produce this; it is flagged rather than
    /// silently treated as a failure.
    pub no_layer_ancestor: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WitnessReport {
    pub pairs: Vec<Witnesses>,
}

impl WitnessReport {
    /// Every required pair has a witness.
    pub fn all_satisfied(&self) -> bool {
        self.pairs.iter().all(|p| !p.witnesses.is_empty())
    }

    pub fn witnesses_for(&self, node: usize, j: usize) -> Option<&[usize]> {
        self.pairs
            .iter()
            .find(|p| p.node == node && p.j == j)
            .map(|p| p.witnesses.as_slice())
    }
}

/// First observed violation of the greedy-search condition.
#[derive(Debug, Clone, PartialEq)]
pub struct PpsViolation {
    pub node: usize,
    pub j: usize,
    pub subset: Vec<usize>,
    pub outsider: usize,
    pub outsider_cmi: f64,
    /// Best in-boundary competitor `(node, cmi)` at that subset.
    pub best_inside: (usize, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpsCheck {
    pub ok: bool,
    pub first_violation: Option<PpsViolation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Holds,
    Fails,
    /// Dimension above [`ORDERING_ENUM_CAP`]; ordering enumeration skipped.
    NotChecked,
}

/// Per-pair threshold gaps for the boundary searches at `(k, A_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGaps {
    pub node: usize,
    pub j: usize,
    /// Half the minimum CMI a boundary member contributes at any partial
    /// subset.
    pub xi: f64,
    /// Worst-case margin between the best in-boundary and best outside
    /// candidate; `None` when the ancestral set has no outside nodes.
    pub delta_tilde: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Gaps {
    /// Minimum entropy gap of the selected witnesses.
    pub delta: Option<f64>,
    /// Minimum witness CMI.
    pub eta: Option<f64>,
    pub xi_min: Option<f64>,
    pub delta_tilde_min: Option<f64>,
    pub per_pair: Vec<PairGaps>,
    /// `(node, j)` pairs whose witness set is empty, making the global
    /// gaps undefined there.
    pub undefined_pairs: Vec<(usize, usize)>,
}

/// Complete certification record for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub d: usize,
    pub strictly_positive: bool,
    pub condition1: WitnessReport,
    pub condition1_general: WitnessReport,
    pub pps: PpsCheck,
    pub nondegenerate: bool,
    pub equal_entropy: bool,
    /// Mean conditional entropy given parents (the common value when
    /// `equal_entropy` holds).
    pub equal_entropy_h: f64,
    pub unequal_entropy: CheckStatus,
    pub gaps: Gaps,
}

impl ConditionReport {
    /// Certified for exact layer-wise recovery: positivity plus the
    /// identifiability and greedy-search conditions.
    pub fn certified(&self) -> bool {
        self.strictly_positive && self.condition1.all_satisfied() && self.pps.ok
    }

    /// Key/value text rendering, nested by node and ancestral index.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| match v {
            Some(x) => format!("{:.16e}", x),
            None => "n/a".to_string(),
        };
        let mut s = String::new();
        let _ = writeln!(s, "report d={}", self.d);
        let _ = writeln!(s, "strictly_positive: {}", self.strictly_positive);
        let _ = writeln!(s, "condition1: {}", self.condition1.all_satisfied());
        for p in &self.condition1.pairs {
            let w = if p.witnesses.is_empty() {
                "(none)".to_string()
            } else {
                p.witnesses.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
            };
            let _ = writeln!(s, "witness j={} k={}: {}", p.j, p.node, w);
        }
        let _ = writeln!(s, "condition1_general: {}", self.condition1_general.all_satisfied());
        for p in &self.condition1_general.pairs {
            let w = if p.witnesses.is_empty() {
                "(none)".to_string()
            } else {
                p.witnesses.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
            };
            let _ = writeln!(s, "witness_general j={} k={}: {}", p.j, p.node, w);
        }
        let _ = writeln!(s, "pps_condition: {}", self.pps.ok);
        if let Some(v) = &self.pps.first_violation {
            let _ = writeln!(
                s,
                "pps_violation j={} k={} subset=[{}] outsider={} outsider_cmi={:.16e} best_inside={} {:.16e}",
                v.j,
                v.node,
                v.subset.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                v.outsider,
                v.outsider_cmi,
                v.best_inside.0,
                v.best_inside.1,
            );
        }
        let _ = writeln!(s, "nondegenerate: {}", self.nondegenerate);
        let _ = writeln!(s, "equal_entropy: {}", self.equal_entropy);
        let _ = writeln!(s, "equal_entropy_h: {:.16e}", self.equal_entropy_h);
        let _ = writeln!(
            s,
            "unequal_entropy: {}",
            match self.unequal_entropy {
                CheckStatus::Holds => "holds",
                CheckStatus::Fails => "fails",
                CheckStatus::NotChecked => "not-checked",
            }
        );
        let _ = writeln!(s, "delta: {}", opt(self.gaps.delta));
        let _ = writeln!(s, "eta: {}", opt(self.gaps.eta));
        let _ = writeln!(s, "xi_min: {}", opt(self.gaps.xi_min));
        let _ = writeln!(s, "delta_tilde_min: {}", opt(self.gaps.delta_tilde_min));
        for p in &self.gaps.per_pair {
            let _ = writeln!(
                s,
                "gap j={} k={}: xi={:.16e} delta_tilde={}",
                p.j,
                p.node,
                p.xi,
                opt(p.delta_tilde)
            );
        }
        for (k, j) in &self.gaps.undefined_pairs {
            let _ = writeln!(s, "gap_undefined j={} k={}", j, k);
        }
        let _ = writeln!(s, "certified: {}", self.certified());
        s
    }
}

/// Certification engine over one network's exact joint.
pub struct Verifier {
    dag: Dag,
    layers: LayerDecomposition,
    info: InfoSource,
    strictly_positive: bool,
}

impl Verifier {
    pub fn new(bn: &TabularBN) -> Result<Self, OracleError> {
        let joint = bn.joint()?;
        Ok(Self::from_joint(bn.dag().clone(), joint))
    }

    pub fn from_joint(dag: Dag, joint: JointDist) -> Self {
        let strictly_positive = joint.strictly_positive();
        let layers = dag.layer_decomposition();
        let info = InfoSource::exact(joint).expect("enumerable joints stay below 64 variables");
        Verifier {
            dag,
            layers,
            info,
            strictly_positive,
        }
    }

    pub fn info(&self) -> &InfoSource {
        &self.info
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn layers(&self) -> &LayerDecomposition {
        &self.layers
    }

    /// Exhaustive boundary search through the cached source: smallest
    /// `m ⊆ s` with `I(k; s∖m | m)` at zero tolerance, by size then
    /// lexicographic order.
    pub fn boundary(&self, k: usize, s: &[usize]) -> Vec<usize> {
        let s = crate::oracle::normalize_set(s);
        for size in 0..=s.len() {
            let mut found: Option<Vec<usize>> = None;
            for_each_combination(&s, size, &mut |m| {
                if found.is_some() {
                    return;
                }
                let rest: Vec<usize> = s.iter().copied().filter(|v| !m.contains(v)).collect();
                if self.info.cmi_set(&[k], &rest, m) <= ZERO_TOL {
                    found = Some(m.to_vec());
                }
            });
            if let Some(m) = found {
                return m;
            }
        }
        unreachable!("m = s always blocks")
    }

    fn condition1_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for k in 0..self.dag.node_count() {
            let lk = self.layers.layer_of(k);
            if lk < 2 {
                continue;
            }
            for j in 0..=lk - 2 {
                pairs.push((k, j));
            }
        }
        pairs
    }

    fn layer_ancestors(&self, k: usize, j: usize) -> Vec<usize> {
        let ancestors = self.dag.ancestors(k);
        self.layers.layers()[j]
            .iter()
            .copied()
            .filter(|a| ancestors.binary_search(a).is_ok())
            .collect()
    }

    /// Per-pair witness sets for the main identifiability condition:
    /// ancestors in the next layer with strictly smaller conditional
    /// entropy and positive CMI given `A_j`.
    pub fn check_condition1(&self) -> WitnessReport {
        let mut report = WitnessReport::default();
        for (k, j) in self.condition1_pairs() {
            let aj = self.layers.ancestral_set(j);
            let an = self.layer_ancestors(k, j);
            let hk = self.info.cond_entropy(k, &aj);
            let witnesses: Vec<usize> = an
                .iter()
                .copied()
                .filter(|&i| {
                    self.info.cond_entropy(i, &aj) < hk - ZERO_TOL
                        && self.info.cmi(k, &[i], &aj) > ZERO_TOL
                })
                .collect();
            report.pairs.push(Witnesses {
                node: k,
                j,
                no_layer_ancestor: an.is_empty(),
                witnesses,
            });
        }
        report
    }

    /// Relaxed witness sets: the CMI test aggregates the candidate with
    /// every next-layer ancestor of smaller or equal conditional entropy.
    pub fn check_condition1_general(&self) -> WitnessReport {
        let mut report = WitnessReport::default();
        for (k, j) in self.condition1_pairs() {
            let aj = self.layers.ancestral_set(j);
            let an = self.layer_ancestors(k, j);
            let hk = self.info.cond_entropy(k, &aj);
            let hs: Vec<f64> = an.iter().map(|&i| self.info.cond_entropy(i, &aj)).collect();
            let witnesses: Vec<usize> = an
                .iter()
                .enumerate()
                .filter(|&(pos, &i)| {
                    if hs[pos] >= hk - ZERO_TOL {
                        return false;
                    }
                    let mut group: Vec<usize> = an
                        .iter()
                        .enumerate()
                        .filter(|&(q, &l)| l != i && hs[q] <= hs[pos])
                        .map(|(_, &l)| l)
                        .collect();
                    group.push(i);
                    group.sort_unstable();
                    self.info.cmi(k, &group, &aj) > ZERO_TOL
                })
                .map(|(_, &i)| i)
                .collect();
            report.pairs.push(Witnesses {
                node: k,
                j,
                no_layer_ancestor: an.is_empty(),
                witnesses,
            });
        }
        report
    }

    /// Greedy-search condition at one `(k, candidate-set)` pair: for
    /// every proper subset of the boundary and every outside candidate,
    /// some remaining boundary member must dominate.
    pub fn check_pps_condition_at(
        &self,
        k: usize,
        a: &[usize],
    ) -> Result<Option<PpsViolation>, OracleError> {
        let a = crate::oracle::normalize_set(a);
        let mb = self.boundary(k, &a);
        if mb.len() > PPS_SUBSET_CAP {
            return Err(OracleError::BoundaryCap(mb.len(), PPS_SUBSET_CAP));
        }
        let outsiders: Vec<usize> = a.iter().copied().filter(|v| !mb.contains(v)).collect();
        if mb.is_empty() || outsiders.is_empty() {
            return Ok(None);
        }
        let mut violation: Option<PpsViolation> = None;
        for size in 0..mb.len() {
            if violation.is_some() {
                break;
            }
            for_each_combination(&mb, size, &mut |m| {
                if violation.is_some() {
                    return;
                }
                let best = mb
                    .iter()
                    .copied()
                    .filter(|c| !m.contains(c))
                    .map(|c| (c, self.info.cmi(k, &[c], m)))
                    .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite"))
                    .expect("proper subset leaves a member");
                for &l in &outsiders {
                    let out = self.info.cmi(k, &[l], m);
                    if best.1 <= out + ZERO_TOL {
                        violation = Some(PpsViolation {
                            node: k,
                            j: 0, // filled by the caller
                            subset: m.to_vec(),
                            outsider: l,
                            outsider_cmi: out,
                            best_inside: best,
                        });
                        return;
                    }
                }
            });
        }
        Ok(violation)
    }

    /// Greedy-search condition at every `(k, A_j)` pair.
    pub fn check_pps_condition(&self) -> Result<PpsCheck, OracleError> {
        for j in 1..self.layers.depth() {
            let aj = self.layers.ancestral_set(j);
            for k in 0..self.dag.node_count() {
                if self.layers.layer_of(k) <= j {
                    continue;
                }
                if let Some(mut v) = self.check_pps_condition_at(k, &aj)? {
                    v.j = j;
                    return Ok(PpsCheck {
                        ok: false,
                        first_violation: Some(v),
                    });
                }
            }
        }
        Ok(PpsCheck {
            ok: true,
            first_violation: None,
        })
    }

    /// Nondegeneracy: positive CMI between each node and its missing
    /// parents given every canonical ancestral set and `extra` sampled
    /// ancestral sets.
    pub fn check_nondegeneracy(&self, extra: usize, seed: u64) -> bool {
        let d = self.dag.node_count();
        let mut sets: Vec<Vec<usize>> = (0..self.layers.depth())
            .map(|j| self.layers.ancestral_set(j))
            .collect();
        let mut rng = seeded(seed);
        for _ in 0..extra {
            let t = rng.gen_range(0..=d);
            let mut set: Vec<usize> = Vec::new();
            for _ in 0..t {
                let k = rng.gen_range(0..d);
                set.push(k);
                set.extend(self.dag.ancestors(k));
            }
            sets.push(crate::oracle::normalize_set(&set));
        }
        sets.sort();
        sets.dedup();
        for a in &sets {
            for k in 0..d {
                if a.binary_search(&k).is_ok() {
                    continue;
                }
                let missing: Vec<usize> = self
                    .dag
                    .parents(k)
                    .iter()
                    .copied()
                    .filter(|p| a.binary_search(p).is_err())
                    .collect();
                if missing.is_empty() {
                    continue;
                }
                if self.info.cmi_set(&[k], &missing, a) <= ZERO_TOL {
                    return false;
                }
            }
        }
        true
    }

    /// Whether every node's conditional entropy given its parents equals
    /// a common value, returned alongside the mean.
    pub fn check_equal_entropy(&self) -> (bool, f64) {
        let d = self.dag.node_count();
        let hs: Vec<f64> = (0..d)
            .map(|k| self.info.cond_entropy(k, self.dag.parents(k)))
            .collect();
        let mean = hs.iter().sum::<f64>() / d as f64;
        let equal = hs.iter().all(|&h| (h - mean).abs() <= ZERO_TOL);
        (equal, mean)
    }

    /// Ordering-based relaxation: some topological ordering satisfies
    /// the per-position entropy inequalities. Enumerated only for
    /// `d <= ORDERING_ENUM_CAP`.
    pub fn check_unequal_entropy(&self) -> CheckStatus {
        let d = self.dag.node_count();
        if d > ORDERING_ENUM_CAP {
            return CheckStatus::NotChecked;
        }
        let hs: Vec<f64> = (0..d)
            .map(|k| self.info.cond_entropy(k, self.dag.parents(k)))
            .collect();
        let mut perm: Vec<usize> = (0..d).collect();
        let found = self.search_orderings(&mut perm, 0, &hs);
        if found {
            CheckStatus::Holds
        } else {
            CheckStatus::Fails
        }
    }

    fn ordering_is_topological(&self, perm: &[usize]) -> bool {
        let mut pos = vec![0usize; perm.len()];
        for (i, &k) in perm.iter().enumerate() {
            pos[k] = i;
        }
        self.dag
            .edges()
            .into_iter()
            .all(|(u, v)| pos[u] < pos[v])
    }

    fn ordering_satisfies(&self, perm: &[usize], hs: &[f64]) -> bool {
        for idx in 0..perm.len() {
            let k = perm[idx];
            let prefix = &perm[..idx];
            for &l in &perm[idx + 1..] {
                let same_layer = self.layers.layer_of(k) == self.layers.layer_of(l);
                if same_layer && (hs[k] - hs[l]).abs() <= ZERO_TOL {
                    continue;
                }
                let extra: Vec<usize> = self
                    .dag
                    .parents(l)
                    .iter()
                    .copied()
                    .filter(|p| !prefix.contains(p))
                    .collect();
                let slack = if extra.is_empty() {
                    0.0
                } else {
                    self.info.cmi_set(&[l], &extra, prefix)
                };
                if hs[k] + ZERO_TOL >= hs[l] + slack {
                    return false;
                }
            }
        }
        true
    }

    fn search_orderings(&self, perm: &mut Vec<usize>, from: usize, hs: &[f64]) -> bool {
        if from == perm.len() {
            return self.ordering_is_topological(perm) && self.ordering_satisfies(perm, hs);
        }
        for i in from..perm.len() {
            perm.swap(from, i);
            if self.search_orderings(perm, from + 1, hs) {
                return true;
            }
            perm.swap(from, i);
        }
        false
    }

    /// Population gap quantities. The witness choice for the entropy and
    /// CMI gaps maximizes, per pair, the smaller of the two; the global
    /// values are minima over pairs.
    pub fn compute_gaps(&self) -> Gaps {
        let mut gaps = Gaps::default();
        // Witness-driven gaps.
        let mut delta = f64::INFINITY;
        let mut eta = f64::INFINITY;
        let mut any = false;
        for (k, j) in self.condition1_pairs() {
            let aj = self.layers.ancestral_set(j);
            let an = self.layer_ancestors(k, j);
            let hk = self.info.cond_entropy(k, &aj);
            let mut best: Option<(f64, f64)> = None; // (gap, cmi), max by min(gap, cmi)
            for &i in &an {
                let gap = hk - self.info.cond_entropy(i, &aj);
                let c = self.info.cmi(k, &[i], &aj);
                if gap > ZERO_TOL && c > ZERO_TOL {
                    let score = gap.min(c);
                    if best.is_none_or(|(g, cc)| score > g.min(cc)) {
                        best = Some((gap, c));
                    }
                }
            }
            match best {
                Some((g, c)) => {
                    delta = delta.min(g);
                    eta = eta.min(c);
                    any = true;
                }
                None => gaps.undefined_pairs.push((k, j)),
            }
        }
        if any {
            gaps.delta = Some(delta);
            gaps.eta = Some(eta);
        }

        // Boundary-search gaps at every (k, A_j).
        let mut xi_min = f64::INFINITY;
        let mut dt_min = f64::INFINITY;
        let (mut any_xi, mut any_dt) = (false, false);
        for j in 1..self.layers.depth() {
            let aj = self.layers.ancestral_set(j);
            for k in 0..self.dag.node_count() {
                if self.layers.layer_of(k) <= j {
                    continue;
                }
                let mb = self.boundary(k, &aj);
                if mb.is_empty() || mb.len() > PPS_SUBSET_CAP {
                    continue;
                }
                let outsiders: Vec<usize> =
                    aj.iter().copied().filter(|v| !mb.contains(v)).collect();
                let mut xi = f64::INFINITY;
                let mut dt: Option<f64> = if outsiders.is_empty() {
                    None
                } else {
                    Some(f64::INFINITY)
                };
                for size in 0..mb.len() {
                    for_each_combination(&mb, size, &mut |m| {
                        let inside: Vec<f64> = mb
                            .iter()
                            .copied()
                            .filter(|c| !m.contains(c))
                            .map(|c| self.info.cmi(k, &[c], m))
                            .collect();
                        let min_in = inside.iter().copied().fold(f64::INFINITY, f64::min);
                        let max_in = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        xi = xi.min(min_in / 2.0);
                        if let Some(cur) = dt {
                            let max_out = outsiders
                                .iter()
                                .map(|&l| self.info.cmi(k, &[l], m))
                                .fold(f64::NEG_INFINITY, f64::max);
                            dt = Some(cur.min(max_in - max_out));
                        }
                    });
                }
                xi_min = xi_min.min(xi);
                any_xi = true;
                if let Some(v) = dt {
                    dt_min = dt_min.min(v);
                    any_dt = true;
                }
                gaps.per_pair.push(PairGaps {
                    node: k,
                    j,
                    xi,
                    delta_tilde: dt,
                });
            }
        }
        if any_xi {
            gaps.xi_min = Some(xi_min);
        }
        if any_dt {
            gaps.delta_tilde_min = Some(dt_min);
        }
        gaps
    }

    /// Runs every check with default caps and assembles the report.
    pub fn report(&self) -> Result<ConditionReport, OracleError> {
        let (equal, h) = self.check_equal_entropy();
        Ok(ConditionReport {
            d: self.dag.node_count(),
            strictly_positive: self.strictly_positive,
            condition1: self.check_condition1(),
            condition1_general: self.check_condition1_general(),
            pps: self.check_pps_condition()?,
            nondegenerate: self.check_nondegeneracy(100, NONDEGENERACY_SEED),
            equal_entropy: equal,
            equal_entropy_h: h,
            unequal_entropy: self.check_unequal_entropy(),
            gaps: self.compute_gaps(),
        })
    }
}
