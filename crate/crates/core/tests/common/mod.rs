//! Shared test oracles: brute-force d-separation by trail enumeration,
//! random positive networks, and the certified-fixture ensemble used by
//! the population-level recovery tests.

#![allow(dead_code)]

use tam_core::graph::Dag;
use tam_core::oracle::TabularBN;
use tam_core::rng::{derive_seed, splitmix64};
use tam_core::synth::{compile_add, compile_mod, gen_er, gen_polytree, random_cpts};
use tam_core::verify::{Gaps, Verifier};

/// Trail-enumeration d-separation oracle for graphs with few nodes.
/// Walks every simple skeleton path between the sets and checks the
/// activation rule directly: a collider is open iff it or a descendant
/// is conditioned on, any other interior node must be unconditioned.
pub fn d_separated_brute(g: &Dag, a: &[usize], b: &[usize], c: &[usize]) -> bool {
    let d = g.node_count();
    assert!(d <= 8, "trail enumeration is for small graphs");
    let mut in_c = vec![false; d];
    for &k in c {
        in_c[k] = true;
    }
    let opens: Vec<bool> = (0..d)
        .map(|k| in_c[k] || g.descendants(k).iter().any(|&v| in_c[v]))
        .collect();
    let in_b = {
        let mut m = vec![false; d];
        for &k in b {
            m[k] = true;
        }
        m
    };

    fn active(g: &Dag, path: &[usize], in_c: &[bool], opens: &[bool]) -> bool {
        for i in 1..path.len() - 1 {
            let (prev, cur, next) = (path[i - 1], path[i], path[i + 1]);
            let collider = g.has_edge(prev, cur) && g.has_edge(next, cur);
            if collider {
                if !opens[cur] {
                    return false;
                }
            } else if in_c[cur] {
                return false;
            }
        }
        true
    }

    fn dfs(
        g: &Dag,
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        in_b: &[bool],
        in_c: &[bool],
        opens: &[bool],
    ) -> bool {
        let last = *path.last().unwrap();
        if in_b[last] {
            return active(g, path, in_c, opens);
        }
        let neighbors: Vec<usize> = g
            .parents(last)
            .iter()
            .chain(g.children(last))
            .copied()
            .collect();
        for next in neighbors {
            if on_path[next] {
                continue;
            }
            path.push(next);
            on_path[next] = true;
            if dfs(g, path, on_path, in_b, in_c, opens) {
                return true;
            }
            on_path[next] = false;
            path.pop();
        }
        false
    }

    for &x in a {
        let mut path = vec![x];
        let mut on_path = vec![false; d];
        on_path[x] = true;
        if dfs(g, &mut path, &mut on_path, &in_b, &in_c, &opens) {
            return false;
        }
    }
    true
}

/// Random DAG with roughly `1.3 d` edges and strictly positive random
/// CPTs over mixed supports.
pub fn random_positive_bn(d: usize, seed: u64) -> TabularBN {
    let dag = gen_er(d, 1.3 * d as f64, splitmix64(seed));
    let supports: Vec<usize> = (0..d)
        .map(|k| if (seed as usize + k).is_multiple_of(3) { 3 } else { 2 })
        .collect();
    random_cpts(&dag, &supports, 0.05, splitmix64(seed ^ 0xD1CE)).unwrap()
}

/// A network certified for exact layer-wise recovery, with the gap
/// quantities that bound its valid thresholds.
pub struct Certified {
    pub bn: TabularBN,
    pub verifier: Verifier,
    pub gaps: Gaps,
    /// Minimum CMI a boundary member contributes against the rest of the
    /// ancestral set; half of it is a safe backward-phase threshold.
    pub backward_min: f64,
}

/// Minimum over `(j, k, member)` of `I(member; k | A_j \ member)`.
fn backward_gap(v: &Verifier) -> f64 {
    let mut min = f64::INFINITY;
    let layers = v.layers();
    for j in 1..layers.depth() {
        let aj = layers.ancestral_set(j);
        for k in 0..v.dag().node_count() {
            if layers.layer_of(k) <= j {
                continue;
            }
            for &m in &v.boundary(k, &aj) {
                let rest: Vec<usize> = aj.iter().copied().filter(|&x| x != m).collect();
                min = min.min(v.info().cmi(k, &[m], &rest));
            }
        }
    }
    min
}

/// True when parents and ancestral Markov boundaries coincide, i.e. the
/// generating DAG is the minimal I-map the learner targets.
fn boundaries_match_parents(v: &Verifier) -> bool {
    let layers = v.layers();
    for k in 0..v.dag().node_count() {
        let lk = layers.layer_of(k);
        if lk < 2 {
            continue;
        }
        let aj = layers.ancestral_set(lk - 1);
        if v.boundary(k, &aj) != v.dag().parents(k) {
            return false;
        }
    }
    true
}

/// Draws random strictly positive networks (polytree and ER graphs;
/// MOD, ADD and free random CPTs) and keeps those the verifier
/// certifies with comfortably positive gaps. Panics if `max_attempts`
/// draws cannot produce `target` fixtures.
pub fn certified_ensemble(target: usize, max_attempts: usize, base: u64) -> Vec<Certified> {
    const GAP_FLOOR: f64 = 1e-7;
    let mut out = Vec::with_capacity(target);
    for attempt in 0..max_attempts {
        if out.len() >= target {
            break;
        }
        let seed = derive_seed(base, 0xF1C, attempt as u64, 0);
        let d = 3 + (attempt % 5);
        let dag = if attempt % 2 == 0 {
            gen_polytree(d, seed)
        } else {
            gen_er(d, d as f64, seed)
        };
        let bn = match attempt % 4 {
            0 => compile_mod(&dag, 0.2).unwrap(),
            1 => compile_add(&dag, 0.25).unwrap(),
            2 => random_cpts(&dag, &vec![2; d], 0.05, seed ^ 0xC0).unwrap(),
            _ => {
                let supports: Vec<usize> =
                    (0..d).map(|k| if k % 2 == 0 { 3 } else { 2 }).collect();
                random_cpts(&dag, &supports, 0.05, seed ^ 0xC1).unwrap()
            }
        };
        if !bn.strictly_positive() {
            continue;
        }
        let verifier = Verifier::new(&bn).unwrap();
        if !verifier.check_condition1().all_satisfied() {
            continue;
        }
        if !verifier.check_pps_condition().unwrap().ok {
            continue;
        }
        let gaps = verifier.compute_gaps();
        let wide = |v: Option<f64>| v.is_none_or(|x| x > GAP_FLOOR);
        if !(wide(gaps.delta) && wide(gaps.eta) && wide(gaps.xi_min) && wide(gaps.delta_tilde_min))
        {
            continue;
        }
        if !gaps.undefined_pairs.is_empty() {
            continue;
        }
        let backward_min = backward_gap(&verifier);
        if backward_min <= GAP_FLOOR && backward_min.is_finite() {
            continue;
        }
        if !boundaries_match_parents(&verifier) {
            continue;
        }
        out.push(Certified {
            bn,
            verifier,
            gaps,
            backward_min,
        });
    }
    assert!(
        out.len() >= target,
        "only {} of {} certified fixtures found",
        out.len(),
        target
    );
    out
}

/// Thresholds the certification licenses: `omega = eta / 2`,
/// `kappa = xi_min`.
pub fn certified_thresholds(c: &Certified) -> (f64, f64) {
    let omega = c.gaps.eta.map_or(1e-4, |e| e / 2.0);
    let kappa = c.gaps.xi_min.map_or(1e-6, |x| x);
    (omega, kappa)
}
