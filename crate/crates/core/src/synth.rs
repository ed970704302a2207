//! Random graph generators, the MOD/ADD structural-equation models
//! compiled to tabular networks, and named analysis fixtures.
//!
//! Signed-valued fixture variables are shift-encoded to non-negative
//! supports (entropies are invariant to relabeling); the shift is noted
//! per fixture below.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Dag;
use crate::oracle::{Cpt, OracleError, TabularBN};
use crate::rng::seeded;

use thiserror::Error;

/// Maximum per-node support size the ADD compiler accepts.
pub const ADD_SUPPORT_CAP: usize = 64;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid parameter: {0}")]
    BadParam(String),
    #[error("node {node} needs support {support}, above the cap {cap}")]
    SupportCap { node: usize, support: usize, cap: usize },
    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Random-graph family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Tree,
    Er,
    Sf,
}

/// Structural-equation model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Mod,
    Add,
}

impl std::fmt::Display for GraphKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraphKind::Tree => "tree",
            GraphKind::Er => "er",
            GraphKind::Sf => "sf",
        })
    }
}

impl FromStr for GraphKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tree" => Ok(GraphKind::Tree),
            "er" => Ok(GraphKind::Er),
            "sf" => Ok(GraphKind::Sf),
            other => Err(format!("unknown graph kind '{other}' (tree|er|sf)")),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Mod => "mod",
            ModelKind::Add => "add",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mod" => Ok(ModelKind::Mod),
            "add" => Ok(ModelKind::Add),
            other => Err(format!("unknown model kind '{other}' (mod|add)")),
        }
    }
}

/// Uniformly random labeled tree (decoded from a random Prüfer
/// sequence) with each edge oriented by an independent fair coin.
pub fn gen_polytree(d: usize, seed: u64) -> Dag {
    let mut rng = seeded(seed);
    if d <= 1 {
        return Dag::edgeless(d);
    }
    let undirected: Vec<(usize, usize)> = if d == 2 {
        vec![(0, 1)]
    } else {
        let seq: Vec<usize> = (0..d - 2).map(|_| rng.gen_range(0..d)).collect();
        let mut degree = vec![1usize; d];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut leaves: BTreeSet<usize> =
            (0..d).filter(|&k| degree[k] == 1).collect();
        let mut edges = Vec::with_capacity(d - 1);
        for &s in &seq {
            let leaf = *leaves.iter().next().expect("a tree always has a leaf");
            leaves.remove(&leaf);
            edges.push((leaf, s));
            degree[s] -= 1;
            if degree[s] == 1 {
                leaves.insert(s);
            }
        }
        let mut it = leaves.iter();
        let (&u, &v) = (it.next().unwrap(), it.next().unwrap());
        edges.push((u, v));
        edges
    };
    let oriented: Vec<(usize, usize)> = undirected
        .into_iter()
        .map(|(u, v)| if rng.gen::<bool>() { (u, v) } else { (v, u) })
        .collect();
    Dag::new(d, &oriented).expect("tree orientation is always acyclic")
}

/// Erdős–Rényi DAG: a uniformly random permutation fixes the topological
/// order and each of the `C(d,2)` order-respecting edges is included
/// independently with probability `expected_edges / C(d,2)`.
pub fn gen_er(d: usize, expected_edges: f64, seed: u64) -> Dag {
    let mut rng = seeded(seed);
    if d < 2 {
        return Dag::edgeless(d);
    }
    let pairs = (d * (d - 1) / 2) as f64;
    let mut p = expected_edges / pairs;
    if p > 1.0 {
        log::warn!("gen_er: edge probability {p:.3} clamped to 1");
        p = 1.0;
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(&mut rng);
    let mut rank = vec![0usize; d];
    for (r, &k) in order.iter().enumerate() {
        rank[k] = r;
    }
    let mut edges = Vec::new();
    for u in 0..d {
        for v in u + 1..d {
            if rng.gen::<f64>() < p {
                if rank[u] < rank[v] {
                    edges.push((u, v));
                } else {
                    edges.push((v, u));
                }
            }
        }
    }
    Dag::new(d, &edges).expect("order-respecting edges are acyclic")
}

/// Scale-free DAG by preferential attachment over a random arrival
/// order; each arriving node attaches `attach` parents among earlier
/// arrivals, edges oriented old -> new.
pub fn gen_sf(d: usize, attach: usize, seed: u64) -> Result<Dag, SynthError> {
    if attach == 0 {
        return Err(SynthError::BadParam("attach must be >= 1".into()));
    }
    let mut rng = seeded(seed);
    if d < 2 {
        return Ok(Dag::edgeless(d));
    }
    let m = attach.min(d - 1);
    if m < attach {
        log::warn!("gen_sf: attach {attach} clamped to {m} for d={d}");
    }
    let mut arrivals: Vec<usize> = (0..d).collect();
    arrivals.shuffle(&mut rng);
    let mut repeated: Vec<usize> = Vec::new();
    let mut targets: Vec<usize> = arrivals[..m].to_vec();
    let mut edges = Vec::new();
    for &new in &arrivals[m..] {
        for &t in &targets {
            edges.push((t, new));
        }
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat_n(new, m));
        let mut chosen = BTreeSet::new();
        while chosen.len() < m {
            chosen.insert(repeated[rng.gen_range(0..repeated.len())]);
        }
        targets = chosen.into_iter().collect();
    }
    Ok(Dag::new(d, &edges).expect("old->new edges are acyclic"))
}

fn check_noise(p: f64) -> Result<(), SynthError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(SynthError::BadParam(format!("noise parameter p={p} not in (0,1)")))
    }
}

/// Parity-flip model: every node is binary; for a parent configuration
/// with parity `s`, `P(X = s) = p`. Roots have `P(X = 1) = p`.
pub fn compile_mod(dag: &Dag, p: f64) -> Result<TabularBN, SynthError> {
    check_noise(p)?;
    let d = dag.node_count();
    let mut cpts = Vec::with_capacity(d);
    for k in 0..d {
        let parents = dag.parents(k);
        if parents.is_empty() {
            cpts.push(Cpt { rows: vec![vec![1.0 - p, p]] });
            continue;
        }
        let n_rows = 1usize << parents.len();
        let mut rows = Vec::with_capacity(n_rows);
        for idx in 0..n_rows {
            let parity = (idx.count_ones() & 1) as usize;
            let mut row = vec![0.0; 2];
            row[parity] = p;
            row[1 - parity] = 1.0 - p;
            rows.push(row);
        }
        cpts.push(Cpt { rows });
    }
    Ok(TabularBN::new(dag.clone(), vec![2; d], cpts)?)
}

/// Parent-sum model: `X = sum of parents + Ber(p)`. Supports propagate
/// through the topological order and are capped at [`ADD_SUPPORT_CAP`].
pub fn compile_add(dag: &Dag, p: f64) -> Result<TabularBN, SynthError> {
    check_noise(p)?;
    let d = dag.node_count();
    let order = dag.topological_order().expect("dag is acyclic");
    let mut supports = vec![0usize; d];
    for &k in &order {
        let max_sum: usize = dag.parents(k).iter().map(|&q| supports[q] - 1).sum();
        let support = max_sum + 2;
        if support > ADD_SUPPORT_CAP {
            return Err(SynthError::SupportCap { node: k, support, cap: ADD_SUPPORT_CAP });
        }
        supports[k] = support;
    }
    let mut cpts = Vec::with_capacity(d);
    for k in 0..d {
        let parents = dag.parents(k);
        let n_rows: usize = parents.iter().map(|&q| supports[q]).product();
        let mut rows = Vec::with_capacity(n_rows);
        for idx in 0..n_rows {
            let mut rest = idx;
            let mut sum = 0usize;
            for &q in parents {
                sum += rest % supports[q];
                rest /= supports[q];
            }
            let mut row = vec![0.0; supports[k]];
            row[sum] = 1.0 - p;
            row[sum + 1] = p;
            rows.push(row);
        }
        cpts.push(Cpt { rows });
    }
    Ok(TabularBN::new(dag.clone(), supports, cpts)?)
}

fn sigma(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Named analysis fixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fixture {
    /// Diamond X1->X2, X1->X3, X2->X4, X3->X4 with
    /// X1 ~ Ber(0.2), X2 = -X1 + Ber(0.1) (shifted by +1),
    /// X3 = X1 + Ber(0.2), X4 = X2 + Ber(sigma(eps*X3 + ln(1/9)))
    /// (shifted by +1). Identifiable: layer ordering and masking both
    /// see a strict signal at every step.
    ExampleC3M1 { eps: f64 },
    /// Same diamond with X4 = X2 + X3 + Ber(0.1) (shifted by +1), which
    /// makes X4 independent of X1 and breaks the masking test: the
    /// learner absorbs X4 into the first layer.
    ExampleC3M2,
    /// Z -> X_i -> Y for i = 1..paths with logistic effects arranged so
    /// the paths cancel exactly: I(Z;Y) = 0 while every X_i carries
    /// signal to Y.
    PathCancel { paths: usize },
    /// W -> X, Z -> X, X -> Y, Z -> Y with the direct Z -> Y effect
    /// cancelled through the mediated path, so Z and Y are marginally
    /// independent despite the edge.
    DiscreteUnfaithful,
}

pub const DEFAULT_M1_EPS: f64 = 0.01;

/// Builds a named fixture.
pub fn fixture(f: Fixture) -> Result<TabularBN, SynthError> {
    match f {
        Fixture::ExampleC3M1 { eps } => example_c3(Some(eps)),
        Fixture::ExampleC3M2 => example_c3(None),
        Fixture::PathCancel { paths } => path_cancel(paths),
        Fixture::DiscreteUnfaithful => discrete_unfaithful(),
    }
}

/// Parses fixture names as used by the CLI: `example-c3-m1[:eps]`,
/// `example-c3-m2`, `path-cancel:<n>`, `discrete-unfaithful`.
pub fn fixture_by_name(name: &str) -> Result<TabularBN, SynthError> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let parse_f64 = |a: Option<&str>, default: f64| -> Result<f64, SynthError> {
        a.map_or(Ok(default), |s| {
            s.parse().map_err(|e| SynthError::BadParam(format!("'{s}': {e}")))
        })
    };
    match base {
        "example-c3-m1" => fixture(Fixture::ExampleC3M1 { eps: parse_f64(arg, DEFAULT_M1_EPS)? }),
        "example-c3-m2" => fixture(Fixture::ExampleC3M2),
        "path-cancel" => {
            let paths: usize = arg
                .unwrap_or("2")
                .parse()
                .map_err(|e| SynthError::BadParam(format!("{e}")))?;
            fixture(Fixture::PathCancel { paths })
        }
        "discrete-unfaithful" => fixture(Fixture::DiscreteUnfaithful),
        _ => Err(SynthError::UnknownFixture(name.to_string())),
    }
}

fn example_c3(m1_eps: Option<f64>) -> Result<TabularBN, SynthError> {
    let dag = Dag::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).expect("diamond");
    // X2 stored = (-X1 + Z2) + 1 over {0,1,2}; X3 = X1 + Z3 over {0,1,2}.
    let x1 = Cpt { rows: vec![vec![0.8, 0.2]] };
    let x2 = Cpt {
        rows: vec![vec![0.0, 0.9, 0.1], vec![0.9, 0.1, 0.0]],
    };
    let x3 = Cpt {
        rows: vec![vec![0.8, 0.2, 0.0], vec![0.0, 0.8, 0.2]],
    };
    match m1_eps {
        Some(eps) => {
            // X4 stored = X2_stored + Ber(q(X3)) over {0..3}, q = sigma(eps*x3 + ln(1/9)).
            let beta0 = (0.1f64 / 0.9).ln();
            let mut rows = Vec::with_capacity(9);
            for idx in 0..9 {
                let (s2, s3) = (idx % 3, idx / 3);
                let q = sigma(eps * s3 as f64 + beta0);
                let mut row = vec![0.0; 4];
                row[s2] = 1.0 - q;
                row[s2 + 1] = q;
                rows.push(row);
            }
            Ok(TabularBN::new(dag, vec![2, 3, 3, 4], vec![x1, x2, x3, Cpt { rows }])?)
        }
        None => {
            // X4 stored = X2_stored + X3 + Ber(0.1) over {0..5}
            // (signed value -1..4 shifted by +1).
            let mut rows = Vec::with_capacity(9);
            for idx in 0..9 {
                let (s2, s3) = (idx % 3, idx / 3);
                let mut row = vec![0.0; 6];
                row[s2 + s3] = 0.9;
                row[s2 + s3 + 1] = 0.1;
                rows.push(row);
            }
            Ok(TabularBN::new(dag, vec![2, 3, 3, 6], vec![x1, x2, x3, Cpt { rows }])?)
        }
    }
}

fn path_cancel(paths: usize) -> Result<TabularBN, SynthError> {
    if paths < 2 {
        return Err(SynthError::BadParam("path-cancel needs at least 2 paths".into()));
    }
    let n = paths;
    let d = n + 2; // Z = 0, X_i = i, Y = n + 1
    let mut edges = Vec::with_capacity(2 * n);
    for i in 1..=n {
        edges.push((0, i));
        edges.push((i, n + 1));
    }
    let dag = Dag::new(d, &edges).expect("two-layer fan");
    // P(X_i = 1 | Z = z) = sigma(beta_i z + alpha_i) with the slopes a
    // cyclic shift of the intercepts: beta_i = alpha_{i+1} - alpha_i, so
    // the multiset of child parameters is the same under both values of
    // Z and the symmetric response of Y cannot see Z.
    let alphas: Vec<f64> = (0..n).map(|i| -0.4 + 0.5 * i as f64).collect();
    let betas: Vec<f64> = (0..n).map(|i| alphas[(i + 1) % n] - alphas[i]).collect();
    let (beta_y, alpha_y) = (1.2, -0.6 * n as f64 + 0.3);

    let mut cpts = Vec::with_capacity(d);
    cpts.push(Cpt { rows: vec![vec![0.5, 0.5]] });
    for i in 0..n {
        let rows = (0..2)
            .map(|z| {
                let q = sigma(betas[i] * z as f64 + alphas[i]);
                vec![1.0 - q, q]
            })
            .collect();
        cpts.push(Cpt { rows });
    }
    let mut rows = Vec::with_capacity(1 << n);
    for idx in 0..(1usize << n) {
        let s = idx.count_ones() as f64;
        let q = sigma(beta_y * s + alpha_y);
        rows.push(vec![1.0 - q, q]);
    }
    cpts.push(Cpt { rows });
    Ok(TabularBN::new(dag, vec![2; d], cpts)?)
}

fn discrete_unfaithful() -> Result<TabularBN, SynthError> {
    // W = 0, Z = 1, X = 2, Y = 3.
    let dag = Dag::new(4, &[(0, 2), (1, 2), (2, 3), (1, 3)]).expect("unfaithful motif");
    let (w0, z0) = (0.2, 0.5);
    let (e, a_w) = (-1.2, 2.2);
    let (b_x, b_z, c) = (2.4, -1.4, -0.4);

    // Solve the Z -> X slope so that P(Y=1 | Z=1) = P(Y=1 | Z=0): the
    // direct effect b_z is cancelled through the mediated path.
    let q0 = (1.0 - w0) * sigma(e) + w0 * sigma(a_w + e);
    let f0 = (1.0 - q0) * sigma(c) + q0 * sigma(b_x + c);
    let target_q1 = (f0 - sigma(b_z + c)) / (sigma(b_x + b_z + c) - sigma(b_z + c));
    let q1_of = |a_z: f64| (1.0 - w0) * sigma(a_z + e) + w0 * sigma(a_w + a_z + e);
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q1_of(mid) < target_q1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a_z = 0.5 * (lo + hi);

    let w = Cpt { rows: vec![vec![1.0 - w0, w0]] };
    let z = Cpt { rows: vec![vec![1.0 - z0, z0]] };
    // parents of X sorted: (W, Z); row index = w + 2 z
    let x_rows = (0..4)
        .map(|idx| {
            let (wv, zv) = ((idx % 2) as f64, (idx / 2) as f64);
            let q = sigma(a_w * wv + a_z * zv + e);
            vec![1.0 - q, q]
        })
        .collect();
    // parents of Y sorted: (Z, X); row index = z + 2 x
    let y_rows = (0..4)
        .map(|idx| {
            let (zv, xv) = ((idx % 2) as f64, (idx / 2) as f64);
            let q = sigma(b_x * xv + b_z * zv + c);
            vec![1.0 - q, q]
        })
        .collect();
    Ok(TabularBN::new(
        dag,
        vec![2, 2, 2, 2],
        vec![w, z, Cpt { rows: x_rows }, Cpt { rows: y_rows }],
    )?)
}

/// Three-node fixture where no single ancestor carries signal but the
/// pair does: A ~ Ber(0.2) and B ~ Ber(0.3) are parents of C with
/// I(C;A) = I(C;B) = 0 yet I(C;{A,B}) > 0, and H(A) < H(B) < H(C).
/// Only the aggregated masking test separates the layers here.
pub fn pairwise_masked_fixture() -> TabularBN {
    let dag = Dag::new(3, &[(0, 2), (1, 2)]).expect("collider");
    // P(C=1 | A, B): rows indexed a + 2b.
    let rows = vec![
        vec![0.4, 0.6],
        vec![0.1, 0.9],
        vec![0.2, 0.8],
        vec![0.9, 0.1],
    ];
    TabularBN::new(
        dag,
        vec![2, 2, 2],
        vec![
            Cpt { rows: vec![vec![0.8, 0.2]] },
            Cpt { rows: vec![vec![0.7, 0.3]] },
            Cpt { rows },
        ],
    )
    .expect("fixture tables are valid")
}

/// Random strictly positive CPTs for `dag`: each row is Dirichlet(1,..,1)
/// squashed linearly so every entry is at least `floor`.
pub fn random_cpts(
    dag: &Dag,
    supports: &[usize],
    floor: f64,
    seed: u64,
) -> Result<TabularBN, SynthError> {
    let d = dag.node_count();
    if supports.len() != d {
        return Err(SynthError::BadParam(format!(
            "{} supports for {} nodes",
            supports.len(),
            d
        )));
    }
    if let Some(&k) = supports.iter().find(|&&k| floor * k as f64 >= 1.0) {
        return Err(SynthError::BadParam(format!(
            "floor {floor} too large for support {k}"
        )));
    }
    let mut rng = seeded(seed);
    let mut cpts = Vec::with_capacity(d);
    for k in 0..d {
        let n_rows: usize = dag.parents(k).iter().map(|&q| supports[q]).product();
        let kk = supports[k];
        let mut rows = Vec::with_capacity(n_rows);
        for _ in 0..n_rows {
            let mut w: Vec<f64> = (0..kk).map(|_| -rng.gen::<f64>().ln()).collect();
            let total: f64 = w.iter().sum();
            let scale = 1.0 - kk as f64 * floor;
            for v in &mut w {
                *v = floor + scale * (*v / total);
            }
            // renormalize the rounding residue onto the last entry
            let sum: f64 = w.iter().sum();
            let last = w.len() - 1;
            w[last] += 1.0 - sum;
            rows.push(w);
        }
        cpts.push(Cpt { rows });
    }
    Ok(TabularBN::new(dag.clone(), supports.to_vec(), cpts)?)
}
