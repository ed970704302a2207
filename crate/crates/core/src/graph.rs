//! DAG representation, layer decomposition, d-separation, and structural
//! Hamming distance.
//!
//! Nodes are dense integer indices in `[0, d)`. All queries are pure
//! functions on immutable values.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node index {0} out of range for graph with {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("graph contains a directed cycle")]
    Cyclic,
    #[error("input node sets overlap")]
    OverlappingSets,
    #[error("graphs have different node counts ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("malformed edge-list text: {0}")]
    Parse(String),
}

/// Directed acyclic graph over `d` indexed nodes.
///
/// Invariants (enforced at construction): no self-loops, no duplicate
/// edges, no directed cycles. Parent and child lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    d: usize,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

/// Parents, ancestors, descendants and nondescendants of one node.
///
/// `descendants` excludes the node itself, so `nondescendants` contains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relatives {
    pub parents: Vec<usize>,
    pub ancestors: Vec<usize>,
    pub descendants: Vec<usize>,
    pub nondescendants: Vec<usize>,
}

impl Dag {
    /// Builds a DAG from an edge list of `(parent, child)` pairs.
    pub fn new(d: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut parents = vec![Vec::new(); d];
        let mut children = vec![Vec::new(); d];
        for &(u, v) in edges {
            if u >= d {
                return Err(GraphError::NodeOutOfRange(u, d));
            }
            if v >= d {
                return Err(GraphError::NodeOutOfRange(v, d));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if children[u].contains(&v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            children[u].push(v);
            parents[v].push(u);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let g = Dag {
            d,
            parents,
            children,
        };
        if g.topological_order().is_none() {
            return Err(GraphError::Cyclic);
        }
        Ok(g)
    }

    /// Graph with `d` nodes and no edges.
    pub fn edgeless(d: usize) -> Self {
        Dag {
            d,
            parents: vec![Vec::new(); d],
            children: vec![Vec::new(); d],
        }
    }

    pub fn node_count(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    /// Edges sorted lexicographically by `(parent, child)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.d {
            for &v in &self.children[u] {
                out.push((u, v));
            }
        }
        out
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.d && self.children[u].binary_search(&v).is_ok()
    }

    pub fn parents(&self, k: usize) -> &[usize] {
        &self.parents[k]
    }

    pub fn children(&self, k: usize) -> &[usize] {
        &self.children[k]
    }

    /// A topological order (sources first, index-ascending within ties),
    /// or `None` if the graph has a cycle. Only `None` during validation;
    /// a constructed `Dag` always has one.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = (0..self.d).map(|k| self.parents[k].len()).collect();
        let mut order = Vec::with_capacity(self.d);
        let mut ready: VecDeque<usize> =
            (0..self.d).filter(|&k| indeg[k] == 0).collect();
        while let Some(u) = ready.pop_front() {
            order.push(u);
            for &v in &self.children[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push_back(v);
                }
            }
        }
        (order.len() == self.d).then_some(order)
    }

    fn reach_mask(&self, k: usize, up: bool) -> Vec<bool> {
        let mut seen = vec![false; self.d];
        let mut stack: Vec<usize> = if up {
            self.parents[k].to_vec()
        } else {
            self.children[k].to_vec()
        };
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            let next = if up { &self.parents[u] } else { &self.children[u] };
            stack.extend_from_slice(next);
        }
        seen
    }

    /// Ancestors of `k` (excluding `k`), ascending.
    pub fn ancestors(&self, k: usize) -> Vec<usize> {
        mask_to_vec(&self.reach_mask(k, true))
    }

    /// Descendants of `k` (excluding `k`), ascending.
    pub fn descendants(&self, k: usize) -> Vec<usize> {
        mask_to_vec(&self.reach_mask(k, false))
    }

    /// Parents, ancestors, descendants and nondescendants of `k`.
    pub fn relatives(&self, k: usize) -> Result<Relatives, GraphError> {
        if k >= self.d {
            return Err(GraphError::NodeOutOfRange(k, self.d));
        }
        let de_mask = self.reach_mask(k, false);
        let nondescendants = (0..self.d).filter(|&v| !de_mask[v]).collect();
        Ok(Relatives {
            parents: self.parents[k].to_vec(),
            ancestors: self.ancestors(k),
            descendants: mask_to_vec(&de_mask),
            nondescendants,
        })
    }

    /// The unique layer decomposition: layer 1 holds the sources, layer
    /// `j` the sources of the subgraph left after removing layers
    /// `1..j-1`.
    pub fn layer_decomposition(&self) -> LayerDecomposition {
        let mut indeg: Vec<usize> = (0..self.d).map(|k| self.parents[k].len()).collect();
        let mut placed = vec![false; self.d];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        let mut layer_of = vec![0usize; self.d];
        let mut remaining = self.d;
        while remaining > 0 {
            let layer: Vec<usize> = (0..self.d)
                .filter(|&k| !placed[k] && indeg[k] == 0)
                .collect();
            debug_assert!(!layer.is_empty(), "acyclic graph always has sources");
            for &k in &layer {
                placed[k] = true;
                layer_of[k] = layers.len() + 1;
                for &v in &self.children[k] {
                    indeg[v] -= 1;
                }
            }
            remaining -= layer.len();
            layers.push(layer);
        }
        LayerDecomposition { layers, layer_of }
    }

    /// d-separation of `a` and `b` given `c`, via reachability over
    /// (node, travel-direction) states. A collider is open iff it or one
    /// of its descendants is conditioned on.
    pub fn d_separated(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
    ) -> Result<bool, GraphError> {
        for &k in a.iter().chain(b).chain(c) {
            if k >= self.d {
                return Err(GraphError::NodeOutOfRange(k, self.d));
            }
        }
        let mut tag = vec![0u8; self.d];
        for &k in a {
            tag[k] |= 1;
        }
        for &k in b {
            if tag[k] != 0 {
                return Err(GraphError::OverlappingSets);
            }
            tag[k] |= 2;
        }
        for &k in c {
            if tag[k] != 0 {
                return Err(GraphError::OverlappingSets);
            }
            tag[k] |= 4;
        }
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }

        let in_b = |k: usize| tag[k] & 2 != 0;
        let in_c = |k: usize| tag[k] & 4 != 0;
        // anc_c[k]: k is in c or an ancestor of some conditioned node,
        // i.e. de(k) meets c (counting k itself).
        let mut anc_c = vec![false; self.d];
        let mut stack: Vec<usize> = c.to_vec();
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut anc_c[u], true) {
                continue;
            }
            stack.extend_from_slice(&self.parents[u]);
        }

        // Travel states: (node, arrived-from-child?). Starting nodes act
        // as if entered from a child, which permits both directions.
        let mut visited = vec![[false; 2]; self.d];
        let mut queue: VecDeque<(usize, bool)> = a.iter().map(|&k| (k, true)).collect();
        while let Some((k, from_child)) = queue.pop_front() {
            if visited[k][from_child as usize] {
                continue;
            }
            visited[k][from_child as usize] = true;
            if in_b(k) {
                return Ok(false);
            }
            if from_child {
                if !in_c(k) {
                    for &p in &self.parents[k] {
                        queue.push_back((p, true));
                    }
                    for &ch in &self.children[k] {
                        queue.push_back((ch, false));
                    }
                }
            } else {
                if !in_c(k) {
                    for &ch in &self.children[k] {
                        queue.push_back((ch, false));
                    }
                }
                if anc_c[k] {
                    // v-structure at k is open; bounce back up.
                    for &p in &self.parents[k] {
                        queue.push_back((p, true));
                    }
                }
            }
        }
        Ok(true)
    }

    /// True iff the undirected skeleton has no cycles.
    pub fn is_polyforest(&self) -> bool {
        let mut root: Vec<usize> = (0..self.d).collect();
        fn find(root: &mut [usize], mut x: usize) -> usize {
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for (u, v) in self.edges() {
            let (ru, rv) = (find(&mut root, u), find(&mut root, v));
            if ru == rv {
                return false;
            }
            root[ru] = rv;
        }
        true
    }

    /// Graph with every node `k` relabeled to `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Dag, GraphError> {
        if perm.len() != self.d {
            return Err(GraphError::DimensionMismatch(perm.len(), self.d));
        }
        let edges: Vec<(usize, usize)> = self
            .edges()
            .into_iter()
            .map(|(u, v)| (perm[u], perm[v]))
            .collect();
        Dag::new(self.d, &edges)
    }

    /// Serializes to the edge-list text format: `d=<n>` then one
    /// `u v` line per edge, sorted lexicographically.
    pub fn to_text(&self) -> String {
        let mut s = format!("d={}\n", self.d);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{} {}", u, v);
        }
        s
    }

    /// Parses the edge-list text format.
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| GraphError::Parse("empty input".into()))?;
        let d: usize = header
            .trim()
            .strip_prefix("d=")
            .ok_or_else(|| GraphError::Parse(format!("expected 'd=<int>', got '{header}'")))?
            .parse()
            .map_err(|e| GraphError::Parse(format!("bad node count: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let u = it
                .next()
                .ok_or_else(|| GraphError::Parse(format!("bad edge line '{line}'")))?;
            let v = it
                .next()
                .ok_or_else(|| GraphError::Parse(format!("bad edge line '{line}'")))?;
            if it.next().is_some() {
                return Err(GraphError::Parse(format!("trailing tokens in '{line}'")));
            }
            let u: usize = u.parse().map_err(|e| GraphError::Parse(format!("{e}")))?;
            let v: usize = v.parse().map_err(|e| GraphError::Parse(format!("{e}")))?;
            edges.push((u, v));
        }
        Dag::new(d, &edges)
    }
}

/// Layer decomposition `L_1, ..., L_r` of a DAG. Layers are disjoint,
/// cover all nodes, and every node of `L_j` (j > 1) has all parents in
/// earlier layers and at least one in `L_{j-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerDecomposition {
    layers: Vec<Vec<usize>>,
    layer_of: Vec<usize>,
}

impl LayerDecomposition {
    /// Number of layers `r`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Layers in order; `layers()[0]` is `L_1`, each sorted ascending.
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    /// 1-based layer index of node `k`.
    pub fn layer_of(&self, k: usize) -> usize {
        self.layer_of[k]
    }

    /// Layer widths `d_j`.
    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// Canonical ancestral set `A_j = L_1 ∪ ... ∪ L_j`, sorted.
    /// `A_0` is empty.
    pub fn ancestral_set(&self, j: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .layers
            .iter()
            .take(j)
            .flat_map(|l| l.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// Structural Hamming distance: unordered pairs adjacent in exactly one
/// graph, plus pairs adjacent in both with opposite orientation.
pub fn shd(g1: &Dag, g2: &Dag) -> Result<usize, GraphError> {
    if g1.node_count() != g2.node_count() {
        return Err(GraphError::DimensionMismatch(
            g1.node_count(),
            g2.node_count(),
        ));
    }
    let mut dist = 0usize;
    for u in 0..g1.node_count() {
        for v in u + 1..g1.node_count() {
            let f1 = g1.has_edge(u, v);
            let b1 = g1.has_edge(v, u);
            let f2 = g2.has_edge(u, v);
            let b2 = g2.has_edge(v, u);
            let adj1 = f1 || b1;
            let adj2 = f2 || b2;
            if adj1 != adj2 || (adj1 && adj2 && f1 != f2) {
                dist += 1;
            }
        }
    }
    Ok(dist)
}

fn mask_to_vec(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Dag {
        Dag::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn diamond() -> Dag {
        // X1=0, X2=1, X3=2, X4=3
        Dag::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Dag::new(2, &[(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Dag::new(2, &[(0, 1), (0, 1)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Dag::new(3, &[(0, 1), (1, 2), (2, 0)]),
            Err(GraphError::Cyclic)
        );
        assert_eq!(Dag::new(2, &[(0, 5)]), Err(GraphError::NodeOutOfRange(5, 2)));
    }

    #[test]
    fn layers_of_chain_and_edgeless() {
        let layers = chain3().layer_decomposition();
        assert_eq!(layers.layers(), &[vec![0], vec![1], vec![2]]);
        assert_eq!(layers.depth(), 3);

        let e = Dag::edgeless(3).layer_decomposition();
        assert_eq!(e.layers(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn layers_of_diamond() {
        let layers = diamond().layer_decomposition();
        assert_eq!(layers.layers(), &[vec![0], vec![1, 2], vec![3]]);
        assert_eq!(layers.layer_of(3), 3);
        assert_eq!(layers.ancestral_set(2), vec![0, 1, 2]);
        assert_eq!(layers.ancestral_set(0), Vec::<usize>::new());
    }

    #[test]
    fn relatives_on_chain_and_diamond() {
        let r = chain3().relatives(1).unwrap();
        assert_eq!(r.parents, vec![0]);
        assert_eq!(r.ancestors, vec![0]);
        assert_eq!(r.descendants, vec![2]);
        assert_eq!(r.nondescendants, vec![0, 1]);

        let r = diamond().relatives(3).unwrap();
        assert_eq!(r.parents, vec![1, 2]);
        assert_eq!(r.ancestors, vec![0, 1, 2]);

        // source node has no ancestors
        assert!(diamond().relatives(0).unwrap().ancestors.is_empty());
        assert!(chain3().relatives(9).is_err());
    }

    #[test]
    fn d_separation_basic_patterns() {
        let g = chain3();
        assert!(g.d_separated(&[0], &[2], &[1]).unwrap());
        assert!(!g.d_separated(&[0], &[2], &[]).unwrap());

        let collider = Dag::new(3, &[(0, 2), (1, 2)]).unwrap();
        assert!(collider.d_separated(&[0], &[1], &[]).unwrap());
        assert!(!collider.d_separated(&[0], &[1], &[2]).unwrap());

        // conditioning on a collider's descendant also opens it
        let g = Dag::new(4, &[(0, 2), (1, 2), (2, 3)]).unwrap();
        assert!(!g.d_separated(&[0], &[1], &[3]).unwrap());

        assert!(diamond().d_separated(&[0], &[3], &[1, 2]).unwrap());
        assert!(!diamond().d_separated(&[0], &[3], &[1]).unwrap());
    }

    #[test]
    fn d_separation_validates_input() {
        let g = chain3();
        assert_eq!(
            g.d_separated(&[0], &[0], &[]),
            Err(GraphError::OverlappingSets)
        );
        assert!(g.d_separated(&[], &[2], &[]).unwrap());
    }

    #[test]
    fn polyforest_detection() {
        assert!(chain3().is_polyforest());
        assert!(!diamond().is_polyforest());
        let star = Dag::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(star.is_polyforest());
    }

    #[test]
    fn shd_counts_reversals_and_deletions() {
        let g1 = Dag::new(2, &[(0, 1)]).unwrap();
        let g2 = Dag::new(2, &[(1, 0)]).unwrap();
        assert_eq!(shd(&g1, &g1).unwrap(), 0);
        assert_eq!(shd(&g1, &g2).unwrap(), 1);
        assert_eq!(shd(&chain3(), &Dag::edgeless(3)).unwrap(), 2);
        assert!(shd(&g1, &chain3()).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = diamond();
        let text = g.to_text();
        assert_eq!(text, "d=4\n0 1\n0 2\n1 3\n2 3\n");
        assert_eq!(Dag::from_text(&text).unwrap(), g);
        assert!(Dag::from_text("nonsense").is_err());
        assert!(Dag::from_text("d=2\n0 1 9\n").is_err());
    }

    #[test]
    fn permuted_relabels_edges() {
        let g = chain3().permuted(&[2, 0, 1]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (2, 0)]);
    }
}
