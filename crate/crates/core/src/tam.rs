//! Layer-wise testing-and-masking DAG learner.
//!
//! Each round estimates, for every unplaced node, its conditional
//! entropy given the already-identified ancestral set, sorts the
//! estimates ascending, and walks the order: the head joins the current
//! layer, then every remaining node whose conditional mutual information
//! with the new layer member reaches the masking threshold `omega` is
//! masked (it must belong to a later layer). Parent sets come from the
//! forward-greedy boundary search with threshold `kappa`, or from the
//! backward phase in the no-PPS variant.

use std::fmt::Write as _;

use crate::graph::Dag;
use crate::info::InfoSource;
use crate::mb::{iamb_backward, pps};

/// Which masking test and parent-recovery route the learner uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TamVariant {
    /// Masking conditions on the node's own searched boundary; parents
    /// from the forward-greedy search.
    #[default]
    Simple,
    /// Masking tests the aggregated CMI with the entire current layer,
    /// conditioned on the ancestral set.
    General,
    /// Conditional entropies estimated directly on the ancestral set;
    /// parents from the backward phase.
    NoPps,
}

/// Learner configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TamConfig {
    /// Masking threshold: nodes with CMI `>= omega` are masked.
    pub omega: f64,
    /// Boundary-search threshold: candidates with CMI `> kappa` are added.
    pub kappa: f64,
    /// Estimator used when building empirical sources (consumed by the
    /// experiment harness and CLI; sources carry their own estimator).
    pub estimator: crate::estimators::EstimatorKind,
    pub variant: TamVariant,
    /// Replace `omega`/`kappa` by the data-dependent schedule when the
    /// source is empirical. Exact sources keep the configured values.
    pub auto_tune: bool,
    /// Leading constant of the data-dependent schedule.
    pub tune_constant: f64,
}

impl Default for TamConfig {
    fn default() -> Self {
        TamConfig {
            omega: 0.001,
            kappa: 0.005,
            estimator: crate::estimators::EstimatorKind::MillerMadow,
            variant: TamVariant::Simple,
            auto_tune: false,
            tune_constant: 1.0,
        }
    }
}

/// One trace line. `layer` is the 1-based layer the event belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum TamEvent {
    /// Conditional-entropy estimate for an unplaced node, emitted in
    /// ascending sorted order (the permutation the walk follows).
    Entropy { node: usize, value: f64 },
    /// Searched boundary of a node.
    Boundary { node: usize, boundary: Vec<usize> },
    /// Node admitted into the layer.
    Admit { node: usize },
    /// Node masked by `masker` with the recorded CMI value.
    Mask { node: usize, masker: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    /// 1-based layer index.
    pub index: usize,
    pub events: Vec<TamEvent>,
}

/// Full run record: per-layer events plus the thresholds in effect.
#[derive(Debug, Clone, PartialEq)]
pub struct TamTrace {
    pub layers: Vec<LayerTrace>,
    pub omega: f64,
    pub kappa: f64,
}

impl LayerTrace {
    pub fn admitted(&self) -> Vec<usize> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TamEvent::Admit { node } => Some(*node),
                _ => None,
            })
            .collect()
    }
}

impl TamTrace {
    /// Learned layers as sorted node sets.
    pub fn layer_sets(&self) -> Vec<Vec<usize>> {
        self.layers
            .iter()
            .map(|l| {
                let mut v = l.admitted();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// 1-based learned layer of `node`.
    pub fn layer_of(&self, node: usize) -> Option<usize> {
        self.layers
            .iter()
            .find(|l| l.admitted().contains(&node))
            .map(|l| l.index)
    }

    /// Line-oriented serialization: one event per line with kind, layer
    /// index, node, and values printed with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = format!("omega {:.16e}\nkappa {:.16e}\n", self.omega, self.kappa);
        for layer in &self.layers {
            for e in &layer.events {
                match e {
                    TamEvent::Entropy { node, value } => {
                        let _ = writeln!(s, "entropy {} {} {:.16e}", layer.index, node, value);
                    }
                    TamEvent::Boundary { node, boundary } => {
                        let b = if boundary.is_empty() {
                            "-".to_string()
                        } else {
                            boundary
                                .iter()
                                .map(usize::to_string)
                                .collect::<Vec<_>>()
                                .join(",")
                        };
                        let _ = writeln!(s, "boundary {} {} {}", layer.index, node, b);
                    }
                    TamEvent::Admit { node } => {
                        let _ = writeln!(s, "admit {} {}", layer.index, node);
                    }
                    TamEvent::Mask { node, masker, value } => {
                        let _ = writeln!(s, "mask {} {} {} {:.16e}", layer.index, node, masker, value);
                    }
                }
            }
        }
        s
    }
}

/// Data-dependent thresholds
/// `omega = kappa = c * (d^3 ln d)^(1/4) * ((d / (n ln d))^2 + ln d / sqrt(n))^(1/4)`.
pub fn auto_thresholds(d: usize, n: usize, c: f64) -> (f64, f64) {
    assert!(d >= 2 && n >= 1, "auto_thresholds needs d >= 2, n >= 1");
    let d = d as f64;
    let n = n as f64;
    let ld = d.ln();
    let bracket = (d / (n * ld)).powi(2) + ld / n.sqrt();
    let v = c * (d.powi(3) * ld).powf(0.25) * bracket.powf(0.25);
    (v, v)
}

/// Runs the learner against `src` and returns the assembled DAG with the
/// full trace. Degenerate thresholds can only mis-learn, never fail.
pub fn tam_learn(src: &InfoSource, cfg: &TamConfig) -> (Dag, TamTrace) {
    let d = src.num_vars();
    let (omega, kappa) = match (cfg.auto_tune, src.sample_size()) {
        (true, Some(n)) if d >= 2 => auto_thresholds(d, n, cfg.tune_constant),
        _ => (cfg.omega, cfg.kappa),
    };

    let mut placed = vec![false; d];
    let mut ancestral: Vec<usize> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut layers: Vec<LayerTrace> = Vec::new();

    while ancestral.len() < d {
        let layer_index = layers.len() + 1;
        let mut events: Vec<TamEvent> = Vec::new();
        let unplaced: Vec<usize> = (0..d).filter(|&k| !placed[k]).collect();

        // Conditional-entropy estimates and (for PPS variants) boundaries.
        let mut boundaries: Vec<Vec<usize>> = Vec::with_capacity(unplaced.len());
        let mut estimates: Vec<(f64, usize)> = Vec::with_capacity(unplaced.len());
        for &k in &unplaced {
            match cfg.variant {
                TamVariant::Simple | TamVariant::General => {
                    let r = pps(src, k, &ancestral, kappa);
                    estimates.push((r.cond_entropy, k));
                    boundaries.push(r.boundary);
                }
                TamVariant::NoPps => {
                    estimates.push((src.cond_entropy(k, &ancestral), k));
                    boundaries.push(Vec::new());
                }
            }
        }
        let boundary_of = |k: usize| -> &Vec<usize> {
            let pos = unplaced.binary_search(&k).expect("k is unplaced");
            &boundaries[pos]
        };

        // Sort ascending; ties break by node index.
        estimates.sort_by(|a, b| a.partial_cmp(b).expect("entropies are finite"));
        for &(h, k) in &estimates {
            events.push(TamEvent::Entropy { node: k, value: h });
        }
        if matches!(cfg.variant, TamVariant::Simple | TamVariant::General) {
            for &(_, k) in &estimates {
                events.push(TamEvent::Boundary {
                    node: k,
                    boundary: boundary_of(k).clone(),
                });
            }
        }

        // Walk the order, admitting heads and masking dependents.
        let mut state = vec![0u8; d]; // 0 active, 1 admitted, 2 masked
        let mut layer_members: Vec<usize> = Vec::new();
        while let Some(head_pos) = estimates.iter().position(|&(_, k)| state[k] == 0) {
            // Admit the head and every active node tied with it.
            let head_value = estimates[head_pos].0;
            let new_heads: Vec<usize> = estimates[head_pos..]
                .iter()
                .filter(|&&(h, k)| state[k] == 0 && h == head_value)
                .map(|&(_, k)| k)
                .collect();
            for &h in &new_heads {
                state[h] = 1;
                layer_members.push(h);
                events.push(TamEvent::Admit { node: h });
            }
            let mut layer_sorted = layer_members.clone();
            layer_sorted.sort_unstable();

            for &(_, k) in &estimates {
                if state[k] != 0 {
                    continue;
                }
                let hit: Option<(usize, f64)> = match cfg.variant {
                    TamVariant::Simple => new_heads
                        .iter()
                        .map(|&h| (h, src.cmi(k, &[h], boundary_of(k))))
                        .find(|&(_, v)| v >= omega),
                    TamVariant::NoPps => new_heads
                        .iter()
                        .map(|&h| (h, src.cmi(k, &[h], &ancestral)))
                        .find(|&(_, v)| v >= omega),
                    TamVariant::General => {
                        let v = src.cmi(k, &layer_sorted, &ancestral);
                        (v >= omega).then_some((new_heads[0], v))
                    }
                };
                if let Some((masker, value)) = hit {
                    state[k] = 2;
                    events.push(TamEvent::Mask { node: k, masker, value });
                }
            }
        }

        // Parent assignment for the accepted layer.
        for &k in &layer_members {
            let parents: Vec<usize> = match cfg.variant {
                TamVariant::Simple | TamVariant::General => boundary_of(k).clone(),
                TamVariant::NoPps => {
                    let b = iamb_backward(src, k, &ancestral, kappa);
                    events.push(TamEvent::Boundary { node: k, boundary: b.clone() });
                    b
                }
            };
            edges.extend(parents.into_iter().map(|p| (p, k)));
            placed[k] = true;
        }
        ancestral.extend(layer_members.iter().copied());
        ancestral.sort_unstable();
        layers.push(LayerTrace { index: layer_index, events });
    }

    let dag = Dag::new(d, &edges).expect("parents precede children across layers");
    (dag, TamTrace { layers, omega, kappa })
}
