//! Structure learning for discrete Bayesian networks.
//!
//! The toolkit recovers directed acyclic graphs from observational
//! categorical data by a layer-wise testing-and-masking (TAM) procedure:
//! conditional entropies order the candidate nodes of each layer, a
//! forward-greedy Markov boundary search (PPS) proposes parent sets, and
//! conditional mutual information masks nodes that belong to later layers.
//!
//! Alongside the finite-sample learner, the crate ships an exact
//! population oracle for small tabular networks ([`oracle`]), a verifier
//! that certifies the identifiability conditions the learner relies on
//! ([`verify`]), synthetic graph/model generators ([`synth`]), and a
//! reproducible sweep harness ([`experiment`]).

pub mod data;
pub mod estimators;
pub mod experiment;
pub mod graph;
pub mod info;
pub mod mb;
pub mod oracle;
pub mod rng;
pub mod synth;
pub mod tam;
pub mod verify;

pub use data::Dataset;
pub use estimators::EstimatorKind;
pub use experiment::{run_experiment, ExperimentSpec, ResultRow};
pub use graph::{shd, Dag, LayerDecomposition};
pub use info::InfoSource;
pub use mb::{iamb_backward, pps, PpsResult};
pub use oracle::{JointDist, TabularBN};
pub use synth::{GraphKind, ModelKind};
pub use tam::{auto_thresholds, tam_learn, TamConfig, TamTrace, TamVariant};
pub use verify::{ConditionReport, Verifier};
