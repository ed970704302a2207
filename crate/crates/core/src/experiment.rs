//! Reproducible generate → simulate → learn → evaluate sweeps.
//!
//! A sweep enumerates cells (graph kind × model × dimension × sample
//! size) and runs `replications` independent repetitions per cell. Every
//! repetition derives its seeds from `(base seed, cell id, replication)`,
//! so cells never share randomness, workers share no state, and results
//! are byte-identical across runs and thread counts (runtime columns
//! excluded).

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::estimators::EstimatorKind;
use crate::graph::shd;
use crate::info::InfoSource;
use crate::rng::derive_seed;
use crate::synth::{compile_add, compile_mod, gen_er, gen_polytree, gen_sf, GraphKind, ModelKind};
use crate::tam::{tam_learn, TamConfig, TamVariant};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("experiment spec invalid: {0}")]
    BadSpec(String),
    #[error("malformed results CSV: {0}")]
    Parse(String),
}

/// Full sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub graphs: Vec<GraphKind>,
    pub models: Vec<ModelKind>,
    pub dims: Vec<usize>,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
    /// Bernoulli noise parameter of the structural models.
    pub noise_p: f64,
    /// Expected edge count of ER graphs, as a multiple of `d`.
    pub er_edge_factor: f64,
    /// Parents attached per arriving node in scale-free graphs.
    pub sf_attach: usize,
    pub omega: f64,
    pub kappa: f64,
    pub auto_tune: bool,
    pub tune_constant: f64,
    pub estimator: EstimatorKind,
    pub variant: TamVariant,
    /// Learn from the exact joint instead of sampling (population runs).
    pub exact_population: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            graphs: vec![GraphKind::Tree],
            models: vec![ModelKind::Mod],
            dims: vec![10],
            sample_sizes: vec![1000, 2000, 3000, 4000],
            replications: 30,
            base_seed: 1,
            noise_p: 0.2,
            er_edge_factor: 1.0,
            sf_attach: 2,
            omega: 0.001,
            kappa: 0.005,
            auto_tune: false,
            tune_constant: 1.0,
            estimator: EstimatorKind::MillerMadow,
            variant: TamVariant::Simple,
            exact_population: false,
        }
    }
}

impl ExperimentSpec {
    fn validate(&self) -> Result<(), ExperimentError> {
        let err = |m: &str| Err(ExperimentError::BadSpec(m.to_string()));
        if self.graphs.is_empty() || self.models.is_empty() {
            return err("graph and model lists must be nonempty");
        }
        if self.dims.is_empty() || self.sample_sizes.is_empty() {
            return err("dimension and sample-size lists must be nonempty");
        }
        if self.replications == 0 {
            return err("replications must be >= 1");
        }
        if !(self.noise_p > 0.0 && self.noise_p < 1.0) {
            return err("noise_p must lie in (0, 1)");
        }
        Ok(())
    }
}

/// One (cell, replication) outcome. `shd` and `layer_accuracy` are
/// `None` on error rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub graph: GraphKind,
    pub model: ModelKind,
    pub d: usize,
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub shd: Option<usize>,
    pub layer_accuracy: Option<f64>,
    pub omega: f64,
    pub kappa: f64,
    pub runtime_ms: f64,
    pub error: Option<String>,
}

fn cell_id(graph: GraphKind, model: ModelKind, d: usize, n: usize) -> u64 {
    let g = match graph {
        GraphKind::Tree => 1u64,
        GraphKind::Er => 2,
        GraphKind::Sf => 3,
    };
    let m = match model {
        ModelKind::Mod => 1u64,
        ModelKind::Add => 2,
    };
    (g << 60) | (m << 56) | ((d as u64 & 0xFFFF) << 40) | (n as u64 & 0xFF_FFFF_FFFF)
}

fn run_one(
    spec: &ExperimentSpec,
    graph: GraphKind,
    model: ModelKind,
    d: usize,
    n: usize,
    rep: usize,
) -> ResultRow {
    let cell = cell_id(graph, model, d, n);
    let seed = derive_seed(spec.base_seed, cell, rep as u64, 0);
    let mut row = ResultRow {
        graph,
        model,
        d,
        n,
        rep,
        seed,
        shd: None,
        layer_accuracy: None,
        omega: spec.omega,
        kappa: spec.kappa,
        runtime_ms: 0.0,
        error: None,
    };

    let dag = match graph {
        GraphKind::Tree => gen_polytree(d, seed),
        GraphKind::Er => gen_er(d, spec.er_edge_factor * d as f64, seed),
        GraphKind::Sf => match gen_sf(d, spec.sf_attach, seed) {
            Ok(g) => g,
            Err(e) => {
                row.error = Some(e.to_string());
                return row;
            }
        },
    };
    let compiled = match model {
        ModelKind::Mod => compile_mod(&dag, spec.noise_p),
        ModelKind::Add => compile_add(&dag, spec.noise_p),
    };
    let bn = match compiled {
        Ok(bn) => bn,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };

    let source = if spec.exact_population {
        match bn.joint() {
            Ok(j) => InfoSource::exact(j),
            Err(e) => {
                row.error = Some(e.to_string());
                return row;
            }
        }
    } else {
        let data_seed = derive_seed(spec.base_seed, cell, rep as u64, 1);
        InfoSource::empirical(bn.sample(n, data_seed), spec.estimator)
    };
    let source = match source {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };

    let cfg = TamConfig {
        omega: spec.omega,
        kappa: spec.kappa,
        estimator: spec.estimator,
        variant: spec.variant,
        auto_tune: spec.auto_tune,
        tune_constant: spec.tune_constant,
    };
    let start = Instant::now();
    let (learned, trace) = tam_learn(&source, &cfg);
    row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    row.omega = trace.omega;
    row.kappa = trace.kappa;
    row.shd = Some(shd(&learned, &dag).expect("same dimension"));
    let truth = dag.layer_decomposition();
    let hits = (0..d)
        .filter(|&k| trace.layer_of(k) == Some(truth.layer_of(k)))
        .count();
    row.layer_accuracy = Some(hits as f64 / d as f64);
    row
}

/// Runs the sweep. Rows come back in canonical order (cells in spec
/// order, replications within each cell) regardless of scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, ExperimentError> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for &graph in &spec.graphs {
        for &model in &spec.models {
            for &d in &spec.dims {
                for &n in &spec.sample_sizes {
                    for rep in 0..spec.replications {
                        tasks.push((graph, model, d, n, rep));
                    }
                }
            }
        }
    }
    Ok(tasks
        .par_iter()
        .map(|&(graph, model, d, n, rep)| run_one(spec, graph, model, d, n, rep))
        .collect())
}

pub const CSV_HEADER: &str =
    "graph,model,d,n,rep,seed,shd,layer_accuracy,omega,kappa,runtime_ms,error";

/// Renders rows as CSV, reals with 17 significant digits.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let shd = r.shd.map(|v| v.to_string()).unwrap_or_default();
        let acc = r
            .layer_accuracy
            .map(|v| format!("{:.16e}", v))
            .unwrap_or_default();
        let err = r.error.as_deref().unwrap_or("").replace(',', ";");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:.16e},{:.16e},{:.3},{}",
            r.graph, r.model, r.d, r.n, r.rep, r.seed, shd, acc, r.omega, r.kappa, r.runtime_ms, err
        );
    }
    s
}

/// Drops the wall-clock column, which is excluded from byte comparisons.
pub fn csv_without_runtime(csv: &str) -> String {
    let runtime_col = CSV_HEADER.split(',').position(|c| c == "runtime_ms").unwrap();
    let mut out = String::new();
    for line in csv.lines() {
        let cells: Vec<&str> = line.split(',').collect();
        let kept: Vec<&str> = cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| (i != runtime_col).then_some(*c))
            .collect();
        out.push_str(&kept.join(","));
        out.push('\n');
    }
    out
}

/// Per-cell aggregate of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub graph: String,
    pub model: String,
    pub d: usize,
    pub n: usize,
    pub rows: usize,
    pub errors: usize,
    pub shd_mean: f64,
    pub shd_median: f64,
    pub shd_sd: f64,
}

/// Aggregates a results CSV (as produced by [`rows_to_csv`]) into
/// per-cell mean, median, and standard deviation of the SHD.
pub fn summarize_csv(csv: &str) -> Result<Vec<CellSummary>, ExperimentError> {
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| ExperimentError::Parse("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| -> Result<usize, ExperimentError> {
        cols.iter()
            .position(|&c| c == name)
            .ok_or_else(|| ExperimentError::Parse(format!("missing column '{name}'")))
    };
    let (gc, mc, dc, nc, sc, ec) = (
        col("graph")?,
        col("model")?,
        col("d")?,
        col("n")?,
        col("shd")?,
        col("error")?,
    );
    type CellKey = (String, String, usize, usize);
    let mut order: Vec<CellKey> = Vec::new();
    let mut cells: std::collections::HashMap<CellKey, (Vec<f64>, usize)> =
        std::collections::HashMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells_line: Vec<&str> = line.split(',').collect();
        if cells_line.len() != cols.len() {
            return Err(ExperimentError::Parse(format!("bad row '{line}'")));
        }
        let key = (
            cells_line[gc].to_string(),
            cells_line[mc].to_string(),
            cells_line[dc]
                .parse()
                .map_err(|e| ExperimentError::Parse(format!("{e}")))?,
            cells_line[nc]
                .parse()
                .map_err(|e| ExperimentError::Parse(format!("{e}")))?,
        );
        if !cells.contains_key(&key) {
            order.push(key.clone());
        }
        let entry = cells.entry(key).or_insert((Vec::new(), 0));
        if !cells_line[ec].is_empty() || cells_line[sc].is_empty() {
            entry.1 += 1;
        } else {
            let v: f64 = cells_line[sc]
                .parse()
                .map_err(|e| ExperimentError::Parse(format!("{e}")))?;
            entry.0.push(v);
        }
    }
    let mut out = Vec::with_capacity(order.len());
    for key in order {
        let (mut shds, errors) = cells.remove(&key).unwrap();
        let rows = shds.len() + errors;
        shds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let count = shds.len().max(1) as f64;
        let mean = shds.iter().sum::<f64>() / count;
        let median = if shds.is_empty() {
            f64::NAN
        } else if shds.len() % 2 == 1 {
            shds[shds.len() / 2]
        } else {
            0.5 * (shds[shds.len() / 2 - 1] + shds[shds.len() / 2])
        };
        let var = shds.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        out.push(CellSummary {
            graph: key.0,
            model: key.1,
            d: key.2,
            n: key.3,
            rows,
            errors,
            shd_mean: mean,
            shd_median: median,
            shd_sd: var.sqrt(),
        });
    }
    Ok(out)
}

pub fn summary_to_csv(summaries: &[CellSummary]) -> String {
    let mut s = String::from("graph,model,d,n,rows,errors,shd_mean,shd_median,shd_sd\n");
    for c in summaries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.16e},{:.16e},{:.16e}",
            c.graph, c.model, c.d, c.n, c.rows, c.errors, c.shd_mean, c.shd_median, c.shd_sd
        );
    }
    s
}
