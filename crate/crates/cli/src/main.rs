//! Command-line front end: generate graphs, compile models, sample,
//! learn, verify conditions, run sweeps, and aggregate results.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime
//! failure, 3 assertion failure (`--assert-shd`, `--assert-certified`).

mod config;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tam_core::data::Dataset;
use tam_core::experiment::{rows_to_csv, run_experiment, summarize_csv, summary_to_csv};
use tam_core::graph::{shd, Dag};
use tam_core::info::InfoSource;
use tam_core::oracle::TabularBN;
use tam_core::synth::{compile_add, compile_mod, fixture_by_name, gen_er, gen_polytree, gen_sf, ModelKind};
use tam_core::tam::{tam_learn, TamConfig};
use tam_core::verify::Verifier;

#[derive(Parser)]
#[command(name = "tam", version, about = "Layer-wise DAG structure learning from categorical data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random DAG and write it as an edge list.
    GenGraph(GenGraphArgs),
    /// Compile a structural model (or named fixture) into a network file.
    CompileModel(CompileArgs),
    /// Draw samples from a network file into a dataset CSV.
    Sample(SampleArgs),
    /// Learn a DAG from a dataset and print its edge list.
    Learn(LearnArgs),
    /// Certify the identifiability conditions of a network exactly.
    Verify(VerifyArgs),
    /// Run a full generate/sample/learn/evaluate sweep.
    Sweep(SweepArgs),
    /// Aggregate a results CSV into per-cell statistics.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenGraphArgs {
    /// Graph family: tree, er, or sf.
    #[arg(long)]
    kind: String,
    /// Node count.
    #[arg(long)]
    d: usize,
    #[arg(long)]
    seed: u64,
    /// Expected edge count (er only; defaults to d).
    #[arg(long)]
    expected_edges: Option<f64>,
    /// Parents attached per arriving node (sf only).
    #[arg(long, default_value_t = 2)]
    attach: usize,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Edge-list file of the graph to compile.
    #[arg(long, conflicts_with = "fixture")]
    graph: Option<PathBuf>,
    /// Model kind: mod or add.
    #[arg(long, requires = "graph")]
    model: Option<String>,
    /// Bernoulli noise parameter.
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    /// Named fixture instead of graph+model (example-c3-m1[:eps],
    /// example-c3-m2, path-cancel:<n>, discrete-unfaithful).
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Network file to sample from.
    #[arg(long)]
    bn: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LearnArgs {
    /// Dataset CSV (with a `# supports:` line, or pass --supports).
    #[arg(long)]
    data: PathBuf,
    /// Per-column support sizes, space separated, when the CSV lacks them.
    #[arg(long)]
    supports: Option<String>,
    #[arg(long, default_value_t = 0.001)]
    omega: f64,
    #[arg(long, default_value_t = 0.005)]
    kappa: f64,
    /// plug-in or miller-madow.
    #[arg(long, default_value = "miller-madow")]
    estimator: String,
    /// simple, general, or no-pps.
    #[arg(long, default_value = "simple")]
    variant: String,
    #[arg(long)]
    auto_tune: bool,
    #[arg(long, default_value_t = 1.0)]
    tune_constant: f64,
    /// Write the run trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Reference edge-list file; prints the structural Hamming distance.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Exit with status 3 when the SHD against --truth exceeds this.
    #[arg(long, requires = "truth")]
    assert_shd: Option<usize>,
    /// Write the learned edge list here as well as printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Network file to certify.
    #[arg(long, conflicts_with = "fixture")]
    bn: Option<PathBuf>,
    /// Named fixture to certify.
    #[arg(long)]
    fixture: Option<String>,
    /// Exit with status 3 when certification fails.
    #[arg(long)]
    assert_certified: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides applied after the file, e.g. --set d=10,20.
    #[arg(long = "set")]
    sets: Vec<String>,
    /// Results CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Results CSV produced by `tam sweep`.
    #[arg(long)]
    results: PathBuf,
    /// Summary CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG chart of mean SHD vs sample size.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_bn(args_bn: &Option<PathBuf>, args_fixture: &Option<String>) -> Result<TabularBN> {
    match (args_bn, args_fixture) {
        (Some(path), None) => Ok(TabularBN::from_text(&read(path)?)?),
        (None, Some(name)) => Ok(fixture_by_name(name)?),
        _ => bail!("pass exactly one of --bn or --fixture"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenGraph(a) => {
            let g = match a.kind.parse::<tam_core::synth::GraphKind>() {
                Ok(tam_core::synth::GraphKind::Tree) => gen_polytree(a.d, a.seed),
                Ok(tam_core::synth::GraphKind::Er) => {
                    gen_er(a.d, a.expected_edges.unwrap_or(a.d as f64), a.seed)
                }
                Ok(tam_core::synth::GraphKind::Sf) => gen_sf(a.d, a.attach, a.seed)?,
                Err(e) => bail!(e),
            };
            emit(&a.out, &g.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CompileModel(a) => {
            let bn = if a.fixture.is_some() {
                load_bn(&None, &a.fixture)?
            } else {
                let graph = a.graph.as_ref().context("pass --graph with --model, or --fixture")?;
                let dag = Dag::from_text(&read(graph)?)?;
                match a.model.as_deref().context("pass --model mod|add")?.parse::<ModelKind>() {
                    Ok(ModelKind::Mod) => compile_mod(&dag, a.p)?,
                    Ok(ModelKind::Add) => compile_add(&dag, a.p)?,
                    Err(e) => bail!(e),
                }
            };
            emit(&a.out, &bn.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample(a) => {
            let bn = TabularBN::from_text(&read(&a.bn)?)?;
            if a.n == 0 {
                bail!("--n must be at least 1");
            }
            emit(&a.out, &bn.sample(a.n, a.seed).to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Learn(a) => {
            let supports: Option<Vec<usize>> = match &a.supports {
                Some(s) => Some(
                    s.split_whitespace()
                        .map(str::parse)
                        .collect::<Result<_, _>>()
                        .context("--supports")?,
                ),
                None => None,
            };
            let ds = Dataset::from_csv(&read(&a.data)?, supports.as_deref())?;
            let cfg = TamConfig {
                omega: a.omega,
                kappa: a.kappa,
                estimator: config::parse_estimator(&a.estimator)?,
                variant: config::parse_variant(&a.variant)?,
                auto_tune: a.auto_tune,
                tune_constant: a.tune_constant,
            };
            let src = InfoSource::empirical(ds, cfg.estimator)?;
            let (g, trace) = tam_learn(&src, &cfg);
            if let Some(path) = &a.trace {
                std::fs::write(path, trace.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let text = g.to_text();
            if let Some(path) = &a.out {
                std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{text}");
            if let Some(truth_path) = &a.truth {
                let truth = Dag::from_text(&read(truth_path)?)?;
                let dist = shd(&g, &truth)?;
                println!("shd {dist}");
                if let Some(max) = a.assert_shd {
                    if dist > max {
                        eprintln!("assertion failed: shd {dist} > {max}");
                        return Ok(ExitCode::from(3));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(a) => {
            let bn = load_bn(&a.bn, &a.fixture)?;
            let report = Verifier::new(&bn)?.report()?;
            emit(&a.out, &report.to_text())?;
            if a.assert_certified && !report.certified() {
                eprintln!("assertion failed: network is not certified");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(a) => {
            let text = match &a.config {
                Some(path) => read(path)?,
                None => String::new(),
            };
            let spec = config::load_spec(&text, &a.sets)?;
            let rows = run_experiment(&spec)?;
            std::fs::write(&a.out, rows_to_csv(&rows))
                .with_context(|| format!("writing {}", a.out.display()))?;
            let errors = rows.iter().filter(|r| r.error.is_some()).count();
            eprintln!("sweep: {} rows ({errors} errors) -> {}", rows.len(), a.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Report(a) => {
            let summaries = summarize_csv(&read(&a.results)?)?;
            emit(&a.out, &summary_to_csv(&summaries))?;
            if let Some(path) = &a.plot {
                std::fs::write(path, plot::shd_chart(&summaries))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Errors from bad inputs and configuration exit with 1; unexpected
/// runtime failures with 2.
fn classify(err: &anyhow::Error) -> u8 {
    let mut usage = false;
    for cause in err.chain() {
        let text = cause.to_string();
        if cause.is::<std::io::Error>() {
            return 2;
        }
        if text.contains("malformed")
            || text.contains("unknown")
            || text.contains("expected")
            || text.contains("bad ")
            || text.contains("pass ")
            || text.contains("must be")
            || text.contains("invalid")
        {
            usage = true;
        }
    }
    if usage {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; keep exit code 1 for usage errors
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}
