//! Flat key=value sweep configuration with command-line overrides.

use anyhow::{bail, Context, Result};
use tam_core::estimators::EstimatorKind;
use tam_core::experiment::ExperimentSpec;
use tam_core::synth::{GraphKind, ModelKind};
use tam_core::tam::TamVariant;

pub fn parse_estimator(s: &str) -> Result<EstimatorKind> {
    match s.to_ascii_lowercase().as_str() {
        "plug-in" | "plugin" => Ok(EstimatorKind::PlugIn),
        "miller-madow" | "millermadow" | "mm" => Ok(EstimatorKind::MillerMadow),
        other => bail!("unknown estimator '{other}' (plug-in|miller-madow)"),
    }
}

pub fn parse_variant(s: &str) -> Result<TamVariant> {
    match s.to_ascii_lowercase().as_str() {
        "simple" => Ok(TamVariant::Simple),
        "general" => Ok(TamVariant::General),
        "no-pps" | "nopps" => Ok(TamVariant::NoPps),
        other => bail!("unknown variant '{other}' (simple|general|no-pps)"),
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => bail!("expected a boolean, got '{other}'"),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| anyhow::anyhow!("bad {what} '{t}': {e}")))
        .collect()
}

/// Applies one `key=value` assignment to the spec.
fn apply(spec: &mut ExperimentSpec, key: &str, value: &str) -> Result<()> {
    match key {
        "graphs" => spec.graphs = parse_list::<GraphKind>(value, "graph kind")?,
        "models" => spec.models = parse_list::<ModelKind>(value, "model kind")?,
        "d" => spec.dims = parse_list(value, "dimension")?,
        "n" => spec.sample_sizes = parse_list(value, "sample size")?,
        "reps" => spec.replications = value.parse().context("reps")?,
        "seed" => spec.base_seed = value.parse().context("seed")?,
        "p" => spec.noise_p = value.parse().context("p")?,
        "er_edge_factor" => spec.er_edge_factor = value.parse().context("er_edge_factor")?,
        "sf_attach" => spec.sf_attach = value.parse().context("sf_attach")?,
        "omega" => spec.omega = value.parse().context("omega")?,
        "kappa" => spec.kappa = value.parse().context("kappa")?,
        "auto_tune" => spec.auto_tune = parse_bool(value)?,
        "tune_constant" => spec.tune_constant = value.parse().context("tune_constant")?,
        "estimator" => spec.estimator = parse_estimator(value)?,
        "variant" => spec.variant = parse_variant(value)?,
        "exact" => spec.exact_population = parse_bool(value)?,
        other => bail!("unknown config key '{other}'"),
    }
    Ok(())
}

/// Parses a config file (one `key=value` per line, `#` comments) and then
/// applies the command-line overrides, which win.
pub fn load_spec(config_text: &str, overrides: &[String]) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default();
    for (lineno, line) in config_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key=value, got '{line}'", lineno + 1))?;
        apply(&mut spec, key.trim(), value.trim())
            .with_context(|| format!("line {}", lineno + 1))?;
    }
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .with_context(|| format!("override '{item}': expected key=value"))?;
        apply(&mut spec, key.trim(), value.trim()).with_context(|| format!("override '{item}'"))?;
    }
    Ok(spec)
}
