//! Experiment configuration files.
//!
//! A config is a TOML or JSON table. The keys `kind`, `seed` and `out` are
//! shared by every experiment; all other keys belong to the experiment's
//! own schema and unknown keys are rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use glab_core::disorder::TailClass;
use glab_core::stats::Estimator;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Constants,
    Green,
    VarianceScan,
    SampleField,
    MaxSweep,
    Deviation,
    Highpoints,
    Repulsion,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Constants => "constants",
            Kind::Green => "green",
            Kind::VarianceScan => "variance-scan",
            Kind::SampleField => "sample-field",
            Kind::MaxSweep => "max-sweep",
            Kind::Deviation => "deviation",
            Kind::Highpoints => "highpoints",
            Kind::Repulsion => "repulsion",
        }
    }
}

/// A single value or a list, so `d = 3` and `d = [3, 4]` both parse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsParams {
    pub d: usize,
    pub tail: TailClass,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub l_values: Vec<usize>,
    #[serde(default)]
    pub capacity_eps: Vec<f64>,
    #[serde(default = "default_scales")]
    pub capacity_scales: Vec<usize>,
    #[serde(default = "default_walks")]
    pub walks_per_site: usize,
    #[serde(default = "default_step_factor")]
    pub step_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenParams {
    pub d: usize,
    pub sites: Vec<Vec<i64>>,
    /// Finite box radius; infinite volume when absent.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceParams {
    pub d: OneOrMany<usize>,
    pub n_grid: Vec<usize>,
    #[serde(default = "one")]
    pub sigma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFieldParams {
    pub d: usize,
    pub n: usize,
    /// Disorder law; the pure free field when absent.
    #[serde(default)]
    pub tail: Option<TailClass>,
    #[serde(default = "one_usize")]
    pub samples: usize,
    /// Prefix for raw dumps `<prefix>.<index>.f64` (+ `.json` sidecar).
    #[serde(default)]
    pub dump: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxSweepParams {
    pub d: usize,
    pub n_grid: Vec<usize>,
    pub tail: TailClass,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionName {
    Near,
    Far,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationParams {
    pub d: usize,
    pub l: usize,
    pub n_grid: Vec<usize>,
    pub b_grid: Vec<f64>,
    #[serde(default = "near")]
    pub region: RegionName,
    pub tail: TailClass,
    pub replicates: usize,
    #[serde(default)]
    pub two_sided: bool,
    /// Rate constant for the slope bracket; `K(L)` is computed when absent.
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HighPointParams {
    pub d: usize,
    pub n: usize,
    pub tail: TailClass,
    pub b_values: Vec<f64>,
    /// Rate constant; `K(∞)` is computed when absent.
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    pub draws: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepulsionParams {
    pub d: usize,
    pub n_grid: Vec<usize>,
    pub eps: f64,
    /// Disorder law; `η ≡ 0` when absent.
    #[serde(default)]
    pub tail: Option<TailClass>,
    #[serde(default = "both_estimators")]
    pub estimators: Vec<Estimator>,
    pub replicates: usize,
}

fn default_tol() -> f64 {
    1e-6
}
fn default_scales() -> Vec<usize> {
    vec![4, 8]
}
fn default_walks() -> usize {
    400
}
fn default_step_factor() -> f64 {
    50.0
}
fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn near() -> RegionName {
    RegionName::Near
}
fn default_slope_tolerance() -> f64 {
    0.35
}
fn default_slack() -> f64 {
    0.5
}
fn both_estimators() -> Vec<Estimator> {
    vec![Estimator::Plain, Estimator::MeanShift]
}

#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Constants(ConstantsParams),
    Green(GreenParams),
    VarianceScan(VarianceParams),
    SampleField(SampleFieldParams),
    MaxSweep(MaxSweepParams),
    Deviation(DeviationParams),
    Highpoints(HighPointParams),
    Repulsion(RepulsionParams),
}

impl Params {
    fn to_value(&self) -> Value {
        let v = match self {
            Params::Constants(p) => serde_json::to_value(p),
            Params::Green(p) => serde_json::to_value(p),
            Params::VarianceScan(p) => serde_json::to_value(p),
            Params::SampleField(p) => serde_json::to_value(p),
            Params::MaxSweep(p) => serde_json::to_value(p),
            Params::Deviation(p) => serde_json::to_value(p),
            Params::Highpoints(p) => serde_json::to_value(p),
            Params::Repulsion(p) => serde_json::to_value(p),
        };
        v.expect("config types serialise to JSON")
    }
}

/// A validated config with command-line overrides applied.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub params: Params,
}

impl ExperimentConfig {
    /// Canonical JSON of everything that determines the results; the
    /// output path is not part of it.
    pub fn canonical(&self) -> Value {
        let mut v = self.params.to_value();
        let map = v.as_object_mut().expect("params are tables");
        map.insert("kind".into(), self.kind.name().into());
        map.insert("seed".into(), self.seed.into());
        v
    }

    /// Hex SHA-256 of the canonical JSON (keys sorted).
    pub fn hash(&self) -> String {
        config_hash(&self.canonical())
    }
}

pub fn config_hash(canonical: &Value) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(canonical).expect("JSON values serialise");
    hex::encode(Sha256::digest(bytes))
}

/// Reads TOML (`.toml`) or JSON (anything else) into a JSON table.
pub fn read_table(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let value: Value = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).with_context(|| format!("parsing TOML config {}", path.display()))?
    } else {
        serde_json::from_str(&text).with_context(|| format!("parsing JSON config {}", path.display()))?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => bail!("config {} must be a table", path.display()),
    }
}

fn parse<T: DeserializeOwned>(table: Map<String, Value>) -> Result<T> {
    serde_path_to_error::deserialize(Value::Object(table)).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            anyhow::anyhow!("invalid config: {}", e.inner())
        } else {
            anyhow::anyhow!("invalid config field `{path}`: {}", e.inner())
        }
    })
}

/// Validates `table` against the schema of `kind` and applies overrides.
pub fn build(
    kind: Kind,
    mut table: Map<String, Value>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<ExperimentConfig> {
    if let Some(k) = table.remove("kind") {
        if k.as_str() != Some(kind.name()) {
            bail!(
                "invalid config field `kind`: {k} does not match subcommand `{}`",
                kind.name()
            );
        }
    }
    let file_seed = match table.remove("seed") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| anyhow::anyhow!("invalid config field `seed`: {v} is not a non-negative integer"))?,
        ),
    };
    let file_out = match table.remove("out") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(v) => bail!("invalid config field `out`: {v} is not a path"),
    };
    let params = match kind {
        Kind::Constants => Params::Constants(parse(table)?),
        Kind::Green => Params::Green(parse(table)?),
        Kind::VarianceScan => Params::VarianceScan(parse(table)?),
        Kind::SampleField => Params::SampleField(parse(table)?),
        Kind::MaxSweep => Params::MaxSweep(parse(table)?),
        Kind::Deviation => Params::Deviation(parse(table)?),
        Kind::Highpoints => Params::Highpoints(parse(table)?),
        Kind::Repulsion => Params::Repulsion(parse(table)?),
    };
    Ok(ExperimentConfig {
        kind,
        seed: seed.or(file_seed).unwrap_or(DEFAULT_SEED),
        out: out.or(file_out),
        params,
    })
}
