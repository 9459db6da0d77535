//! Experiment configuration: a versioned JSON document with unknown fields
//! rejected at every level.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sublil_core::{CheckpointRule, MeasureFamily, Policy, SeriesClass, TruncationSchedule};

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: Experiment,
    #[serde(default)]
    pub family: Option<MeasureFamily>,
    #[serde(default)]
    pub policy: Option<Policy>,
    #[serde(default)]
    pub schedule: TruncationSchedule,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub checkpoints: CheckpointRule,
}

fn default_horizon() -> u64 {
    100_000
}

fn default_repetitions() -> u64 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs/latest")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Axioms(AxiomParams),
    Choquet(ChoquetParams),
    Sigma(SigmaParams),
    Lln(LlnParams),
    SelfnormLil(ClusterParams),
    Cluster(ClusterParams),
    VerifyIneq(VerifyParams),
    Diagnostics(DiagnosticsParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Axioms(_) => "axioms",
            Experiment::Choquet(_) => "choquet",
            Experiment::Sigma(_) => "sigma",
            Experiment::Lln(_) => "lln",
            Experiment::SelfnormLil(_) => "selfnorm-lil",
            Experiment::Cluster(_) => "cluster",
            Experiment::VerifyIneq(_) => "verify-ineq",
            Experiment::Diagnostics(_) => "diagnostics",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomParams {
    #[serde(default = "default_cases")]
    pub cases: u32,
    #[serde(default = "default_max_members")]
    pub max_members: usize,
    #[serde(default = "default_max_atoms")]
    pub max_atoms: usize,
    #[serde(default = "default_axiom_tol")]
    pub tolerance: f64,
}

fn default_cases() -> u32 {
    500
}

fn default_max_members() -> usize {
    4
}

fn default_max_atoms() -> usize {
    6
}

fn default_axiom_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformName {
    Identity,
    Square,
    SquareOverLoglog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoquetParams {
    #[serde(default = "default_transform")]
    pub transform: TransformName,
    #[serde(default)]
    pub expected_upper: Option<f64>,
    #[serde(default)]
    pub expected_lower: Option<f64>,
    #[serde(default = "default_choquet_tol")]
    pub tolerance: f64,
}

fn default_transform() -> TransformName {
    TransformName::Identity
}

fn default_choquet_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaParams {
    #[serde(default)]
    pub expected: Option<(f64, f64)>,
    #[serde(default = "default_sigma_tol")]
    pub tolerance: f64,
}

fn default_sigma_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlnParams {
    pub target_variance: f64,
    #[serde(default)]
    pub low: usize,
    #[serde(default = "one")]
    pub high: usize,
    #[serde(default = "default_band")]
    pub band: f64,
    #[serde(default = "default_pass_fraction")]
    pub min_pass_fraction: f64,
}

fn one() -> usize {
    1
}

fn default_band() -> f64 {
    0.15
}

fn default_pass_fraction() -> f64 {
    0.95
}

/// Required shape of a covered interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandCheck {
    /// The covered interval must contain this one.
    pub contains: (f64, f64),
    /// The covered interval must lie inside this one.
    pub within: (f64, f64),
    #[serde(default)]
    pub target: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterParams {
    #[serde(default = "default_window_start")]
    pub window_start: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Check on the cluster estimate of `R_n`.
    #[serde(default)]
    pub r: Option<BandCheck>,
    /// Check on the cluster estimate of `T_n`.
    #[serde(default)]
    pub t: Option<BandCheck>,
}

fn default_window_start() -> u64 {
    1000
}

fn default_epsilon() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    pub checks: Vec<IneqCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "inequality", rename_all = "snake_case", deny_unknown_fields)]
pub enum IneqCheck {
    Exponential {
        n: u64,
        x: f64,
        y: f64,
        #[serde(default = "default_p")]
        p: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        policies: Vec<Policy>,
    },
    Martingale {
        c: f64,
        x: f64,
        y: f64,
        horizon: u64,
        policies: Vec<Policy>,
    },
}

fn default_p() -> f64 {
    3.0
}

fn default_delta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsParams {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "default_series_p")]
    pub p: u32,
    #[serde(default)]
    pub expected: Option<SeriesClass>,
    #[serde(default)]
    pub smallo_grid: Option<Vec<u64>>,
    #[serde(default)]
    pub dominance: Option<DominanceParams>,
}

fn default_n_max() -> u64 {
    1_000_000
}

fn default_series_p() -> u32 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DominanceParams {
    pub policies: Vec<Policy>,
    pub phi: Phi,
    pub bin_edges: Vec<f64>,
    pub horizon: u64,
    pub repetitions: u64,
}

/// Bounded test functions for the dominance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Phi {
    Clamp { lo: f64, hi: f64 },
    Constant { value: f64 },
}

impl Phi {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Phi::Clamp { lo, hi } => x.clamp(lo, hi),
            Phi::Constant { value } => value,
        }
    }
}

/// Line of the first occurrence of `"key"` in `text`, 1-based.
fn key_line(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

fn anchored(path: &Path, text: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    match key_line(text, key) {
        Some(line) => CliError::Config(format!("{}:{line}: {msg}", path.display())),
        None => CliError::Config(format!("{}: {msg}", path.display())),
    }
}

/// Reads, parses and validates a configuration file.
pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    parse(path, &text)
}

pub fn parse(path: &Path, text: &str) -> Result<ExperimentConfig, CliError> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    cfg.validate()
        .map_err(|(key, msg)| anchored(path, text, key, msg))?;
    Ok(cfg)
}

impl ExperimentConfig {
    /// The trajectory policy, `Constant(0)` when absent.
    pub fn trajectory_policy(&self) -> Policy {
        self.policy.clone().unwrap_or(Policy::Constant { theta: 0 })
    }

    pub fn family(&self) -> &MeasureFamily {
        self.family
            .as_ref()
            .expect("validated configs carry a family")
    }

    /// Cross-field checks. Errors name the key to anchor the message at.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.version != CONFIG_VERSION {
            return Err((
                "version",
                format!(
                    "unsupported config version {}, expected {CONFIG_VERSION}",
                    self.version
                ),
            ));
        }
        if self.repetitions == 0 {
            return Err(("repetitions", "repetitions must be >= 1".into()));
        }
        let fam = match (&self.experiment, &self.family) {
            (Experiment::Axioms(p), _) => {
                if p.cases == 0 || p.max_members == 0 || p.max_atoms == 0 {
                    return Err((
                        "experiment",
                        "cases, max_members and max_atoms must be positive".into(),
                    ));
                }
                return Ok(());
            }
            (_, None) => {
                return Err((
                    "experiment",
                    format!("experiment {} needs a family", self.experiment.name()),
                ))
            }
            (_, Some(f)) => f,
        };
        if let Some(p) = &self.policy {
            p.validate(fam.len())
                .map_err(|e| ("policy", e.to_string()))?;
        }
        let needs_path = matches!(
            self.experiment,
            Experiment::Lln(_) | Experiment::SelfnormLil(_) | Experiment::Cluster(_)
        );
        if needs_path && self.horizon < 2 {
            return Err((
                "horizon",
                format!("horizon must be >= 2, got {}", self.horizon),
            ));
        }
        match &self.experiment {
            Experiment::Lln(p) => {
                Policy::Mixture {
                    weight: 0.5,
                    low: p.low,
                    high: p.high,
                }
                .validate(fam.len())
                .map_err(|e| ("low", e.to_string()))?;
                if !(p.band > 0.0) || !(0.0..=1.0).contains(&p.min_pass_fraction) {
                    return Err((
                        "band",
                        "band must be > 0 and min_pass_fraction in [0,1]".into(),
                    ));
                }
            }
            Experiment::SelfnormLil(p) | Experiment::Cluster(p) => {
                if !(p.epsilon > 0.0) {
                    return Err(("epsilon", format!("epsilon must be > 0, got {}", p.epsilon)));
                }
                if p.window_start >= self.horizon {
                    return Err((
                        "window_start",
                        "window_start must be below the horizon".into(),
                    ));
                }
            }
            Experiment::VerifyIneq(v) => {
                if self.repetitions < 1000 {
                    return Err((
                        "repetitions",
                        "inequality checks need at least 1000 repetitions".into(),
                    ));
                }
                for c in &v.checks {
                    let policies = match c {
                        IneqCheck::Exponential { policies, .. }
                        | IneqCheck::Martingale { policies, .. } => policies,
                    };
                    if policies.is_empty() {
                        return Err(("policies", "each check needs at least one policy".into()));
                    }
                    for p in policies {
                        p.validate(fam.len())
                            .map_err(|e| ("policies", e.to_string()))?;
                    }
                }
            }
            Experiment::Diagnostics(d) => {
                if let Some(dom) = &d.dominance {
                    if dom.policies.is_empty() || dom.repetitions == 0 || dom.horizon == 0 {
                        return Err((
                            "dominance",
                            "dominance needs policies, a horizon and repetitions".into(),
                        ));
                    }
                    for p in &dom.policies {
                        p.validate(fam.len())
                            .map_err(|e| ("dominance", e.to_string()))?;
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// JSON Schema of the configuration document.
pub fn schema() -> Value {
    let policy = json!({
        "oneOf": [
            {"type": "object", "required": ["kind", "theta"], "properties": {"kind": {"const": "constant"}, "theta": {"type": "integer", "minimum": 0}}},
            {"type": "object", "required": ["kind", "thetas", "period"], "properties": {"kind": {"const": "cyclic"}, "thetas": {"type": "array", "items": {"type": "integer"}}, "period": {"type": "integer", "minimum": 1}}},
            {"type": "object", "required": ["kind", "weight", "low", "high"], "properties": {"kind": {"const": "mixture"}, "weight": {"type": "number", "minimum": 0, "maximum": 1}, "low": {"type": "integer"}, "high": {"type": "integer"}}},
            {"type": "object", "required": ["kind", "objective"], "properties": {"kind": {"const": "greedy"}, "objective": {"enum": ["maximize", "minimize"]}}},
            {"type": "object", "required": ["kind", "thetas"], "properties": {"kind": {"const": "scripted"}, "thetas": {"type": "array", "items": {"type": "integer"}}}}
        ]
    });
    let distribution = json!({
        "oneOf": [
            {"type": "object", "required": ["kind", "atoms"], "properties": {"kind": {"const": "discrete"}, "atoms": {"type": "array", "items": {"type": "array", "prefixItems": [{"type": "number"}, {"type": "number"}]}}}},
            {"type": "object", "required": ["kind", "mean", "variance"], "properties": {"kind": {"const": "gaussian"}, "mean": {"type": "number"}, "variance": {"type": "number", "exclusiveMinimum": 0}}},
            {"type": "object", "required": ["kind", "tail_index", "scale"], "properties": {"kind": {"const": "pareto"}, "tail_index": {"type": "number", "exclusiveMinimum": 0}, "scale": {"type": "number", "exclusiveMinimum": 0}}},
            {"type": "object", "required": ["kind", "magnitude"], "properties": {"kind": {"const": "rademacher"}, "magnitude": {"type": "number", "exclusiveMinimum": 0}}}
        ]
    });
    let band = json!({
        "type": "object",
        "required": ["contains", "within"],
        "properties": {
            "contains": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "within": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "target": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
        },
        "additionalProperties": false
    });
    let experiment = json!({
        "type": "object",
        "required": ["kind"],
        "properties": {
            "kind": {"enum": ["axioms", "choquet", "sigma", "lln", "selfnorm-lil", "cluster", "verify-ineq", "diagnostics"]},
            "cases": {"type": "integer", "default": 500},
            "max_members": {"type": "integer", "default": 4},
            "max_atoms": {"type": "integer", "default": 6},
            "tolerance": {"type": "number"},
            "transform": {"enum": ["identity", "square", "square_over_loglog"]},
            "expected_upper": {"type": "number"},
            "expected_lower": {"type": "number"},
            "expected": {},
            "target_variance": {"type": "number"},
            "low": {"type": "integer"},
            "high": {"type": "integer"},
            "band": {"type": "number", "default": 0.15},
            "min_pass_fraction": {"type": "number", "default": 0.95},
            "window_start": {"type": "integer", "default": 1000},
            "epsilon": {"type": "number", "default": 0.1},
            "r": band.clone(),
            "t": band,
            "checks": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["inequality", "x", "y", "policies"],
                    "properties": {
                        "inequality": {"enum": ["exponential", "martingale"]},
                        "n": {"type": "integer"}, "x": {"type": "number"}, "y": {"type": "number"},
                        "p": {"type": "number", "default": 3}, "delta": {"type": "number", "default": 1},
                        "c": {"type": "number"}, "horizon": {"type": "integer"},
                        "policies": {"type": "array", "items": policy.clone()}
                    }
                }
            },
            "delta": {"type": "number", "default": 1},
            "n_max": {"type": "integer", "default": 1000000},
            "p": {"type": "integer", "default": 3},
            "smallo_grid": {"type": "array", "items": {"type": "integer"}},
            "dominance": {
                "type": "object",
                "required": ["policies", "phi", "bin_edges", "horizon", "repetitions"],
                "properties": {
                    "policies": {"type": "array", "items": policy.clone()},
                    "phi": {"oneOf": [
                        {"type": "object", "properties": {"kind": {"const": "clamp"}, "lo": {"type": "number"}, "hi": {"type": "number"}}},
                        {"type": "object", "properties": {"kind": {"const": "constant"}, "value": {"type": "number"}}}
                    ]},
                    "bin_edges": {"type": "array", "items": {"type": "number"}},
                    "horizon": {"type": "integer"},
                    "repetitions": {"type": "integer"}
                }
            }
        }
    });
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "sublil experiment configuration",
        "type": "object",
        "required": ["version", "experiment"],
        "additionalProperties": false,
        "properties": {
            "version": {"const": CONFIG_VERSION},
            "experiment": experiment,
            "family": {
                "type": "object",
                "required": ["members"],
                "additionalProperties": false,
                "properties": {
                    "members": {"type": "array", "minItems": 1, "items": distribution},
                    "quadrature_tol": {"type": "number", "default": 1e-10}
                }
            },
            "policy": policy,
            "schedule": {
                "type": "object",
                "additionalProperties": false,
                "properties": {
                    "p": {"type": "number", "default": 3},
                    "alpha_rule": {"oneOf": [
                        {"type": "object", "properties": {"rule": {"const": "inverse_sqrt_t"}}},
                        {"type": "object", "properties": {"rule": {"const": "power_of_t"}, "exponent": {"type": "number"}}}
                    ]}
                }
            },
            "horizon": {"type": "integer", "minimum": 2, "default": 100000},
            "repetitions": {"type": "integer", "minimum": 1, "default": 1},
            "seed": {"type": "integer", "minimum": 0, "default": 0},
            "output_dir": {"type": "string", "default": "runs/latest"},
            "checkpoints": {"oneOf": [
                {"type": "object", "properties": {"rule": {"const": "geometric"}, "ratio": {"type": "number", "exclusiveMinimum": 1}}},
                {"type": "object", "properties": {"rule": {"const": "all"}}}
            ]}
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
  "version": 1,
  "experiment": {"kind": "sigma", "expected": [1, 9]},
  "family": {"members": [
    {"kind": "rademacher", "magnitude": 1},
    {"kind": "rademacher", "magnitude": 3}
  ]}
}"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = parse(Path::new("c.json"), GOOD).unwrap();
        assert_eq!(cfg.horizon, 100_000);
        assert_eq!(cfg.checkpoints, CheckpointRule::Geometric { ratio: 1.01 });
        assert_eq!(
            cfg.experiment,
            Experiment::Sigma(SigmaParams {
                expected: Some((1.0, 9.0)),
                tolerance: 1e-6
            })
        );
    }

    #[test]
    fn unknown_fields_are_rejected_with_line() {
        let bad = GOOD.replace("\"version\": 1,", "\"version\": 1,\n  \"colour\": 3,");
        let err = parse(Path::new("c.json"), &bad).unwrap_err().to_string();
        assert!(err.starts_with("c.json:3:"), "{err}");
        let bad = GOOD.replace("\"magnitude\": 3", "\"magnitude\": 3, \"extra\": 1");
        assert!(parse(Path::new("c.json"), &bad).is_err());
    }

    #[test]
    fn invalid_members_are_rejected() {
        let bad = GOOD.replace("\"magnitude\": 3", "\"magnitude\": -3");
        let err = parse(Path::new("c.json"), &bad).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn policy_out_of_range_is_anchored() {
        let bad = GOOD.replace(
            "\"version\": 1,",
            "\"version\": 1,\n  \"policy\": {\"kind\": \"constant\", \"theta\": 5},",
        );
        let err = parse(Path::new("c.json"), &bad).unwrap_err().to_string();
        assert!(err.starts_with("c.json:3:"), "{err}");
    }

    #[test]
    fn version_is_checked() {
        let bad = GOOD.replace("\"version\": 1", "\"version\": 7");
        let err = parse(Path::new("c.json"), &bad).unwrap_err().to_string();
        assert!(err.starts_with("c.json:2:"), "{err}");
    }

    #[test]
    fn config_round_trips() {
        let cfg = parse(Path::new("c.json"), GOOD).unwrap();
        let back: ExperimentConfig =
            serde_json::from_value(serde_json::to_value(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
