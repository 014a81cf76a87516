use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::{Family, DEFAULT_PEAKS};
use crate::error::{Error, Result};
use crate::glb::{AlgorithmKind, AlgorithmSettings, Link};
use crate::tuners::{TunerKind, CANDIDATES_C1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    LipschitzBench,
    GlbBench,
    GridSweep,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::LipschitzBench => "lipschitz_bench",
            ExperimentKind::GlbBench => "glb_bench",
            ExperimentKind::GridSweep => "grid_sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    Synthetic,
    Csv,
    Switching,
}

/// What the per-round curve accumulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Regret,
    Reward,
}

/// Methods of the Lipschitz bench.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzMethod {
    ZoomingPlain,
    ZoomingTsRestart,
    OracleRestart,
    DoubleRestarts,
}

impl LipschitzMethod {
    pub fn label(self) -> &'static str {
        match self {
            LipschitzMethod::ZoomingPlain => "zooming_plain",
            LipschitzMethod::ZoomingTsRestart => "zooming_ts_restart",
            LipschitzMethod::OracleRestart => "oracle_restart",
            LipschitzMethod::DoubleRestarts => "double_restarts",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentConfig {
    pub kind: EnvironmentKind,
    pub dim: usize,
    /// Arms per round (`K`).
    pub arms: usize,
    pub link: Link,
    /// Standard deviation of Gaussian reward noise.
    pub noise_sigma: f64,
    pub users_path: Option<PathBuf>,
    pub items_path: Option<PathBuf>,
    /// Users averaged into `theta*` for CSV environments.
    pub n_users: usize,
    pub family: Family,
    /// Number of change rounds drawn once per experiment from the base seed.
    pub change_count: usize,
    /// Explicit change rounds; overrides `change_count` when set.
    pub change_rounds: Option<Vec<u64>>,
    /// Peak locations; with explicit change rounds, the exact sequence.
    pub peaks: Vec<f64>,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        Self {
            kind: EnvironmentKind::Synthetic,
            dim: 5,
            arms: 20,
            link: Link::Identity,
            noise_sigma: 0.25,
            users_path: None,
            items_path: None,
            n_users: 300,
            family: Family::Triangle,
            change_count: 3,
            change_rounds: None,
            peaks: DEFAULT_PEAKS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    pub lambda: f64,
    /// Noise scale assumed by the theoretical exploration rate.
    pub sigma: f64,
    /// Confidence level; defaults to `1/T`.
    pub delta: Option<f64>,
    pub norm_bound: f64,
    /// Tuning interval of every hyperparameter.
    pub interval: [f64; 2],
    pub glm_ridge: f64,
    pub warmup_eigen_floor: f64,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        let s = AlgorithmSettings::new(1, 1);
        Self {
            kind: AlgorithmKind::LinUcb,
            lambda: s.lambda,
            sigma: s.sigma,
            delta: None,
            norm_bound: s.norm_bound,
            interval: [s.interval.0, s.interval.1],
            glm_ridge: s.glm_ridge,
            warmup_eigen_floor: s.warmup_eigen_floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuningConfig {
    pub methods: Vec<TunerKind>,
    /// Candidate set of the discrete baselines.
    pub candidates: Vec<f64>,
    /// CDT warm-up length; defaults to the schedule formula.
    pub t1: Option<u64>,
    /// CDT restart epoch; defaults to the schedule formula.
    pub t2: Option<u64>,
    /// Noise scale used by the CDT top layer.
    pub tau0: f64,
    pub grid_resolution: Option<f64>,
}

impl Default for TuningConfig {
    fn default() -> Self {
        Self {
            methods: vec![TunerKind::Cdt, TunerKind::Syndicated, TunerKind::Op, TunerKind::Theory],
            candidates: CANDIDATES_C1.to_vec(),
            t1: None,
            t2: None,
            tau0: 0.5,
            grid_resolution: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LipschitzConfig {
    pub methods: Vec<LipschitzMethod>,
    /// Restart epoch `H`; defaults to `10 ceil((T/c)^{3/4})`, or `T` when `c = 0`.
    pub epoch_len: Option<u64>,
    pub tau0: f64,
    pub grid_resolution: Option<f64>,
    /// Upper bound on the zooming dimension used by the double-restart ladder.
    pub p_u: f64,
}

impl Default for LipschitzConfig {
    fn default() -> Self {
        Self {
            methods: vec![
                LipschitzMethod::ZoomingPlain,
                LipschitzMethod::ZoomingTsRestart,
                LipschitzMethod::OracleRestart,
            ],
            epoch_len: None,
            tau0: 0.5,
            grid_resolution: None,
            p_u: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Values of the first hyperparameter; the rest follow their theory.
    pub values: Vec<f64>,
    /// Window length for the centered group mean-reward export; `None`
    /// disables the export.
    pub group_window: Option<u64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        let mut values = vec![0.1];
        values.extend((1..=20).map(|i| i as f64 * 0.5));
        Self {
            values,
            group_window: None,
        }
    }
}

/// A complete experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub horizon: u64,
    #[serde(default = "one")]
    pub reps: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub metric: Metric,
    /// Fill the `wall_seconds` column; off by default so reruns are
    /// byte-identical.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub tuning: TuningConfig,
    #[serde(default)]
    pub lipschitz: LipschitzConfig,
    #[serde(default)]
    pub grid: GridConfig,
}

fn one() -> u64 {
    1
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, horizon: u64) -> Self {
        Self {
            kind,
            horizon,
            reps: 1,
            seed: 0,
            out: None,
            metric: Metric::Regret,
            record_timing: false,
            environment: EnvironmentConfig::default(),
            algorithm: AlgorithmConfig::default(),
            tuning: TuningConfig::default(),
            lipschitz: LipschitzConfig::default(),
            grid: GridConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parse `text`, apply `key=value` overrides (dotted keys address
    /// sections), then validate.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut value: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| config_error(e.to_string()))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let cfg: Self = toml::Value::Table(value)
            .try_into()
            .map_err(|e: toml::de::Error| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read and validate a file. Relative CSV paths resolve against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml_with_overrides(&text, overrides)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.environment.users_path, &mut cfg.environment.items_path]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_error(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(config_error("reps must be >= 1"));
        }
        let env = &self.environment;
        if !(env.noise_sigma >= 0.0) {
            return Err(config_error("environment.noise_sigma must be >= 0"));
        }
        match self.kind {
            ExperimentKind::LipschitzBench => {
                if env.kind != EnvironmentKind::Switching {
                    return Err(config_error("lipschitz_bench needs environment.kind = \"switching\""));
                }
                if self.lipschitz.methods.is_empty() {
                    return Err(config_error("lipschitz.methods is empty"));
                }
                if env.peaks.is_empty() {
                    return Err(config_error("environment.peaks is empty"));
                }
                if self.horizon > 0 && self.horizon < 2 {
                    return Err(config_error("lipschitz_bench needs horizon >= 2"));
                }
            }
            ExperimentKind::GlbBench | ExperimentKind::GridSweep => {
                if env.kind == EnvironmentKind::Switching {
                    return Err(config_error(format!(
                        "{} needs a synthetic or csv environment",
                        self.kind.label()
                    )));
                }
                if env.dim == 0 || env.arms == 0 {
                    return Err(config_error("environment.dim and environment.arms must be >= 1"));
                }
                if env.kind == EnvironmentKind::Csv
                    && (env.users_path.is_none() || env.items_path.is_none())
                {
                    return Err(config_error("csv environment needs users_path and items_path"));
                }
                let [lo, hi] = self.algorithm.interval;
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(config_error("algorithm.interval must be [lo, hi] with lo <= hi"));
                }
                if self.kind == ExperimentKind::GlbBench {
                    if self.tuning.methods.is_empty() {
                        return Err(config_error("tuning.methods is empty"));
                    }
                    let needs_candidates = self
                        .tuning
                        .methods
                        .iter()
                        .any(|m| matches!(m, TunerKind::Syndicated | TunerKind::Op));
                    if needs_candidates && self.tuning.candidates.is_empty() {
                        return Err(config_error("tuning.candidates is empty"));
                    }
                } else if self.grid.values.is_empty() {
                    return Err(config_error("grid.values is empty"));
                }
            }
        }
        Ok(())
    }

    /// Settings for building the bottom-layer algorithm.
    pub fn algorithm_settings(&self) -> AlgorithmSettings {
        let a = &self.algorithm;
        let mut s = AlgorithmSettings::new(self.environment.dim, self.horizon);
        s.lambda = a.lambda;
        s.sigma = a.sigma;
        s.delta = a.delta;
        s.norm_bound = a.norm_bound;
        s.link = self.environment.link;
        s.interval = (a.interval[0], a.interval[1]);
        s.glm_ridge = a.glm_ridge;
        s.warmup_eigen_floor = a.warmup_eigen_floor;
        s
    }
}

/// Apply one `key=value` override, where `key` may be dotted. The value is
/// read as a TOML value, falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_error(format!("override {assignment:?} is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(config_error(format!("override {assignment:?} has an empty key")));
    }
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let (last, sections) = parts.split_last().expect("split yields one part");
    let mut cur = table;
    for s in sections {
        let entry = cur
            .entry(s.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| config_error(format!("override {key:?}: {s} is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "kind = \"glb_bench\"\nhorizon = 100\n";

    #[test]
    fn defaults_fill_sections() {
        let c = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.reps, 1);
        assert_eq!(c.tuning.candidates, CANDIDATES_C1.to_vec());
        assert_eq!(c.algorithm.interval, [0.1, 5.0]);
        assert_eq!(c.grid.values.len(), 21);
        assert_eq!(c.grid.values[2], 1.0);
        assert_eq!(*c.grid.values.last().unwrap(), 10.0);
    }

    #[test]
    fn overrides_reach_sections() {
        let o = vec![
            "environment.dim=7".to_string(),
            "reps = 3".to_string(),
            "tuning.methods=[\"cdt\"]".to_string(),
            "algorithm.kind=lints".to_string(),
        ];
        let c = ExperimentConfig::from_toml_with_overrides(MINIMAL, &o).unwrap();
        assert_eq!(c.environment.dim, 7);
        assert_eq!(c.reps, 3);
        assert_eq!(c.tuning.methods, vec![TunerKind::Cdt]);
        assert_eq!(c.algorithm.kind, AlgorithmKind::LinTs);
    }

    #[test]
    fn rejects_invalid() {
        assert!(ExperimentConfig::from_toml_str("kind = \"glb_bench\"\nhorizon = 10\nreps = 0\n").is_err());
        assert!(ExperimentConfig::from_toml_str("kind = \"lipschitz_bench\"\nhorizon = 10\n").is_err());
        assert!(ExperimentConfig::from_toml_str("kind = \"glb_bench\"\nhorizon = 10\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_with_overrides(MINIMAL, &["noequals".into()]).is_err());
    }

    #[test]
    fn toml_roundtrip() {
        let c = ExperimentConfig::new(ExperimentKind::GridSweep, 50);
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(c, back);
    }
}
