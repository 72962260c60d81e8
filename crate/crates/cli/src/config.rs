//! Experiment configuration.
//!
//! A config is a TOML document. Top-level `seed`, `replications` and
//! `out_dir` act as defaults for every `[[scenario]]` block:
//!
//! ```toml
//! seed = 20240501
//! replications = 2000
//! out_dir = "out"
//!
//! [[scenario]]
//! id = "beta07"
//! signal.kind = "benchmark"
//! signal.beta = 0.7
//! signal.z0 = 0.7071067811865476
//! n_list = [100, 1000, 5000, 10000]
//! grid.beta_lo = 0.6
//! grid.beta_hi = 0.8
//! grid.K = 1.0
//! # grid.lambda = 7.5
//! ```
//!
//! Parsing reports syntax and schema problems with their line; validation
//! then checks every value against the library's preconditions before any
//! simulation starts.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use seqlepski::lab::GridConfig;
use seqlepski::SignalFunction;

pub const DEFAULT_OUT_DIR: &str = "out";
pub const DEFAULT_REPLICATIONS: usize = 15_000;
pub const DEFAULT_Z_LIST: [f64; 3] = [2.0, 2.5, 3.0];
pub const DEFAULT_STOPPING_H: [f64; 3] = [0.05, 0.1, 0.2];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("{origin}: {field}: {message}")]
    Invalid {
        origin: String,
        field: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub replications: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    replications: Option<usize>,
    out_dir: Option<String>,
    #[serde(default)]
    scenario: Vec<RawScenario>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: Option<String>,
    signal: RawSignal,
    n_list: Vec<usize>,
    replications: Option<usize>,
    grid: RawGrid,
    seed: Option<u64>,
    out_dir: Option<String>,
    tail: Option<RawTail>,
    stopping: Option<RawStopping>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Benchmark,
    Constant,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    kind: SignalKind,
    beta: Option<f64>,
    z0: f64,
    c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    beta_lo: f64,
    beta_hi: f64,
    #[serde(rename = "K")]
    holder_k: f64,
    lambda: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTail {
    z_list: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStopping {
    h_list: Vec<f64>,
}

/// The signal as written in the config, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalSpec {
    Benchmark { beta: f64, z0: f64 },
    Constant { c: f64, z0: f64 },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub spec: SignalSpec,
    pub signal: SignalFunction,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub grid: GridConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub z_list: Vec<f64>,
    pub stopping_h: Vec<f64>,
}

impl Scenario {
    pub fn z0(&self) -> f64 {
        self.signal.z0()
    }

    /// Effective threshold constant (the override or the default).
    pub fn lambda(&self) -> f64 {
        // Validation already built a grid with these parameters.
        self.grid
            .build(self.n_list[0])
            .map(|g| g.lambda)
            .expect("validated grid")
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub out_dir: PathBuf,
    pub scenarios: Vec<Scenario>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse {
            origin: origin.clone(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &origin, overrides)
    }

    /// Parses and validates config text. `origin` names the source in errors.
    pub fn parse(text: &str, origin: &str, overrides: Overrides) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            origin: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        validate(raw, origin, overrides)
    }
}

fn validate(raw: RawConfig, origin: &str, overrides: Overrides) -> Result<ExperimentConfig, ConfigError> {
    let invalid = |field: String, message: String| ConfigError::Invalid {
        origin: origin.to_string(),
        field,
        message,
    };
    let out_dir = PathBuf::from(raw.out_dir.as_deref().unwrap_or(DEFAULT_OUT_DIR));
    let mut scenarios = Vec::with_capacity(raw.scenario.len());

    for (index, s) in raw.scenario.into_iter().enumerate() {
        let field = |name: &str| format!("scenario[{index}].{name}");
        let id = s.id.unwrap_or_else(|| format!("s{index}"));
        if id.is_empty()
            || !id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(invalid(field("id"), format!("`{id}` must be non-empty [A-Za-z0-9_.-]")));
        }
        if scenarios.iter().any(|o: &Scenario| o.id == id) {
            return Err(invalid(field("id"), format!("duplicate scenario id `{id}`")));
        }

        let (spec, signal) = match s.signal.kind {
            SignalKind::Benchmark => {
                let beta = s
                    .signal
                    .beta
                    .ok_or_else(|| invalid(field("signal.beta"), "required for kind = \"benchmark\"".into()))?;
                let spec = SignalSpec::Benchmark { beta, z0: s.signal.z0 };
                let f = SignalFunction::benchmark(beta, s.signal.z0)
                    .map_err(|e| invalid(field("signal"), e.to_string()))?;
                (spec, f)
            }
            SignalKind::Constant => {
                let c = s
                    .signal
                    .c
                    .ok_or_else(|| invalid(field("signal.c"), "required for kind = \"constant\"".into()))?;
                let spec = SignalSpec::Constant { c, z0: s.signal.z0 };
                let f = SignalFunction::constant(c, s.signal.z0)
                    .map_err(|e| invalid(field("signal"), e.to_string()))?;
                (spec, f)
            }
        };

        if s.n_list.is_empty() {
            return Err(invalid(field("n_list"), "must not be empty".into()));
        }
        let grid = GridConfig {
            beta_lo: s.grid.beta_lo,
            beta_hi: s.grid.beta_hi,
            holder_k: s.grid.holder_k,
            lambda: s.grid.lambda,
        };
        for &n in &s.n_list {
            grid.build(n).map_err(|e| invalid(field("grid"), format!("n = {n}: {e}")))?;
        }

        let replications = overrides
            .replications
            .or(s.replications)
            .or(raw.replications)
            .unwrap_or(DEFAULT_REPLICATIONS);
        if replications == 0 {
            return Err(invalid(field("replications"), "must be at least 1".into()));
        }
        let seed = overrides.seed.or(s.seed).or(raw.seed).unwrap_or(0);

        let z_list = s.tail.map_or_else(|| DEFAULT_Z_LIST.to_vec(), |t| t.z_list);
        if let Some(z) = z_list.iter().find(|z| !(**z >= 2.0 && z.is_finite())) {
            return Err(invalid(field("tail.z_list"), format!("{z} is not a finite value >= 2")));
        }
        let stopping_h = s.stopping.map_or_else(|| DEFAULT_STOPPING_H.to_vec(), |t| t.h_list);
        if let Some(h) = stopping_h.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(invalid(field("stopping.h_list"), format!("{h} is not a positive bandwidth")));
        }

        scenarios.push(Scenario {
            id,
            spec,
            signal,
            n_list: s.n_list,
            replications,
            grid,
            seed,
            out_dir: s.out_dir.map_or_else(|| out_dir.clone(), PathBuf::from),
            z_list,
            stopping_h,
        });
    }
    Ok(ExperimentConfig { out_dir, scenarios })
}
