use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::pointset::NetSpec;
use crate::witness::DirectionPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Witness,
    Proof2,
    Stress,
    Sweep,
    Boxes,
    Metric,
    Linebuild,
    Schedule,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Witness => "witness",
            Experiment::Proof2 => "proof2",
            Experiment::Stress => "stress",
            Experiment::Sweep => "sweep",
            Experiment::Boxes => "boxes",
            Experiment::Metric => "metric",
            Experiment::Linebuild => "linebuild",
            Experiment::Schedule => "schedule",
        }
    }

    /// Experiments that draw random numbers from the run seed.
    pub fn needs_seed(self) -> bool {
        matches!(self, Experiment::Sweep | Experiment::Boxes | Experiment::Metric)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Experiment parameters; each experiment reads the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retry_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<DirectionPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exec: Option<Exec>,
    /// Sweep nets: grid spacing is `grid_factor·ε^{1/d}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    /// Boxes: number of boxes, centers uniform in the ball of this radius,
    /// aspect ratios log-uniform in `[1/aspect_max, aspect_max]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boxes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aspect_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_max: Option<usize>,
    /// Metric suite sizes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sets: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,
    /// Line building.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub net: Option<NetSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: None,
            d: None,
            net: None,
            params: Params::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            field: "<document>".into(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiment.needs_seed() && self.seed.is_none() {
            return Err(Error::Config {
                field: "seed".into(),
                message: format!("experiment `{}` is stochastic and needs a seed", self.experiment.name()),
            });
        }
        Ok(())
    }
}

/// Turns a TOML error into a diagnostic naming the line and, when the
/// message mentions one, the offending field.
fn toml_error(text: &str, err: &toml::de::Error) -> Error {
    let message = err.message().to_string();
    let line = err
        .span()
        .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
    let field = message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .or_else(|| {
            let span = err.span()?;
            let line_text = text[..span.start.min(text.len())].rsplit('\n').next()?;
            let after = &text[span.start.min(text.len())..];
            let key = format!("{line_text}{}", after.split('\n').next().unwrap_or(""));
            key.split('=').next().map(|k| k.trim().to_string())
        })
        .filter(|f| !f.is_empty())
        .unwrap_or_else(|| "<document>".to_string());
    let message = match line {
        Some(l) => format!("line {l}: {message}"),
        None => message,
    };
    Error::Config { field, message }
}
