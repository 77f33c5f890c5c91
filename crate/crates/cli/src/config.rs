use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rlab_core::counterexample::DEFAULT_PRECISION;

use crate::error::{CliError, CliResult};

/// One experiment with its own parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Experiment {
    /// ‖f‖_X and, with a weight, ‖f‖_{X(w)}.
    Norm {
        function: String,
    },
    /// Distribution function and decreasing rearrangement of f, optionally tested against g.
    Rearrange {
        function: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        other: Option<String>,
    },
    /// Exact Khintchine check of one coefficient vector, or of a seeded battery.
    Khintchine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coeffs: Option<String>,
    },
    Equiv,
    Multiplicator {
        function: String,
        budget: usize,
    },
    Projnorm,
    Theorems {
        budget: usize,
    },
    CexPlan {
        m: Vec<u64>,
        strict: bool,
    },
    CexBuild {
        m: Vec<u64>,
        blocks: usize,
    },
    CexCertify {
        m: Vec<u64>,
        blocks: usize,
    },
    /// Dilation indices and Δ² for φ.
    Indices {
        phi: String,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Norm { .. } => "norm",
            Experiment::Rearrange { .. } => "rearrange",
            Experiment::Khintchine { .. } => "khintchine",
            Experiment::Equiv => "equiv",
            Experiment::Multiplicator { .. } => "multiplicator",
            Experiment::Projnorm => "projnorm",
            Experiment::Theorems { .. } => "theorems",
            Experiment::CexPlan { .. } => "cex-plan",
            Experiment::CexBuild { .. } => "cex-build",
            Experiment::CexCertify { .. } => "cex-certify",
            Experiment::Indices { .. } => "indices",
        }
    }

    /// Experiments whose output depends on a random stream.
    pub fn is_randomized(&self) -> bool {
        match self {
            Experiment::Khintchine { coeffs } => coeffs.is_none(),
            Experiment::Equiv
            | Experiment::Multiplicator { .. }
            | Experiment::Projnorm
            | Experiment::Theorems { .. } => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    /// Truncation ranks (coefficient counts for Khintchine batteries).
    #[serde(default)]
    pub n: Vec<u32>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_trials() -> usize {
    64
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            space: None,
            weight: None,
            n: Vec::new(),
            trials: default_trials(),
            seed: None,
            precision: default_precision(),
            out: None,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    /// Checks the cross-field rules that do not depend on parsing descriptors.
    pub fn validate(&self) -> CliResult<()> {
        if self.experiment.is_randomized() && self.seed.is_none() {
            return Err(CliError::Config(format!(
                "{} is randomized and needs --seed",
                self.experiment.name()
            )));
        }
        if self.precision < 16 || self.precision > 4096 {
            return Err(CliError::Config(format!(
                "precision must lie in 16..=4096 bits, got {}",
                self.precision
            )));
        }
        let needs_space = matches!(
            self.experiment,
            Experiment::Norm { .. }
                | Experiment::Equiv
                | Experiment::Multiplicator { .. }
                | Experiment::Projnorm
                | Experiment::Theorems { .. }
        );
        if needs_space && self.space.is_none() {
            return Err(CliError::Config(format!(
                "{} needs --space",
                self.experiment.name()
            )));
        }
        if self.n.contains(&0) {
            return Err(CliError::Config("ranks in --n must be positive".into()));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// `n` or the given default ranks.
    pub fn ranks(&self, default: &[u32]) -> Vec<u32> {
        if self.n.is_empty() {
            default.to_vec()
        } else {
            self.n.clone()
        }
    }
}
