use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::driver::Distribution;
use crate::error::{Error, Result};
use crate::mechanisms::DataFormat;

/// The private algorithms an experiment can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProblemKind {
    Svt,
    OutputPerturbedLogreg,
    DpsgdLogreg,
    DpsgdSvm,
    DpadamLogreg,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::Svt,
        ProblemKind::OutputPerturbedLogreg,
        ProblemKind::DpsgdLogreg,
        ProblemKind::DpsgdSvm,
        ProblemKind::DpadamLogreg,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Svt => "svt",
            ProblemKind::OutputPerturbedLogreg => "output_perturbed_logreg",
            ProblemKind::DpsgdLogreg => "dpsgd_logreg",
            ProblemKind::DpsgdSvm => "dpsgd_svm",
            ProblemKind::DpadamLogreg => "dpadam_logreg",
        }
    }

    pub fn is_training(&self) -> bool {
        !matches!(self, ProblemKind::Svt)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|p| p.as_str()).collect();
            Error::config(format!("problem: unknown problem `{s}`, expected one of {}", names.join(", ")))
        })
    }
}

impl TryFrom<String> for ProblemKind {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse().map_err(|e: Error| match e {
            Error::Config(msg) => msg,
            other => other.to_string(),
        })
    }
}

impl From<ProblemKind> for String {
    fn from(p: ProblemKind) -> String {
        p.as_str().to_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMethod {
    Bo,
    Random,
    Grid,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    /// Seed points of the BO loop.
    pub k0: Option<usize>,
    /// BO iterations after the seed points.
    pub k: Option<usize>,
    /// Number of random-search draws.
    pub evaluations: Option<usize>,
    pub points_per_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvtSettings {
    pub queries: usize,
    pub positives: usize,
}

impl Default for SvtSettings {
    fn default() -> Self {
        Self {
            queries: 100,
            positives: 10,
        }
    }
}

/// Training data. Without a `path` a synthetic separable set is generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatasetSettings {
    pub path: Option<PathBuf>,
    pub format: Option<DataFormat>,
    pub train: usize,
    pub test: usize,
    pub synthetic_dim: usize,
    pub synthetic_margin: f64,
}

impl Default for DatasetSettings {
    fn default() -> Self {
        Self {
            path: None,
            format: None,
            train: 2000,
            test: 400,
            synthetic_dim: 10,
            synthetic_margin: 0.05,
        }
    }
}

/// Narrows or widens one preset dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainOverride {
    pub name: String,
    pub low: f64,
    pub high: f64,
}

/// Replaces the random-search law of one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingOverride {
    pub name: String,
    pub distribution: Distribution,
    #[serde(default)]
    pub int_valued: bool,
    pub accept: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcquisitionSettings {
    pub candidates: usize,
    pub refine_top: usize,
    pub refine_iters: usize,
}

impl Default for AcquisitionSettings {
    fn default() -> Self {
        Self {
            candidates: 1000,
            refine_top: 5,
            refine_iters: 50,
        }
    }
}

fn default_anti_ideal() -> [f64; 2] {
    [10.0, 1.0]
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// A declarative experiment, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub method: SearchMethod,
    #[serde(default)]
    pub seed: u64,
    /// Utility-oracle repetitions R; defaults per problem.
    pub repetitions: Option<usize>,
    /// Target δ; defaults per problem.
    pub delta: Option<f64>,
    #[serde(default = "default_anti_ideal")]
    pub anti_ideal: [f64; 2],
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub svt: SvtSettings,
    #[serde(default)]
    pub dataset: DatasetSettings,
    #[serde(default)]
    pub domain: Vec<DomainOverride>,
    #[serde(default)]
    pub sampling: Vec<SamplingOverride>,
    #[serde(default)]
    pub acquisition: AcquisitionSettings,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies `DPARETO_SEED` and `DPARETO_OUT`.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(seed) = std::env::var("DPARETO_SEED") {
            self.seed = seed
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("DPARETO_SEED: `{seed}` is not an unsigned integer")))?;
        }
        if let Ok(out) = std::env::var("DPARETO_OUT") {
            self.output = PathBuf::from(out);
        }
        Ok(())
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions.unwrap_or(match self.problem {
            ProblemKind::Svt => 50,
            _ => 5,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(match self.problem {
            ProblemKind::Svt => 0.0,
            ProblemKind::OutputPerturbedLogreg => 1e-6,
            _ => 1e-5,
        })
    }

    pub fn k0(&self) -> usize {
        self.budget.k0.unwrap_or(16)
    }

    pub fn k(&self) -> usize {
        self.budget.k.unwrap_or(256)
    }

    pub fn random_budget(&self) -> usize {
        self.budget.evaluations.unwrap_or(self.k0() + self.k())
    }

    pub fn points_per_dim(&self) -> usize {
        self.budget.points_per_dim.unwrap_or(3)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<usize>| match v {
            Some(0) => Err(Error::config(format!("budget.{name}: must be positive"))),
            _ => Ok(()),
        };
        positive("k0", self.budget.k0)?;
        positive("evaluations", self.budget.evaluations)?;
        positive("points_per_dim", self.budget.points_per_dim)?;
        if self.method == SearchMethod::Bo && self.k0() < 2 {
            return Err(Error::config("budget.k0: BO needs at least 2 seed points"));
        }
        if self.method == SearchMethod::Grid && self.points_per_dim() < 2 {
            return Err(Error::config("budget.points_per_dim: must be at least 2"));
        }
        if self.repetitions == Some(0) {
            return Err(Error::config("repetitions: must be positive"));
        }
        let delta = self.delta();
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::config(format!("delta: {delta} outside [0, 1)")));
        }
        if self.problem.is_training() && delta == 0.0 {
            return Err(Error::config("delta: training problems need delta > 0"));
        }
        let [e, u] = self.anti_ideal;
        if !(e.is_finite() && e > 0.0 && u > 0.0 && u <= 1.0) {
            return Err(Error::config(format!("anti_ideal: ({e}, {u}) must satisfy eps > 0 and 0 < error <= 1")));
        }
        if self.svt.positives > self.svt.queries {
            return Err(Error::config("svt.positives: exceeds svt.queries"));
        }
        let ds = &self.dataset;
        if self.problem.is_training() {
            if ds.train < 2 || ds.test == 0 {
                return Err(Error::config("dataset: need train >= 2 and test >= 1"));
            }
            if let Some(path) = &ds.path {
                if !path.exists() {
                    return Err(Error::config(format!("dataset.path: {} does not exist", path.display())));
                }
            }
        }
        let acq = &self.acquisition;
        if acq.candidates == 0 {
            return Err(Error::config("acquisition.candidates: must be positive"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
