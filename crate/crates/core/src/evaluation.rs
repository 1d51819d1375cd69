//! Evaluation records and the append-only JSONL evaluation log.
//!
//! Wire format, one object per line, keys in this order:
//! `method, seed, lambda{name: value}, epsilon, error, per_run_utilities, wall_time_s`.
//! Floats are written in shortest round-trip form, so a log read back yields
//! bit-identical values.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::ObjectivePoint;
use crate::space::{HyperparameterDomain, HyperparameterVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bo,
    Random,
    Grid,
    Manual,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Bo => "bo",
            Method::Random => "random",
            Method::Grid => "grid",
            Method::Manual => "manual",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub point: HyperparameterVector,
    pub objectives: ObjectivePoint,
    pub per_run_utilities: Vec<f64>,
    pub seed: u64,
    pub method: Method,
    pub wall_time_s: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl Evaluation {
    /// Builds a record from oracle outputs; the error is `1 − mean(utilities)`.
    pub fn from_runs(
        point: HyperparameterVector,
        epsilon: f64,
        per_run_utilities: Vec<f64>,
        seed: u64,
        method: Method,
        wall_time_s: f64,
    ) -> Result<Self> {
        if per_run_utilities.is_empty() {
            return Err(Error::input("an evaluation needs at least one utility run"));
        }
        if let Some(u) = per_run_utilities.iter().find(|u| !(0.0..=1.0).contains(*u)) {
            return Err(Error::input(format!("utility {u} outside [0, 1]")));
        }
        let error = (1.0 - mean(&per_run_utilities)).clamp(0.0, 1.0);
        Ok(Self {
            point,
            objectives: ObjectivePoint::new(epsilon, error)?,
            per_run_utilities,
            seed,
            method,
            wall_time_s: wall_time_s.max(0.0),
        })
    }

    pub fn utility_spread(&self) -> Option<(f64, f64, f64)> {
        if self.per_run_utilities.is_empty() {
            return None;
        }
        let lo = self.per_run_utilities.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.per_run_utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((lo, mean(&self.per_run_utilities), hi))
    }

    pub fn to_record(&self, domain: &HyperparameterDomain) -> LogRecord {
        LogRecord {
            method: self.method,
            seed: self.seed,
            lambda: domain
                .dims()
                .iter()
                .zip(self.point.values())
                .map(|(d, &v)| (d.name.clone(), v))
                .collect(),
            epsilon: self.objectives.epsilon,
            error: self.objectives.error,
            per_run_utilities: self.per_run_utilities.clone(),
            wall_time_s: self.wall_time_s,
        }
    }

    pub fn to_json_line(&self, domain: &HyperparameterDomain) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record(domain))?)
    }
}

/// The on-disk shape of one evaluation; readable without knowing the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRecord {
    pub method: Method,
    pub seed: u64,
    pub lambda: IndexMap<String, f64>,
    pub epsilon: f64,
    pub error: f64,
    pub per_run_utilities: Vec<f64>,
    pub wall_time_s: f64,
}

impl LogRecord {
    pub fn objectives(&self) -> ObjectivePoint {
        ObjectivePoint::at(self.epsilon, self.error)
    }

    pub fn into_evaluation(self, domain: &HyperparameterDomain) -> Result<Evaluation> {
        let mut values = Vec::with_capacity(domain.len());
        for d in domain.dims() {
            let v = self
                .lambda
                .get(&d.name)
                .ok_or_else(|| Error::input(format!("record is missing `{}`", d.name)))?;
            values.push(*v);
        }
        if self.lambda.len() != domain.len() {
            return Err(Error::input("record has hyperparameters outside the domain"));
        }
        let point = domain.vector(values)?;
        let objectives = ObjectivePoint::new(self.epsilon, self.error)?;
        if !self.per_run_utilities.is_empty() {
            let expected = 1.0 - mean(&self.per_run_utilities);
            if (expected - self.error).abs() > 1e-12 {
                return Err(Error::input(format!(
                    "error {} inconsistent with mean utility (expected {expected})",
                    self.error
                )));
            }
        }
        Ok(Evaluation {
            point,
            objectives,
            per_run_utilities: self.per_run_utilities,
            seed: self.seed,
            method: self.method,
            wall_time_s: self.wall_time_s,
        })
    }
}

/// Reads every record of a JSONL log. Blank lines are ignored; a malformed
/// line is reported with its 1-based line number.
pub fn read_log(path: &Path) -> Result<Vec<LogRecord>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LogRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn read_evaluations(path: &Path, domain: &HyperparameterDomain) -> Result<Vec<Evaluation>> {
    read_log(path)?
        .into_iter()
        .map(|r| r.into_evaluation(domain))
        .collect()
}

/// Single-writer appender that flushes after every record.
pub struct LogWriter {
    file: File,
}

impl LogWriter {
    pub fn append(path: &Path) -> Result<Self> {
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        Ok(Self { file })
    }

    pub fn write(&mut self, eval: &Evaluation, domain: &HyperparameterDomain) -> Result<()> {
        let mut line = eval.to_json_line(domain)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}
