//! Resumable execution of an experiment into an output directory.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SearchMethod};
use super::export::{write_front_csv, write_trajectory_csv};
use super::presets::{build_experiment, Experiment};
use crate::acquisition::AcquisitionConfig;
use crate::driver::{
    dpareto_run_resumable, grid_search_run_resumable, random_search_run_resumable, Resume, RunObserver, RunResult,
    SlotRecord,
};
use crate::error::{Error, Result};
use crate::evaluation::{LogRecord, LogWriter};
use crate::pareto::hypervolume;
use crate::rng::RngStream;
use crate::space::{HyperparameterDomain, HyperparameterVector};

pub const EVALS_FILE: &str = "evals.jsonl";
pub const SKIPS_FILE: &str = "skips.jsonl";
pub const FRONT_FILE: &str = "front.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

const DRIVER_STREAM: u64 = 0;
const ACQUISITION_STREAM: u64 = 1;

/// One skipped slot, as logged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkipRecord {
    pub slot: usize,
    pub lambda: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub problem: String,
    pub method: SearchMethod,
    pub seed: u64,
    pub version: String,
    pub complete: bool,
    pub evaluations: usize,
    pub skipped: usize,
    pub hypervolume: Option<f64>,
}

impl Manifest {
    fn new(config: &ExperimentConfig) -> Self {
        Self {
            config_hash: config.hash(),
            problem: config.problem.to_string(),
            method: config.method,
            seed: config.seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            complete: false,
            evaluations: 0,
            skipped: 0,
            hypervolume: None,
        }
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Parses every complete line of a JSONL file. A final line that is
/// unterminated or unparsable is a torn write: it is cut off the file.
/// Any other malformed line is an error naming its line number.
pub fn read_jsonl_repairing<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let bytes = fs::read(path)?;
    let mut out = Vec::new();
    let mut good_end = 0;
    let mut start = 0;
    let mut line_no = 0;
    while start < bytes.len() {
        line_no += 1;
        let (end, terminated) = match bytes[start..].iter().position(|&b| b == b'\n') {
            Some(i) => (start + i, true),
            None => (bytes.len(), false),
        };
        let line = &bytes[start..end];
        let last = end + 1 >= bytes.len();
        let blank = line.iter().all(|b| b.is_ascii_whitespace());
        if !blank {
            match (serde_json::from_slice::<T>(line), terminated) {
                (Ok(v), true) => out.push(v),
                _ if last => break,
                (Err(e), _) => {
                    return Err(Error::Parse {
                        path: path.display().to_string(),
                        line: line_no,
                        msg: e.to_string(),
                    })
                }
                (Ok(_), false) => unreachable!("an unterminated line is the last one"),
            }
        }
        good_end = if terminated { end + 1 } else { end };
        start = end + 1;
    }
    if good_end < bytes.len() {
        OpenOptions::new().write(true).open(path)?.set_len(good_end as u64)?;
    }
    Ok(out)
}

/// Rebuilds the completed slots from the two logs. Skips beyond the last
/// logged evaluation are kept only while they extend a contiguous prefix.
fn completed_slots(
    records: Vec<LogRecord>,
    skips: Vec<SkipRecord>,
    domain: &HyperparameterDomain,
) -> Result<Vec<SlotRecord>> {
    let mut skipped: BTreeMap<usize, SkipRecord> = skips.into_iter().map(|s| (s.slot, s)).collect();
    let mut records = records.into_iter();
    let mut slots = Vec::new();
    loop {
        let slot = slots.len();
        if let Some(s) = skipped.remove(&slot) {
            slots.push(SlotRecord::Skipped {
                point: HyperparameterVector::from(s.lambda),
                reason: s.reason,
            });
            continue;
        }
        match records.next() {
            Some(r) => slots.push(SlotRecord::Done(r.into_evaluation(domain)?)),
            None => break,
        }
    }
    Ok(slots)
}

/// Streams each finished slot to the logs.
struct LogObserver<'a> {
    evals: LogWriter,
    skips: File,
    domain: &'a HyperparameterDomain,
}

impl RunObserver for LogObserver<'_> {
    fn record(&mut self, slot: usize, record: &SlotRecord) -> Result<()> {
        match record {
            SlotRecord::Done(e) => self.evals.write(e, self.domain),
            SlotRecord::Skipped { point, reason } => {
                let rec = SkipRecord {
                    slot,
                    lambda: point.values().to_vec(),
                    reason: reason.clone(),
                };
                let mut line = serde_json::to_string(&rec)?;
                line.push('\n');
                self.skips.write_all(line.as_bytes())?;
                self.skips.flush()?;
                Ok(())
            }
        }
    }
}

/// Outcome of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output: PathBuf,
    pub result: RunResult,
    /// Slots recovered from an earlier, interrupted run.
    pub resumed: usize,
}

fn rewrite_skips(path: &Path, slots: &[SlotRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (slot, s) in slots.iter().enumerate() {
        if let SlotRecord::Skipped { point, reason } = s {
            let rec = SkipRecord {
                slot,
                lambda: point.values().to_vec(),
                reason: reason.clone(),
            };
            writeln!(w, "{}", serde_json::to_string(&rec)?)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Runs `config` into its output directory, resuming from any logs a
/// previous run of the same config left behind.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    let Experiment { problem, sampling } = build_experiment(config)?;
    let out = config.output.clone();
    fs::create_dir_all(&out)?;
    let manifest_path = out.join(MANIFEST_FILE);
    let mut manifest = Manifest::new(config);
    if manifest_path.exists() {
        let old: Manifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
        if old.config_hash != manifest.config_hash {
            return Err(Error::config(format!(
                "output: {} holds a run of a different config (hash {})",
                out.display(),
                old.config_hash
            )));
        }
    }
    let evals_path = out.join(EVALS_FILE);
    let skips_path = out.join(SKIPS_FILE);
    let records: Vec<LogRecord> = read_jsonl_repairing(&evals_path)?;
    let skips: Vec<SkipRecord> = read_jsonl_repairing(&skips_path)?;
    let completed = completed_slots(records, skips, &problem.domain)?;
    rewrite_skips(&skips_path, &completed)?;
    manifest.write(&manifest_path)?;

    let resumed = completed.len();
    let mut observer = LogObserver {
        evals: LogWriter::append(&evals_path)?,
        skips: OpenOptions::new().append(true).create(true).open(&skips_path)?,
        domain: &problem.domain,
    };
    let resume = Resume {
        completed,
        observer: Some(&mut observer),
    };
    let rng = RngStream::new(config.seed, DRIVER_STREAM);
    let result = match config.method {
        SearchMethod::Bo => {
            let acq = AcquisitionConfig {
                candidate_count: config.acquisition.candidates,
                refine_top: config.acquisition.refine_top,
                refine_iters: config.acquisition.refine_iters,
                ..AcquisitionConfig::new(RngStream::new(config.seed, ACQUISITION_STREAM))
            };
            dpareto_run_resumable(&problem, config.k0(), config.k(), &acq, &rng, resume)?
        }
        SearchMethod::Random => random_search_run_resumable(&problem, &sampling, config.random_budget(), &rng, resume)?,
        SearchMethod::Grid => grid_search_run_resumable(&problem, config.points_per_dim(), &rng, resume)?,
    };

    write_front_csv(&out.join(FRONT_FILE), &result.front)?;
    write_trajectory_csv(&out.join(TRAJECTORY_FILE), &result.hv_trajectory)?;
    manifest.complete = true;
    manifest.evaluations = result.evaluations.len();
    manifest.skipped = result.skipped.len();
    manifest.hypervolume = Some(hypervolume(&result.front, &problem.anti_ideal));
    manifest.write(&manifest_path)?;
    Ok(RunSummary {
        output: out,
        result,
        resumed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        a: u32,
    }

    #[test]
    fn torn_last_line_is_cut() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("log.jsonl");
        fs::write(&p, "{\"a\":1}\n{\"a\":2}\n{\"a\":").unwrap();
        let rows: Vec<Row> = read_jsonl_repairing(&p).unwrap();
        assert_eq!(rows, vec![Row { a: 1 }, Row { a: 2 }]);
        assert_eq!(fs::read_to_string(&p).unwrap(), "{\"a\":1}\n{\"a\":2}\n");
    }

    #[test]
    fn unterminated_but_complete_line_is_cut_too() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("log.jsonl");
        fs::write(&p, "{\"a\":1}\n{\"a\":2}").unwrap();
        let rows: Vec<Row> = read_jsonl_repairing(&p).unwrap();
        assert_eq!(rows, vec![Row { a: 1 }]);
        assert_eq!(fs::read_to_string(&p).unwrap(), "{\"a\":1}\n");
    }

    #[test]
    fn interior_garbage_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("log.jsonl");
        fs::write(&p, "{\"a\":1}\nnot json\n{\"a\":3}\n").unwrap();
        match read_jsonl_repairing::<Row>(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(read_jsonl_repairing::<Row>(&dir.path().join("missing")).unwrap().is_empty());
    }

    #[test]
    fn skips_interleave_with_evaluations() {
        let domain = HyperparameterDomain::new(vec![crate::space::Dimension::linear("x", 0.0, 1.0)]).unwrap();
        let rec = |x: f64| LogRecord {
            method: crate::evaluation::Method::Grid,
            seed: 0,
            lambda: [("x".to_owned(), x)].into_iter().collect(),
            epsilon: x,
            error: 0.5,
            per_run_utilities: vec![0.5],
            wall_time_s: 0.0,
        };
        let skip = |slot| SkipRecord {
            slot,
            lambda: vec![0.9],
            reason: "boom".into(),
        };
        let slots = completed_slots(vec![rec(0.1), rec(0.2)], vec![skip(1), skip(3), skip(7)], &domain).unwrap();
        assert_eq!(slots.len(), 4);
        assert!(matches!(slots[1], SlotRecord::Skipped { .. }));
        assert!(matches!(slots[3], SlotRecord::Skipped { .. }));
    }
}
