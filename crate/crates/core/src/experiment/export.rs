//! CSV artifacts and domain-free log loading for offline analysis.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::driver::VariabilityFronts;
use crate::error::Result;
use crate::evaluation::{read_log, Evaluation};
use crate::objective::ObjectivePoint;
use crate::pareto::ParetoFront;
use crate::space::HyperparameterVector;

pub fn write_front_csv(path: &Path, front: &ParetoFront) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    front.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_trajectory<W: Write>(mut w: W, trajectory: &[(usize, f64)]) -> Result<()> {
    writeln!(w, "index,hypervolume")?;
    for (i, hv) in trajectory {
        writeln!(w, "{i},{hv}")?;
    }
    Ok(())
}

pub fn write_trajectory_csv(path: &Path, trajectory: &[(usize, f64)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trajectory(&mut w, trajectory)?;
    w.flush()?;
    Ok(())
}

/// `epsilon,error,kind` rows, best front first.
pub fn write_variability<W: Write>(mut w: W, fronts: &VariabilityFronts) -> Result<()> {
    writeln!(w, "epsilon,error,kind")?;
    for (kind, front) in [("best", &fronts.best), ("mean", &fronts.mean), ("worst", &fronts.worst)] {
        for p in front {
            writeln!(w, "{},{},{kind}", p.epsilon, p.error)?;
        }
    }
    Ok(())
}

/// Reads a log without its domain; points keep the logged hyperparameter
/// order and are not range-checked.
pub fn load_log(path: &Path) -> Result<Vec<Evaluation>> {
    read_log(path)?
        .into_iter()
        .map(|r| {
            Ok(Evaluation {
                point: HyperparameterVector::from(r.lambda.values().copied().collect::<Vec<f64>>()),
                objectives: ObjectivePoint::new(r.epsilon, r.error)?,
                per_run_utilities: r.per_run_utilities,
                seed: r.seed,
                method: r.method,
                wall_time_s: r.wall_time_s,
            })
        })
        .collect()
}
