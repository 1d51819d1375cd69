use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::search::RunResult;
use crate::error::{Error, Result};
use crate::evaluation::Evaluation;
use crate::objective::ObjectivePoint;
use crate::pareto::{hypervolume, pareto_front, AntiIdealPoint, ParetoFront};

/// Hypervolume of every prefix of `evaluations`, indexed from 1.
pub fn hv_trajectory(evaluations: &[Evaluation], anti: &AntiIdealPoint) -> Vec<(usize, f64)> {
    let mut front = ParetoFront::default();
    let mut hv = 0.0;
    evaluations
        .iter()
        .enumerate()
        .map(|(i, e)| {
            if !front.dominates_point(&e.objectives) {
                front = pareto_front(front.iter().chain(std::iter::once(&e.objectives)));
                hv = hypervolume(&front, anti);
            }
            (i + 1, hv)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariabilityFronts {
    pub best: ParetoFront,
    pub mean: ParetoFront,
    pub worst: ParetoFront,
}

/// Fronts of `(ε, 1 − max)`, `(ε, 1 − mean)` and `(ε, 1 − min)` of the
/// per-run utilities.
pub fn variability_fronts(evaluations: &[Evaluation]) -> Result<VariabilityFronts> {
    let mut best = Vec::with_capacity(evaluations.len());
    let mut mean = Vec::with_capacity(evaluations.len());
    let mut worst = Vec::with_capacity(evaluations.len());
    for (i, e) in evaluations.iter().enumerate() {
        let (lo, avg, hi) = e
            .utility_spread()
            .ok_or_else(|| Error::input(format!("evaluation {} has no per-run utilities", i + 1)))?;
        let eps = e.objectives.epsilon;
        best.push(ObjectivePoint::at(eps, 1.0 - hi));
        mean.push(ObjectivePoint::at(eps, 1.0 - avg));
        worst.push(ObjectivePoint::at(eps, 1.0 - lo));
    }
    Ok(VariabilityFronts {
        best: pareto_front(&best),
        mean: pareto_front(&mean),
        worst: pareto_front(&worst),
    })
}

/// One-sample summary of hypervolume differences `HV(bo) − HV(random_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HvComparison {
    pub mean_diff: f64,
    pub ci95: (f64, f64),
    pub t_stat: f64,
    pub p_value: f64,
    /// `p < 0.001`.
    pub significant: bool,
    /// All differences equal, so the t statistic is undefined and reported as 0.
    pub degenerate: bool,
    pub chunks: usize,
}

pub const SIGNIFICANCE: f64 = 1e-3;

/// Student-t summary of the differences between one BO hypervolume and
/// several random-search hypervolumes.
pub fn compare_hv_values(bo: f64, random: &[f64]) -> Result<HvComparison> {
    if random.len() < 2 {
        return Err(Error::input(format!(
            "comparison needs at least 2 random chunks, got {}",
            random.len()
        )));
    }
    let n = random.len() as f64;
    let diffs: Vec<f64> = random.iter().map(|r| bo - r).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    if se == 0.0 || !se.is_finite() {
        return Ok(HvComparison {
            mean_diff: mean,
            ci95: (mean, mean),
            t_stat: 0.0,
            p_value: 1.0,
            significant: false,
            degenerate: true,
            chunks: random.len(),
        });
    }
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| Error::input(e.to_string()))?;
    let t = mean / se;
    let q = dist.inverse_cdf(0.975);
    let p = 2.0 * dist.cdf(-t.abs());
    Ok(HvComparison {
        mean_diff: mean,
        ci95: (mean - q * se, mean + q * se),
        t_stat: t,
        p_value: p,
        significant: p < SIGNIFICANCE,
        degenerate: false,
        chunks: random.len(),
    })
}

pub fn compare_hv(bo: &RunResult, random: &[RunResult], anti: &AntiIdealPoint) -> Result<HvComparison> {
    let hvs: Vec<f64> = random.iter().map(|r| hypervolume(&r.front, anti)).collect();
    compare_hv_values(hypervolume(&bo.front, anti), &hvs)
}

/// Splits a long log into consecutive chunks of `size`, dropping a short tail.
pub fn chunk_evaluations(evaluations: &[Evaluation], size: usize) -> Vec<&[Evaluation]> {
    if size == 0 {
        return Vec::new();
    }
    evaluations.chunks_exact(size).collect()
}

pub fn front_of(evaluations: &[Evaluation]) -> ParetoFront {
    pareto_front(evaluations.iter().map(|e| &e.objectives))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::Method;
    use crate::space::HyperparameterVector;

    fn eval(eps: f64, utils: &[f64]) -> Evaluation {
        Evaluation::from_runs(HyperparameterVector::from(vec![0.0]), eps, utils.to_vec(), 0, Method::Manual, 0.0).unwrap()
    }

    #[test]
    fn trajectory_examples() {
        let anti = AntiIdealPoint::default();
        assert!(hv_trajectory(&[], &anti).is_empty());
        assert_eq!(hv_trajectory(&[eval(1.0, &[0.5])], &anti), vec![(1, 4.5)]);
        let t = hv_trajectory(&[eval(1.0, &[0.5]), eval(2.0, &[0.4])], &anti);
        assert_eq!(t[1], (2, 4.5));
        let t = hv_trajectory(&[eval(2.0, &[0.6]), eval(5.0, &[0.9])], &anti);
        assert!((t[1].1 - 6.3).abs() < 1e-12);
    }

    #[test]
    fn variability_examples() {
        let single = variability_fronts(&[eval(1.0, &[0.7]), eval(3.0, &[0.9])]).unwrap();
        assert_eq!(single.best, single.mean);
        assert_eq!(single.mean, single.worst);

        let v = variability_fronts(&[eval(2.0, &[0.6, 0.8])]).unwrap();
        assert!((v.best.points()[0].error - 0.2).abs() < 1e-15);
        assert!((v.mean.points()[0].error - 0.3).abs() < 1e-15);
        assert!((v.worst.points()[0].error - 0.4).abs() < 1e-15);

        let mut bad = eval(1.0, &[0.5]);
        bad.per_run_utilities.clear();
        assert!(matches!(variability_fronts(&[bad]), Err(Error::Input(_))));
    }

    #[test]
    fn compare_hand_computed_t() {
        // bo − random = {1, 2, 3}: mean 2, sample sd 1, t = 2√3.
        let c = compare_hv_values(10.0, &[9.0, 8.0, 7.0]).unwrap();
        assert_eq!(c.mean_diff, 2.0);
        assert!((c.t_stat - 2.0 * 3f64.sqrt()).abs() < 1e-9);
        assert!((c.t_stat - 3.4641).abs() < 1e-4);
        // t_{0.975, 2} = 4.302653
        let half = 4.302_652_729_911_275 / 3f64.sqrt();
        assert!((c.ci95.0 - (2.0 - half)).abs() < 1e-9);
        assert!((c.ci95.1 - (2.0 + half)).abs() < 1e-9);
        assert!(!c.significant && !c.degenerate);
        assert_eq!(c.chunks, 3);
    }

    #[test]
    fn compare_degenerate_and_errors() {
        let c = compare_hv_values(5.0, &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((c.mean_diff, c.t_stat), (0.0, 0.0));
        assert!(c.degenerate && !c.significant);
        assert!(compare_hv_values(1.0, &[0.5]).is_err());
    }

    #[test]
    fn compare_flags_large_effects() {
        let random: Vec<f64> = (0..19).map(|i| 1.0 + 0.001 * i as f64).collect();
        let c = compare_hv_values(2.0, &random).unwrap();
        assert!(c.significant && c.p_value < SIGNIFICANCE);
        assert!(c.ci95.0 < c.mean_diff && c.mean_diff < c.ci95.1);
    }

    #[test]
    fn chunks_drop_the_tail() {
        let evals: Vec<Evaluation> = (0..10).map(|i| eval(i as f64, &[0.5])).collect();
        let chunks = chunk_evaluations(&evals, 4);
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[1][0].objectives.epsilon, 4.0);
        assert!(chunk_evaluations(&evals, 0).is_empty());
    }
}
