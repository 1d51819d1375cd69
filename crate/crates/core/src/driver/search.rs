use std::time::Instant;

use rand::Rng;
use rand_distr::{Exp, Normal};
use serde::{Deserialize, Serialize};

use super::analysis::hv_trajectory;
use super::problem::Problem;
use crate::acquisition::{maximize_acquisition, AcquisitionConfig, Fallback};
use crate::error::{Error, Result};
use crate::evaluation::{Evaluation, Method};
use crate::gp::{GpConfig, SurrogateModel};
use crate::objective::{transform_objectives, ObjectivePoint};
use crate::pareto::{pareto_front, AntiIdealPoint, ParetoFront};
use crate::rng::RngStream;
use crate::space::{HyperparameterDomain, HyperparameterVector, Scale};

const SEED_POINTS: u64 = 0x5eed;
const ORACLE: u64 = 0x0AC1E;
const SURROGATE: u64 = 0x6B;
const SAMPLER: u64 = 0x5A3;

/// What happened at one evaluation slot of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum SlotRecord {
    Done(Evaluation),
    /// Both attempts at the slot failed; the budget is still consumed.
    Skipped { point: HyperparameterVector, reason: String },
}

/// Receives every slot as soon as it completes, e.g. to stream a log.
pub trait RunObserver {
    fn record(&mut self, slot: usize, record: &SlotRecord) -> Result<()>;
}

/// Slots completed by an earlier, interrupted run, plus a sink for new ones.
#[derive(Default)]
pub struct Resume<'a> {
    pub completed: Vec<SlotRecord>,
    pub observer: Option<&'a mut dyn RunObserver>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub evaluations: Vec<Evaluation>,
    pub front: ParetoFront,
    pub hv_trajectory: Vec<(usize, f64)>,
    pub skipped: Vec<(usize, String)>,
    /// Slots whose proposal came from the acquisition fallback path.
    pub fallbacks: Vec<(usize, Fallback)>,
    /// Seconds spent fitting surrogates and maximising the acquisition.
    pub overhead_s: f64,
}

impl RunResult {
    fn from_slots(slots: &[SlotRecord], anti: &AntiIdealPoint) -> Self {
        let mut evaluations = Vec::new();
        let mut skipped = Vec::new();
        for (i, s) in slots.iter().enumerate() {
            match s {
                SlotRecord::Done(e) => evaluations.push(e.clone()),
                SlotRecord::Skipped { reason, .. } => skipped.push((i, reason.clone())),
            }
        }
        let front = pareto_front(evaluations.iter().map(|e| &e.objectives));
        Self {
            hv_trajectory: hv_trajectory(&evaluations, anti),
            front,
            evaluations,
            skipped,
            fallbacks: Vec::new(),
            overhead_s: 0.0,
        }
    }
}

/// Evaluates `point` at `slot`, retrying once on a fresh stream.
fn evaluate_slot(problem: &Problem, point: HyperparameterVector, slot: usize, method: Method, rng: &RngStream) -> SlotRecord {
    let mut reason = String::new();
    for attempt in 0..2u64 {
        let stream = rng.child(ORACLE + attempt).child(slot as u64);
        match problem.evaluate(&point, &stream, method, rng.seed) {
            Ok(e) => return SlotRecord::Done(e),
            Err(e) => reason = e.to_string(),
        }
    }
    SlotRecord::Skipped { point, reason }
}

/// Drives slots `0..budget`, replaying completed ones and proposing the rest.
fn run_slots<P>(problem: &Problem, budget: usize, method: Method, rng: &RngStream, resume: Resume<'_>, mut propose: P) -> Result<Vec<SlotRecord>>
where
    P: FnMut(usize, &[SlotRecord]) -> Result<HyperparameterVector>,
{
    let Resume { mut completed, mut observer } = resume;
    if completed.len() > budget {
        return Err(Error::input(format!(
            "{} completed slots exceed the budget of {budget}",
            completed.len()
        )));
    }
    completed.reserve(budget - completed.len());
    for slot in completed.len()..budget {
        let point = propose(slot, &completed)?;
        let record = evaluate_slot(problem, point, slot, method, rng);
        if let Some(obs) = observer.as_deref_mut() {
            obs.record(slot, &record)?;
        }
        completed.push(record);
    }
    Ok(completed)
}

pub fn uniform_point(domain: &HyperparameterDomain, rng: &RngStream) -> Result<HyperparameterVector> {
    let mut g = rng.rng();
    let u: Vec<f64> = (0..domain.len()).map(|_| g.random()).collect();
    domain.denormalize(&u)
}

/// Multi-objective Bayesian optimisation with HVPoI.
pub fn dpareto_run(problem: &Problem, k0: usize, k: usize, acq: &AcquisitionConfig, rng: &RngStream) -> Result<RunResult> {
    dpareto_run_resumable(problem, k0, k, acq, rng, Resume::default())
}

pub fn dpareto_run_resumable(
    problem: &Problem,
    k0: usize,
    k: usize,
    acq: &AcquisitionConfig,
    rng: &RngStream,
    resume: Resume<'_>,
) -> Result<RunResult> {
    if k0 < 2 {
        return Err(Error::config("dpareto needs at least 2 seed points"));
    }
    let domain = &problem.domain;
    let (a_eps, a_err) = transform_objectives(&ObjectivePoint::at(
        problem.anti_ideal.epsilon_max,
        problem.anti_ideal.error_max,
    ));
    let anti_t = AntiIdealPoint::new(a_eps, a_err);
    let mut fallbacks = Vec::new();
    let mut overhead = 0.0;
    let slots = run_slots(problem, k0 + k, Method::Bo, rng, resume, |slot, done| {
        let evals: Vec<&Evaluation> = done
            .iter()
            .filter_map(|r| match r {
                SlotRecord::Done(e) => Some(e),
                SlotRecord::Skipped { .. } => None,
            })
            .collect();
        if slot < k0 || evals.is_empty() {
            return uniform_point(domain, &rng.child(SEED_POINTS).child(slot as u64));
        }
        let start = Instant::now();
        let inputs = evals
            .iter()
            .map(|e| domain.normalize(&e.point))
            .collect::<Result<Vec<_>>>()?;
        let targets: Vec<(f64, f64)> = evals.iter().map(|e| transform_objectives(&e.objectives)).collect();
        let gp_seed = rng.child(SURROGATE).child(slot as u64).rng().random();
        let gp = GpConfig::with_seed(gp_seed);
        let models = [
            SurrogateModel::fit(inputs.clone(), targets.iter().map(|t| t.0).collect(), &gp)?,
            SurrogateModel::fit(inputs, targets.iter().map(|t| t.1).collect(), &gp)?,
        ];
        let transformed: Vec<ObjectivePoint> = targets.iter().map(|&(a, b)| ObjectivePoint::at(a, b)).collect();
        let front_t = pareto_front(&transformed);
        let config = AcquisitionConfig {
            rng: acq.rng.child(slot as u64),
            ..acq.clone()
        };
        let outcome = maximize_acquisition(&models, domain, &front_t, &anti_t, &config)?;
        if outcome.fallback != Fallback::None {
            fallbacks.push((slot, outcome.fallback));
        }
        overhead += start.elapsed().as_secs_f64();
        Ok(outcome.point)
    })?;
    let mut result = RunResult::from_slots(&slots, &problem.anti_ideal);
    result.fallbacks = fallbacks;
    result.overhead_s = overhead;
    Ok(result)
}

/// A one-dimensional sampling law for the random-search baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Uniform { a: f64, b: f64 },
    /// Uniform in `ln x` between `a` and `b`.
    LogUniform { a: f64, b: f64 },
    Normal { mean: f64, sd: f64 },
    /// `shift + Exp(rate)`.
    ShiftedExponential { rate: f64, shift: f64 },
}

impl Distribution {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            Distribution::LogUniform { a, b } => a > 0.0 && b.is_finite() && a < b,
            Distribution::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            Distribution::ShiftedExponential { rate, shift } => rate.is_finite() && rate > 0.0 && shift.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid sampling distribution {self:?}")))
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Distribution::LogUniform { a, b } => (a.ln() + (b.ln() - a.ln()) * rng.random::<f64>()).exp(),
            Distribution::Normal { mean, sd } => {
                Normal::new(mean, sd).map_or(mean, |n| rng.sample(n))
            }
            Distribution::ShiftedExponential { rate, shift } => {
                shift + Exp::new(rate).map_or(0.0, |e| rng.sample(e))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSampler {
    pub distribution: Distribution,
    #[serde(default)]
    pub int_valued: bool,
    pub accept: (f64, f64),
}

impl DimensionSampler {
    pub fn new(distribution: Distribution, int_valued: bool, accept: (f64, f64)) -> Self {
        Self {
            distribution,
            int_valued,
            accept,
        }
    }
}

pub const MAX_REJECTIONS: usize = 1_000_000;

/// Independent per-dimension sampling laws with rejection into accept ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingDistribution {
    pub dims: Vec<DimensionSampler>,
}

impl SamplingDistribution {
    pub fn new(dims: Vec<DimensionSampler>) -> Self {
        Self { dims }
    }

    /// Uniform in the normalised space of `domain`: linear dims uniform, log
    /// dims log-uniform, integral dims rounded.
    pub fn uniform_over(domain: &HyperparameterDomain) -> Self {
        Self::new(
            domain
                .dims()
                .iter()
                .map(|d| {
                    let dist = match d.scale {
                        Scale::Linear => Distribution::Uniform { a: d.low, b: d.high },
                        Scale::Log => Distribution::LogUniform { a: d.low, b: d.high },
                    };
                    DimensionSampler::new(dist, d.integral, (d.low, d.high))
                })
                .collect(),
        )
    }

    /// Checks the sampler against `domain`: one sampler per dimension, every
    /// accept range non-empty and inside the domain bounds.
    pub fn validate(&self, domain: &HyperparameterDomain) -> Result<()> {
        if self.dims.len() != domain.len() {
            return Err(Error::config(format!(
                "{} samplers for a {}-dimensional domain",
                self.dims.len(),
                domain.len()
            )));
        }
        for (s, d) in self.dims.iter().zip(domain.dims()) {
            s.distribution.validate()?;
            let (lo, hi) = s.accept;
            if !(lo <= hi) || lo < d.low || hi > d.high {
                return Err(Error::config(format!(
                    "accept range [{lo}, {hi}] of `{}` must lie within [{}, {}]",
                    d.name, d.low, d.high
                )));
            }
        }
        Ok(())
    }

    pub fn sample(&self, domain: &HyperparameterDomain, rng: &RngStream) -> Result<HyperparameterVector> {
        let mut g = rng.rng();
        let values = self
            .dims
            .iter()
            .zip(domain.dims())
            .map(|(s, d)| {
                for _ in 0..MAX_REJECTIONS {
                    let mut x = s.distribution.draw(&mut g);
                    if s.int_valued {
                        x = x.round_ties_even();
                    }
                    if x >= s.accept.0 && x <= s.accept.1 {
                        return Ok(x);
                    }
                }
                Err(Error::config(format!(
                    "`{}`: {MAX_REJECTIONS} consecutive draws fell outside [{}, {}]",
                    d.name, s.accept.0, s.accept.1
                )))
            })
            .collect::<Result<Vec<f64>>>()?;
        domain.vector(values)
    }
}

pub fn random_search_run(problem: &Problem, dist: &SamplingDistribution, budget: usize, rng: &RngStream) -> Result<RunResult> {
    random_search_run_resumable(problem, dist, budget, rng, Resume::default())
}

pub fn random_search_run_resumable(
    problem: &Problem,
    dist: &SamplingDistribution,
    budget: usize,
    rng: &RngStream,
    resume: Resume<'_>,
) -> Result<RunResult> {
    if budget == 0 {
        return Err(Error::config("random search budget must be >= 1"));
    }
    dist.validate(&problem.domain)?;
    let slots = run_slots(problem, budget, Method::Random, rng, resume, |slot, _| {
        dist.sample(&problem.domain, &rng.child(SAMPLER).child(slot as u64))
    })?;
    Ok(RunResult::from_slots(&slots, &problem.anti_ideal))
}

/// Grid coordinates of one dimension: evenly spaced (geometrically on log
/// dims), integral values rounded and deduplicated.
fn axis(d: &crate::space::Dimension, k: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..k)
        .map(|i| {
            let t = i as f64 / (k - 1) as f64;
            let x = match d.scale {
                Scale::Linear => d.low + t * (d.high - d.low),
                Scale::Log => (d.low.ln() + t * (d.high.ln() - d.low.ln())).exp(),
            };
            // Pin the end points exactly.
            let x = if i == 0 { d.low } else if i == k - 1 { d.high } else { x };
            if d.integral {
                x.round_ties_even()
            } else {
                x
            }
        })
        .collect();
    xs.dedup();
    xs
}

/// Full factorial grid in lexicographic order, first dimension slowest.
pub fn grid_points(domain: &HyperparameterDomain, points_per_dim: usize) -> Result<Vec<HyperparameterVector>> {
    if points_per_dim < 2 {
        return Err(Error::config("grid needs at least 2 points per dimension"));
    }
    let axes: Vec<Vec<f64>> = domain.dims().iter().map(|d| axis(d, points_per_dim)).collect();
    let mut out = vec![Vec::new()];
    for ax in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                ax.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|v| domain.vector(v)).collect()
}

pub fn grid_search_run(problem: &Problem, points_per_dim: usize) -> Result<RunResult> {
    grid_search_run_resumable(problem, points_per_dim, &RngStream::new(0, 0), Resume::default())
}

pub fn grid_search_run_resumable(
    problem: &Problem,
    points_per_dim: usize,
    rng: &RngStream,
    resume: Resume<'_>,
) -> Result<RunResult> {
    let points = grid_points(&problem.domain, points_per_dim)?;
    let slots = run_slots(problem, points.len(), Method::Grid, rng, resume, |slot, _| Ok(points[slot].clone()))?;
    Ok(RunResult::from_slots(&slots, &problem.anti_ideal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Dimension;

    fn toy_problem() -> Problem {
        let domain = HyperparameterDomain::new(vec![Dimension::linear("x", 0.0, 1.0), Dimension::log("y", 1e-2, 1.0)]).unwrap();
        Problem::new(
            domain,
            |l: &HyperparameterVector| Ok(8.0 * l.get(0) + l.get(1)),
            |l: &HyperparameterVector, r: usize, rng: &RngStream| {
                let mut g = rng.rng();
                Ok((0..r).map(|_| (0.8 * l.get(0) + 0.1 * g.random::<f64>()).min(1.0)).collect())
            },
        )
        .with_repetitions(3)
    }

    fn acq() -> AcquisitionConfig {
        AcquisitionConfig {
            candidate_count: 200,
            ..AcquisitionConfig::new(RngStream::new(1, 2))
        }
    }

    #[derive(Default)]
    struct Collect(Vec<SlotRecord>);

    impl RunObserver for Collect {
        fn record(&mut self, slot: usize, record: &SlotRecord) -> Result<()> {
            assert_eq!(slot, self.0.len());
            self.0.push(record.clone());
            Ok(())
        }
    }

    #[test]
    fn grid_sizes() {
        let five = HyperparameterDomain::new((0..5).map(|i| Dimension::linear(format!("d{i}"), 0.0, 1.0)).collect()).unwrap();
        assert_eq!(grid_points(&five, 3).unwrap().len(), 243);
        assert_eq!(grid_points(&five, 4).unwrap().len(), 1024);
        let log = HyperparameterDomain::new(vec![Dimension::log("b", 0.1, 10.0)]).unwrap();
        let xs: Vec<f64> = grid_points(&log, 3).unwrap().iter().map(|p| p.get(0)).collect();
        assert_eq!((xs[0], xs[2]), (0.1, 10.0));
        assert!((xs[1] - 1.0).abs() < 1e-12);
        assert!(grid_points(&log, 1).is_err());
    }

    #[test]
    fn grid_order_and_integral_dedup() {
        let d = HyperparameterDomain::new(vec![Dimension::linear("c", 1.0, 3.0).integral(), Dimension::linear("x", 0.0, 1.0)]).unwrap();
        let pts: Vec<Vec<f64>> = grid_points(&d, 9).unwrap().into_iter().map(|p| p.into_inner()).collect();
        assert_eq!(pts.len(), 27);
        assert_eq!(pts[0], vec![1.0, 0.0]);
        assert_eq!(pts[1], vec![1.0, 0.125]);
        assert_eq!(pts[9], vec![2.0, 0.0]);
        assert_eq!(pts[26], vec![3.0, 1.0]);
    }

    #[test]
    fn sampler_respects_accept_ranges() {
        let d = HyperparameterDomain::new(vec![
            Dimension::linear("epochs", 1.0, 64.0).integral(),
            Dimension::linear("lot", 8.0, 512.0).integral(),
            Dimension::log("lr", 1e-4, 1.0),
        ])
        .unwrap();
        let s = SamplingDistribution::new(vec![
            DimensionSampler::new(Distribution::Uniform { a: 1.0, b: 64.0 }, true, (1.0, 64.0)),
            DimensionSampler::new(Distribution::Normal { mean: 128.0, sd: 64.0 }, true, (8.0, 512.0)),
            DimensionSampler::new(Distribution::ShiftedExponential { rate: 100.0, shift: 1e-4 }, false, (1e-4, 1.0)),
        ]);
        s.validate(&d).unwrap();
        let root = RngStream::new(3, 0);
        for i in 0..2000 {
            let p = s.sample(&d, &root.child(i)).unwrap();
            assert!((1.0..=64.0).contains(&p.get(0)) && p.get(0).fract() == 0.0);
            assert!((8.0..=512.0).contains(&p.get(1)) && p.get(1).fract() == 0.0);
            assert!(p.get(2) >= 1e-4);
        }
        assert_eq!(s.sample(&d, &root).unwrap(), s.sample(&d, &root).unwrap());
    }

    #[test]
    fn sampler_validation_and_rejection_cap() {
        let d = HyperparameterDomain::new(vec![Dimension::linear("x", 0.0, 1.0)]).unwrap();
        let outside = SamplingDistribution::new(vec![DimensionSampler::new(Distribution::Uniform { a: 0.0, b: 1.0 }, false, (0.0, 2.0))]);
        assert!(matches!(outside.validate(&d), Err(Error::Config(_))));
        let bad = SamplingDistribution::new(vec![DimensionSampler::new(Distribution::Normal { mean: 0.0, sd: 0.0 }, false, (0.0, 1.0))]);
        assert!(bad.validate(&d).is_err());
        let far = SamplingDistribution::new(vec![DimensionSampler::new(Distribution::Normal { mean: 100.0, sd: 1e-3 }, false, (0.0, 1.0))]);
        assert!(matches!(far.sample(&d, &RngStream::new(0, 0)), Err(Error::Config(_))));
    }

    #[test]
    fn uniform_sampler_covers_domain() {
        let p = toy_problem();
        let s = SamplingDistribution::uniform_over(&p.domain);
        s.validate(&p.domain).unwrap();
        let below: usize = (0..4000)
            .filter(|&i| s.sample(&p.domain, &RngStream::new(5, i)).unwrap().get(1) < 0.1)
            .count();
        // Log-uniform on [0.01, 1] puts half its mass below 0.1.
        assert!((1700..2300).contains(&below), "{below}");
    }

    #[test]
    fn zero_iterations_returns_seed_front() {
        let p = toy_problem();
        let r = dpareto_run(&p, 6, 0, &acq(), &RngStream::new(9, 0)).unwrap();
        assert_eq!(r.evaluations.len(), 6);
        assert_eq!(r.front, front_of_evals(&r.evaluations));
        assert_eq!(r.hv_trajectory.len(), 6);
        assert!(dpareto_run(&p, 1, 3, &acq(), &RngStream::new(9, 0)).is_err());
    }

    fn timeless(mut evals: Vec<Evaluation>) -> Vec<Evaluation> {
        for e in &mut evals {
            e.wall_time_s = 0.0;
        }
        evals
    }

    fn front_of_evals(e: &[Evaluation]) -> ParetoFront {
        pareto_front(e.iter().map(|e| &e.objectives))
    }

    #[test]
    fn bo_is_deterministic_and_stays_in_domain() {
        let p = toy_problem();
        let a = dpareto_run(&p, 4, 4, &acq(), &RngStream::new(2, 0)).unwrap();
        let b = dpareto_run(&p, 4, 4, &acq(), &RngStream::new(2, 0)).unwrap();
        assert_eq!(timeless(a.evaluations.clone()), timeless(b.evaluations));
        assert_eq!(a.evaluations.len(), 8);
        for e in &a.evaluations {
            p.domain.check(&e.point).unwrap();
            assert_eq!(e.method, Method::Bo);
        }
        assert!(a.hv_trajectory.windows(2).all(|w| w[0].1 <= w[1].1));
        let c = dpareto_run(&p, 4, 4, &acq(), &RngStream::new(3, 0)).unwrap();
        assert_ne!(timeless(a.evaluations), timeless(c.evaluations));
    }

    #[test]
    fn resume_matches_uninterrupted_run() {
        let p = toy_problem();
        let rng = RngStream::new(4, 0);
        let mut log = Collect::default();
        let full = dpareto_run_resumable(&p, 4, 4, &acq(), &rng, Resume { completed: Vec::new(), observer: Some(&mut log) }).unwrap();
        assert_eq!(log.0.len(), 8);
        let mut tail = Collect(log.0[..5].to_vec());
        let resumed = dpareto_run_resumable(
            &p,
            4,
            4,
            &acq(),
            &rng,
            Resume { completed: log.0[..5].to_vec(), observer: Some(&mut tail) },
        )
        .unwrap();
        assert_eq!(full.evaluations[..5], resumed.evaluations[..5]);
        assert_eq!(timeless(full.evaluations), timeless(resumed.evaluations));
        assert_eq!(full.hv_trajectory, resumed.hv_trajectory);
        assert_eq!(tail.0.len(), 8);

        let dist = SamplingDistribution::uniform_over(&p.domain);
        let full = random_search_run(&p, &dist, 6, &rng).unwrap();
        let done: Vec<SlotRecord> = full.evaluations[..2].iter().cloned().map(SlotRecord::Done).collect();
        let resumed = random_search_run_resumable(&p, &dist, 6, &rng, Resume { completed: done, observer: None }).unwrap();
        assert_eq!(timeless(full.evaluations), timeless(resumed.evaluations));
        assert_eq!(full.front, resumed.front);
    }

    #[test]
    fn failing_slots_are_retried_then_skipped() {
        let domain = HyperparameterDomain::new(vec![Dimension::linear("x", 0.0, 1.0)]).unwrap();
        let p = Problem::new(
            domain,
            |l: &HyperparameterVector| {
                if l.get(0) > 0.5 {
                    Err(Error::input("unstable"))
                } else {
                    Ok(l.get(0))
                }
            },
            |_: &HyperparameterVector, r: usize, _: &RngStream| Ok(vec![0.5; r]),
        );
        let r = grid_search_run(&p, 5).unwrap();
        assert_eq!(r.evaluations.len(), 3);
        assert_eq!(r.skipped.iter().map(|s| s.0).collect::<Vec<_>>(), vec![3, 4]);
        assert!(r.skipped[0].1.contains("unstable"));
        assert_eq!(r.hv_trajectory.len(), 3);
    }

    #[test]
    fn random_search_is_deterministic() {
        let p = toy_problem();
        let dist = SamplingDistribution::uniform_over(&p.domain);
        let a = random_search_run(&p, &dist, 5, &RngStream::new(8, 0)).unwrap();
        let b = random_search_run(&p, &dist, 5, &RngStream::new(8, 0)).unwrap();
        assert_eq!(timeless(a.evaluations.clone()), timeless(b.evaluations));
        assert_eq!(a.hv_trajectory, b.hv_trajectory);
        assert!(a.evaluations.iter().all(|e| e.method == Method::Random));
        assert!(random_search_run(&p, &dist, 0, &RngStream::new(8, 0)).is_err());
    }
}
