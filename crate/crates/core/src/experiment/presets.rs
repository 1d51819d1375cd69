//! Search spaces, oracles and random-search laws of the built-in problems.

use super::config::{DatasetSettings, ExperimentConfig, ProblemKind};
use crate::driver::{DimensionSampler, Distribution, Problem, SamplingDistribution};
use crate::error::{Error, Result};
use crate::mechanisms::{
    accuracy_utility_oracle, dp_adam_train, dp_sgd_train, load_dataset, make_svt_workload,
    output_perturbed_logreg_train, svt_utility_oracle, synthetic_separable, DataFormat, Dataset, Loss,
    TrainingHyperparams,
};
use crate::pareto::AntiIdealPoint;
use crate::privacy::{dpsgd_epsilon, output_perturbation_epsilon, svt_epsilon};
use crate::rng::RngStream;
use crate::space::{Dimension, HyperparameterDomain, HyperparameterVector};

const WORKLOAD_STREAM: u64 = 0x3017;
const DATA_STREAM: u64 = 0xDA7A;

/// A problem ready to hand to the driver, with its random-search law.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub problem: Problem,
    pub sampling: SamplingDistribution,
}

pub fn svt_domain() -> HyperparameterDomain {
    HyperparameterDomain::new(vec![
        Dimension::linear("C", 1.0, 30.0).integral(),
        Dimension::log("b", 1e-2, 1e2),
    ])
    .expect("valid preset")
}

pub fn output_perturbation_domain() -> HyperparameterDomain {
    HyperparameterDomain::new(vec![
        Dimension::log("gamma", 1e-4, 1.0),
        Dimension::log("sigma", 0.1, 10.0),
    ])
    .expect("valid preset")
}

/// Gradient-perturbation domain shared by the linear models.
pub fn training_domain() -> HyperparameterDomain {
    HyperparameterDomain::new(vec![
        Dimension::linear("epochs", 1.0, 64.0).integral(),
        Dimension::log("lot_size", 8.0, 512.0).integral(),
        Dimension::log("learning_rate", 5e-4, 5e-2),
        Dimension::log("noise_variance", 0.1, 16.0),
        Dimension::log("clipping_norm", 0.1, 4.0),
    ])
    .expect("valid preset")
}

/// Hand-tuned random-search laws for the gradient-perturbation problems.
/// Exponential laws are parameterized by rate.
pub fn training_sampling() -> Vec<DimensionSampler> {
    vec![
        DimensionSampler::new(Distribution::Uniform { a: 1.0, b: 64.0 }, true, (1.0, 64.0)),
        DimensionSampler::new(Distribution::Normal { mean: 128.0, sd: 64.0 }, true, (8.0, 512.0)),
        DimensionSampler::new(Distribution::ShiftedExponential { rate: 10.0, shift: 1e-3 }, false, (1e-3, 1e-1)),
        DimensionSampler::new(Distribution::ShiftedExponential { rate: 0.1, shift: 0.1 }, false, (0.1, 16.0)),
        DimensionSampler::new(Distribution::ShiftedExponential { rate: 0.1, shift: 0.1 }, false, (0.1, 4.0)),
    ]
}

fn apply_domain_overrides(domain: HyperparameterDomain, config: &ExperimentConfig) -> Result<HyperparameterDomain> {
    let mut dims = domain.dims().to_vec();
    for o in &config.domain {
        let d = dims
            .iter_mut()
            .find(|d| d.name == o.name)
            .ok_or_else(|| Error::config(format!("domain: `{}` is not a dimension of {}", o.name, config.problem)))?;
        d.low = o.low;
        d.high = o.high;
    }
    HyperparameterDomain::new(dims).map_err(|e| Error::config(format!("domain: {e}")))
}

/// Preset laws with accept ranges clipped to the domain, then user overrides.
fn sampling_for(
    preset: Option<Vec<DimensionSampler>>,
    domain: &HyperparameterDomain,
    config: &ExperimentConfig,
) -> Result<SamplingDistribution> {
    let mut dims = match preset {
        Some(p) => p
            .into_iter()
            .zip(domain.dims())
            .map(|(mut s, d)| {
                s.accept = (s.accept.0.max(d.low), s.accept.1.min(d.high));
                s
            })
            .collect(),
        None => SamplingDistribution::uniform_over(domain).dims,
    };
    for o in &config.sampling {
        let i = domain
            .index_of(&o.name)
            .ok_or_else(|| Error::config(format!("sampling: `{}` is not a dimension of {}", o.name, config.problem)))?;
        dims[i] = DimensionSampler::new(o.distribution, o.int_valued, o.accept);
    }
    let sampling = SamplingDistribution::new(dims);
    sampling
        .validate(domain)
        .map_err(|e| Error::config(format!("sampling: {e}")))?;
    Ok(sampling)
}

/// Train/test split: the configured file, subsampled to `train + test`
/// rows, or a synthetic separable set.
pub fn load_split(settings: &DatasetSettings, rng: &RngStream) -> Result<(Dataset, Dataset)> {
    let total = settings.train + settings.test;
    let data = match &settings.path {
        Some(path) => {
            let format = settings.format.unwrap_or_else(|| DataFormat::from_path(path));
            let data = load_dataset(path, format)?;
            if data.len() < total {
                return Err(Error::config(format!(
                    "dataset: {} has {} rows, fewer than train + test = {total}",
                    path.display(),
                    data.len()
                )));
            }
            data.subsample(total, &rng.child(0))
        }
        None => synthetic_separable(total, settings.synthetic_dim, settings.synthetic_margin, &rng.child(1))?,
    };
    data.split(settings.test, &rng.child(2))
}

fn training_hyperparams(l: &HyperparameterVector) -> TrainingHyperparams {
    TrainingHyperparams {
        epochs: l.get(0) as u64,
        lot_size: l.get(1) as usize,
        learning_rate: l.get(2),
        noise_variance: l.get(3),
        clipping_norm: l.get(4),
    }
}

pub fn build_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    let seed = config.seed;
    let delta = config.delta();
    let (problem, preset_sampling) = match config.problem {
        ProblemKind::Svt => {
            let domain = apply_domain_overrides(svt_domain(), config)?;
            let workload = make_svt_workload(config.svt.queries, config.svt.positives, &RngStream::new(seed, WORKLOAD_STREAM))?;
            let problem = Problem::new(
                domain,
                |l: &HyperparameterVector| svt_epsilon(l.get(1), l.get(0)),
                move |l: &HyperparameterVector, r: usize, rng: &RngStream| {
                    Ok(svt_utility_oracle(&workload, l.get(1), l.get(0) as u32, r, rng)?.1)
                },
            );
            (problem, None)
        }
        ProblemKind::OutputPerturbedLogreg => {
            let domain = apply_domain_overrides(output_perturbation_domain(), config)?;
            let (train, test) = load_split(&config.dataset, &RngStream::new(seed, DATA_STREAM))?;
            let n = train.len();
            let problem = Problem::new(
                domain,
                move |l: &HyperparameterVector| output_perturbation_epsilon(n, l.get(0), l.get(1), delta),
                move |l: &HyperparameterVector, r: usize, rng: &RngStream| {
                    let trainer = |s: &RngStream| output_perturbed_logreg_train(&train, l.get(0), l.get(1), s);
                    Ok(accuracy_utility_oracle(trainer, &test, r, rng)?.1)
                },
            );
            (problem, None)
        }
        kind => {
            let domain = apply_domain_overrides(training_domain(), config)?;
            let (train, test) = load_split(&config.dataset, &RngStream::new(seed, DATA_STREAM))?;
            let n = train.len();
            let lot_max = domain.dims()[1].high;
            if lot_max > n as f64 {
                return Err(Error::config(format!(
                    "domain: lot_size upper bound {lot_max} exceeds the {n} training rows"
                )));
            }
            let (loss, adam) = match kind {
                ProblemKind::DpsgdSvm => (Loss::Hinge, false),
                ProblemKind::DpadamLogreg => (Loss::Logistic, true),
                _ => (Loss::Logistic, false),
            };
            let problem = Problem::new(
                domain,
                move |l: &HyperparameterVector| {
                    let hp = training_hyperparams(l);
                    dpsgd_epsilon(n, hp.lot_size, hp.epochs, hp.noise_multiplier(), delta)
                },
                move |l: &HyperparameterVector, r: usize, rng: &RngStream| {
                    let hp = training_hyperparams(l);
                    let trainer = |s: &RngStream| {
                        if adam {
                            dp_adam_train(&train, &hp, loss, s)
                        } else {
                            dp_sgd_train(&train, &hp, loss, s)
                        }
                    };
                    Ok(accuracy_utility_oracle(trainer, &test, r, rng)?.1)
                },
            );
            (problem, Some(training_sampling()))
        }
    };
    let problem = problem
        .with_delta(delta)
        .with_anti_ideal(AntiIdealPoint::new(config.anti_ideal[0], config.anti_ideal[1]))
        .with_repetitions(config.repetitions());
    let sampling = sampling_for(preset_sampling, &problem.domain, config)?;
    Ok(Experiment { problem, sampling })
}
