//! Private training of linear models: DP-SGD and DP-Adam with per-example
//! clipping and Gaussian gradient noise, and output-perturbed logistic
//! regression.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::data::Dataset;
use crate::error::{Error, Result};
use crate::objective::logistic;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    Logistic,
    Hinge,
}

impl Loss {
    /// Loss of the linear score `w·x` for label `y`.
    pub fn value(&self, margin: f64) -> f64 {
        match self {
            // ln(1 + e^{-z}) without overflow.
            Loss::Logistic => (-margin).max(0.0) + (-margin.abs()).exp().ln_1p(),
            Loss::Hinge => (1.0 - margin).max(0.0),
        }
    }

    /// Derivative of the loss with respect to the margin `y w·x`. The hinge
    /// uses the zero subgradient at the kink.
    pub fn margin_slope(&self, margin: f64) -> f64 {
        match self {
            Loss::Logistic => -logistic(-margin),
            Loss::Hinge => {
                if margin < 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Per-example gradient `∇_w ℓ(y, w·x)` written into `out`.
    pub fn gradient(&self, x: &[f64], y: f64, w: &[f64], out: &mut [f64]) {
        let margin = y * dot(w, x);
        let s = self.margin_slope(margin) * y;
        for (o, xi) in out.iter_mut().zip(x) {
            *o = s * xi;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
    Adam,
}

pub const ADAM_KAPPA: f64 = 1e-8;
pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Rescales `v` in place to norm at most `l`; an infinite `l` is the identity.
pub fn clip_in_place(v: &mut [f64], l: f64) {
    let n = norm(v);
    if n > l {
        let s = l / n;
        v.iter_mut().for_each(|x| *x *= s);
    }
}

pub fn clip(v: &[f64], l: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    clip_in_place(&mut out, l);
    out
}

/// The hyperparameters of one private training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingHyperparams {
    pub epochs: u64,
    pub lot_size: usize,
    pub learning_rate: f64,
    pub noise_variance: f64,
    pub clipping_norm: f64,
}

impl TrainingHyperparams {
    /// Noise multiplier: the noise standard deviation per unit of sensitivity.
    pub fn noise_multiplier(&self) -> f64 {
        self.noise_variance.sqrt()
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::input("epochs must be >= 1"));
        }
        if self.lot_size == 0 || self.lot_size > n {
            return Err(Error::input(format!(
                "lot size {} must lie in [1, {n}]",
                self.lot_size
            )));
        }
        for (name, v) in [
            ("learning rate", self.learning_rate),
            ("noise variance", self.noise_variance),
            ("clipping norm", self.clipping_norm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::input(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Settings of [`train_observed`], where zero noise and unbounded clipping
/// are admissible for instrumentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientPerturbation {
    pub epochs: u64,
    pub lot_size: usize,
    pub learning_rate: f64,
    pub noise_multiplier: f64,
    pub clipping_norm: f64,
}

impl From<&TrainingHyperparams> for GradientPerturbation {
    fn from(hp: &TrainingHyperparams) -> Self {
        Self {
            epochs: hp.epochs,
            lot_size: hp.lot_size,
            learning_rate: hp.learning_rate,
            noise_multiplier: hp.noise_multiplier(),
            clipping_norm: hp.clipping_norm,
        }
    }
}

/// Hooks into the internals of a training run.
pub trait TrainingObserver {
    fn clipped_gradient(&mut self, _clipped: &[f64]) {}
    /// The Gaussian noise vector added to one lot's mean gradient.
    fn noise(&mut self, _noise: &[f64]) {}
}

impl TrainingObserver for () {}

const LOT_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Indices of the lot used at `step` (counted from 0 over the whole run).
pub fn lot_indices(rng: &RngStream, n: usize, lot_size: usize, step: u64) -> Vec<usize> {
    let mut g = rng.child(LOT_STREAM).child(step).rng();
    rand::seq::index::sample(&mut g, n, lot_size).into_vec()
}

pub fn steps_per_epoch(n: usize, lot_size: usize) -> u64 {
    (n / lot_size) as u64
}

/// Gradient-perturbation training from `w = 0`: `epochs · ⌊n/m⌋` steps, each
/// averaging clipped per-example gradients over a fresh lot sampled without
/// replacement and adding `N(0, (2Lσ/m)² I)`.
pub fn train_observed(
    data: &Dataset,
    settings: &GradientPerturbation,
    loss: Loss,
    optimizer: Optimizer,
    rng: &RngStream,
    observer: &mut dyn TrainingObserver,
) -> Result<Vec<f64>> {
    let n = data.len();
    let m = settings.lot_size;
    if m == 0 || m > n {
        return Err(Error::input(format!("lot size {m} must lie in [1, {n}]")));
    }
    if !(settings.noise_multiplier >= 0.0 && settings.noise_multiplier.is_finite()) {
        return Err(Error::input("noise multiplier must be finite and >= 0"));
    }
    if !(settings.clipping_norm > 0.0) {
        return Err(Error::input("clipping norm must be positive"));
    }
    let noisy = settings.noise_multiplier > 0.0;
    let noise_sd = 2.0 * settings.clipping_norm * settings.noise_multiplier / m as f64;
    if noisy && !noise_sd.is_finite() {
        return Err(Error::input("noise requires a finite clipping norm"));
    }
    let d = data.dim();
    let mut w = vec![0.0; d];
    let mut mu = vec![0.0; d];
    let mut nu = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut per_example = vec![0.0; d];
    let mut noise = vec![0.0; d];
    let mut noise_rng = rng.child(NOISE_STREAM).rng();
    let total = settings.epochs * steps_per_epoch(n, m);
    for step in 0..total {
        g.iter_mut().for_each(|x| *x = 0.0);
        for j in lot_indices(rng, n, m, step) {
            loss.gradient(data.row(j), data.label(j), &w, &mut per_example);
            clip_in_place(&mut per_example, settings.clipping_norm);
            observer.clipped_gradient(&per_example);
            for (gi, pi) in g.iter_mut().zip(&per_example) {
                *gi += pi;
            }
        }
        g.iter_mut().for_each(|x| *x /= m as f64);
        if noisy {
            for z in noise.iter_mut() {
                *z = noise_sd * noise_rng.sample::<f64, _>(StandardNormal);
            }
            observer.noise(&noise);
            for (gi, z) in g.iter_mut().zip(&noise) {
                *gi += z;
            }
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Training(format!(
                "non-finite gradient at step {step} of {total}"
            )));
        }
        match optimizer {
            Optimizer::Sgd => {
                for (wi, gi) in w.iter_mut().zip(&g) {
                    *wi -= settings.learning_rate * gi;
                }
            }
            Optimizer::Adam => {
                let i = (step + 1) as i32;
                let c1 = 1.0 - ADAM_BETA1.powi(i);
                let c2 = 1.0 - ADAM_BETA2.powi(i);
                for k in 0..d {
                    mu[k] = ADAM_BETA1 * mu[k] + (1.0 - ADAM_BETA1) * g[k];
                    nu[k] = ADAM_BETA2 * nu[k] + (1.0 - ADAM_BETA2) * g[k] * g[k];
                    let mu_hat = mu[k] / c1;
                    let nu_hat = nu[k] / c2;
                    w[k] -= settings.learning_rate * mu_hat / (nu_hat.sqrt() + ADAM_KAPPA);
                }
            }
        }
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::Training("weights diverged".into()));
    }
    Ok(w)
}

pub fn dp_sgd_train(data: &Dataset, hp: &TrainingHyperparams, loss: Loss, rng: &RngStream) -> Result<Vec<f64>> {
    hp.validate(data.len())?;
    train_observed(data, &hp.into(), loss, Optimizer::Sgd, rng, &mut ())
}

pub fn dp_adam_train(data: &Dataset, hp: &TrainingHyperparams, loss: Loss, rng: &RngStream) -> Result<Vec<f64>> {
    hp.validate(data.len())?;
    train_observed(data, &hp.into(), loss, Optimizer::Adam, rng, &mut ())
}

pub const OUTPUT_PERTURBATION_EPOCHS: usize = 10;

/// Non-private part of output perturbation: projected SGD with one example
/// per step on `ℓ_logistic + (γ/2)‖w‖²`, ten passes over shuffled data,
/// step size `min(1/β, 1/(γt))` with `β = 1/4 + γ`, projection onto the ball
/// of radius `1/γ`.
pub fn projected_sgd_logreg(data: &Dataset, regularization: f64, rng: &RngStream) -> Result<Vec<f64>> {
    if !(regularization.is_finite() && regularization > 0.0) {
        return Err(Error::input(format!("regularization must be positive, got {regularization}")));
    }
    let d = data.dim();
    let beta = 0.25 + regularization;
    let radius = 1.0 / regularization;
    let mut w = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut g = rng.rng();
    let mut t = 0u64;
    for _ in 0..OUTPUT_PERTURBATION_EPOCHS {
        order.shuffle(&mut g);
        for &j in &order {
            t += 1;
            let eta = (1.0 / beta).min(1.0 / (regularization * t as f64));
            Loss::Logistic.gradient(data.row(j), data.label(j), &w, &mut grad);
            for k in 0..d {
                w[k] -= eta * (grad[k] + regularization * w[k]);
            }
            clip_in_place(&mut w, radius);
        }
    }
    Ok(w)
}

/// Output-perturbed logistic regression: projected SGD, then `w + N(0, σ² I)`.
pub fn output_perturbed_logreg_train(
    data: &Dataset,
    regularization: f64,
    sigma: f64,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::input(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let mut w = projected_sgd_logreg(data, regularization, &rng.child(LOT_STREAM))?;
    if sigma > 0.0 {
        let mut g = rng.child(NOISE_STREAM).rng();
        for wi in w.iter_mut() {
            *wi += sigma * g.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(w)
}

/// 0/1 accuracy of `sign(w·x)` (ties predict +1).
pub fn accuracy(w: &[f64], data: &Dataset) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let correct = data
        .rows()
        .zip(data.labels())
        .filter(|(x, &y)| (if dot(w, x) >= 0.0 { 1.0 } else { -1.0 }) == y)
        .count();
    correct as f64 / data.len() as f64
}

/// Trains `repetitions` models with independent child streams and returns
/// the mean and per-run test accuracies, in run order.
pub fn accuracy_utility_oracle<F>(trainer: F, test: &Dataset, repetitions: usize, rng: &RngStream) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&RngStream) -> Result<Vec<f64>>,
{
    if repetitions == 0 {
        return Err(Error::input("at least one repetition is required"));
    }
    let runs = (0..repetitions)
        .map(|r| trainer(&rng.child(r as u64)).map(|w| accuracy(&w, test)))
        .collect::<Result<Vec<f64>>>()?;
    Ok((runs.iter().sum::<f64>() / repetitions as f64, runs))
}
