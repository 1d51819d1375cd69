//! Probability of improvement over a Pareto front, the hypervolume-weighted
//! variant HVPoI, and its numerical maximisation over the unit cube.
//!
//! Everything here works in the transformed objective space the surrogates
//! are fitted in: fronts and anti-ideal points must already be transformed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gp::SurrogateModel;
use crate::objective::ObjectivePoint;
use crate::pareto::{hv_increment, nondominated_cells, AntiIdealPoint, Cell, ParetoFront};
use crate::rng::RngStream;
use crate::space::{HyperparameterDomain, HyperparameterVector};
use crate::stats::norm_cdf;

/// Standard deviations at or below this are treated as point masses.
pub const DEGENERATE_SD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionConfig {
    pub candidate_count: usize,
    pub refine_top: usize,
    pub refine_iters: usize,
    pub rng: RngStream,
}

impl AcquisitionConfig {
    pub fn new(rng: RngStream) -> Self {
        Self {
            candidate_count: 1000,
            refine_top: 5,
            refine_iters: 50,
            rng,
        }
    }
}

/// Probability that a bivariate Gaussian with independent coordinates lands
/// in the union of `cells`.
pub fn gaussian_cell_mass(mean: [f64; 2], sd: [f64; 2], cells: &[Cell]) -> f64 {
    let mass = |lo: f64, hi: f64, m: f64, s: f64| {
        if s <= DEGENERATE_SD {
            return if lo <= m && m < hi { 1.0 } else { 0.0 };
        }
        (norm_cdf((hi - m) / s) - norm_cdf((lo - m) / s)).max(0.0)
    };
    let total: f64 = cells
        .iter()
        .map(|c| {
            mass(c.lower[0], c.upper[0], mean[0], sd[0]) * mass(c.lower[1], c.upper[1], mean[1], sd[1])
        })
        .sum();
    total.clamp(0.0, 1.0)
}

fn predictive(models: &[SurrogateModel; 2], x: &[f64]) -> ([f64; 2], [f64; 2]) {
    let (m0, v0) = models[0].predict(x);
    let (m1, v1) = models[1].predict(x);
    ([m0, m1], [v0.sqrt(), v1.sqrt()])
}

/// PoI at unit-cube input `x`.
pub fn poi(models: &[SurrogateModel; 2], x: &[f64], front: &ParetoFront, anti: &AntiIdealPoint) -> f64 {
    let (mean, sd) = predictive(models, x);
    gaussian_cell_mass(mean, sd, &nondominated_cells(front, anti))
}

/// HVPoI at unit-cube input `x`: the hypervolume increment of the predictive
/// mean times PoI.
pub fn hvpoi(models: &[SurrogateModel; 2], x: &[f64], front: &ParetoFront, anti: &AntiIdealPoint) -> f64 {
    Surface::new(models, front, anti).value(x).0
}

/// Acquisition surface with the cell decomposition computed once.
struct Surface<'a> {
    models: &'a [SurrogateModel; 2],
    front: &'a ParetoFront,
    anti: &'a AntiIdealPoint,
    cells: Vec<Cell>,
}

impl<'a> Surface<'a> {
    fn new(models: &'a [SurrogateModel; 2], front: &'a ParetoFront, anti: &'a AntiIdealPoint) -> Self {
        Self {
            models,
            front,
            anti,
            cells: nondominated_cells(front, anti),
        }
    }

    fn increment(&self, x: &[f64]) -> f64 {
        let mean = ObjectivePoint::at(self.models[0].predict_mean(x), self.models[1].predict_mean(x));
        hv_increment(self.front, &mean, self.anti)
    }

    fn poi(&self, x: &[f64]) -> f64 {
        let (mean, sd) = predictive(self.models, x);
        gaussian_cell_mass(mean, sd, &self.cells)
    }

    /// `(hvpoi, poi)`; PoI is only computed when the increment is positive.
    fn value(&self, x: &[f64]) -> (f64, Option<f64>) {
        let inc = self.increment(x);
        if inc > 0.0 {
            let p = self.poi(x);
            (inc * p, Some(p))
        } else {
            (0.0, None)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// HVPoI was positive somewhere; the argmax was returned.
    None,
    /// HVPoI vanished on every candidate; the candidate with the largest PoI was returned.
    MaxPoi,
    /// PoI vanished too; a uniform random point was returned.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionOutcome {
    pub point: HyperparameterVector,
    pub unit: Vec<f64>,
    pub value: f64,
    pub fallback: Fallback,
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// `count` points of a randomly shifted Halton sequence in `[0,1)^dim`.
pub fn shifted_halton<R: Rng>(count: usize, dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let shift: Vec<f64> = (0..dim).map(|_| rng.random()).collect();
    (1..=count as u64)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let base = PRIMES[j % PRIMES.len()] + 2 * (j / PRIMES.len()) as u32 * 59;
                    let x = radical_inverse(i, base) + shift[j];
                    x - x.floor()
                })
                .collect()
        })
        .collect()
}

/// Compass search from `start`: polls `±step` along every axis, moves to the
/// best strict improvement, halves the step otherwise.
fn pattern_search<F: Fn(&[f64]) -> f64>(start: &[f64], start_value: f64, iters: usize, f: &F) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut fx = start_value;
    let mut step = 0.1;
    for _ in 0..iters {
        let mut best: Option<(Vec<f64>, f64)> = None;
        for j in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[j] = (y[j] + dir * step).clamp(0.0, 1.0);
                if y[j] == x[j] {
                    continue;
                }
                let fy = f(&y);
                if fy > best.as_ref().map_or(fx, |b| b.1) {
                    best = Some((y, fy));
                }
            }
        }
        match best {
            Some((y, fy)) => {
                x = y;
                fx = fy;
            }
            None => {
                step *= 0.5;
                if step < 1e-6 {
                    break;
                }
            }
        }
    }
    (x, fx)
}

/// Maximises HVPoI over the domain and returns the denormalised argmax.
pub fn maximize_acquisition(
    models: &[SurrogateModel; 2],
    domain: &HyperparameterDomain,
    front: &ParetoFront,
    anti: &AntiIdealPoint,
    config: &AcquisitionConfig,
) -> Result<AcquisitionOutcome> {
    let mut rng = config.rng.rng();
    let surface = Surface::new(models, front, anti);
    let candidates = shifted_halton(config.candidate_count.max(1), domain.len(), &mut rng);
    let values: Vec<f64> = candidates.iter().map(|x| surface.value(x).0).collect();

    let mut order: Vec<usize> = (0..candidates.len()).filter(|&i| values[i] > 0.0).collect();
    if order.is_empty() {
        // Acquisition is flat zero: fall back to PoI, then to exploration.
        let pois: Vec<f64> = candidates.iter().map(|x| surface.poi(x)).collect();
        let (best, best_poi) = argmax(&pois);
        let (unit, fallback) = if best_poi > 0.0 {
            (candidates[best].clone(), Fallback::MaxPoi)
        } else {
            ((0..domain.len()).map(|_| rng.random()).collect(), Fallback::Random)
        };
        return Ok(AcquisitionOutcome {
            point: domain.denormalize(&unit)?,
            unit,
            value: 0.0,
            fallback,
        });
    }
    // Stable sort keeps the lowest index first among equal values.
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let (raw_best, _) = argmax(&values);
    let mut best_unit = candidates[raw_best].clone();
    let mut best_value = values[raw_best];
    let f = |x: &[f64]| surface.value(x).0;
    for &i in order.iter().take(config.refine_top) {
        let (x, v) = pattern_search(&candidates[i], values[i], config.refine_iters, &f);
        if v > best_value {
            best_unit = x;
            best_value = v;
        }
    }
    Ok(AcquisitionOutcome {
        point: domain.denormalize(&best_unit)?,
        unit: best_unit,
        value: best_value,
        fallback: Fallback::None,
    })
}

/// Index and value of the first maximum.
fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
}
