//! Gaussian-process regression with a Matérn 5/2 ARD kernel.
//!
//! Targets are mean-centred before fitting. Inference is exact via a
//! Cholesky factorisation of `K + (noise + jitter) I`; kernel
//! hyperparameters are chosen by multi-start projected gradient ascent on
//! the log marginal likelihood, parameterised in log space and box-bounded.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const NOISE_FLOOR: f64 = 1e-6;

const SQRT5: f64 = 2.236_067_977_499_79;
const LN_2PI: f64 = 1.837_877_066_409_345_5;
const JITTER_LADDER: [f64; 8] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub signal_variance: f64,
    pub lengthscales: Vec<f64>,
    pub noise_variance: f64,
}

impl KernelParams {
    pub fn new(signal_variance: f64, lengthscales: Vec<f64>, noise_variance: f64) -> Self {
        Self {
            signal_variance,
            lengthscales,
            noise_variance,
        }
    }

    pub fn isotropic(dim: usize, signal_variance: f64, lengthscale: f64, noise_variance: f64) -> Self {
        Self::new(signal_variance, vec![lengthscale; dim], noise_variance)
    }

    /// `[ln σ_f², ln ℓ_1, …, ln ℓ_d, ln σ_n²]`.
    pub fn to_log(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.lengthscales.len() + 2);
        v.push(self.signal_variance.ln());
        v.extend(self.lengthscales.iter().map(|l| l.ln()));
        v.push(self.noise_variance.ln());
        v
    }

    pub fn from_log(theta: &[f64]) -> Self {
        let d = theta.len() - 2;
        Self {
            signal_variance: theta[0].exp(),
            lengthscales: theta[1..=d].iter().map(|t| t.exp()).collect(),
            noise_variance: theta[d + 1].exp(),
        }
    }

    fn scaled_sq_dist(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .zip(&self.lengthscales)
            .map(|((a, b), l)| {
                let t = (a - b) / l;
                t * t
            })
            .sum()
    }
}

fn matern_shape(r: f64) -> f64 {
    (1.0 + SQRT5 * r + 5.0 * r * r / 3.0) * (-SQRT5 * r).exp()
}

/// `σ_f² (1 + √5 r + 5r²/3) exp(−√5 r)` with `r` the lengthscale-scaled distance.
pub fn matern52(x: &[f64], y: &[f64], params: &KernelParams) -> f64 {
    params.signal_variance * matern_shape(params.scaled_sq_dist(x, y).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub seed: u64,
    pub restarts: usize,
    /// Ascent iterations every start receives before the field is narrowed.
    pub screening_iters: usize,
    /// Number of starts continued to convergence after screening.
    pub keep: usize,
    pub max_iters: usize,
    pub noise_floor: f64,
    pub lengthscale_bounds: (f64, f64),
    pub signal_bounds: (f64, f64),
    pub noise_max: f64,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 8,
            screening_iters: 6,
            keep: 2,
            max_iters: 60,
            noise_floor: NOISE_FLOOR,
            lengthscale_bounds: (1e-2, 10.0),
            signal_bounds: (1e-4, 1e4),
            noise_max: 1.0,
        }
    }
}

impl GpConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn log_bounds(&self, dim: usize) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![self.signal_bounds.0.ln()];
        let mut hi = vec![self.signal_bounds.1.ln()];
        lo.extend(std::iter::repeat_n(self.lengthscale_bounds.0.ln(), dim));
        hi.extend(std::iter::repeat_n(self.lengthscale_bounds.1.ln(), dim));
        lo.push(self.noise_floor.ln());
        hi.push(self.noise_max.ln());
        (lo, hi)
    }
}

/// Dot product with eight independent accumulators so the loop vectorizes
/// without a single serial add chain.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// In-place lower Cholesky of a row-major `n x n` matrix. Returns false if
/// a pivot is not positive.
fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (i * n, j * n);
            let v = a[ri + j] - dot(&a[ri..ri + j], &a[rj..rj + j]);
            if i == j {
                if !(v > 0.0) || !v.is_finite() {
                    return false;
                }
                a[ri + i] = v.sqrt();
            } else {
                a[ri + j] = v / a[rj + j];
            }
        }
        for j in i + 1..n {
            a[i * n + j] = 0.0;
        }
    }
    true
}

/// Solves `L z = b` for lower-triangular row-major `L`.
fn forward_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let d = dot(&l[i * n..i * n + i], &b[..i]);
        b[i] = (b[i] - d) / l[i * n + i];
    }
}

/// Solves `Lᵀ z = b`.
fn backward_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Per-dimension squared coordinate differences of the training inputs.
struct PairwiseSq {
    n: usize,
    per_dim: Vec<Vec<f64>>,
}

impl PairwiseSq {
    fn new(inputs: &[Vec<f64>], dim: usize) -> Self {
        let n = inputs.len();
        let per_dim = (0..dim)
            .map(|d| {
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..i {
                        let t = inputs[i][d] - inputs[j][d];
                        m[i * n + j] = t * t;
                        m[j * n + i] = t * t;
                    }
                }
                m
            })
            .collect();
        Self { n, per_dim }
    }

    fn scaled_r2(&self, idx: usize, params: &KernelParams) -> f64 {
        self.per_dim
            .iter()
            .zip(&params.lengthscales)
            .map(|(m, l)| m[idx] / (l * l))
            .sum()
    }

    /// `K + (noise + jitter) I`, row-major, full.
    fn gram(&self, params: &KernelParams, jitter: f64) -> Vec<f64> {
        let n = self.n;
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let v = params.signal_variance * matern_shape(self.scaled_r2(i * n + j, params).sqrt());
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
            k[i * n + i] = params.signal_variance + params.noise_variance + jitter;
        }
        k
    }
}

struct Factorization {
    factor: Vec<f64>,
    alpha: Vec<f64>,
    jitter: f64,
}

fn factorize(pairs: &PairwiseSq, params: &KernelParams, y: &[f64]) -> Option<Factorization> {
    let n = pairs.n;
    for &jitter in &JITTER_LADDER {
        let mut l = pairs.gram(params, jitter);
        if cholesky_in_place(&mut l, n) {
            let mut alpha = y.to_vec();
            forward_solve(&l, n, &mut alpha);
            backward_solve(&l, n, &mut alpha);
            if alpha.iter().all(|a| a.is_finite()) {
                return Some(Factorization {
                    factor: l,
                    alpha,
                    jitter,
                });
            }
        }
    }
    None
}

fn mll_of(f: &Factorization, y: &[f64]) -> f64 {
    let n = y.len();
    let fit: f64 = y.iter().zip(&f.alpha).map(|(a, b)| a * b).sum();
    let logdet: f64 = (0..n).map(|i| f.factor[i * n + i].ln()).sum();
    -0.5 * fit - logdet - 0.5 * n as f64 * LN_2PI
}

/// Gradient of the log marginal likelihood with respect to the log parameters.
fn mll_gradient(pairs: &PairwiseSq, params: &KernelParams, f: &Factorization) -> Vec<f64> {
    let n = pairs.n;
    let d = params.lengthscales.len();
    // U = L^{-T}, stored row-major upper triangular, so K^{-1}_{ij} = sum_k U_ik U_jk.
    let l = &f.factor;
    let mut u = vec![0.0; n * n];
    for j in 0..n {
        u[j * n + j] = 1.0 / l[j * n + j];
        for i in j + 1..n {
            let d = dot(&l[i * n + j..i * n + i], &u[j * n + j..j * n + i]);
            u[j * n + i] = -d / l[i * n + i];
        }
    }
    let mut grad = vec![0.0; d + 2];
    let sf2 = params.signal_variance;
    for i in 0..n {
        for j in 0..=i {
            let kinv = dot(&u[i * n + i..i * n + n], &u[j * n + i..j * n + n]);
            let w = f.alpha[i] * f.alpha[j] - kinv;
            // Off-diagonal entries appear twice in the trace.
            let weight = if i == j { 0.5 * w } else { w };
            if i == j {
                grad[0] += weight * sf2;
                grad[d + 1] += weight * params.noise_variance;
                continue;
            }
            let idx = i * n + j;
            let r = pairs.scaled_r2(idx, params).sqrt();
            let e = (-SQRT5 * r).exp();
            grad[0] += weight * sf2 * (1.0 + SQRT5 * r + 5.0 * r * r / 3.0) * e;
            let common = sf2 * 5.0 / 3.0 * (1.0 + SQRT5 * r) * e;
            for (dd, m) in pairs.per_dim.iter().enumerate() {
                let ls = params.lengthscales[dd];
                grad[1 + dd] += weight * common * m[idx] / (ls * ls);
            }
        }
    }
    grad
}

/// A fitted (or prior) GP over unit-cube inputs.
#[derive(Debug, Clone)]
pub struct SurrogateModel {
    dim: usize,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    offset: f64,
    params: KernelParams,
    factor: Vec<f64>,
    alpha: Vec<f64>,
    jitter: f64,
}

fn validate_data(inputs: &[Vec<f64>], targets: &[f64]) -> Result<usize> {
    if inputs.len() != targets.len() {
        return Err(Error::input(format!(
            "{} inputs but {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    if inputs.is_empty() {
        return Err(Error::input("at least one training point is required"));
    }
    let dim = inputs[0].len();
    if inputs.iter().any(|x| x.len() != dim) {
        return Err(Error::input("training inputs have inconsistent dimension"));
    }
    if targets.iter().any(|y| !y.is_finite()) {
        return Err(Error::input("non-finite training target"));
    }
    if inputs.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::input("non-finite training input"));
    }
    Ok(dim)
}

impl SurrogateModel {
    /// The zero-mean prior; predictions return `(0, σ_f²)`.
    pub fn prior(params: KernelParams) -> Self {
        Self {
            dim: params.lengthscales.len(),
            inputs: Vec::new(),
            targets: Vec::new(),
            offset: 0.0,
            params,
            factor: Vec::new(),
            alpha: Vec::new(),
            jitter: 0.0,
        }
    }

    /// Exact inference at fixed kernel parameters.
    pub fn with_params(inputs: Vec<Vec<f64>>, targets: Vec<f64>, params: KernelParams) -> Result<Self> {
        let dim = validate_data(&inputs, &targets)?;
        if params.lengthscales.len() != dim {
            return Err(Error::input(format!(
                "{} lengthscales for {dim}-dimensional inputs",
                params.lengthscales.len()
            )));
        }
        let offset = targets.iter().sum::<f64>() / targets.len() as f64;
        let centred: Vec<f64> = targets.iter().map(|y| y - offset).collect();
        let pairs = PairwiseSq::new(&inputs, dim);
        let f = factorize(&pairs, &params, &centred).ok_or_else(|| {
            Error::Conditioning(format!(
                "Cholesky failed with jitter up to {:e}",
                JITTER_LADDER[JITTER_LADDER.len() - 1]
            ))
        })?;
        Ok(Self {
            dim,
            inputs,
            targets,
            offset,
            params,
            factor: f.factor,
            alpha: f.alpha,
            jitter: f.jitter,
        })
    }

    /// Fits kernel parameters by maximising the log marginal likelihood.
    pub fn fit(inputs: Vec<Vec<f64>>, targets: Vec<f64>, config: &GpConfig) -> Result<Self> {
        let dim = validate_data(&inputs, &targets)?;
        let offset = targets.iter().sum::<f64>() / targets.len() as f64;
        let centred: Vec<f64> = targets.iter().map(|y| y - offset).collect();
        let pairs = PairwiseSq::new(&inputs, dim);
        let (lo, hi) = config.log_bounds(dim);

        let value = |theta: &[f64]| -> Option<(f64, Factorization)> {
            let f = factorize(&pairs, &KernelParams::from_log(theta), &centred)?;
            let v = mll_of(&f, &centred);
            v.is_finite().then_some((v, f))
        };
        let gradient = |theta: &[f64], f: &Factorization| mll_gradient(&pairs, &KernelParams::from_log(theta), f);
        let objective = Objective {
            value: &value,
            gradient: &gradient,
        };

        let var = centred.iter().map(|y| y * y).sum::<f64>() / centred.len() as f64;
        let sf2 = if var > 0.0 { var } else { 1.0 };
        let mut first = vec![sf2.ln()];
        first.extend(std::iter::repeat_n(0.3f64.ln(), dim));
        first.push((1e-2 * sf2).ln());
        let mut starts = vec![clamp_vec(first, &lo, &hi)];
        let mut rng = RngStream::new(config.seed, 0x6770_6669_74).rng();
        while starts.len() < config.restarts.max(1) {
            starts.push(
                lo.iter()
                    .zip(&hi)
                    .map(|(a, b)| a + (b - a) * rng.random::<f64>())
                    .collect(),
            );
        }

        let mut runs: Vec<AscentState> = starts
            .into_iter()
            .filter_map(|x| AscentState::start(x, &objective))
            .collect();
        if runs.is_empty() {
            return Err(Error::Conditioning(
                "no start produced a factorizable kernel matrix".into(),
            ));
        }
        for run in &mut runs {
            run.advance(config.screening_iters, &lo, &hi, &objective);
        }
        // Stable sort keeps the earliest start on ties.
        runs.sort_by(|a, b| b.value.total_cmp(&a.value));
        runs.truncate(config.keep.max(1));
        let extra = config.max_iters.saturating_sub(config.screening_iters);
        for run in &mut runs {
            run.advance(extra, &lo, &hi, &objective);
        }
        let best = runs
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(j.cmp(i)))
            .map(|(_, r)| r)
            .expect("at least one run");
        Self::with_params(inputs, targets, KernelParams::from_log(&best.x))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Lower-triangular factor of `K + (noise + jitter) I`, row-major.
    pub fn factor(&self) -> &[f64] {
        &self.factor
    }

    pub fn gram(&self) -> Vec<f64> {
        PairwiseSq::new(&self.inputs, self.dim).gram(&self.params, self.jitter)
    }

    fn kernel_vector(&self, x: &[f64]) -> Vec<f64> {
        self.inputs.iter().map(|xi| matern52(x, xi, &self.params)).collect()
    }

    pub fn predict_mean(&self, x: &[f64]) -> f64 {
        if self.inputs.is_empty() {
            return self.offset;
        }
        let k = self.kernel_vector(x);
        self.offset + k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Posterior mean and latent variance (clamped at zero).
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        if self.inputs.is_empty() {
            return (self.offset, self.params.signal_variance);
        }
        let mut k = self.kernel_vector(x);
        let mean = self.offset + k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
        forward_solve(&self.factor, self.inputs.len(), &mut k);
        let explained: f64 = k.iter().map(|v| v * v).sum();
        (mean, (self.params.signal_variance - explained).max(0.0))
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        if self.inputs.is_empty() {
            return 0.0;
        }
        let centred: Vec<f64> = self.targets.iter().map(|y| y - self.offset).collect();
        mll_of(
            &Factorization {
                factor: self.factor.clone(),
                alpha: self.alpha.clone(),
                jitter: self.jitter,
            },
            &centred,
        )
    }

    /// Analytic gradient with respect to `[ln σ_f², ln ℓ…, ln σ_n²]`.
    pub fn log_marginal_likelihood_gradient(&self) -> Vec<f64> {
        if self.inputs.is_empty() {
            return vec![0.0; self.dim + 2];
        }
        let pairs = PairwiseSq::new(&self.inputs, self.dim);
        mll_gradient(
            &pairs,
            &self.params,
            &Factorization {
                factor: self.factor.clone(),
                alpha: self.alpha.clone(),
                jitter: self.jitter,
            },
        )
    }
}

fn clamp_vec(x: Vec<f64>, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    x.into_iter()
        .zip(lo.iter().zip(hi))
        .map(|(v, (a, b))| v.clamp(*a, *b))
        .collect()
}

/// One projected gradient-ascent trajectory with Barzilai–Borwein steps and
/// Armijo backtracking.
/// The log marginal likelihood, with the gradient computed separately so
/// rejected line-search trials only pay for a factorization.
struct Objective<'a> {
    value: &'a dyn Fn(&[f64]) -> Option<(f64, Factorization)>,
    gradient: &'a dyn Fn(&[f64], &Factorization) -> Vec<f64>,
}

struct AscentState {
    x: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
    step: f64,
    done: bool,
}

impl AscentState {
    fn start(x: Vec<f64>, f: &Objective) -> Option<Self> {
        let (value, fact) = (f.value)(&x)?;
        let grad = (f.gradient)(&x, &fact);
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        Some(Self {
            x,
            value,
            grad,
            step: if gmax > 0.0 { 0.5 / gmax } else { 1.0 },
            done: false,
        })
    }

    fn advance(&mut self, iters: usize, lo: &[f64], hi: &[f64], f: &Objective) {
        for _ in 0..iters {
            if self.done {
                return;
            }
            let mut step = self.step;
            let mut accepted = None;
            for _ in 0..30 {
                let cand: Vec<f64> = self
                    .x
                    .iter()
                    .zip(&self.grad)
                    .zip(lo.iter().zip(hi))
                    .map(|((x, g), (a, b))| (x + step * g).clamp(*a, *b))
                    .collect();
                let moved: f64 = cand
                    .iter()
                    .zip(&self.x)
                    .zip(&self.grad)
                    .map(|((c, x), g)| (c - x) * g)
                    .sum();
                if moved <= 0.0 {
                    // Projected gradient vanishes: stationary on the box.
                    self.done = true;
                    return;
                }
                if let Some((v, fact)) = (f.value)(&cand) {
                    if v >= self.value + 1e-4 * moved {
                        let g = (f.gradient)(&cand, &fact);
                        accepted = Some((cand, v, g));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((cand, v, g)) = accepted else {
                self.done = true;
                return;
            };
            let s: Vec<f64> = cand.iter().zip(&self.x).map(|(a, b)| a - b).collect();
            let sy: f64 = s
                .iter()
                .zip(g.iter().zip(&self.grad))
                .map(|(si, (gn, go))| si * (gn - go))
                .sum();
            let ss: f64 = s.iter().map(|v| v * v).sum();
            let improvement = v - self.value;
            self.x = cand;
            self.value = v;
            self.grad = g;
            self.step = if sy < 0.0 { (ss / -sy).clamp(1e-8, 1e4) } else { (step * 2.0).min(1e4) };
            if improvement < 1e-7 * (1.0 + v.abs()) || ss.sqrt() < 1e-8 {
                self.done = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn kernel_examples() {
        let p = KernelParams::isotropic(2, 2.5, 0.3, 0.0);
        assert_eq!(matern52(&[0.1, 0.2], &[0.1, 0.2], &p), 2.5);
        let unit = KernelParams::isotropic(1, 1.0, 1.0, 0.0);
        let expected = (1.0 + 5f64.sqrt() + 5.0 / 3.0) * (-(5f64.sqrt())).exp();
        assert!((matern52(&[0.0], &[1.0], &unit) - expected).abs() < 1e-15);
        assert!((expected - 0.523_994_5).abs() < 1e-6);
        assert!(matern52(&[0.0], &[1e4], &unit) < 1e-300);
        let ard = KernelParams::new(1.0, vec![0.2, 3.0], 0.0);
        let (a, b) = ([0.1, 0.9], [0.4, 0.2]);
        assert_eq!(matern52(&a, &b, &ard), matern52(&b, &a, &ard));
    }

    #[test]
    fn prior_prediction() {
        let m = SurrogateModel::prior(KernelParams::isotropic(2, 3.0, 0.5, 1e-6));
        assert_eq!(m.predict(&[0.3, 0.3]), (0.0, 3.0));
    }

    #[test]
    fn single_point_interpolates() {
        let m = SurrogateModel::fit(vec![vec![0.4, 0.6]], vec![0.7], &GpConfig::default()).unwrap();
        let (mu, _) = m.predict(&[0.4, 0.6]);
        assert!((mu - 0.7).abs() < 1e-6);
    }

    #[test]
    fn constant_targets() {
        let xs: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 5.0]).collect();
        let m = SurrogateModel::fit(xs, vec![-2.5; 6], &GpConfig::default()).unwrap();
        for x in [0.0, 0.13, 0.5, 0.77, 1.0] {
            assert!((m.predict(&[x]).0 + 2.5).abs() < 1e-3);
        }
    }

    #[test]
    fn smooth_function_is_learned() {
        let f = |x: f64| (6.0 * x).sin() + 0.5 * x;
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64 + 0.5) / 20.0]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| f(x[0])).collect();
        let mean = ys.iter().sum::<f64>() / 20.0;
        let prior_sd = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / 20.0).sqrt();
        let m = SurrogateModel::fit(xs, ys, &GpConfig::default()).unwrap();
        let test: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let rmse = (test.iter().map(|&x| (m.predict(&[x]).0 - f(x)).powi(2)).sum::<f64>() / 50.0).sqrt();
        assert!(rmse < 0.1 * prior_sd, "rmse {rmse} vs prior sd {prior_sd}");
    }

    #[test]
    fn factor_reconstructs_gram() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<Vec<f64>> = (0..15).map(|_| vec![rng.random(), rng.random()]).collect();
        let ys: Vec<f64> = (0..15).map(|_| rng.random()).collect();
        let m = SurrogateModel::with_params(xs, ys, KernelParams::new(1.3, vec![0.3, 0.7], 1e-3)).unwrap();
        let n = m.len();
        let l = m.factor();
        let k = m.gram();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|t| l[i * n + t] * l[j * n + t]).sum();
                num += (v - k[i * n + j]).powi(2);
                den += k[i * n + j].powi(2);
            }
        }
        assert!((num / den).sqrt() < 1e-8);
    }

    #[test]
    fn mll_single_unit_variance_point() {
        // K + noise = 1 and y = 0 after centring.
        let m = SurrogateModel::with_params(vec![vec![0.5]], vec![0.0], KernelParams::new(1.0 - 1e-12, vec![1.0], 1e-12)).unwrap();
        assert!((m.log_marginal_likelihood() + 0.918_938_533_204_672_7).abs() < 1e-9);
    }

    #[test]
    fn mll_falls_with_huge_noise() {
        let xs = vec![vec![0.1], vec![0.9]];
        let ys = vec![1.0, -1.0];
        let lml = |noise: f64| {
            SurrogateModel::with_params(xs.clone(), ys.clone(), KernelParams::new(1.0, vec![0.3], noise))
                .unwrap()
                .log_marginal_likelihood()
        };
        assert!(lml(1e6) < lml(1.0));
        assert!(lml(1e12) < lml(1e6));
        assert!(lml(1e12) < -20.0);
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<Vec<f64>> = (0..12).map(|_| vec![rng.random(), rng.random()]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x[0] * 3.0 - x[1]).collect();
        let cfg = GpConfig::with_seed(11);
        let a = SurrogateModel::fit(xs.clone(), ys.clone(), &cfg).unwrap();
        let b = SurrogateModel::fit(xs, ys, &cfg).unwrap();
        assert_eq!(a.params(), b.params());
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            SurrogateModel::fit(vec![vec![0.1]], vec![f64::NAN], &GpConfig::default()),
            Err(Error::Input(_))
        ));
        assert!(SurrogateModel::fit(vec![], vec![], &GpConfig::default()).is_err());
        assert!(SurrogateModel::fit(vec![vec![0.1]], vec![1.0, 2.0], &GpConfig::default()).is_err());
    }

    #[test]
    fn variance_bounds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<Vec<f64>> = (0..10).map(|_| vec![rng.random(), rng.random()]).collect();
        let ys: Vec<f64> = (0..10).map(|_| rng.random::<f64>() * 4.0).collect();
        let m = SurrogateModel::fit(xs, ys, &GpConfig::default()).unwrap();
        let p = m.params();
        for _ in 0..500 {
            let (_, v) = m.predict(&[rng.random(), rng.random()]);
            assert!(v >= 0.0 && v <= p.signal_variance + p.noise_variance + 1e-9);
        }
    }
}
