//! Privacy oracles: the closed-form sparse-vector bound, analytic
//! calibration of the Gaussian mechanism, and a Rényi-DP accountant for
//! the subsampled Gaussian mechanism with conversion to `(ε, δ)`.
//!
//! RDP values use the unit-sensitivity convention: callers pass noise
//! multipliers (noise standard deviation divided by sensitivity).

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::stats::{log_norm_cdf, norm_cdf};

const EPSILON_CAP: f64 = 1e6;

fn check_svt(b: f64, c: f64) -> Result<()> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::domain(format!("SVT noise b must be positive, got {b}")));
    }
    if !(c.is_finite() && c >= 1.0) {
        return Err(Error::domain(format!("SVT bound C must be >= 1, got {c}")));
    }
    Ok(())
}

/// Pure ε of the sparse vector technique with noise `b` and answer bound `c`:
/// `(1 + (2C)^{1/3})(1 + (2C)^{2/3}) / b`.
pub fn svt_epsilon(b: f64, c: f64) -> Result<f64> {
    check_svt(b, c)?;
    let r = (2.0 * c).cbrt();
    Ok((1.0 + r) * (1.0 + r * r) / b)
}

/// The threshold and per-query halves `(ε₁, ε₂)` of [`svt_epsilon`], from the
/// split `b₁ = b / (1 + (2C)^{1/3})`, `b₂ = b − b₁`.
pub fn svt_epsilon_decomposed(b: f64, c: f64) -> Result<(f64, f64)> {
    check_svt(b, c)?;
    let (b1, b2) = svt_noise_split(b, c);
    Ok((1.0 / b1, 2.0 * c / b2))
}

/// Laplace scales for the threshold and the queries.
pub fn svt_noise_split(b: f64, c: f64) -> (f64, f64) {
    let r = (2.0 * c).cbrt();
    let b1 = b / (1.0 + r);
    // b − b₁ written as a product to avoid cancellation.
    (b1, b1 * r)
}

fn check_gaussian(sigma: f64, sensitivity: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if !(sensitivity.is_finite() && sensitivity > 0.0) {
        return Err(Error::domain(format!("sensitivity must be positive, got {sensitivity}")));
    }
    Ok(())
}

/// The tight δ of a Gaussian mechanism at privacy level ε:
/// `Φ(Δ/2σ − εσ/Δ) − e^ε Φ(−Δ/2σ − εσ/Δ)`.
pub fn gaussian_delta(epsilon: f64, sigma: f64, sensitivity: f64) -> f64 {
    let a = sensitivity / (2.0 * sigma);
    let b = epsilon * sigma / sensitivity;
    norm_cdf(a - b) - (epsilon + log_norm_cdf(-a - b)).exp()
}

/// Smallest ε with `gaussian_delta(ε) <= delta`, by bisection.
pub fn gaussian_mechanism_epsilon(sigma: f64, sensitivity: f64, delta: f64) -> Result<f64> {
    check_gaussian(sigma, sensitivity)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let excess = |eps: f64| gaussian_delta(eps, sigma, sensitivity) - delta;
    if excess(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while excess(hi) > 0.0 {
        hi *= 2.0;
        if hi > EPSILON_CAP {
            return Err(Error::Overflow(EPSILON_CAP));
        }
    }
    let mut lo = 0.0;
    // The invariant keeps δ(hi) <= delta, so the result is always valid.
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// ε-RDP of order `order` for a Gaussian mechanism with unit sensitivity.
pub fn rdp_gaussian(order: f64, noise_multiplier: f64) -> Result<f64> {
    if !(order > 1.0 && order.is_finite()) {
        return Err(Error::domain(format!("RDP order must exceed 1, got {order}")));
    }
    if !(noise_multiplier.is_finite() && noise_multiplier > 0.0) {
        return Err(Error::domain(format!(
            "noise multiplier must be positive, got {noise_multiplier}"
        )));
    }
    Ok(order / (2.0 * noise_multiplier * noise_multiplier))
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `ln(e^x − 1)` without overflow.
fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// RDP of the Gaussian mechanism run on a uniformly sampled fraction `gamma`
/// of the data (sampling without replacement). The amplification bound is
/// capped by the unamplified Gaussian, which it can exceed at large `gamma`.
pub fn rdp_subsampled_gaussian(order: u32, noise_multiplier: f64, gamma: f64) -> Result<f64> {
    if order < 2 {
        return Err(Error::domain(format!("subsampled RDP needs an integer order >= 2, got {order}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain(format!("sampling fraction must lie in [0, 1], got {gamma}")));
    }
    let eps = |j: u32| rdp_gaussian(j as f64, noise_multiplier);
    let e2 = eps(2)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let ln_gamma_frac = gamma.ln();
    let mut terms = Vec::with_capacity(order as usize - 1);
    let second = (std::f64::consts::LN_2 * 2.0 + ln_expm1(e2)).min(std::f64::consts::LN_2 + e2);
    terms.push(ln_binomial(order, 2) + 2.0 * ln_gamma_frac + second);
    for j in 3..=order {
        terms.push(
            ln_binomial(order, j)
                + j as f64 * ln_gamma_frac
                + std::f64::consts::LN_2
                + (j - 1) as f64 * eps(j)?,
        );
    }
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
    // ln(1 + e^m s), stable for both tiny and huge m.
    let total = if m < 0.0 {
        (m.exp() * s).ln_1p()
    } else {
        m + ((-m).exp() + s).ln()
    };
    Ok((total / (order - 1) as f64).min(rdp_gaussian(order as f64, noise_multiplier)?))
}

/// RDP guarantee as a function of the order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdpCurve {
    pub orders: Vec<f64>,
    pub values: Vec<f64>,
}

impl RdpCurve {
    pub fn new(orders: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if orders.len() != values.len() {
            return Err(Error::input("orders and values differ in length"));
        }
        if orders.iter().any(|&a| !(a > 1.0)) || orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("orders must be ascending and exceed 1"));
        }
        if values.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::input("RDP values must be non-negative"));
        }
        Ok(Self { orders, values })
    }

    /// Evaluates `f` on every order of the default grid `2..=256`.
    pub fn on_default_orders<F>(f: F) -> Result<Self>
    where
        F: Fn(u32) -> Result<f64>,
    {
        let orders: Vec<u32> = default_orders().collect();
        let values = orders.iter().map(|&a| f(a)).collect::<Result<Vec<_>>>()?;
        Self::new(orders.into_iter().map(f64::from).collect(), values)
    }
}

pub fn default_orders() -> impl Iterator<Item = u32> {
    2..=256
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpGuarantee {
    pub epsilon: f64,
    pub delta: f64,
}

/// Composition of `steps` adaptive applications of the same mechanism.
pub fn compose_rdp(per_step: &RdpCurve, steps: u64) -> RdpCurve {
    RdpCurve {
        orders: per_step.orders.clone(),
        values: per_step.values.iter().map(|v| v * steps as f64).collect(),
    }
}

/// Converts an RDP curve to `(ε, δ)`-DP, returning the minimising order too.
pub fn rdp_to_dp(curve: &RdpCurve, delta: f64) -> Result<(DpGuarantee, f64)> {
    if curve.orders.is_empty() {
        return Err(Error::input("RDP curve has no orders"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let log_inv = -delta.ln();
    let (epsilon, order) = curve
        .orders
        .iter()
        .zip(&curve.values)
        .map(|(&a, &v)| (v + log_inv / (a - 1.0), a))
        .fold((f64::INFINITY, f64::NAN), |best, cur| if cur.0 < best.0 { cur } else { best });
    Ok((DpGuarantee { epsilon, delta }, order))
}

/// Number of noisy gradient steps the accountant charges for DP-SGD: every
/// epoch counts `⌈n/m⌉` lots.
pub fn dpsgd_steps(n: usize, lot_size: usize, epochs: u64) -> u64 {
    epochs * n.div_ceil(lot_size) as u64
}

/// Per-step RDP curve of DP-SGD: subsampled Gaussian at `γ = m/n`.
pub fn dpsgd_step_curve(n: usize, lot_size: usize, noise_multiplier: f64) -> Result<RdpCurve> {
    let gamma = lot_size as f64 / n as f64;
    RdpCurve::on_default_orders(|a| rdp_subsampled_gaussian(a, noise_multiplier, gamma))
}

/// ε of DP-SGD (and DP-Adam) after `epochs` passes at noise multiplier `σ`.
pub fn dpsgd_epsilon(n: usize, lot_size: usize, epochs: u64, noise_multiplier: f64, delta: f64) -> Result<f64> {
    if lot_size == 0 || lot_size > n {
        return Err(Error::domain(format!("lot size must lie in [1, {n}], got {lot_size}")));
    }
    if epochs == 0 {
        return Err(Error::domain("epochs must be >= 1"));
    }
    let curve = dpsgd_step_curve(n, lot_size, noise_multiplier)?;
    let total = compose_rdp(&curve, dpsgd_steps(n, lot_size, epochs));
    Ok(rdp_to_dp(&total, delta)?.0.epsilon)
}

/// ℓ₂ sensitivity of the regularised logistic-regression minimiser with
/// unit-norm features: `2 / (n γ)`.
pub fn output_perturbation_sensitivity(n: usize, regularization: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("dataset must be non-empty"));
    }
    if !(regularization.is_finite() && regularization > 0.0) {
        return Err(Error::domain(format!("regularization must be positive, got {regularization}")));
    }
    Ok(2.0 / (n as f64 * regularization))
}

/// ε of output-perturbed logistic regression releasing `w + N(0, σ² I)`.
pub fn output_perturbation_epsilon(n: usize, regularization: f64, sigma: f64, delta: f64) -> Result<f64> {
    gaussian_mechanism_epsilon(sigma, output_perturbation_sensitivity(n, regularization)?, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svt_examples() {
        assert!((svt_epsilon(15.0, 4.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((svt_epsilon(85.0, 32.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((svt_epsilon(30.0, 4.0).unwrap() - 0.5).abs() < 1e-15);
        let (e1, e2) = svt_epsilon_decomposed(15.0, 4.0).unwrap();
        assert!((e1 - 0.2).abs() < 1e-15 && (e2 - 0.8).abs() < 1e-15);
        assert!(matches!(svt_epsilon(1.0, 0.5), Err(Error::Domain(_))));
        assert!(svt_epsilon_decomposed(1.0, 0.5).is_err());
        assert!(svt_epsilon(0.0, 2.0).is_err());
    }

    #[test]
    fn gaussian_delta_at_zero() {
        let d0 = gaussian_delta(0.0, 0.5, 1.0);
        assert!((d0 - (norm_cdf(1.0) - norm_cdf(-1.0))).abs() < 1e-15);
        assert_eq!(gaussian_mechanism_epsilon(0.5, 1.0, d0).unwrap(), 0.0);
        assert_eq!(gaussian_mechanism_epsilon(0.5, 1.0, 0.7).unwrap(), 0.0);
        // Six printed digits of δ(0) fall short of it, leaving a sliver of ε.
        let eps = gaussian_mechanism_epsilon(0.5, 1.0, 0.682689).unwrap();
        assert!(eps > 0.0 && eps < 4e-6);
    }

    #[test]
    fn gaussian_epsilon_vanishes_with_noise() {
        let eps: Vec<f64> = [1.0, 10.0, 100.0, 1000.0]
            .iter()
            .map(|&s| gaussian_mechanism_epsilon(s, 1.0, 1e-5).unwrap())
            .collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]));
        assert!(eps[3] < 2e-3);
        // δ(0) = 2Φ(Δ/2σ) − 1 falls below the target once σ ≳ 4e4.
        assert_eq!(gaussian_mechanism_epsilon(1e6, 1.0, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_overflow() {
        assert!(matches!(
            gaussian_mechanism_epsilon(1e-9, 1.0, 1e-300),
            Err(Error::Overflow(_))
        ));
        assert!(gaussian_mechanism_epsilon(1.0, 1.0, 0.0).is_err());
        assert!(gaussian_mechanism_epsilon(-1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn rdp_examples() {
        assert_eq!(rdp_gaussian(2.0, 1.0).unwrap(), 1.0);
        assert_eq!(rdp_gaussian(2.0, 2.0).unwrap(), 0.25);
        assert_eq!(rdp_gaussian(6.0, 1.3).unwrap(), 2.0 * rdp_gaussian(3.0, 1.3).unwrap());
        assert!(rdp_gaussian(1.0, 1.0).is_err());
        assert_eq!(rdp_subsampled_gaussian(7, 1.0, 0.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let expected = (1.0 + 1e-6 * (4.0 * (e - 1.0)).min(2.0 * e)).ln();
        let got = rdp_subsampled_gaussian(2, 1.0, 1e-3).unwrap();
        assert!((got - expected).abs() < 1e-10 * expected, "{got} {expected}");
        assert!((got - 5.4366e-6).abs() < 1e-9);
    }

    #[test]
    fn subsampled_handles_extreme_orders() {
        let v = rdp_subsampled_gaussian(256, 0.3, 0.9).unwrap();
        assert!(v.is_finite() && v > 0.0);
        let tiny = rdp_subsampled_gaussian(256, 50.0, 1e-6).unwrap();
        assert!(tiny.is_finite() && tiny >= 0.0);
    }

    #[test]
    fn conversion_examples() {
        let c = RdpCurve::new(vec![2.0], vec![1.0]).unwrap();
        let (g, order) = rdp_to_dp(&c, (-1.0f64).exp()).unwrap();
        assert!((g.epsilon - 2.0).abs() < 1e-15);
        assert_eq!(order, 2.0);
        assert_eq!(compose_rdp(&c, 1), c);
        assert_eq!(compose_rdp(&c, 2).values, vec![2.0]);
        let near_one = rdp_to_dp(&RdpCurve::new(vec![2.0, 3.0], vec![0.5, 0.7]).unwrap(), 1.0 - 1e-12).unwrap();
        assert!((near_one.0.epsilon - 0.5).abs() < 1e-9);
        assert!(rdp_to_dp(&RdpCurve::new(vec![], vec![]).unwrap(), 0.1).is_err());
    }

    #[test]
    fn dpsgd_pipeline() {
        assert_eq!(dpsgd_steps(2000, 100, 10), 200);
        assert_eq!(dpsgd_steps(2001, 100, 10), 210);
        let eps = dpsgd_epsilon(2000, 100, 10, 4.0, 1e-6).unwrap();
        assert!(eps.is_finite() && eps > 0.0);
        assert!(dpsgd_epsilon(2000, 100, 10, 8.0, 1e-6).unwrap() < eps);
        assert!(dpsgd_epsilon(2000, 100, 20, 4.0, 1e-6).unwrap() >= eps);
        assert!(dpsgd_epsilon(100, 101, 1, 1.0, 1e-6).is_err());
    }

    #[test]
    fn full_batch_step_is_no_looser_than_the_plain_gaussian() {
        let (n, sigma, delta) = (50, 1.5, 1e-5);
        let eps = dpsgd_epsilon(n, n, 1, sigma, delta).unwrap();
        let plain = RdpCurve::on_default_orders(|a| rdp_gaussian(a as f64, sigma)).unwrap();
        let plain_eps = rdp_to_dp(&plain, delta).unwrap().0.epsilon;
        assert!(eps <= plain_eps + 1e-12);
        for a in default_orders() {
            assert!(rdp_subsampled_gaussian(a, 8.0, 1.0).unwrap() <= rdp_gaussian(a as f64, 8.0).unwrap());
        }
    }

    #[test]
    fn output_perturbation_monotone_in_regularization() {
        let eps: Vec<f64> = [1e-3, 1e-2, 1e-1, 1.0]
            .iter()
            .map(|&g| output_perturbation_epsilon(1000, g, 0.01, 1e-6).unwrap())
            .collect();
        assert!(eps.windows(2).all(|w| w[1] <= w[0]));
        assert!(eps[0] > eps[3]);
        assert_eq!(output_perturbation_sensitivity(1000, 0.5).unwrap(), 0.004);
    }
}
