//! Normal-distribution helpers shared by the acquisition and privacy code.

use libm::erfc;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Natural log of the standard normal CDF, accurate deep into the lower tail.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return norm_cdf(x).ln();
    }
    // Asymptotic expansion of the Mills ratio.
    let x2 = x * x;
    let mut series = 1.0;
    let mut term = 1.0;
    for k in 1..8 {
        term *= -((2 * k - 1) as f64) / x2;
        series += term;
    }
    -0.5 * x2 - (-x).ln() - LN_SQRT_2PI + series.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((norm_cdf(-1.96) - 0.024_997_895_148_220_435).abs() < 1e-16);
    }

    #[test]
    fn log_cdf_is_continuous_at_the_switch() {
        let a = norm_cdf(-29.999_999).ln();
        let b = log_norm_cdf(-30.000_001);
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        assert!(log_norm_cdf(-1e3).is_finite());
    }
}
