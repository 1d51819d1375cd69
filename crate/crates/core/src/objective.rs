//! Points in the (ε, error) plane and the fixed output transforms applied
//! before surrogate modelling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower clamp for ε before taking its log.
pub const EPSILON_FLOOR: f64 = 1e-12;
/// Error is clamped into `[ERROR_CLAMP, 1 - ERROR_CLAMP]` before the logit.
pub const ERROR_CLAMP: f64 = 1e-6;

/// A privacy loss and an error (1 − utility), both minimised.
///
/// Pareto computations also reuse this type for points that live in the
/// transformed objective space, where the range invariants do not apply;
/// [`ObjectivePoint::new`] is the checked constructor for oracle outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePoint {
    pub epsilon: f64,
    pub error: f64,
}

impl ObjectivePoint {
    pub fn new(epsilon: f64, error: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::input(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&error) {
            return Err(Error::input(format!("error must lie in [0, 1], got {error}")));
        }
        Ok(Self { epsilon, error })
    }

    /// Unchecked constructor for arbitrary plane coordinates.
    pub const fn at(epsilon: f64, error: f64) -> Self {
        Self { epsilon, error }
    }

    pub fn coords(&self) -> [f64; 2] {
        [self.epsilon, self.error]
    }
}

pub fn logit(p: f64) -> f64 {
    p.ln() - (1.0 - p).ln()
}

pub fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `(log ε, logit error)` with clamping so the map is total.
pub fn transform_objectives(o: &ObjectivePoint) -> (f64, f64) {
    let eps = o.epsilon.max(EPSILON_FLOOR);
    let err = o.error.clamp(ERROR_CLAMP, 1.0 - ERROR_CLAMP);
    (eps.ln(), logit(err))
}

pub fn inverse_transform(t_eps: f64, t_err: f64) -> ObjectivePoint {
    ObjectivePoint::at(t_eps.exp(), logistic(t_err))
}
