use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::evaluation::{Evaluation, Method};
use crate::pareto::AntiIdealPoint;
use crate::rng::RngStream;
use crate::space::{HyperparameterDomain, HyperparameterVector};

/// Maps hyperparameters to the ε of the algorithm at the problem's δ.
pub trait PrivacyOracle: Send + Sync {
    fn epsilon(&self, lambda: &HyperparameterVector) -> Result<f64>;
}

impl<F> PrivacyOracle for F
where
    F: Fn(&HyperparameterVector) -> Result<f64> + Send + Sync,
{
    fn epsilon(&self, lambda: &HyperparameterVector) -> Result<f64> {
        self(lambda)
    }
}

/// Runs the algorithm `repetitions` times and returns each run's utility in `[0, 1]`.
pub trait UtilityOracle: Send + Sync {
    fn utilities(&self, lambda: &HyperparameterVector, repetitions: usize, rng: &RngStream) -> Result<Vec<f64>>;
}

impl<F> UtilityOracle for F
where
    F: Fn(&HyperparameterVector, usize, &RngStream) -> Result<Vec<f64>> + Send + Sync,
{
    fn utilities(&self, lambda: &HyperparameterVector, repetitions: usize, rng: &RngStream) -> Result<Vec<f64>> {
        self(lambda, repetitions, rng)
    }
}

/// A search space with its two oracles.
#[derive(Clone)]
pub struct Problem {
    pub domain: HyperparameterDomain,
    pub privacy: Arc<dyn PrivacyOracle>,
    pub utility: Arc<dyn UtilityOracle>,
    pub delta: f64,
    pub anti_ideal: AntiIdealPoint,
    pub repetitions: usize,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("domain", &self.domain)
            .field("delta", &self.delta)
            .field("anti_ideal", &self.anti_ideal)
            .field("repetitions", &self.repetitions)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(
        domain: HyperparameterDomain,
        privacy: impl PrivacyOracle + 'static,
        utility: impl UtilityOracle + 'static,
    ) -> Self {
        Self {
            domain,
            privacy: Arc::new(privacy),
            utility: Arc::new(utility),
            delta: 0.0,
            anti_ideal: AntiIdealPoint::default(),
            repetitions: 1,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_anti_ideal(mut self, anti_ideal: AntiIdealPoint) -> Self {
        self.anti_ideal = anti_ideal;
        self
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    /// Queries both oracles at `lambda`.
    pub fn evaluate(
        &self,
        lambda: &HyperparameterVector,
        rng: &RngStream,
        method: Method,
        seed: u64,
    ) -> Result<Evaluation> {
        self.domain.check(lambda)?;
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be >= 1"));
        }
        let start = Instant::now();
        let epsilon = self.privacy.epsilon(lambda)?;
        let utilities = self.utility.utilities(lambda, self.repetitions, rng)?;
        if utilities.len() != self.repetitions {
            return Err(Error::input(format!(
                "utility oracle returned {} runs, expected {}",
                utilities.len(),
                self.repetitions
            )));
        }
        Evaluation::from_runs(
            lambda.clone(),
            epsilon,
            utilities,
            seed,
            method,
            start.elapsed().as_secs_f64(),
        )
    }
}
