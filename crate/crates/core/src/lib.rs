//! Empirical privacy–utility Pareto fronts for hyperparameterized
//! differentially private algorithms.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`], [`objective`], [`rng`], [`evaluation`]: shared domain types,
//!   search-space normalisation, objective transforms, deterministic
//!   randomness and the JSONL evaluation log.
//! * [`pareto`]: dominance, front extraction, exact 2-D hypervolume and the
//!   staircase decomposition of the non-dominated region.
//! * [`gp`]: Matérn 5/2 Gaussian-process surrogates.
//! * [`acquisition`]: probability of improvement, HVPoI and its maximisation.
//! * [`privacy`]: privacy oracles and the Rényi-DP accountant.
//! * [`mechanisms`]: the private algorithms under study and their utility
//!   oracles.
//! * [`driver`]: the Bayesian-optimisation loop, baselines and analysis.
//! * [`experiment`]: declarative experiment configs, resumable runs and
//!   artifact export used by the `dpareto` binary.

pub mod acquisition;
pub mod driver;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod gp;
pub mod mechanisms;
pub mod objective;
pub mod pareto;
pub mod privacy;
pub mod rng;
pub mod space;
pub(crate) mod stats;

pub use error::{Error, Result};
pub use evaluation::{Evaluation, Method};
pub use objective::ObjectivePoint;
pub use pareto::{AntiIdealPoint, ParetoFront};
pub use rng::RngStream;
pub use space::{Dimension, HyperparameterDomain, HyperparameterVector, Scale};
