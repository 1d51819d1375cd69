//! The private algorithms whose privacy–utility trade-offs are explored,
//! together with their utility oracles and dataset handling.

pub mod data;
pub mod svt;
pub mod train;

pub use data::{load_dataset, synthetic_separable, DataFormat, Dataset};
pub use svt::{f1_score, make_svt_workload, run_svt, svt_utility_oracle, QueryWorkload};
pub use train::{
    accuracy, accuracy_utility_oracle, clip, dp_adam_train, dp_sgd_train, output_perturbed_logreg_train, Loss,
    Optimizer, TrainingHyperparams,
};
