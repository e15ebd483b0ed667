//! A small from-scratch dense-network lab: synthetic or IDX data, a ReLU MLP
//! trained with plain SGD, the generalizing / memorizing training recipes,
//! activation capture and per-batch firing-rate monitoring.

pub mod condition;
pub mod data;
pub mod idx;
pub mod mlp;
pub mod monitor;
pub mod params_io;
pub mod train;

pub use condition::{run_condition, Accuracies, Condition, RecipeConfig, RunArtifacts, Splits};
pub use data::{make_synthetic, make_synthetic_splits, shuffle_labels, Dataset, N_CLASSES};
pub use idx::{load_idx, write_idx};
pub use mlp::{forward_capture, gradient_check, init_network, DenseNetSpec, Params};
pub use monitor::{monitor_training, MonitorConfig, MonitorRow, Phase};
pub use params_io::{load_params, save_params};
pub use train::{train, FreezeMask, History, TrainConfig};
