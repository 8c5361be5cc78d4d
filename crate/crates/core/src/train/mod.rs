//! SmoothL1 training with Adam, plateau decay and early stopping.

mod config;
mod fit;
mod loss;
mod optim;
mod run;

pub use config::TrainConfig;
pub use fit::{descriptor_source, evaluate_loss, fit, metrics_csv, EpochMetrics, FitResult, METRICS_HEADER};
pub use loss::{batch_loss, record_terms, smooth_l1, smooth_l1_node};
pub use optim::{adam_step, AdamState, PlateauScheduler, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use run::{run_training, TrainingRun, CHECKPOINT_FILE, CONFIG_FILE, METRICS_FILE, SPLITS_FILE};
