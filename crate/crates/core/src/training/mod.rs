//! The fixed trainable ansatz and the full-batch gradient-descent loop.

mod ansatz;
mod metrics;
mod model;
mod trainer;

pub use ansatz::{ansatz_gates, AnsatzParams, ANSATZ_GATES, NUM_PARAMS};
pub use metrics::{accuracy, loss};
pub use model::{forward, parameter_shift_grad, trained_map, EncodedBatch};
pub use trainer::{train, EpochRecord, EpochRecordView, TrainOutcome, TrainingConfig};
