//! Residue and noise predictors: an exact oracle and a trainable graph
//! network.

mod checkpoint;
mod gnn;
mod gradcheck;
mod loss;
mod oracle;
mod train;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use gnn::{
    backward, forward, loss_gradient, time_embedding, Cache, GnnDenoiser, GnnDims, GnnParams,
    GraphInput, ProblemKind, Slot, DEFAULT_TIME_DIM,
};
pub use gradcheck::{
    compare, finite_difference, grad_check, probe_indices, relative_error, GradCheck, GradExample,
};
pub use loss::{loss, loss_and_grad};
pub use oracle::{CountingDenoiser, OracleDenoiser};
pub use train::{train, train_from, LrSchedule, Optimizer, TrainConfig, TrainExample, TrainReport};
