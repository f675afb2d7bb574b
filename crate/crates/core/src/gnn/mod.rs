//! Physics-inspired solver: a message-passing network trained without labels
//! against the relaxed Potts loss, then projected to a hard coloring.

mod config;
mod model;
mod optim;
mod train;

pub use config::{preset, Hyperparams, ModelKind, OptimizerKind, PRESETS};
pub use model::{backward, forward, init_model, BackwardOutput, LayerParams, Model, ParamRole, Params};
pub use optim::{optimizer_step, OptimizerState, BETA1, BETA2, EPSILON};
pub use train::{
    find_q_upper, project_argmax, train, train_with_limit, QAttempt, QSearchOptions, QSearchResult,
    SearchStrategy, StopReason, TrainResult,
};
