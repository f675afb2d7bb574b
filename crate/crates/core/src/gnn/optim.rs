use super::config::{Hyperparams, OptimizerKind};
use super::model::{Model, ParamRole, Params};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First/second moment accumulators, one flat buffer per parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl OptimizerState {
    pub fn new(params: &Params) -> Self {
        let zeros: Vec<Vec<f64>> = params.tensors().iter().map(|(_, t)| vec![0.0; t.len()]).collect();
        OptimizerState {
            step: 0,
            first: zeros.clone(),
            second: zeros,
        }
    }
}

/// One bias-corrected Adam update. With `AdamW`, layer parameters (never the
/// embeddings) are first multiplied by `1 - lr * weight_decay`.
pub fn optimizer_step(model: &mut Model, grads: &Params, hp: &Hyperparams) {
    let state = &mut model.optimizer;
    state.step += 1;
    let t = state.step as i32;
    let lr = hp.learning_rate;
    let correction1 = 1.0 - BETA1.powi(t);
    let correction2 = 1.0 - BETA2.powi(t);
    let decay = match hp.optimizer_kind {
        OptimizerKind::Adam => 1.0,
        OptimizerKind::AdamW => 1.0 - lr * hp.weight_decay,
    };
    let grads = grads.tensors();
    for (k, (role, param)) in model.params.tensors_mut().into_iter().enumerate() {
        let grad = grads[k].1;
        let m = &mut state.first[k];
        let v = &mut state.second[k];
        for i in 0..param.len() {
            if role == ParamRole::Layer {
                param[i] *= decay;
            }
            m[i] = BETA1 * m[i] + (1.0 - BETA1) * grad[i];
            v[i] = BETA2 * v[i] + (1.0 - BETA2) * grad[i] * grad[i];
            let m_hat = m[i] / correction1;
            let v_hat = v[i] / correction2;
            param[i] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
        }
    }
}
