//! Finite-difference gradient oracle shared by the integration tests.

use picolor::generators;
use picolor::gnn::{backward, init_model, Hyperparams, Model, ModelKind};
use picolor::potts::Couplings;
use picolor::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-5;
const REL_TOL: f64 = 1e-4;
const ABS_FLOOR: f64 = 1e-8;

pub fn close(analytic: f64, numeric: f64) -> bool {
    let diff = (analytic - numeric).abs();
    diff <= ABS_FLOOR || diff <= REL_TOL * analytic.abs().max(numeric.abs())
}

fn loss(model: &Model, g: &Graph, hp: &Hyperparams, j: &Couplings) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    backward(model, g, hp, j, &mut rng).unwrap().loss
}

fn central_difference(model: &mut Model, k: usize, i: usize, step: f64, f: &impl Fn(&Model) -> f64) -> f64 {
    let original = model.params.tensors()[k].1[i];
    model.params.tensors_mut()[k].1[i] = original + step;
    let up = f(model);
    model.params.tensors_mut()[k].1[i] = original - step;
    let down = f(model);
    model.params.tensors_mut()[k].1[i] = original;
    (up - down) / (2.0 * step)
}

/// Numeric derivative compared against `analytic`. ReLU makes the loss only
/// piecewise smooth, so on a mismatch the step shrinks until two successive
/// estimates agree (a kink no longer inside the step) and the converged value is used.
fn numeric_derivative(model: &mut Model, k: usize, i: usize, analytic: f64, f: impl Fn(&Model) -> f64) -> f64 {
    let mut step = STEP;
    let mut estimate = central_difference(model, k, i, step, &f);
    while !close(analytic, estimate) && step > 1e-8 {
        step /= 10.0;
        let finer = central_difference(model, k, i, step, &f);
        let converged = close(finer, estimate);
        estimate = finer;
        if converged {
            break;
        }
    }
    estimate
}

/// Returns the number of entries compared; panics with context on the first mismatch.
pub fn check_model(g: &Graph, hp: &Hyperparams, j: &Couplings) -> usize {
    let mut model = init_model(g, hp).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let analytic = backward(&model, g, hp, j, &mut rng).unwrap().grads;
    let analytic: Vec<Vec<f64>> = analytic.tensors().iter().map(|(_, t)| t.to_vec()).collect();
    let mut checked = 0;
    for (k, grads) in analytic.iter().enumerate() {
        for (i, &a) in grads.iter().enumerate() {
            let numeric = numeric_derivative(&mut model, k, i, a, |m| loss(m, g, hp, j));
            assert!(
                close(a, numeric),
                "{:?} q={} tensor {k} entry {i}: analytic {a:e} vs numeric {numeric:e}",
                hp.model_kind,
                hp.num_colors
            );
            checked += 1;
        }
    }
    checked
}

pub fn small_hp(kind: ModelKind, q: usize, seed: u64) -> Hyperparams {
    let mut hp = Hyperparams::small(q);
    hp.model_kind = kind;
    hp.embedding_dim = 5;
    hp.hidden_dims = vec![6];
    hp.dropout = 0.0;
    hp.seed = seed;
    hp
}

pub fn random_graphs() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..20)
        .map(|i| {
            let n = rng.gen_range(2..=30);
            let p = rng.gen_range(0.1..0.6);
            generators::gnp(n, p, 100 + i)
        })
        .collect()
}
