//! Two-step message-passing network with a softmax head and hand-written
//! reverse-mode gradients.

use ndarray::{Array1, Array2, Axis, Zip};
use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{Hyperparams, ModelKind};
use super::optim::OptimizerState;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::potts::{self, Couplings, SoftAssignment};

/// Trainable parameters of one message-passing layer.
///
/// GCN-style layers use `weight` alone; SAGE-style layers apply `weight` to the
/// node's own state and `neighbor_weight` to the mean of its neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weight: Array2<f64>,
    pub neighbor_weight: Option<Array2<f64>>,
    pub bias: Array1<f64>,
}

/// All trainable tensors. Gradients share this shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// Node embeddings `h^0`, one row per node.
    pub embeddings: Array2<f64>,
    pub layers: Vec<LayerParams>,
}

/// Whether weight decay may touch a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Embedding,
    Layer,
}

impl Params {
    pub fn zeros_like(&self) -> Params {
        Params {
            embeddings: Array2::zeros(self.embeddings.raw_dim()),
            layers: self
                .layers
                .iter()
                .map(|l| LayerParams {
                    weight: Array2::zeros(l.weight.raw_dim()),
                    neighbor_weight: l.neighbor_weight.as_ref().map(|w| Array2::zeros(w.raw_dim())),
                    bias: Array1::zeros(l.bias.raw_dim()),
                })
                .collect(),
        }
    }

    /// Flat views of every tensor, embeddings first, then each layer's
    /// weight, neighbor weight and bias.
    pub fn tensors(&self) -> Vec<(ParamRole, &[f64])> {
        let mut out = vec![(ParamRole::Embedding, self.embeddings.as_slice().unwrap())];
        for l in &self.layers {
            out.push((ParamRole::Layer, l.weight.as_slice().unwrap()));
            if let Some(w) = &l.neighbor_weight {
                out.push((ParamRole::Layer, w.as_slice().unwrap()));
            }
            out.push((ParamRole::Layer, l.bias.as_slice().unwrap()));
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<(ParamRole, &mut [f64])> {
        let mut out = vec![(ParamRole::Embedding, self.embeddings.as_slice_mut().unwrap())];
        for l in &mut self.layers {
            out.push((ParamRole::Layer, l.weight.as_slice_mut().unwrap()));
            if let Some(w) = &mut l.neighbor_weight {
                out.push((ParamRole::Layer, w.as_slice_mut().unwrap()));
            }
            out.push((ParamRole::Layer, l.bias.as_slice_mut().unwrap()));
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }
}

/// A network bound to one graph: parameters plus optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub params: Params,
    pub optimizer: OptimizerState,
}

/// Draws a fresh model. Embeddings are uniform on `±1/sqrt(d0)`, weights uniform
/// on `±1/sqrt(fan_in)`, biases zero; everything follows from `hp.seed`.
pub fn init_model(g: &Graph, hp: &Hyperparams) -> Result<Model> {
    hp.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Input("cannot build a model for an empty graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let dims = hp.layer_dims();
    let mut uniform = |rows: usize, cols: usize, scale: f64| {
        let dist = Uniform::new_inclusive(-scale, scale);
        Array2::from_shape_fn((rows, cols), |_| dist.sample(&mut rng))
    };
    let d0 = dims[0];
    let embeddings = uniform(n, d0, 1.0 / (d0 as f64).sqrt());
    let layers = dims
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let scale = 1.0 / (fan_in as f64).sqrt();
            let weight = uniform(fan_in, fan_out, scale);
            let neighbor_weight = match hp.model_kind {
                ModelKind::Gcn => None,
                ModelKind::Sage => Some(uniform(fan_in, fan_out, scale)),
            };
            LayerParams {
                weight,
                neighbor_weight,
                bias: Array1::zeros(fan_out),
            }
        })
        .collect();
    let params = Params { embeddings, layers };
    let optimizer = OptimizerState::new(&params);
    Ok(Model {
        kind: hp.model_kind,
        params,
        optimizer,
    })
}

/// Sparse aggregation operator of a layer family on a fixed graph.
#[derive(Debug, Clone)]
pub(crate) struct Propagator {
    kind: ModelKind,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    // GCN: 1/sqrt(d+1); SAGE: 1/d (0 for isolated nodes).
    scale: Vec<f64>,
}

impl Propagator {
    pub(crate) fn new(g: &Graph, kind: ModelKind) -> Self {
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for v in 0..n {
            neighbors.extend_from_slice(g.neighbors(v));
            offsets.push(neighbors.len());
        }
        let scale = (0..n)
            .map(|v| {
                let d = g.degree(v) as f64;
                match kind {
                    ModelKind::Gcn => 1.0 / (d + 1.0).sqrt(),
                    ModelKind::Sage if d > 0.0 => 1.0 / d,
                    ModelKind::Sage => 0.0,
                }
            })
            .collect();
        Propagator {
            kind,
            offsets,
            neighbors,
            scale,
        }
    }

    fn node_count(&self) -> usize {
        self.scale.len()
    }

    fn adj(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// GCN: `D^-1/2 (A + I) D^-1/2 X`; SAGE: neighbor mean of `X`.
    fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut y = Array2::zeros(x.raw_dim());
        for v in 0..self.node_count() {
            let mut row = y.row_mut(v);
            match self.kind {
                ModelKind::Gcn => {
                    row.scaled_add(self.scale[v], &x.row(v));
                    for &u in self.adj(v) {
                        row.scaled_add(self.scale[u], &x.row(u));
                    }
                    row *= self.scale[v];
                }
                ModelKind::Sage => {
                    for &u in self.adj(v) {
                        row += &x.row(u);
                    }
                    row *= self.scale[v];
                }
            }
        }
        y
    }

    /// Transpose of [`Propagator::apply`].
    fn apply_transpose(&self, x: &Array2<f64>) -> Array2<f64> {
        match self.kind {
            ModelKind::Gcn => self.apply(x),
            ModelKind::Sage => {
                let mut y = Array2::zeros(x.raw_dim());
                for u in 0..self.node_count() {
                    let mut row = y.row_mut(u);
                    for &v in self.adj(u) {
                        row.scaled_add(self.scale[v], &x.row(v));
                    }
                }
                y
            }
        }
    }
}

/// Intermediate values of one forward pass, kept for the backward pass.
struct Trace {
    // Input to each layer (layer 0 sees the embeddings).
    inputs: Vec<Array2<f64>>,
    aggregated: Vec<Array2<f64>>,
    pre_activations: Vec<Array2<f64>>,
    // Inverted-dropout multipliers (0 or 1/(1-p)) of each hidden layer.
    masks: Vec<Option<Array2<f64>>>,
    probs: Array2<f64>,
}

fn check_dims(model: &Model, g: &Graph, hp: &Hyperparams) -> Result<()> {
    let dims = hp.layer_dims();
    let p = &model.params;
    let ok = model.kind == hp.model_kind
        && p.embeddings.nrows() == g.node_count()
        && p.embeddings.ncols() == dims[0]
        && p.layers.len() + 1 == dims.len()
        && p.layers.iter().zip(dims.windows(2)).all(|(l, w)| {
            l.weight.dim() == (w[0], w[1])
                && l.bias.len() == w[1]
                && match hp.model_kind {
                    ModelKind::Gcn => l.neighbor_weight.is_none(),
                    ModelKind::Sage => l.neighbor_weight.as_ref().is_some_and(|n| n.dim() == (w[0], w[1])),
                }
        });
    if ok {
        Ok(())
    } else {
        Err(Error::Input("model dimensions do not match the graph and hyperparameters".into()))
    }
}

fn softmax_rows(z: &mut Array2<f64>) {
    for mut row in z.axis_iter_mut(Axis(0)) {
        let max = row.fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row /= sum;
    }
}

fn run_forward(params: &Params, prop: &Propagator, dropout: Option<(f64, &mut ChaCha8Rng)>) -> Trace {
    let mut dropout = dropout.filter(|(p, _)| *p > 0.0);
    let depth = params.layers.len();
    let mut trace = Trace {
        inputs: Vec::with_capacity(depth),
        aggregated: Vec::with_capacity(depth),
        pre_activations: Vec::with_capacity(depth),
        masks: Vec::with_capacity(depth),
        probs: Array2::zeros((0, 0)),
    };
    let mut h = params.embeddings.clone();
    for (k, layer) in params.layers.iter().enumerate() {
        let agg = prop.apply(&h);
        let mut z = match &layer.neighbor_weight {
            None => agg.dot(&layer.weight),
            Some(wn) => h.dot(&layer.weight) + agg.dot(wn),
        };
        z += &layer.bias;
        let next = if k + 1 == depth {
            let mut p = z.clone();
            softmax_rows(&mut p);
            trace.masks.push(None);
            p
        } else {
            let mut a = z.mapv(|x| x.max(0.0));
            match dropout.as_mut() {
                Some((rate, rng)) => {
                    let keep = 1.0 / (1.0 - *rate);
                    let mask = Array2::from_shape_fn(a.raw_dim(), |_| if rng.gen::<f64>() < *rate { 0.0 } else { keep });
                    a *= &mask;
                    trace.masks.push(Some(mask));
                }
                None => trace.masks.push(None),
            }
            a
        };
        trace.inputs.push(std::mem::replace(&mut h, next));
        trace.aggregated.push(agg);
        trace.pre_activations.push(z);
    }
    trace.probs = h;
    trace
}

/// Soft color assignment produced by the network.
///
/// With `train_mode` set, hidden activations pass through inverted dropout drawn
/// from `rng`; otherwise the pass is deterministic and `rng` is untouched.
pub fn forward(
    model: &Model,
    g: &Graph,
    hp: &Hyperparams,
    train_mode: bool,
    rng: &mut ChaCha8Rng,
) -> Result<SoftAssignment> {
    check_dims(model, g, hp)?;
    let prop = Propagator::new(g, model.kind);
    let dropout = train_mode.then_some((hp.dropout, rng));
    Ok(SoftAssignment::from_softmax(run_forward(&model.params, &prop, dropout).probs))
}

/// Output of one training-mode forward/backward pass.
#[derive(Debug, Clone)]
pub struct BackwardOutput {
    pub loss: f64,
    pub grads: Params,
    /// Soft assignment seen by the loss (with this pass's dropout mask).
    pub soft: SoftAssignment,
}

/// Relaxed Potts loss of a training-mode forward pass and its exact gradient
/// with respect to every parameter.
pub fn backward(
    model: &Model,
    g: &Graph,
    hp: &Hyperparams,
    couplings: &Couplings,
    rng: &mut ChaCha8Rng,
) -> Result<BackwardOutput> {
    check_dims(model, g, hp)?;
    couplings.check_nodes(g.node_count())?;
    let prop = Propagator::new(g, model.kind);
    Ok(backward_with(&model.params, g, &prop, hp.dropout, couplings, rng))
}

pub(crate) fn backward_with(
    params: &Params,
    g: &Graph,
    prop: &Propagator,
    dropout: f64,
    couplings: &Couplings,
    rng: &mut ChaCha8Rng,
) -> BackwardOutput {
    let trace = run_forward(params, prop, Some((dropout, rng)));
    let probs = &trace.probs;
    let loss = potts::soft_loss_unchecked(g, probs, couplings);
    let dp = potts::soft_loss_gradient_unchecked(g, probs, couplings);

    // Softmax backward: dz = p * (dp - <p, dp>).
    let mut dz = dp;
    Zip::from(dz.rows_mut()).and(probs.rows()).for_each(|mut d, p| {
        let inner = d.dot(&p);
        Zip::from(&mut d).and(&p).for_each(|di, &pi| *di = pi * (*di - inner));
    });

    let mut grads = params.zeros_like();
    for k in (0..params.layers.len()).rev() {
        let layer = &params.layers[k];
        let g_layer = &mut grads.layers[k];
        let input = &trace.inputs[k];
        let agg = &trace.aggregated[k];
        g_layer.bias = dz.sum_axis(Axis(0));
        let d_input = match &layer.neighbor_weight {
            None => {
                g_layer.weight = agg.t().dot(&dz);
                prop.apply_transpose(&dz.dot(&layer.weight.t()))
            }
            Some(wn) => {
                g_layer.weight = input.t().dot(&dz);
                g_layer.neighbor_weight = Some(agg.t().dot(&dz));
                dz.dot(&layer.weight.t()) + prop.apply_transpose(&dz.dot(&wn.t()))
            }
        };
        if k == 0 {
            grads.embeddings = d_input;
        } else {
            // Through dropout and the rectifier of the previous hidden layer.
            let mut d = d_input;
            if let Some(mask) = &trace.masks[k - 1] {
                d *= mask;
            }
            Zip::from(&mut d)
                .and(&trace.pre_activations[k - 1])
                .for_each(|di, &z| {
                    if z <= 0.0 {
                        *di = 0.0;
                    }
                });
            dz = d;
        }
    }
    BackwardOutput {
        loss,
        grads,
        soft: SoftAssignment::from_softmax(trace.probs),
    }
}
