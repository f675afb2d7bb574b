use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Message-passing layer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Symmetric-normalized propagation over `A + I`.
    #[serde(rename = "GCN_STYLE", alias = "gcn", alias = "GCN")]
    Gcn,
    /// Separate self and neighbor-mean transforms.
    #[serde(rename = "SAGE_STYLE", alias = "sage", alias = "SAGE")]
    Sage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OptimizerKind {
    #[serde(rename = "ADAM", alias = "adam")]
    Adam,
    /// Adam with decoupled weight decay on layer parameters.
    #[serde(rename = "ADAMW", alias = "adamw")]
    AdamW,
}

/// Solver hyperparameters, read from a flat TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperparams {
    pub model_kind: ModelKind,
    pub embedding_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub num_colors: usize,
    pub learning_rate: f64,
    #[serde(default)]
    pub dropout: f64,
    #[serde(default = "defaults::max_epochs")]
    pub max_epochs: usize,
    #[serde(default = "defaults::patience")]
    pub patience: usize,
    #[serde(default = "defaults::tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::optimizer_kind")]
    pub optimizer_kind: OptimizerKind,
    #[serde(default = "defaults::weight_decay")]
    pub weight_decay: f64,
    /// Strength of a color-count penalty in the loss. Not supported; any nonzero
    /// value is rejected by [`Hyperparams::validate`].
    #[serde(default, skip_serializing_if = "is_zero")]
    pub q_regularization: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

mod defaults {
    use super::OptimizerKind;

    pub fn max_epochs() -> usize {
        100_000
    }
    pub fn patience() -> usize {
        500
    }
    pub fn tolerance() -> f64 {
        1e-4
    }
    pub fn optimizer_kind() -> OptimizerKind {
        OptimizerKind::AdamW
    }
    pub fn weight_decay() -> f64 {
        0.01
    }
}

impl Hyperparams {
    /// Small, fast configuration used for toy graphs and scheduling instances.
    pub fn small(num_colors: usize) -> Self {
        Hyperparams {
            model_kind: ModelKind::Sage,
            embedding_dim: 16,
            hidden_dims: vec![16],
            num_colors,
            learning_rate: 0.05,
            dropout: 0.0,
            max_epochs: 5_000,
            patience: 200,
            tolerance: 1e-4,
            seed: 0,
            optimizer_kind: OptimizerKind::AdamW,
            weight_decay: 0.01,
            q_regularization: 0.0,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let hp: Hyperparams = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        hp.validate()?;
        Ok(hp)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("hyperparameters serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.embedding_dim == 0 || self.hidden_dims.contains(&0) {
            return fail("layer dimensions must be positive".into());
        }
        if self.num_colors == 0 {
            return fail("num_colors must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail(format!("dropout must lie in [0, 1), got {}", self.dropout));
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return fail("max_epochs and patience must be positive".into());
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return fail("tolerance must be non-negative".into());
        }
        if self.weight_decay.is_nan() || self.weight_decay < 0.0 {
            return fail("weight_decay must be non-negative".into());
        }
        if self.q_regularization != 0.0 {
            return fail("q_regularization (color-count penalty) is not supported".into());
        }
        Ok(())
    }

    /// Layer widths `d0 -> hidden... -> q`.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(self.embedding_dim);
        dims.extend_from_slice(&self.hidden_dims);
        dims.push(self.num_colors);
        dims
    }
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        /// Bundled hyperparameter presets, by instance name.
        pub const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../presets/", $name, ".toml")))),*
        ];
    };
}

presets!(
    "anna", "jean", "myciel5", "myciel6", "queen5-5", "queen6-6", "queen7-7", "queen8-8",
    "queen8-12", "queen9-9", "queen11-11", "queen13-13", "cora", "citeseer", "pubmed",
);

/// Looks up a bundled preset by name.
pub fn preset(name: &str) -> Result<Hyperparams> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
    Hyperparams::from_toml(text)
}
