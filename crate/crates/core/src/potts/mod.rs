//! Potts-model energies over hard colorings and their relaxation over soft assignments.
//!
//! With uniform antiferromagnetic couplings (`J = -1`) the hard energy is the number
//! of monochromatic edges, and the relaxed loss replaces each Kronecker delta by the
//! inner product of two probability rows.

mod chromatic;
mod couplings;

use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

pub use chromatic::{chromatic_number_exact, count_proper_colorings, DEFAULT_ENUMERATION_BUDGET};
pub use couplings::{modularity_couplings, Couplings, WeightedCouplings};

use crate::error::{Error, Result};
use crate::graph::Graph;

// Bit pattern of the largest row-sum error seen in any softmax output. The bits
// of non-negative floats order like the floats themselves.
static SOFTMAX_WATERMARK: AtomicU64 = AtomicU64::new(0);

/// Largest `|row sum - 1|` over every softmax output produced so far in this process.
pub fn softmax_row_sum_watermark() -> f64 {
    f64::from_bits(SOFTMAX_WATERMARK.load(Ordering::Relaxed))
}

/// Row-sum tolerance accepted for soft assignments.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Hard assignment of one of `num_colors` colors (0-based) to every node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, num_colors: usize) -> Result<Self> {
        if let Some((v, &c)) = colors.iter().enumerate().find(|(_, &c)| c >= num_colors) {
            return Err(Error::Input(format!(
                "node {v} has color {c}, but only {num_colors} colors are available"
            )));
        }
        Ok(Coloring { colors, num_colors })
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Number of distinct colors actually present.
    pub fn colors_used(&self) -> usize {
        let mut seen = vec![false; self.num_colors];
        self.colors.iter().for_each(|&c| seen[c] = true);
        seen.into_iter().filter(|&s| s).count()
    }

    pub fn into_colors(self) -> Vec<usize> {
        self.colors
    }
}

/// Row-stochastic `n x q` matrix of color probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAssignment {
    probs: Array2<f64>,
}

impl SoftAssignment {
    /// Validates entries in `[0, 1]` and unit row sums (within [`ROW_SUM_TOLERANCE`]).
    pub fn new(probs: Array2<f64>) -> Result<Self> {
        for (i, row) in probs.axis_iter(Axis(0)).enumerate() {
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::Input(format!("row {i} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Input(format!("row {i} sums to {sum}, not 1")));
            }
        }
        Ok(SoftAssignment { probs })
    }

    /// Wraps a matrix known to be row-stochastic (softmax output).
    pub(crate) fn from_softmax(probs: Array2<f64>) -> Self {
        let s = SoftAssignment { probs };
        let err = s.max_row_sum_error();
        SOFTMAX_WATERMARK.fetch_max(err.to_bits(), Ordering::Relaxed);
        debug_assert!(err <= ROW_SUM_TOLERANCE, "softmax row sum off by {err}");
        s
    }

    pub fn uniform(n: usize, q: usize) -> Self {
        SoftAssignment {
            probs: Array2::from_elem((n, q), 1.0 / q as f64),
        }
    }

    pub fn one_hot(c: &Coloring) -> Self {
        let mut probs = Array2::zeros((c.len(), c.num_colors()));
        for (v, &col) in c.colors().iter().enumerate() {
            probs[[v, col]] = 1.0;
        }
        SoftAssignment { probs }
    }

    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }

    pub fn row(&self, v: usize) -> ArrayView1<'_, f64> {
        self.probs.row(v)
    }

    pub fn node_count(&self) -> usize {
        self.probs.nrows()
    }

    pub fn num_colors(&self) -> usize {
        self.probs.ncols()
    }

    /// Largest deviation of any row sum from 1.
    pub fn max_row_sum_error(&self) -> f64 {
        self.probs
            .axis_iter(Axis(0))
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Per-row argmax, ties to the smallest color index.
    pub fn project_argmax(&self) -> Coloring {
        let colors = self
            .probs
            .axis_iter(Axis(0))
            .map(|row| {
                let mut best = 0;
                for (c, &p) in row.iter().enumerate().skip(1) {
                    if p > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect();
        Coloring {
            colors,
            num_colors: self.num_colors().max(1),
        }
    }
}

/// Number of monochromatic edges.
pub fn conflict_count(g: &Graph, c: &Coloring) -> Result<u64> {
    check_len(g, c.len())?;
    Ok(g.edges()
        .iter()
        .filter(|&&(a, b)| c.color(a) == c.color(b))
        .count() as u64)
}

/// Nodes incident to at least one monochromatic edge, ascending.
pub fn conflicted_nodes(g: &Graph, c: &Coloring) -> Vec<usize> {
    (0..g.node_count())
        .filter(|&v| g.neighbors(v).iter().any(|&u| c.color(u) == c.color(v)))
        .collect()
}

/// Potts Hamiltonian `-sum J_ij delta(s_i, s_j)` of a hard coloring.
///
/// Uniform couplings sum over graph edges; weighted couplings sum over ordered
/// pairs `i != j` (each unordered pair twice).
pub fn hard_energy(g: &Graph, c: &Coloring, j: &Couplings) -> Result<f64> {
    check_len(g, c.len())?;
    j.check_nodes(g.node_count())?;
    match j {
        Couplings::Uniform(strength) => Ok(-strength * conflict_count(g, c)? as f64),
        Couplings::Weighted(w) => {
            let sparse: f64 = w
                .pairs
                .iter()
                .filter(|p| c.color(p.0) == c.color(p.1))
                .map(|p| p.2)
                .sum();
            let dense = w.rank_one.as_ref().map_or(0.0, |r| {
                let mut class_sums = vec![0.0; c.num_colors()];
                let mut diag = 0.0;
                for (v, &col) in c.colors().iter().enumerate() {
                    class_sums[col] += r.vector[v];
                    diag += r.vector[v] * r.vector[v];
                }
                r.scale * (class_sums.iter().map(|s| s * s).sum::<f64>() - diag)
            });
            Ok(-(2.0 * sparse + dense))
        }
    }
}

/// Relaxed Potts loss: the hard energy with `delta(s_i, s_j)` replaced by `p_i . p_j`.
pub fn soft_loss(g: &Graph, p: &SoftAssignment, j: &Couplings) -> Result<f64> {
    check_soft(g, p)?;
    j.check_nodes(g.node_count())?;
    Ok(soft_loss_unchecked(g, p.probs(), j))
}

pub(crate) fn soft_loss_unchecked(g: &Graph, p: &Array2<f64>, j: &Couplings) -> f64 {
    let dot = |a: usize, b: usize| p.row(a).dot(&p.row(b));
    match j {
        Couplings::Uniform(strength) => {
            -strength * g.edges().iter().map(|&(a, b)| dot(a, b)).sum::<f64>()
        }
        Couplings::Weighted(w) => {
            let sparse: f64 = w.pairs.iter().map(|pr| pr.2 * dot(pr.0, pr.1)).sum();
            let dense = w.rank_one.as_ref().map_or(0.0, |r| {
                let s = weighted_column_sum(p, &r.vector);
                let diag: f64 = (0..p.nrows())
                    .map(|v| r.vector[v] * r.vector[v] * dot(v, v))
                    .sum();
                r.scale * (s.dot(&s) - diag)
            });
            -(2.0 * sparse + dense)
        }
    }
}

/// Gradient of [`soft_loss`] with respect to the probability matrix (before any softmax).
pub fn soft_loss_gradient(g: &Graph, p: &SoftAssignment, j: &Couplings) -> Result<Array2<f64>> {
    check_soft(g, p)?;
    j.check_nodes(g.node_count())?;
    Ok(soft_loss_gradient_unchecked(g, p.probs(), j))
}

pub(crate) fn soft_loss_gradient_unchecked(g: &Graph, p: &Array2<f64>, j: &Couplings) -> Array2<f64> {
    let mut grad = Array2::zeros(p.raw_dim());
    match j {
        Couplings::Uniform(strength) => {
            for &(a, b) in g.edges() {
                grad.row_mut(a).scaled_add(-strength, &p.row(b));
                grad.row_mut(b).scaled_add(-strength, &p.row(a));
            }
        }
        Couplings::Weighted(w) => {
            for &(a, b, wt) in &w.pairs {
                grad.row_mut(a).scaled_add(-2.0 * wt, &p.row(b));
                grad.row_mut(b).scaled_add(-2.0 * wt, &p.row(a));
            }
            if let Some(r) = &w.rank_one {
                let s = weighted_column_sum(p, &r.vector);
                for v in 0..p.nrows() {
                    let dv = r.vector[v];
                    let mut row = grad.row_mut(v);
                    row.scaled_add(-2.0 * r.scale * dv, &s);
                    row.scaled_add(2.0 * r.scale * dv * dv, &p.row(v));
                }
            }
        }
    }
    grad
}

fn weighted_column_sum(p: &Array2<f64>, weights: &[f64]) -> ndarray::Array1<f64> {
    let mut s = ndarray::Array1::zeros(p.ncols());
    for (v, row) in p.axis_iter(Axis(0)).enumerate() {
        s.scaled_add(weights[v], &row);
    }
    s
}

/// Fraction of clashing edges, `energy / |E|`.
pub fn normalized_error(energy: f64, edge_count: usize) -> Result<f64> {
    if edge_count == 0 {
        return Err(Error::Domain("normalized error needs at least one edge".into()));
    }
    Ok(energy / edge_count as f64)
}

fn check_len(g: &Graph, len: usize) -> Result<()> {
    if len != g.node_count() {
        return Err(Error::Input(format!(
            "assignment covers {len} nodes, graph has {}",
            g.node_count()
        )));
    }
    Ok(())
}

fn check_soft(g: &Graph, p: &SoftAssignment) -> Result<()> {
    check_len(g, p.node_count())?;
    let err = p.max_row_sum_error();
    if err > ROW_SUM_TOLERANCE {
        return Err(Error::Input(format!("soft assignment rows deviate from 1 by {err}")));
    }
    Ok(())
}
