use crate::error::{Error, Result};
use crate::graph::Graph;

/// Pairwise interaction strengths of a Potts Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum Couplings {
    /// One coupling `J` on every graph edge. `J = -1` (antiferromagnetic) makes the
    /// energy count color clashes.
    Uniform(f64),
    /// Arbitrary symmetric couplings over node pairs, independent of the graph's edges.
    Weighted(WeightedCouplings),
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings::Uniform(-1.0)
    }
}

impl Couplings {
    /// Checks that the couplings can be evaluated on an `n`-node graph.
    pub(crate) fn check_nodes(&self, n: usize) -> Result<()> {
        match self {
            Couplings::Uniform(_) => Ok(()),
            Couplings::Weighted(w) if w.node_count == n => Ok(()),
            Couplings::Weighted(w) => Err(Error::Input(format!(
                "couplings defined on {} nodes, graph has {n}",
                w.node_count
            ))),
        }
    }
}

/// Symmetric couplings `J_ij = sparse_ij + scale * v_i * v_j`.
///
/// The sparse part holds explicit pairs `i < j`; the optional rank-one part keeps dense
/// couplings (such as the degree term of modularity) implicit. Energies sum over
/// ordered pairs `i != j`, so every unordered pair contributes twice and the
/// diagonal never contributes.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCouplings {
    pub(crate) node_count: usize,
    pub(crate) pairs: Vec<(usize, usize, f64)>,
    pub(crate) rank_one: Option<RankOne>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RankOne {
    pub(crate) scale: f64,
    pub(crate) vector: Vec<f64>,
}

impl WeightedCouplings {
    /// Sparse couplings from explicit `(i, j, J_ij)` entries. Duplicate pairs
    /// (either orientation) are summed; diagonal entries are rejected.
    pub fn sparse(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(entries.len());
        for &(a, b, w) in entries {
            if a >= n || b >= n {
                return Err(Error::Input(format!("coupling ({a}, {b}) outside 0..{n}")));
            }
            if a == b {
                return Err(Error::Input(format!("diagonal coupling ({a}, {a})")));
            }
            pairs.push((a.min(b), a.max(b), w));
        }
        pairs.sort_by_key(|x| (x.0, x.1));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(pairs.len());
        for p in pairs {
            match merged.last_mut() {
                Some(last) if (last.0, last.1) == (p.0, p.1) => last.2 += p.2,
                _ => merged.push(p),
            }
        }
        Ok(WeightedCouplings {
            node_count: n,
            pairs: merged,
            rank_one: None,
        })
    }

    /// Adds the implicit term `scale * v_i * v_j` to every pair.
    pub fn with_rank_one(mut self, scale: f64, vector: Vec<f64>) -> Result<Self> {
        if vector.len() != self.node_count {
            return Err(Error::Input(format!(
                "rank-one vector has length {}, expected {}",
                vector.len(),
                self.node_count
            )));
        }
        self.rank_one = Some(RankOne { scale, vector });
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `J_ij` for any `i, j` (including the diagonal, where only the rank-one part applies).
    pub fn value(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        let sparse = if i == j {
            0.0
        } else {
            self.pairs
                .binary_search_by(|p| (p.0, p.1).cmp(&key))
                .map(|k| self.pairs[k].2)
                .unwrap_or(0.0)
        };
        let dense = self
            .rank_one
            .as_ref()
            .map_or(0.0, |r| r.scale * (r.vector[i] * r.vector[j]));
        sparse + dense
    }

    /// `sum_{i,j} J_ij` over all ordered pairs including the diagonal.
    pub fn total_sum(&self) -> f64 {
        let sparse: f64 = 2.0 * self.pairs.iter().map(|p| p.2).sum::<f64>();
        let dense = self.rank_one.as_ref().map_or(0.0, |r| {
            let s: f64 = r.vector.iter().sum();
            r.scale * s * s
        });
        sparse + dense
    }
}

/// Modularity couplings `J_ij = (A_ij - d_i d_j / 2m) / 2m`.
///
/// Minimizing the Potts energy under these couplings maximizes Newman modularity.
pub fn modularity_couplings(g: &Graph) -> Result<Couplings> {
    let m = g.edge_count();
    if m == 0 {
        return Err(Error::Domain("modularity couplings need at least one edge".into()));
    }
    let two_m = 2.0 * m as f64;
    let n = g.node_count();
    let entries: Vec<_> = g.edges().iter().map(|&(a, b)| (a, b, 1.0 / two_m)).collect();
    let degrees = g.degrees().into_iter().map(|d| d as f64).collect();
    let weighted = WeightedCouplings::sparse(n, &entries)?.with_rank_one(-1.0 / (two_m * two_m), degrees)?;
    Ok(Couplings::Weighted(weighted))
}
