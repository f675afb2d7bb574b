//! Graph coloring as Potts-model energy minimization.
//!
//! A graph neural network produces soft color assignments, trained on a
//! relaxed Potts loss and projected to hard colorings by argmax. Classical
//! baselines (greedy, Tabucol), a purification step, an exact counting oracle
//! and an interval-scheduling front end are included.

pub mod bench;
pub mod error;
pub mod generators;
pub mod gnn;
pub mod graph;
pub mod heuristics;
pub mod potts;
pub mod scheduling;

pub use error::{Error, Result};
pub use graph::Graph;
pub use potts::{Coloring, Couplings, SoftAssignment};
