//! Classical baselines and post-processing for hard colorings.

mod greedy;
mod local;
mod purify;
mod tabucol;

pub use greedy::{greedy_coloring, greedy_in_order, greedy_interchange_in_order, largest_first_order};
pub use local::{local_flip_refine, LocalOptimum};
pub use purify::{purify, Purified};
pub use tabucol::{tabucol, TabucolConfig, TabucolResult};
