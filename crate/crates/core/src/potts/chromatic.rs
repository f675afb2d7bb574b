//! Exact proper-coloring counts for small graphs: the zero-temperature Potts
//! partition function, i.e. the chromatic polynomial evaluated at `q`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest state space `q^n` the enumeration accepts by default.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

/// Counts proper `q`-colorings of `g` exactly.
///
/// Walks the full `q^n` assignment space depth-first in node order, pruning a
/// branch as soon as it clashes with an already-colored neighbor. Refuses with
/// [`Error::Size`] when `q^n` exceeds `budget`.
pub fn count_proper_colorings(g: &Graph, q: usize, budget: u64) -> Result<u64> {
    let n = g.node_count();
    let states = state_count(q, n);
    if states > budget as u128 {
        return Err(Error::Size { states, budget });
    }
    if n == 0 {
        return Ok(1);
    }
    if q == 0 {
        return Ok(0);
    }
    let earlier: Vec<Vec<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().filter(|&u| u < v).collect())
        .collect();
    // Split on the first node's color; the sum of integer counts is order independent.
    let total = (0..q)
        .into_par_iter()
        .map(|c0| {
            let mut colors = vec![usize::MAX; n];
            colors[0] = c0;
            extend(&earlier, q, &mut colors, 1)
        })
        .sum();
    Ok(total)
}

fn extend(earlier: &[Vec<usize>], q: usize, colors: &mut [usize], v: usize) -> u64 {
    if v == colors.len() {
        return 1;
    }
    let mut count = 0;
    for c in 0..q {
        if earlier[v].iter().all(|&u| colors[u] != c) {
            colors[v] = c;
            count += extend(earlier, q, colors, v + 1);
        }
    }
    colors[v] = usize::MAX;
    count
}

/// Smallest `q` with at least one proper `q`-coloring.
///
/// Every `q` tried must fit the enumeration budget; a sweep that runs past it
/// fails with [`Error::Size`] rather than guessing.
pub fn chromatic_number_exact(g: &Graph, budget: u64) -> Result<usize> {
    let n = g.node_count();
    if n == 0 {
        return Ok(0);
    }
    for q in 1..=n {
        if count_proper_colorings(g, q, budget)? > 0 {
            return Ok(q);
        }
    }
    unreachable!("n colors always suffice")
}

fn state_count(q: usize, n: usize) -> u128 {
    let mut states: u128 = 1;
    for _ in 0..n {
        states = states.saturating_mul(q as u128);
        if states > u64::MAX as u128 {
            break;
        }
    }
    states
}
