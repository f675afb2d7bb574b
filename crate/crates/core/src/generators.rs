//! Deterministic graph families used by tests, benchmarks and examples.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub fn complete(n: usize) -> Graph {
    Graph::empty(n).complement()
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::new(n, &edges).expect("path edges are in range")
}

/// Cycle on `n >= 3` nodes; smaller `n` degrades to a path.
pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    Graph::new(n, &edges).expect("cycle edges are in range")
}

/// Queens graph on a `rows x cols` board, square `(r, c)` at index `r * cols + c`.
pub fn queens(rows: usize, cols: usize) -> Graph {
    let n = rows * cols;
    let mut edges = Vec::new();
    for a in 0..n {
        let (r1, c1) = (a / cols, a % cols);
        for b in (a + 1)..n {
            let (r2, c2) = (b / cols, b % cols);
            if r1 == r2 || c1 == c2 || r1.abs_diff(r2) == c1.abs_diff(c2) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, &edges).expect("queens edges are in range")
}

/// Mycielski graph `myciel{k}` as numbered in the COLOR benchmark set:
/// `k - 1` applications of the Mycielski construction to K2, chromatic number `k + 1`.
///
/// One application maps a graph on `0..n` to one on `0..2n+1`: node `n + i`
/// shadows node `i` (adjacent to the neighbors of `i`), node `2n` joins all shadows.
pub fn mycielski(k: usize) -> Graph {
    let mut n = 2;
    let mut edges = vec![(0usize, 1usize)];
    for _ in 1..k {
        let mut next = edges.clone();
        for &(a, b) in &edges {
            next.push((a, n + b));
            next.push((b, n + a));
        }
        next.extend((0..n).map(|i| (n + i, 2 * n)));
        n = 2 * n + 1;
        edges = next;
    }
    Graph::new(n, &edges).expect("mycielski edges are in range")
}

/// Erdős–Rényi `G(n, p)` sample, fully determined by `seed`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, &edges).expect("gnp edges are in range")
}
