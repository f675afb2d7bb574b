use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::potts::Coloring;

/// Tabu search parameters. A move `(v, c)` that leaves color `c` stays tabu for
/// `tenure_base + U{0..=tenure_random} + tenure_conflict_scale * |conflicted vertices|`
/// iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabucolConfig {
    pub max_iterations: u64,
    pub tenure_base: u64,
    pub tenure_random: u64,
    pub tenure_conflict_scale: f64,
    pub seed: u64,
}

impl Default for TabucolConfig {
    fn default() -> Self {
        TabucolConfig {
            max_iterations: 1_000_000,
            tenure_base: 7,
            tenure_random: 5,
            tenure_conflict_scale: 0.6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TabucolResult {
    pub coloring: Coloring,
    pub cost: u64,
    pub iterations_used: u64,
}

/// Conflict bookkeeping: `gamma[v * q + c]` counts neighbors of `v` with color `c`.
struct State<'g> {
    g: &'g Graph,
    q: usize,
    colors: Vec<usize>,
    gamma: Vec<u32>,
    conflicted: Vec<usize>,
    // Position of a vertex in `conflicted`, or usize::MAX.
    slot: Vec<usize>,
    cost: u64,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph, q: usize, colors: Vec<usize>) -> Self {
        let n = g.node_count();
        let mut gamma = vec![0u32; n * q];
        for v in 0..n {
            for &u in g.neighbors(v) {
                gamma[v * q + colors[u]] += 1;
            }
        }
        let mut s = State {
            g,
            q,
            colors,
            gamma,
            conflicted: Vec::new(),
            slot: vec![usize::MAX; n],
            cost: 0,
        };
        for v in 0..n {
            let own = s.own(v);
            s.cost += own as u64;
            if own > 0 {
                s.mark(v);
            }
        }
        s.cost /= 2;
        s
    }

    fn own(&self, v: usize) -> u32 {
        self.gamma[v * self.q + self.colors[v]]
    }

    fn mark(&mut self, v: usize) {
        if self.slot[v] == usize::MAX {
            self.slot[v] = self.conflicted.len();
            self.conflicted.push(v);
        }
    }

    fn unmark(&mut self, v: usize) {
        let k = self.slot[v];
        if k != usize::MAX {
            let last = *self.conflicted.last().unwrap();
            self.conflicted.swap_remove(k);
            if last != v {
                self.slot[last] = k;
            }
            self.slot[v] = usize::MAX;
        }
    }

    fn recolor(&mut self, v: usize, to: usize) {
        let from = self.colors[v];
        let q = self.q;
        self.cost = self.cost + self.gamma[v * q + to] as u64 - self.gamma[v * q + from] as u64;
        self.colors[v] = to;
        for &u in self.g.neighbors(v) {
            self.gamma[u * q + from] -= 1;
            self.gamma[u * q + to] += 1;
            if self.colors[u] == from && self.gamma[u * q + from] == 0 {
                self.unmark(u);
            } else if self.colors[u] == to && self.gamma[u * q + to] == 1 {
                self.mark(u);
            }
        }
        if self.gamma[v * q + to] > 0 {
            self.mark(v);
        } else {
            self.unmark(v);
        }
    }
}

/// Tabucol local search for a `q`-coloring with as few clashes as possible.
///
/// Starts from a seeded random coloring; each iteration applies the best
/// non-tabu recoloring of a conflicted vertex (ties broken at random), where a
/// tabu move is still allowed if it beats the best cost seen so far. Stops at
/// cost 0 or after `max_iterations` and returns the best coloring found.
pub fn tabucol(g: &Graph, q: usize, cfg: &TabucolConfig) -> TabucolResult {
    assert!(q >= 1, "tabucol needs at least one color");
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial: Vec<usize> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    let mut state = State::new(g, q, initial);
    let mut tabu_until = vec![0u64; n * q];
    let mut best_colors = state.colors.clone();
    let mut best_cost = state.cost;
    let mut iterations = 0;

    while best_cost > 0 && iterations < cfg.max_iterations && q > 1 {
        iterations += 1;
        let mut chosen: Option<(usize, usize)> = None;
        let mut chosen_delta = i64::MAX;
        let mut ties = 0u32;
        for &v in &state.conflicted {
            let own = state.own(v) as i64;
            let current = state.colors[v];
            for c in 0..q {
                if c == current {
                    continue;
                }
                let delta = state.gamma[v * q + c] as i64 - own;
                let aspirates = (state.cost as i64 + delta) < best_cost as i64;
                if tabu_until[v * q + c] >= iterations && !aspirates {
                    continue;
                }
                if delta < chosen_delta {
                    chosen = Some((v, c));
                    chosen_delta = delta;
                    ties = 1;
                } else if delta == chosen_delta {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        chosen = Some((v, c));
                    }
                }
            }
        }
        let Some((v, c)) = chosen else { continue };
        let from = state.colors[v];
        state.recolor(v, c);
        let tenure = cfg.tenure_base
            + rng.gen_range(0..=cfg.tenure_random)
            + (cfg.tenure_conflict_scale * state.conflicted.len() as f64) as u64;
        tabu_until[v * q + from] = iterations + tenure;
        if state.cost < best_cost {
            best_cost = state.cost;
            best_colors.copy_from_slice(&state.colors);
        }
    }

    TabucolResult {
        coloring: Coloring::new(best_colors, q).expect("tabucol colors are below q"),
        cost: best_cost,
        iterations_used: iterations,
    }
}
