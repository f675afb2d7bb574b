use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::potts::Coloring;

#[derive(Debug, Clone)]
pub struct Purified {
    pub coloring: Coloring,
    pub colors_used: usize,
    pub rounds: usize,
    /// False when `max_rounds` ran out with clashes left.
    pub feasible: bool,
}

/// Randomized clash repair that spends one fresh color per round.
///
/// A round opens a new color, walks the clashing edges in seeded random order and
/// moves one endpoint of every edge that still clashes to the fresh color, picked
/// uniformly among endpoints not already moved this round. Rounds repeat until
/// no clash remains or `max_rounds` is reached.
pub fn purify(g: &Graph, c: &Coloring, seed: u64, max_rounds: usize) -> Purified {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors = c.colors().to_vec();
    let mut num_colors = c.num_colors();
    let mut rounds = 0;
    let clashes = |colors: &[usize]| -> Vec<(usize, usize)> {
        g.edges().iter().copied().filter(|&(a, b)| colors[a] == colors[b]).collect()
    };
    let mut pending = clashes(&colors);
    while !pending.is_empty() && rounds < max_rounds {
        rounds += 1;
        let fresh = num_colors;
        num_colors += 1;
        pending.shuffle(&mut rng);
        for &(a, b) in &pending {
            if colors[a] != colors[b] {
                continue;
            }
            let movable: Vec<usize> = [a, b].into_iter().filter(|&v| colors[v] != fresh).collect();
            if movable.is_empty() {
                continue;
            }
            let v = movable[rng.gen_range(0..movable.len())];
            colors[v] = fresh;
        }
        pending = clashes(&colors);
    }
    let coloring = Coloring::new(colors, num_colors).expect("purified colors are below the count");
    Purified {
        colors_used: coloring.colors_used(),
        coloring,
        rounds,
        feasible: pending.is_empty(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::potts::conflict_count;

    #[test]
    fn proper_input_is_untouched() {
        let g = generators::cycle(6);
        let c = Coloring::new(vec![0, 1, 0, 1, 0, 1], 2).unwrap();
        let p = purify(&g, &c, 1, 10);
        assert_eq!(p.coloring, c);
        assert_eq!(p.rounds, 0);
        assert!(p.feasible);
    }

    #[test]
    fn monochromatic_triangle_needs_at_most_two_rounds() {
        // Every shuffle order and endpoint choice reaches a proper 3-coloring in two rounds.
        let g = generators::complete(3);
        let c = Coloring::new(vec![0, 0, 0], 1).unwrap();
        for seed in 0..200 {
            let p = purify(&g, &c, seed, 2);
            assert!(p.feasible, "seed {seed}");
            assert_eq!(conflict_count(&g, &p.coloring).unwrap(), 0);
            assert_eq!(p.colors_used, 3);
        }
    }

    #[test]
    fn single_clash_costs_one_color() {
        let g = generators::path(3);
        let c = Coloring::new(vec![0, 0, 1], 2).unwrap();
        let p = purify(&g, &c, 3, 5);
        assert!(p.feasible);
        assert_eq!(p.rounds, 1);
        assert_eq!(p.colors_used, 3);
    }

    #[test]
    fn exhausted_rounds_flag_infeasible() {
        let g = generators::complete(5);
        let c = Coloring::new(vec![0; 5], 1).unwrap();
        let p = purify(&g, &c, 0, 1);
        assert!(!p.feasible);
        assert_eq!(p.rounds, 1);
    }
}
