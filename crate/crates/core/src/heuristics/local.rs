use crate::graph::Graph;
use crate::potts::Coloring;

#[derive(Debug, Clone)]
pub struct LocalOptimum {
    pub coloring: Coloring,
    pub cost: u64,
    /// No single-vertex recoloring lowers the cost.
    pub is_local_opt: bool,
}

/// First-improvement single-vertex recoloring.
///
/// Scans vertices in ascending order and moves a vertex to the first color (in
/// ascending order) that strictly lowers its clash count; stops after a full pass
/// without changes. Colors range over `0..max(q, c.num_colors())`.
pub fn local_flip_refine(g: &Graph, c: &Coloring, q: usize) -> LocalOptimum {
    let q = q.max(c.num_colors()).max(1);
    let mut colors = c.colors().to_vec();
    let mut counts = vec![0u64; q];
    loop {
        let mut changed = false;
        for v in 0..g.node_count() {
            counts.iter_mut().for_each(|x| *x = 0);
            for &u in g.neighbors(v) {
                counts[colors[u]] += 1;
            }
            let own = counts[colors[v]];
            if let Some(better) = (0..q).find(|&k| counts[k] < own) {
                colors[v] = better;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let cost = g.edges().iter().filter(|&&(a, b)| colors[a] == colors[b]).count() as u64;
    LocalOptimum {
        coloring: Coloring::new(colors, q).expect("colors stay below q"),
        cost,
        is_local_opt: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::potts::conflict_count;

    #[test]
    fn proper_coloring_is_fixed_point() {
        let g = generators::path(4);
        let c = Coloring::new(vec![0, 1, 0, 1], 2).unwrap();
        let r = local_flip_refine(&g, &c, 2);
        assert_eq!(r.coloring, c);
        assert_eq!(r.cost, 0);
        assert!(r.is_local_opt);
    }

    #[test]
    fn single_edge_flip() {
        let g = generators::path(2);
        let r = local_flip_refine(&g, &Coloring::new(vec![0, 0], 2).unwrap(), 2);
        assert_eq!(r.cost, 0);
        assert_eq!(r.coloring.colors(), &[1, 0]);
    }

    #[test]
    fn random_instances_reach_local_optima() {
        for seed in 0..30 {
            let g = generators::gnp(10, 0.5, seed);
            let q = 3;
            let start = Coloring::new((0..10).map(|v| (v * 7 + seed as usize) % q).collect(), q).unwrap();
            let before = conflict_count(&g, &start).unwrap();
            let r = local_flip_refine(&g, &start, q);
            assert!(r.cost <= before);
            assert_eq!(r.cost, conflict_count(&g, &r.coloring).unwrap());
            // Exhaustive single-move check.
            for v in 0..10 {
                for k in 0..q {
                    let mut moved = r.coloring.colors().to_vec();
                    moved[v] = k;
                    let moved = Coloring::new(moved, q).unwrap();
                    assert!(conflict_count(&g, &moved).unwrap() >= r.cost);
                }
            }
        }
    }
}
