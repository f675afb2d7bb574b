use std::collections::VecDeque;

use crate::graph::Graph;
use crate::potts::Coloring;

const UNCOLORED: usize = usize::MAX;

/// Largest-first greedy coloring with color interchange.
///
/// Vertices are visited by non-increasing degree (ties by ascending index) and
/// receive the smallest color not used by an already-colored neighbor. When that
/// would open a new color, a Kempe-chain swap of two existing colors is tried
/// first (see [`greedy_interchange_in_order`]). Returns the coloring and the
/// number of colors it uses.
pub fn greedy_coloring(g: &Graph) -> (Coloring, usize) {
    greedy_interchange_in_order(g, &largest_first_order(g))
}

/// Vertices by non-increasing degree, ties by ascending index.
pub fn largest_first_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

/// Plain greedy coloring along an explicit vertex order (which must list every vertex once).
pub fn greedy_in_order(g: &Graph, order: &[usize]) -> (Coloring, usize) {
    let n = g.node_count();
    assert_eq!(order.len(), n, "order must cover every vertex");
    let mut colors = vec![UNCOLORED; n];
    let mut used = 0;
    for &v in order {
        let c = smallest_free(g, &colors, v);
        colors[v] = c;
        used = used.max(c + 1);
    }
    finish(colors, used)
}

/// Greedy coloring with interchange along an explicit vertex order.
///
/// If vertex `v` needs a color above the current maximum `k`, color pairs
/// `(a, b)` with `a < b <= k` are scanned in lexicographic order. For each, the
/// component of the `{a, b}`-subgraph reachable from `v`'s `a`-colored
/// neighbors is collected; if it contains none of `v`'s `b`-colored neighbors,
/// swapping `a` and `b` inside it frees `a` for `v`.
pub fn greedy_interchange_in_order(g: &Graph, order: &[usize]) -> (Coloring, usize) {
    let n = g.node_count();
    assert_eq!(order.len(), n, "order must cover every vertex");
    let mut colors = vec![UNCOLORED; n];
    let mut k = 0;
    let mut seen = vec![false; n];
    for &v in order {
        let mut c = smallest_free(g, &colors, v);
        if c > k {
            if let Some(((a, b), chain)) = kempe_swap(g, &colors, v, k, &mut seen) {
                for &u in &chain {
                    colors[u] = if colors[u] == a { b } else { a };
                }
                c = a;
            }
        }
        colors[v] = c;
        k = k.max(c);
    }
    let used = if n == 0 { 0 } else { k + 1 };
    finish(colors, used)
}

/// Finds the first swappable pair for `v`; returns `((a, b), component)`.
fn kempe_swap(
    g: &Graph,
    colors: &[usize],
    v: usize,
    k: usize,
    seen: &mut [bool],
) -> Option<((usize, usize), Vec<usize>)> {
    for a in 0..k {
        let start: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| colors[u] == a).collect();
        for b in a + 1..=k {
            let mut component = start.clone();
            for &u in &component {
                seen[u] = true;
            }
            let mut queue: VecDeque<usize> = component.iter().copied().collect();
            while let Some(x) = queue.pop_front() {
                let other = if colors[x] == a { b } else { a };
                for &y in g.neighbors(x) {
                    if colors[y] == other && !seen[y] {
                        seen[y] = true;
                        component.push(y);
                        queue.push_back(y);
                    }
                }
            }
            let blocked = g.neighbors(v).iter().any(|&u| colors[u] == b && seen[u]);
            for &u in &component {
                seen[u] = false;
            }
            if !blocked {
                return Some(((a, b), component));
            }
        }
    }
    None
}

fn smallest_free(g: &Graph, colors: &[usize], v: usize) -> usize {
    let mut taken = vec![false; g.degree(v) + 1];
    for &u in g.neighbors(v) {
        if colors[u] < taken.len() {
            taken[colors[u]] = true;
        }
    }
    taken.iter().position(|&t| !t).expect("degree + 1 colors suffice")
}

fn finish(colors: Vec<usize>, used: usize) -> (Coloring, usize) {
    let coloring = Coloring::new(colors, used).expect("greedy colors are below the count");
    (coloring, used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::potts::conflict_count;

    #[test]
    fn edgeless_uses_one_color() {
        let (c, chi) = greedy_coloring(&Graph::empty(4));
        assert_eq!(chi, 1);
        assert_eq!(c.colors(), &[0, 0, 0, 0]);
        assert_eq!(greedy_coloring(&Graph::empty(0)).1, 0);
        assert_eq!(greedy_in_order(&Graph::empty(0), &[]).1, 0);
    }

    #[test]
    fn proper_on_random_graphs() {
        for seed in 0..20 {
            let g = generators::gnp(30, 0.3, seed);
            let (c, chi) = greedy_coloring(&g);
            assert_eq!(conflict_count(&g, &c).unwrap(), 0);
            assert!(chi <= g.max_degree() + 1);
            assert_eq!(c.colors_used(), chi);
            let order = largest_first_order(&g);
            let (p, plain) = greedy_in_order(&g, &order);
            assert_eq!(conflict_count(&g, &p).unwrap(), 0);
            assert_eq!(p.colors_used(), plain);
        }
    }

    #[test]
    fn complete_and_bipartite() {
        assert_eq!(greedy_coloring(&generators::complete(5)).1, 5);
        assert_eq!(greedy_coloring(&generators::path(6)).1, 2);
    }

    #[test]
    fn interchange_rescues_bad_order() {
        // Path 0-1-2-3 visited as 0, 3, 1, 2: plain greedy needs a third color.
        let g = generators::path(4);
        let order = [0, 3, 1, 2];
        assert_eq!(greedy_in_order(&g, &order).1, 3);
        let (c, used) = greedy_interchange_in_order(&g, &order);
        assert_eq!(used, 2);
        assert_eq!(c.colors(), &[0, 1, 0, 1]);
    }

    #[test]
    fn queen5_has_five_colors() {
        assert_eq!(greedy_coloring(&generators::queens(5, 5)).1, 5);
    }
}
