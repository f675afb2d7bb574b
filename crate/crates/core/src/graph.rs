//! Undirected simple graphs in compressed adjacency form, DIMACS COL I/O and
//! a few derived constructions.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Immutable undirected simple graph on dense node ids `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted lexicographically.
/// Neighbor lists are kept in CSR form and sorted ascending, so every
/// traversal order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list.
    ///
    /// Self-loops are dropped and duplicate edges (in either orientation)
    /// collapse to one. Any endpoint `>= n` is rejected.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(a, b) in edge_list {
            if a >= n || b >= n {
                return Err(Error::Input(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            if a != b {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_canonical(n, edges))
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self::from_canonical(n, Vec::new())
    }

    // `edges` must already be sorted, deduplicated and oriented i < j < n.
    fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        for &(a, b) in &edges {
            neighbors[cursor[a]] = b;
            cursor[a] += 1;
            neighbors[cursor[b]] = a;
            cursor[b] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph {
            node_count: n,
            edges,
            offsets,
            neighbors,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list: `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count && b < self.node_count && self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Graph on the same nodes whose edges are exactly the non-edges of `self`.
    pub fn complement(&self) -> Graph {
        let n = self.node_count;
        let mut edges = Vec::with_capacity((n * n.saturating_sub(1) / 2).saturating_sub(self.edges.len()));
        for i in 0..n {
            let mut adj = self.neighbors(i).iter().peekable();
            for j in (i + 1)..n {
                while adj.next_if(|&&u| u < j).is_some() {}
                if adj.peek() == Some(&&j) {
                    continue;
                }
                edges.push((i, j));
            }
        }
        Graph::from_canonical(n, edges)
    }

    /// Edge density `|E| / (n (n - 1) / 2)`.
    pub fn density(&self) -> Result<f64> {
        let n = self.node_count;
        if n < 2 {
            return Err(Error::Domain(format!("density is undefined for n = {n}")));
        }
        Ok(self.edges.len() as f64 / (n * (n - 1) / 2) as f64)
    }

    /// Relabels nodes: node `v` of `self` becomes node `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.node_count {
            return Err(Error::Input(format!(
                "permutation has length {} but graph has {} nodes",
                perm.len(),
                self.node_count
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Input("not a permutation".into()));
            }
        }
        let edges: Vec<_> = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        Graph::new(self.node_count, &edges)
    }

    /// Parses DIMACS COL text (`c` comments, one `p edge n m` line, `e u v` lines, 1-based).
    pub fn from_dimacs(text: &str) -> Result<Graph> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            let mut tokens = line.split_whitespace();
            let Some(tag) = tokens.next() else { continue };
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            let int = |tokens: &mut std::str::SplitWhitespace<'_>, what: &str| -> Result<usize> {
                let tok = tokens
                    .next()
                    .ok_or_else(|| parse_err(format!("missing {what}")))?;
                tok.parse::<usize>()
                    .map_err(|_| parse_err(format!("{what} `{tok}` is not a non-negative integer")))
            };
            match tag {
                "c" => {}
                "p" => {
                    if header.is_some() {
                        return Err(parse_err("duplicate problem line".into()));
                    }
                    let kind = tokens.next().ok_or_else(|| parse_err("missing problem kind".into()))?;
                    if kind != "edge" && kind != "col" {
                        return Err(parse_err(format!("unsupported problem kind `{kind}`")));
                    }
                    let n = int(&mut tokens, "node count")?;
                    let m = int(&mut tokens, "edge count")?;
                    header = Some((n, m));
                }
                "e" => {
                    let Some((n, _)) = header else {
                        return Err(parse_err("edge line before problem line".into()));
                    };
                    let u = int(&mut tokens, "endpoint")?;
                    let v = int(&mut tokens, "endpoint")?;
                    for w in [u, v] {
                        if w == 0 || w > n {
                            return Err(parse_err(format!("vertex {w} outside 1..={n}")));
                        }
                    }
                    edges.push((u - 1, v - 1));
                }
                other => return Err(parse_err(format!("unknown line tag `{other}`"))),
            }
        }
        let (n, declared) = header.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `p edge <n> <m>` line".into(),
        })?;
        let graph = Graph::new(n, &edges)?;
        if graph.edge_count() != declared {
            log::warn!(
                "DIMACS header declares {declared} edges but {} distinct edges were read",
                graph.edge_count()
            );
        }
        Ok(graph)
    }

    /// Canonical DIMACS COL rendering: `p edge n m`, then sorted 1-based `e u v` lines.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::with_capacity(16 * (self.edges.len() + 1));
        writeln!(out, "p edge {} {}", self.node_count, self.edges.len()).unwrap();
        for &(a, b) in &self.edges {
            writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_drops_loops_and_duplicates() {
        let g = Graph::new(3, &[(0, 1), (1, 0), (1, 2), (2, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.degrees(), vec![1, 2, 1]);
    }

    #[test]
    fn build_empty() {
        let g = Graph::new(0, &[]).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn build_rejects_out_of_range() {
        let err = Graph::new(2, &[(0, 2)]).unwrap_err();
        assert!(err.to_string().contains("(0, 2)"), "{err}");
    }

    #[test]
    fn parse_small() {
        let g = Graph::from_dimacs("p edge 3 2\ne 1 2\ne 2 3").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn parse_tolerates_duplicates_and_wrong_count() {
        let g = Graph::from_dimacs("c hi\np edge 3 5\ne 1 2\ne 2 1\ne 1 2\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Graph::from_dimacs("e 1 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Graph::from_dimacs(""), Err(Error::Parse { .. })));
        assert!(matches!(
            Graph::from_dimacs("p edge 2 1\ne 1 x"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Graph::from_dimacs("p edge 2 1\n\ne 1 3"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            Graph::from_dimacs("p edge 2 1\ne 0 1"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn complement_examples() {
        let k3 = Graph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(k3.complement(), Graph::empty(3));
        let k4 = Graph::empty(4).complement();
        assert_eq!(k4.edge_count(), 6);
        let p3 = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p3.complement().edges(), &[(0, 2)]);
    }

    #[test]
    fn density_values() {
        let k3 = Graph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(k3.density().unwrap(), 1.0);
        assert!(matches!(Graph::empty(1).density(), Err(Error::Domain(_))));
    }

    #[test]
    fn dimacs_render() {
        let g = Graph::new(3, &[(2, 1), (0, 1)]).unwrap();
        assert_eq!(g.to_dimacs(), "p edge 3 2\ne 1 2\ne 2 3\n");
    }
}
