use std::path::PathBuf;

use picolor::generators;
use picolor::Graph;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/color").join(name)
}

fn load(name: &str) -> Graph {
    Graph::from_dimacs(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

#[test]
fn vendored_queens_match_generator() {
    for (r, c, edges) in [
        (5, 5, 160),
        (6, 6, 290),
        (7, 7, 476),
        (8, 8, 728),
        (9, 9, 1056),
        (8, 12, 1368),
        (11, 11, 1980),
        (13, 13, 3328),
    ] {
        let g = load(&format!("queen{r}-{c}.col"));
        assert_eq!(g, generators::queens(r, c), "queen{r}-{c}");
        assert_eq!(g.edge_count(), edges);
    }
}

#[test]
fn vendored_mycielski_match_generator() {
    for (k, n, m) in [(3, 11, 20), (4, 23, 71), (5, 47, 236), (6, 95, 755)] {
        let g = load(&format!("myciel{k}.col"));
        assert_eq!(g, generators::mycielski(k), "myciel{k}");
        assert_eq!((g.node_count(), g.edge_count()), (n, m));
    }
}

#[test]
fn jean_size() {
    let g = load("jean.col");
    assert_eq!((g.node_count(), g.edge_count()), (80, 254));
}

#[test]
fn files_are_canonical() {
    for entry in std::fs::read_dir(data("")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let g = Graph::from_dimacs(&text).unwrap();
        let body: String = text.lines().filter(|l| !l.starts_with('c')).map(|l| format!("{l}\n")).collect();
        assert_eq!(body, g.to_dimacs(), "{}", path.display());
    }
}
