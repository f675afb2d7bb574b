//! Benchmark harness: best-of-k solver runs on one instance, manifest-driven
//! batches, and Table-style reports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::{self, Hyperparams, ModelKind, StopReason};
use crate::graph::Graph;
use crate::heuristics::{greedy_coloring, purify, tabucol, TabucolConfig};
use crate::potts::{conflict_count, Coloring, Couplings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Solver {
    #[serde(rename = "PI_GCN")]
    PiGcn,
    #[serde(rename = "PI_SAGE")]
    PiSage,
    #[serde(rename = "TABUCOL")]
    Tabucol,
    #[serde(rename = "GREEDY")]
    Greedy,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::PiGcn => "PI_GCN",
            Solver::PiSage => "PI_SAGE",
            Solver::Tabucol => "TABUCOL",
            Solver::Greedy => "GREEDY",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "PI_GCN" | "GCN" => Ok(Solver::PiGcn),
            "PI_SAGE" | "SAGE" => Ok(Solver::PiSage),
            "TABUCOL" => Ok(Solver::Tabucol),
            "GREEDY" => Ok(Solver::Greedy),
            _ => Err(Error::Config(format!("unknown solver `{s}`"))),
        }
    }
}

/// One row of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub graph_name: String,
    pub n: usize,
    pub edge_count: usize,
    pub density: Option<f64>,
    pub q: usize,
    pub solver: Solver,
    /// Clash count of the reported coloring.
    pub cost: u64,
    /// `cost / edge_count`; absent for edgeless graphs.
    pub epsilon: Option<f64>,
    /// Colors used by a feasible coloring, when one is available.
    pub chi_upper: Option<usize>,
    pub seeds_tried: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_seconds: Option<f64>,
    pub stop_reason: Option<String>,
}

/// What to run on a graph.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub solver: Solver,
    pub q: usize,
    /// Template for the GNN solvers (its `num_colors` and `model_kind` are overridden).
    pub hyperparams: Option<Hyperparams>,
    pub tabucol: TabucolConfig,
    /// Independent restarts; seed `i` is `base_seed + i`.
    pub seeds: usize,
    pub purify: bool,
    pub time_limit: Option<Duration>,
}

impl RunSpec {
    pub fn new(solver: Solver, q: usize) -> Self {
        RunSpec {
            solver,
            q,
            hyperparams: None,
            tabucol: TabucolConfig::default(),
            seeds: 5,
            purify: false,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: InstanceReport,
    /// Coloring whose clash count is `report.cost`.
    pub coloring: Coloring,
    /// Purified coloring when purification was requested and needed.
    pub purified: Option<Coloring>,
}

/// Runs `spec` on `g`, keeping the best (lowest cost, then earliest seed)
/// of up to `spec.seeds` restarts; restarts stop once a zero-cost result appears.
pub fn run_instance(name: &str, g: &Graph, spec: &RunSpec) -> Result<RunOutput> {
    let started = Instant::now();
    let seeds = spec.seeds.max(1);
    let mut best: Option<(u64, Coloring, Option<StopReason>)> = None;
    let mut tried = 0;
    for i in 0..seeds {
        if spec.solver == Solver::Greedy && i > 0 {
            break;
        }
        tried += 1;
        let (cost, coloring, stop) = match spec.solver {
            Solver::Greedy => {
                let (c, _) = greedy_coloring(g);
                (0, c, None)
            }
            Solver::Tabucol => {
                if spec.q == 0 {
                    return Err(Error::Config("tabucol needs q >= 1".into()));
                }
                let cfg = TabucolConfig {
                    seed: spec.tabucol.seed.wrapping_add(i as u64),
                    ..spec.tabucol.clone()
                };
                let r = tabucol(g, spec.q, &cfg);
                (r.cost, r.coloring, None)
            }
            Solver::PiGcn | Solver::PiSage => {
                let mut hp = spec
                    .hyperparams
                    .clone()
                    .ok_or_else(|| Error::Config("GNN solvers need hyperparameters".into()))?;
                hp.num_colors = spec.q;
                hp.model_kind = if spec.solver == Solver::PiGcn { ModelKind::Gcn } else { ModelKind::Sage };
                hp.seed = hp.seed.wrapping_add(i as u64);
                let r = gnn::train_with_limit(g, &hp, &Couplings::default(), spec.time_limit)?;
                (r.cost(), r.best_coloring, Some(r.stop_reason))
            }
        };
        if best.as_ref().is_none_or(|(c, ..)| cost < *c) {
            best = Some((cost, coloring, stop));
        }
        if best.as_ref().is_some_and(|(c, ..)| *c == 0) {
            break;
        }
    }
    let (cost, coloring, stop) = best.expect("at least one seed runs");
    debug_assert_eq!(conflict_count(g, &coloring)?, cost);
    let mut purified = None;
    let chi_upper = if cost == 0 {
        Some(coloring.colors_used())
    } else if spec.purify {
        let p = purify(g, &coloring, spec.tabucol.seed, g.node_count().max(1));
        let used = p.feasible.then_some(p.colors_used);
        purified = Some(p.coloring);
        used
    } else {
        None
    };
    let q = if spec.solver == Solver::Greedy { coloring.num_colors() } else { spec.q };
    let report = InstanceReport {
        graph_name: name.to_string(),
        n: g.node_count(),
        edge_count: g.edge_count(),
        density: g.density().ok(),
        q,
        solver: spec.solver,
        cost,
        epsilon: (g.edge_count() > 0).then(|| cost as f64 / g.edge_count() as f64),
        chi_upper,
        seeds_tried: tried,
        wall_time_seconds: Some(started.elapsed().as_secs_f64()),
        stop_reason: stop.map(|s| serde_json::to_value(s).unwrap().as_str().unwrap().to_string()),
    };
    Ok(RunOutput { report, coloring, purified })
}

/// Coloring file: `c` comment lines, then one `<node> <color>` line per node, both 1-based.
pub fn write_coloring(c: &Coloring) -> String {
    let mut out = format!("c {} nodes, {} colors\n", c.len(), c.num_colors());
    for (v, &col) in c.colors().iter().enumerate() {
        writeln!(out, "{} {}", v + 1, col + 1).unwrap();
    }
    out
}

pub fn read_coloring(text: &str, n: usize) -> Result<Coloring> {
    let mut colors = vec![usize::MAX; n];
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let err = |m: &str| Error::Parse { line: idx + 1, message: m.to_string() };
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(v)), Some(Ok(c)), None) = (it.next(), it.next(), it.next()) else {
            return Err(err("expected `<node> <color>`"));
        };
        if v == 0 || v > n || c == 0 {
            return Err(err("node or color out of range"));
        }
        colors[v - 1] = c - 1;
    }
    if colors.contains(&usize::MAX) {
        return Err(Error::Input("coloring file does not cover every node".into()));
    }
    let q = colors.iter().max().map_or(0, |m| m + 1);
    Coloring::new(colors, q)
}

/// One `[[run]]` entry of a bench manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRow {
    /// DIMACS file, relative to the manifest's directory.
    pub graph: PathBuf,
    pub name: Option<String>,
    pub solver: Solver,
    /// Bundled hyperparameter preset for the GNN solvers.
    pub preset: Option<String>,
    /// Hyperparameter file (relative to the manifest) instead of a preset.
    pub config: Option<PathBuf>,
    /// Color count; defaults to the preset's `num_colors`.
    pub q: Option<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    /// Epoch cap for the GNN solvers, iteration cap for Tabucol.
    pub budget: Option<u64>,
    pub time_limit_secs: Option<f64>,
    #[serde(default)]
    pub purify: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_seeds() -> usize {
    5
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub run: Vec<ManifestRow>,
}

impl Manifest {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Outcome of one manifest row; failures are recorded, not fatal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub index: usize,
    pub report: Option<InstanceReport>,
    /// Coloring file written for this row, relative to the output directory.
    pub coloring_file: Option<String>,
    pub error: Option<String>,
}

fn graph_name(row: &ManifestRow) -> String {
    row.name.clone().unwrap_or_else(|| {
        row.graph
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into())
    })
}

fn prepare_row(row: &ManifestRow, base_dir: &Path) -> Result<(String, Graph, RunSpec)> {
    let text = std::fs::read_to_string(base_dir.join(&row.graph))?;
    let g = Graph::from_dimacs(&text)?;
    let hp = match (&row.preset, &row.config) {
        (Some(_), Some(_)) => return Err(Error::Config("give either `preset` or `config`, not both".into())),
        (Some(p), None) => Some(gnn::preset(p)?),
        (None, Some(path)) => Some(Hyperparams::from_toml(&std::fs::read_to_string(base_dir.join(path))?)?),
        (None, None) => None,
    };
    let q = match (row.q, &hp) {
        (Some(q), _) => q,
        (None, Some(hp)) => hp.num_colors,
        (None, None) if row.solver == Solver::Greedy => 0,
        (None, None) => return Err(Error::Config("row needs `q` or a preset".into())),
    };
    let mut spec = RunSpec::new(row.solver, q);
    spec.seeds = row.seeds;
    spec.purify = row.purify;
    spec.tabucol.seed = row.seed;
    spec.time_limit = row.time_limit_secs.map(Duration::from_secs_f64);
    if matches!(row.solver, Solver::PiGcn | Solver::PiSage) {
        let mut hp = hp.ok_or_else(|| Error::Config("GNN rows need `preset` or `config`".into()))?;
        if let Some(b) = row.budget {
            hp.max_epochs = b as usize;
        }
        spec.hyperparams = Some(hp);
    }
    if let Some(b) = row.budget {
        spec.tabucol.max_iterations = b;
    }
    Ok((graph_name(row), g, spec))
}

/// Runs every manifest row on the rayon pool. Rows come back in manifest order;
/// when `out_dir` is given, each row's coloring is written to `colorings/`.
pub fn run_manifest(manifest: &Manifest, base_dir: &Path, out_dir: Option<&Path>) -> Vec<BenchRow> {
    if let Some(dir) = out_dir {
        if let Err(e) = std::fs::create_dir_all(dir.join("colorings")) {
            log::error!("cannot create output directory: {e}");
        }
    }
    manifest
        .run
        .par_iter()
        .enumerate()
        .map(|(index, row)| {
            let result = prepare_row(row, base_dir).and_then(|(name, g, spec)| {
                let out = run_instance(&name, &g, &spec)?;
                let file = match out_dir {
                    Some(dir) => {
                        let rel = format!("colorings/{index:03}-{name}-{}.txt", spec.solver.as_str());
                        std::fs::write(dir.join(&rel), write_coloring(&out.coloring))?;
                        Some(rel)
                    }
                    None => None,
                };
                Ok((out.report, file))
            });
            match result {
                Ok((report, coloring_file)) => BenchRow { index, report: Some(report), coloring_file, error: None },
                Err(e) => BenchRow { index, report: None, coloring_file: None, error: Some(e.to_string()) },
            }
        })
        .collect()
}

/// Machine-readable results without timings, byte-stable for a fixed manifest.
pub fn rows_to_json(rows: &[BenchRow]) -> String {
    let stable: Vec<BenchRow> = rows
        .iter()
        .cloned()
        .map(|mut r| {
            if let Some(rep) = &mut r.report {
                rep.wall_time_seconds = None;
            }
            r
        })
        .collect();
    serde_json::to_string_pretty(&stable).expect("rows serialize") + "\n"
}

pub fn timings_to_json(rows: &[BenchRow]) -> String {
    let t: Vec<_> = rows
        .iter()
        .map(|r| serde_json::json!({"index": r.index, "wall_time_seconds": r.report.as_ref().and_then(|x| x.wall_time_seconds)}))
        .collect();
    serde_json::to_string_pretty(&t).expect("timings serialize") + "\n"
}

fn fmt_pct(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{:.2}%", 100.0 * v))
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("graph,nodes,edges,density,q,solver,cost,epsilon,chi_upper,seeds_tried,stop_reason,error\n");
    for r in rows {
        match &r.report {
            Some(rep) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},",
                rep.graph_name,
                rep.n,
                rep.edge_count,
                fmt_pct(rep.density),
                rep.q,
                rep.solver.as_str(),
                rep.cost,
                fmt_pct(rep.epsilon),
                rep.chi_upper.map_or_else(String::new, |c| c.to_string()),
                rep.seeds_tried,
                rep.stop_reason.clone().unwrap_or_default(),
            ),
            None => writeln!(out, ",,,,,,,,,,,\"{}\"", r.error.clone().unwrap_or_default().replace('"', "'")),
        }
        .unwrap();
    }
    out
}

/// Human-readable table; not part of any stability guarantee.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<12} {:>6} {:>6} {:>8} {:>4} {:<8} {:>6} {:>8} {:>6} {:>9}\n",
        "graph", "nodes", "edges", "density", "q", "solver", "cost", "epsilon", "chi", "time[s]"
    );
    for r in rows {
        match &r.report {
            Some(rep) => writeln!(
                out,
                "{:<12} {:>6} {:>6} {:>8} {:>4} {:<8} {:>6} {:>8} {:>6} {:>9}",
                rep.graph_name,
                rep.n,
                rep.edge_count,
                fmt_pct(rep.density),
                rep.q,
                rep.solver.as_str(),
                rep.cost,
                fmt_pct(rep.epsilon),
                rep.chi_upper.map_or_else(|| "-".into(), |c| c.to_string()),
                rep.wall_time_seconds.map_or_else(|| "-".into(), |t| format!("{t:.2}")),
            ),
            None => writeln!(out, "row {}: error: {}", r.index, r.error.as_deref().unwrap_or("?")),
        }
        .unwrap();
    }
    out
}
