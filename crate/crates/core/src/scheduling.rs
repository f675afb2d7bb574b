//! Booking-to-resource assignment through interval-graph coloring:
//! requests are encoded as an interval graph, colored, and colors decoded
//! back into resources.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gnn::{train, Hyperparams};
use crate::graph::Graph;
use crate::heuristics::{greedy_coloring, local_flip_refine, purify, tabucol, TabucolConfig};
use crate::potts::{conflict_count, Coloring, Couplings};

/// A timed resource request; times are integer minutes and `end > start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: String,
    pub start: i64,
    pub end: i64,
}

impl Request {
    pub fn new(id: impl Into<String>, start: i64, end: i64) -> Result<Self> {
        let id = id.into();
        if end <= start {
            return Err(Error::Input(format!("request `{id}` ends at {end}, not after its start {start}")));
        }
        Ok(Request { id, start, end })
    }

    fn overlaps(&self, other: &Request, closed: bool) -> bool {
        if closed {
            self.start <= other.end && other.start <= self.end
        } else {
            self.start < other.end && other.start < self.end
        }
    }
}

fn parse_time(raw: &str) -> Option<i64> {
    let raw = raw.trim();
    match raw.split_once(':') {
        Some((h, m)) => {
            if h.is_empty() || m.len() != 2 || !(h.bytes().chain(m.bytes()).all(|b| b.is_ascii_digit())) {
                return None;
            }
            let h: i64 = h.parse().ok()?;
            let m: i64 = m.parse().ok()?;
            (m < 60).then_some(h * 60 + m)
        }
        None => raw.parse().ok(),
    }
}

/// Parses `id,start,end` CSV; times are `HH:MM` or integer minutes.
pub fn parse_requests(csv_text: &str) -> Result<Vec<Request>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["id", "start", "end"] {
        return Err(Error::Parse {
            line: 1,
            message: "header must be `id,start,end`".into(),
        });
    }
    let mut requests = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| Error::Parse { line, message };
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(err("empty request id".into()));
        }
        let start = parse_time(&record[1]).ok_or_else(|| err(format!("malformed start time `{}`", &record[1])))?;
        let end = parse_time(&record[2]).ok_or_else(|| err(format!("malformed end time `{}`", &record[2])))?;
        if end <= start {
            return Err(err(format!("request `{id}` ends before it starts")));
        }
        if !seen.insert(id.clone()) {
            return Err(err(format!("duplicate request id `{id}`")));
        }
        requests.push(Request { id, start, end });
    }
    Ok(requests)
}

/// Interval graph of a request list; node `i` is `requests[i]`.
#[derive(Debug, Clone)]
pub struct IntervalEncoding {
    pub graph: Graph,
    pub ids: Vec<String>,
}

/// Builds the interval graph: an edge joins two requests whose intervals
/// overlap. Half-open by default, so back-to-back bookings (`end_i == start_j`)
/// do not conflict; `closed_intervals` makes touching endpoints conflict.
pub fn encode_interval_graph(requests: &[Request], closed_intervals: bool) -> IntervalEncoding {
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|&i| (requests[i].start, i));
    let mut edges = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if !requests[i].overlaps(&requests[j], closed_intervals) {
                break;
            }
            edges.push((i, j));
        }
    }
    IntervalEncoding {
        graph: Graph::new(requests.len(), &edges).expect("interval nodes are in range"),
        ids: requests.iter().map(|r| r.id.clone()).collect(),
    }
}

/// Largest number of simultaneously active requests; equals the chromatic
/// number of the interval graph.
pub fn max_overlap(requests: &[Request], closed_intervals: bool) -> usize {
    let mut events: Vec<(i64, i32)> = Vec::with_capacity(2 * requests.len());
    for r in requests {
        events.push((r.start, 1));
        events.push((r.end, -1));
    }
    // At equal times, ends go first for half-open intervals and last for closed ones.
    if closed_intervals {
        events.sort_by_key(|&(t, d)| (t, -d));
    } else {
        events.sort();
    }
    let (mut active, mut peak) = (0i32, 0i32);
    for (_, d) in events {
        active += d;
        peak = peak.max(active);
    }
    peak as usize
}

/// Greedy coloring by increasing start time; optimal on interval graphs.
pub fn start_order_coloring(requests: &[Request], encoding: &IntervalEncoding) -> Coloring {
    let mut order: Vec<usize> = (0..requests.len()).collect();
    order.sort_by_key(|&i| (requests[i].start, i));
    crate::heuristics::greedy_in_order(&encoding.graph, &order).0
}

/// Resource per request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// `(request id, resource)` in request order.
    pub resources: Vec<(String, usize)>,
    pub resources_used: usize,
}

impl Assignment {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,resource\n");
        for (id, r) in &self.resources {
            out.push_str(&format!("{id},{r}\n"));
        }
        out
    }
}

/// Maps colors to resources, renumbering the used colors to `0..r` in ascending order.
/// Refuses colorings that would double-book a resource.
pub fn decode_assignment(c: &Coloring, encoding: &IntervalEncoding) -> Result<Assignment> {
    let clashes = conflict_count(&encoding.graph, c)?;
    if clashes > 0 {
        return Err(Error::Input(format!(
            "coloring has {clashes} clashes; decoding would double-book resources"
        )));
    }
    let mut used: Vec<usize> = c.colors().to_vec();
    used.sort_unstable();
    used.dedup();
    let rank: HashMap<usize, usize> = used.iter().enumerate().map(|(r, &col)| (col, r)).collect();
    Ok(Assignment {
        resources: encoding
            .ids
            .iter()
            .zip(c.colors())
            .map(|(id, col)| (id.clone(), rank[col]))
            .collect(),
        resources_used: used.len(),
    })
}

/// True iff no two overlapping requests share a resource. Every request must be
/// assigned, and every assigned id must be a known request.
pub fn validate_assignment(requests: &[Request], a: &Assignment, closed_intervals: bool) -> Result<bool> {
    let map: HashMap<&str, usize> = a.resources.iter().map(|(id, r)| (id.as_str(), *r)).collect();
    let known: HashSet<&str> = requests.iter().map(|r| r.id.as_str()).collect();
    if let Some((id, _)) = a.resources.iter().find(|(id, _)| !known.contains(id.as_str())) {
        return Err(Error::Input(format!("unknown request id `{id}`")));
    }
    let mut resources = Vec::with_capacity(requests.len());
    for r in requests {
        let res = map
            .get(r.id.as_str())
            .ok_or_else(|| Error::Input(format!("request `{}` has no resource", r.id)))?;
        resources.push(*res);
    }
    let encoding = encode_interval_graph(requests, closed_intervals);
    Ok(encoding.graph.edges().iter().all(|&(i, j)| resources[i] != resources[j]))
}

/// Coloring engine used by [`solve_schedule`].
#[derive(Debug, Clone)]
pub enum ScheduleSolver {
    Gnn(Hyperparams),
    Tabucol(TabucolConfig),
    Greedy,
}

impl ScheduleSolver {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleSolver::Gnn(hp) if hp.model_kind == crate::gnn::ModelKind::Gcn => "PI_GCN",
            ScheduleSolver::Gnn(_) => "PI_SAGE",
            ScheduleSolver::Tabucol(_) => "TABUCOL",
            ScheduleSolver::Greedy => "GREEDY",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleSummary {
    pub resources_used: usize,
    pub feasible: bool,
    pub solver: String,
    /// Color count at which the accepted coloring was produced.
    pub q: usize,
    /// Exact lower bound: maximum number of simultaneous requests.
    pub lower_bound: usize,
    /// Clash count of the raw solver output at the lower bound.
    pub cost_at_lower_bound: u64,
}

#[derive(Debug, Clone)]
pub struct ScheduleOutcome {
    pub assignment: Option<Assignment>,
    pub summary: ScheduleSummary,
}

/// Encode, solve and decode. Tries `q` from the overlap lower bound up to
/// `lower_bound + extra_colors`, refining each solver result with single-vertex
/// flips; if no attempt is clash-free, the best one is purified.
pub fn solve_schedule(
    requests: &[Request],
    solver: &ScheduleSolver,
    closed_intervals: bool,
    extra_colors: usize,
) -> Result<ScheduleOutcome> {
    let encoding = encode_interval_graph(requests, closed_intervals);
    let g = &encoding.graph;
    let lower = max_overlap(requests, closed_intervals);
    let mut summary = ScheduleSummary {
        resources_used: 0,
        feasible: true,
        solver: solver.name().to_string(),
        q: lower,
        lower_bound: lower,
        cost_at_lower_bound: 0,
    };
    if requests.is_empty() {
        return Ok(ScheduleOutcome {
            assignment: Some(Assignment { resources: Vec::new(), resources_used: 0 }),
            summary,
        });
    }
    let solve = |q: usize| -> Result<Coloring> {
        Ok(match solver {
            ScheduleSolver::Gnn(template) => {
                let mut hp = template.clone();
                hp.num_colors = q;
                train(g, &hp, &Couplings::default())?.best_coloring
            }
            ScheduleSolver::Tabucol(cfg) => tabucol(g, q, cfg).coloring,
            ScheduleSolver::Greedy => greedy_coloring(g).0,
        })
    };
    let mut best: Option<(u64, usize, Coloring)> = None;
    for q in lower..=lower + extra_colors {
        let raw = solve(q)?;
        let raw_cost = conflict_count(g, &raw)?;
        if q == lower {
            summary.cost_at_lower_bound = raw_cost;
        }
        let refined = local_flip_refine(g, &raw, q);
        if best.as_ref().is_none_or(|(c, ..)| refined.cost < *c) {
            best = Some((refined.cost, q, refined.coloring));
        }
        if refined.cost == 0 {
            break;
        }
    }
    let (cost, q, mut coloring) = best.expect("at least one color count is tried");
    summary.q = q;
    if cost > 0 {
        let p = purify(g, &coloring, 0, requests.len());
        coloring = p.coloring;
        summary.feasible = p.feasible;
    }
    if !summary.feasible {
        return Ok(ScheduleOutcome { assignment: None, summary });
    }
    let assignment = decode_assignment(&coloring, &encoding)?;
    summary.resources_used = assignment.resources_used;
    Ok(ScheduleOutcome {
        assignment: Some(assignment),
        summary,
    })
}

/// Six bookings over one day whose interval graph has six edges, one triangle
/// and chromatic number three.
pub const SAMPLE_REQUESTS_CSV: &str = "id,start,end
R1,00:00,06:00
R2,04:00,10:00
R3,05:00,12:00
R4,11:00,16:00
R5,15:00,20:00
R6,19:00,24:00
";

#[cfg(test)]
mod tests {
    use super::*;

    fn reqs(spans: &[(i64, i64)]) -> Vec<Request> {
        spans
            .iter()
            .enumerate()
            .map(|(i, &(s, e))| Request::new(format!("r{i}"), s, e).unwrap())
            .collect()
    }

    #[test]
    fn parse_basic() {
        let r = parse_requests("id,start,end\nA,08:00,10:30").unwrap();
        assert_eq!(r, vec![Request::new("A", 480, 630).unwrap()]);
        let r = parse_requests("id,start,end\nA,5,90\n").unwrap();
        assert_eq!((r[0].start, r[0].end), (5, 90));
    }

    #[test]
    fn parse_errors_carry_line() {
        let e = parse_requests("id,start,end\nA,08:00,10:00\nB,10:00,09:00").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_requests("id,start,end\nA,8h,10:00").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_requests("id,start,end\nA,1,2\nA,3,4").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(parse_requests("name,from,to\n").is_err());
        assert!(parse_requests("id,start,end\nA,08:75,10:00").is_err());
    }

    #[test]
    fn sample_instance_structure() {
        let r = parse_requests(SAMPLE_REQUESTS_CSV).unwrap();
        assert_eq!(r.len(), 6);
        let enc = encode_interval_graph(&r, false);
        assert_eq!(enc.graph.edge_count(), 6);
        assert!(enc.graph.has_edge(0, 1) && enc.graph.has_edge(0, 2) && enc.graph.has_edge(1, 2));
        assert_eq!(max_overlap(&r, false), 3);
    }

    #[test]
    fn encode_examples() {
        let enc = encode_interval_graph(&reqs(&[(0, 4), (2, 6), (5, 8)]), false);
        assert_eq!(enc.graph.edges(), &[(0, 1), (1, 2)]);
        let touching = reqs(&[(0, 2), (2, 4)]);
        assert_eq!(encode_interval_graph(&touching, false).graph.edge_count(), 0);
        assert_eq!(encode_interval_graph(&touching, true).graph.edge_count(), 1);
        assert_eq!(max_overlap(&touching, false), 1);
        assert_eq!(max_overlap(&touching, true), 2);
    }

    #[test]
    fn decode_and_validate() {
        let r = reqs(&[(0, 4), (2, 6), (5, 8)]);
        let enc = encode_interval_graph(&r, false);
        let c = Coloring::new(vec![0, 2, 0], 3).unwrap();
        let a = decode_assignment(&c, &enc).unwrap();
        assert_eq!(a.resources_used, 2);
        assert_eq!(a.resources[1], ("r1".to_string(), 1));
        assert!(validate_assignment(&r, &a, false).unwrap());
        let bad = Coloring::new(vec![0, 0, 1], 2).unwrap();
        assert!(decode_assignment(&bad, &enc).is_err());

        let single = reqs(&[(1, 2)]);
        let enc = encode_interval_graph(&single, false);
        let a = decode_assignment(&Coloring::new(vec![0], 1).unwrap(), &enc).unwrap();
        assert_eq!(a.resources_used, 1);
    }

    #[test]
    fn validate_cases() {
        let overlapping = reqs(&[(0, 5), (3, 9)]);
        let same = Assignment {
            resources: vec![("r0".into(), 0), ("r1".into(), 0)],
            resources_used: 1,
        };
        assert!(!validate_assignment(&overlapping, &same, false).unwrap());
        let disjoint = reqs(&[(0, 5), (5, 9)]);
        assert!(validate_assignment(&disjoint, &same, false).unwrap());
        let unknown = Assignment {
            resources: vec![("zz".into(), 0)],
            resources_used: 1,
        };
        assert!(validate_assignment(&disjoint, &unknown, false).is_err());
    }

    #[test]
    fn pipeline_edge_cases() {
        let empty = solve_schedule(&[], &ScheduleSolver::Greedy, false, 2).unwrap();
        assert_eq!(empty.summary.resources_used, 0);
        assert!(empty.summary.feasible);
        let one = solve_schedule(&reqs(&[(0, 1)]), &ScheduleSolver::Gnn(Hyperparams::small(1)), false, 2).unwrap();
        assert_eq!(one.summary.resources_used, 1);
    }
}
