use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use picolor::bench::{self, RunSpec, Solver};
use picolor::gnn::{self, find_q_upper, Hyperparams, QSearchOptions, SearchStrategy};
use picolor::heuristics::TabucolConfig;
use picolor::potts::{self, DEFAULT_ENUMERATION_BUDGET};
use picolor::scheduling::{self, ScheduleSolver};
use picolor::{Error, Graph};

#[derive(Parser)]
#[command(name = "picolor", version, about = "Graph coloring with Potts-model GNNs and classical baselines")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Color a DIMACS graph with a fixed number of colors.
    Color(ColorArgs),
    /// Search for the smallest color count the solver can achieve.
    Chromatic(ChromaticArgs),
    /// Assign bookings to resources so that overlapping bookings differ.
    Schedule(ScheduleArgs),
    /// Run a TOML manifest of benchmark rows.
    Bench(BenchArgs),
    /// Exact enumeration: proper-coloring counts and the chromatic number.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    PiSage,
    PiGcn,
    Tabucol,
    Greedy,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::PiSage => Solver::PiSage,
            SolverArg::PiGcn => Solver::PiGcn,
            SolverArg::Tabucol => Solver::Tabucol,
            SolverArg::Greedy => Solver::Greedy,
        }
    }
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Bundled hyperparameter preset (e.g. queen5_5, myciel5).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Hyperparameter TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the epoch cap.
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl ModelArgs {
    fn hyperparams(&self, q: usize) -> picolor::Result<Hyperparams> {
        let mut hp = match (&self.preset, &self.config) {
            (Some(p), _) => gnn::preset(p)?,
            (None, Some(path)) => Hyperparams::from_toml(&fs::read_to_string(path)?)?,
            (None, None) => Hyperparams::small(q),
        };
        if let Some(e) = self.max_epochs {
            hp.max_epochs = e;
        }
        if let Some(s) = self.seed {
            hp.seed = s;
        }
        Ok(hp)
    }
}

#[derive(Args)]
struct ColorArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "pi-sage")]
    solver: SolverArg,
    /// Number of colors (defaults to the preset's).
    #[arg(short, long)]
    q: Option<usize>,
    /// Independent restarts; the best is kept.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// Tabucol iteration cap.
    #[arg(long, default_value_t = 1_000_000)]
    iterations: u64,
    /// Wall-clock limit per GNN restart, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Repair an infeasible result with extra colors.
    #[arg(long)]
    purify: bool,
    /// Write the coloring (`node color` lines, 1-based) here.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Sequential,
    Binary,
}

#[derive(Args)]
struct ChromaticArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "sequential")]
    strategy: StrategyArg,
    /// Largest color count to try (default: max degree + 1).
    #[arg(long)]
    q_max: Option<usize>,
    #[arg(long)]
    purify: bool,
    /// Use exact enumeration instead of the GNN.
    #[arg(long)]
    exact: bool,
    /// State budget for --exact.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct ScheduleArgs {
    /// CSV with header `id,start,end`; times are HH:MM or integer minutes.
    requests: PathBuf,
    #[arg(long, value_enum, default_value = "pi-sage")]
    solver: SolverArg,
    /// Treat intervals as closed, so bookings that touch at an endpoint conflict.
    #[arg(long)]
    closed_intervals: bool,
    /// Colors to try beyond the overlap lower bound before purifying.
    #[arg(long, default_value_t = 2)]
    extra_colors: usize,
    /// Assignment CSV destination (default: stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Summary JSON destination (default: stderr).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    /// Output directory for results.json, results.csv, timings.json and colorings/.
    #[arg(short, long, default_value = "bench-out")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    graph: PathBuf,
    /// Count proper colorings with this many colors; without it, compute the chromatic number.
    #[arg(short, long)]
    q: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
}

/// Solver ran but found no feasible answer.
struct Infeasible;

enum Failure {
    Infeasible,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

impl From<Infeasible> for Failure {
    fn from(_: Infeasible) -> Self {
        Failure::Infeasible
    }
}

fn read_graph(path: &Path) -> picolor::Result<Graph> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    Graph::from_dimacs(&text)
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn color(args: ColorArgs) -> Result<(), Failure> {
    let g = read_graph(&args.graph)?;
    let solver = Solver::from(args.solver);
    let is_gnn = matches!(solver, Solver::PiSage | Solver::PiGcn);
    let hp = if is_gnn || args.model.preset.is_some() || args.model.config.is_some() {
        Some(args.model.hyperparams(args.q.unwrap_or(3))?)
    } else {
        None
    };
    let q = match (args.q, &hp) {
        (Some(q), _) => q,
        (None, Some(hp)) if args.model.preset.is_some() || args.model.config.is_some() => hp.num_colors,
        _ if solver == Solver::Greedy => 0,
        _ => return Err(Error::Input("give --q or a --preset/--config".into()).into()),
    };
    if q == 0 && solver != Solver::Greedy {
        return Err(Error::Input("--q must be at least 1".into()).into());
    }
    let mut spec = RunSpec::new(solver, q);
    spec.hyperparams = hp;
    spec.seeds = args.seeds;
    spec.purify = args.purify;
    spec.time_limit = args.time_limit.map(Duration::from_secs_f64);
    spec.tabucol = TabucolConfig {
        max_iterations: args.iterations,
        seed: args.model.seed.unwrap_or(0),
        ..TabucolConfig::default()
    };
    let name = args.graph.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned());
    let out = bench::run_instance(&name, &g, &spec)?;
    let chosen = out.purified.as_ref().unwrap_or(&out.coloring);
    if let Some(path) = &args.out {
        fs::write(path, bench::write_coloring(chosen))?;
    }
    print_json(&out.report);
    if out.report.chi_upper.is_none() {
        return Err(Infeasible.into());
    }
    Ok(())
}

fn chromatic(args: ChromaticArgs) -> Result<(), Failure> {
    let g = read_graph(&args.graph)?;
    let q_max = args.q_max.unwrap_or(g.max_degree() + 1);
    if args.exact {
        let chi = potts::chromatic_number_exact(&g, args.budget)?;
        print_json(&serde_json::json!({"method": "exact", "chromatic_number": chi}));
        return if chi <= q_max { Ok(()) } else { Err(Infeasible.into()) };
    }
    let hp = args.model.hyperparams(q_max)?;
    let strategy = match args.strategy {
        StrategyArg::Sequential => SearchStrategy::Sequential,
        StrategyArg::Binary => SearchStrategy::Binary,
    };
    let mut opts = QSearchOptions::new(strategy, q_max);
    opts.purify = args.purify;
    match find_q_upper(&g, &hp, &opts) {
        Ok(r) => {
            if let Some(path) = &args.out {
                fs::write(path, bench::write_coloring(&r.coloring))?;
            }
            print_json(&serde_json::json!({"method": "gnn", "q_upper": r.q, "attempts": r.attempts}));
            Ok(())
        }
        Err(Error::Exhausted { q_max, best_q, best_cost, .. }) => {
            print_json(&serde_json::json!({
                "method": "gnn", "q_upper": null, "q_max": q_max,
                "best_q": best_q, "best_cost": best_cost,
            }));
            Err(Infeasible.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn schedule(args: ScheduleArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.requests)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", args.requests.display())))?;
    let requests = scheduling::parse_requests(&text)?;
    let solver = match args.solver {
        SolverArg::PiSage | SolverArg::PiGcn => {
            let mut hp = args.model.hyperparams(1)?;
            hp.model_kind = match args.solver {
                SolverArg::PiGcn => gnn::ModelKind::Gcn,
                _ => gnn::ModelKind::Sage,
            };
            ScheduleSolver::Gnn(hp)
        }
        SolverArg::Tabucol => ScheduleSolver::Tabucol(TabucolConfig {
            seed: args.model.seed.unwrap_or(0),
            ..TabucolConfig::default()
        }),
        SolverArg::Greedy => ScheduleSolver::Greedy,
    };
    let outcome = scheduling::solve_schedule(&requests, &solver, args.closed_intervals, args.extra_colors)?;
    let summary = serde_json::to_string_pretty(&outcome.summary).expect("serializable") + "\n";
    match &args.summary {
        Some(path) => fs::write(path, &summary)?,
        None => eprint!("{summary}"),
    }
    let Some(assignment) = outcome.assignment else {
        return Err(Infeasible.into());
    };
    match &args.out {
        Some(path) => fs::write(path, assignment.to_csv())?,
        None => print!("{}", assignment.to_csv()),
    }
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", args.manifest.display())))?;
    let manifest = bench::Manifest::from_toml(&text)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(&args.out)?;
    let rows = bench::run_manifest(&manifest, base, Some(&args.out));
    fs::write(args.out.join("results.json"), bench::rows_to_json(&rows))?;
    fs::write(args.out.join("results.csv"), bench::rows_to_csv(&rows))?;
    fs::write(args.out.join("timings.json"), bench::timings_to_json(&rows))?;
    print!("{}", bench::render_table(&rows));
    if let Some(bad) = rows.iter().find(|r| r.error.is_some()) {
        return Err(Error::Input(format!("row {} failed: {}", bad.index, bad.error.as_deref().unwrap_or(""))).into());
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<(), Failure> {
    let g = read_graph(&args.graph)?;
    match args.q {
        Some(q) => {
            let count = potts::count_proper_colorings(&g, q, args.budget)?;
            print_json(&serde_json::json!({"q": q, "proper_colorings": count}));
        }
        None => {
            let chi = potts::chromatic_number_exact(&g, args.budget)?;
            print_json(&serde_json::json!({"chromatic_number": chi}));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    let result = match cli.command {
        Command::Color(a) => color(a),
        Command::Chromatic(a) => chromatic(a),
        Command::Schedule(a) => schedule(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible) => {
            eprintln!("no feasible coloring found within budget");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
