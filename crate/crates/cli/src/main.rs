//! `ghmdatsp` command line: instance generation, solving and benchmarking.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ghmdatsp::bench::{run_bench, BenchConfig};
use ghmdatsp::exact::{export_milp, find_subtours, rows_to_lp, IntegralSolution};
use ghmdatsp::instance::{build_instance, CostMetric, InstanceParams};
use ghmdatsp::refine::RefineParams;
use ghmdatsp::report::{RunReport, TourFile};
use ghmdatsp::roadmap::Cluster;
use ghmdatsp::solve::{instance_for, solve};
use ghmdatsp::tsplib::{load_tsplib, BAYS29};
use ghmdatsp::{svg, Instance, MaParams, Method, Roadmap};

#[derive(Parser)]
#[command(
    name = "ghmdatsp",
    version,
    about = "Multi-vehicle Dubins routing over task neighborhoods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance JSON from TSPLIB coordinates.
    Generate(GenerateArgs),
    /// Solve an instance and write tours, plots and a run report.
    Solve(SolveArgs),
    /// Run a benchmark grid from a JSON config.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Length,
    Time,
}

impl From<Metric> for CostMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Length => CostMetric::Length,
            Metric::Time => CostMetric::Time,
        }
    }
}

#[derive(Args)]
struct NinFlags {
    /// Allow coverage through necessarily-intersecting neighborhoods.
    #[arg(long, conflicts_with = "no_nin")]
    nin: bool,
    #[arg(long)]
    no_nin: bool,
}

impl NinFlags {
    fn value(&self) -> Option<bool> {
        match (self.nin, self.no_nin) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// TSPLIB file with NODE_COORD_SECTION; the bundled bays29 otherwise.
    #[arg(long)]
    tsplib: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    vehicles: usize,
    #[arg(long, default_value_t = ghmdatsp::instance::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = ghmdatsp::instance::DEFAULT_ALPHA)]
    alpha: f64,
    /// One value for the whole fleet or one per vehicle.
    #[arg(long, value_delimiter = ',', default_value = "70")]
    velocity: Vec<f64>,
    /// Sensing range; one value or one per vehicle.
    #[arg(long, value_delimiter = ',', default_value = "150")]
    range: Vec<f64>,
    #[arg(long, value_enum, default_value = "length")]
    metric: Metric,
    #[command(flatten)]
    nin: NinFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    Ma,
    Oracle,
    MilpExport,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "ma")]
    method: SolveMethod,
    /// Override the instance's objective weight.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    metric: Option<Metric>,
    #[command(flatten)]
    nin: NinFlags,
    /// Refine the memetic result (requires NIN).
    #[arg(long)]
    refine: bool,
    /// Seed of the memetic search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tour JSON, or LP text for `milp-export`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Run report JSON; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Wall-clock budget of the memetic search, seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    max_generations: Option<usize>,
    #[arg(long)]
    dump_roadmap: Option<PathBuf>,
    /// Tour JSON to separate against (`milp-export`); violated subtour
    /// rows are written next to the model.
    #[arg(long)]
    candidate: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Markdown table; printed to stdout when absent.
    #[arg(long)]
    markdown: Option<PathBuf>,
    /// Full per-run results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Errors that should exit with the usage code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = read(path)?;
    Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn generate(a: GenerateArgs) -> Result<()> {
    let centers = match &a.tsplib {
        Some(p) => load_tsplib(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => load_tsplib(BAYS29)?,
    };
    let params = InstanceParams {
        vehicles: a.vehicles,
        samples_per_cluster: a.samples,
        velocities: a.velocity,
        sensing_ranges: a.range,
        alpha: a.alpha,
        cost_metric: a.metric.into(),
        nin_enabled: a.nin.value().unwrap_or(true),
        ..InstanceParams::default()
    };
    let inst = build_instance(&params, &centers, a.seed).map_err(|e| usage(e.to_string()))?;
    write(&a.out, &inst.to_json())?;
    println!("{}", inst.fingerprint());
    Ok(())
}

/// Global node ids of a tour file's vehicles, for separation.
fn candidate_solution(roadmap: &Roadmap, tours: &TourFile) -> Result<IntegralSolution> {
    let mut sol = IntegralSolution::default();
    for (k, v) in tours.vehicles.iter().enumerate() {
        if k >= roadmap.n_vehicles() {
            bail!("candidate has more vehicles than the instance");
        }
        let ids: Vec<usize> = v
            .nodes
            .iter()
            .map(|n| match n.cluster {
                Cluster::Depot => roadmap.depot_node(k, n.sample),
                Cluster::Terminal => roadmap.terminal_node(k, n.sample),
                Cluster::Task(t) => roadmap.task_node(k, t, n.sample),
            })
            .collect();
        sol.nodes.extend(ids.iter().copied());
        sol.edges.extend(ids.windows(2).map(|w| (w[0], w[1])));
    }
    Ok(sol)
}

fn solve_cmd(a: SolveArgs) -> Result<()> {
    let mut inst = load_instance(&a.instance)?;
    if let Some(alpha) = a.alpha {
        inst.alpha = alpha;
    }
    if let Some(m) = a.metric {
        inst.cost_metric = m.into();
    }
    if let Some(nin) = a.nin.value() {
        inst.nin_enabled = nin;
    }
    inst.validate().map_err(|e| usage(e.to_string()))?;
    if a.refine && (a.method != SolveMethod::Ma || !inst.nin_enabled) {
        return Err(usage("--refine needs --method ma with NIN enabled"));
    }
    let method = match a.method {
        SolveMethod::Ma if a.refine => Method::MaNinPr,
        SolveMethod::Ma if inst.nin_enabled => Method::MaNin,
        SolveMethod::Ma => Method::MaNoNin,
        SolveMethod::Oracle => Method::Oracle,
        SolveMethod::MilpExport => Method::MilpExport,
    };

    if method == Method::MilpExport {
        let start = Instant::now();
        let roadmap = Roadmap::build(&instance_for(&inst, method));
        let mut model = export_milp(&roadmap, inst.alpha);
        let out = a
            .out
            .clone()
            .ok_or_else(|| usage("milp-export needs --out"))?;
        if let Some(c) = &a.candidate {
            let tours = TourFile::from_json(&read(c)?)
                .with_context(|| format!("parsing {}", c.display()))?;
            let sol = candidate_solution(&roadmap, &tours)?;
            let subtours = find_subtours(&sol, &roadmap)?;
            let cuts = model.add_subtour_cuts(&roadmap, &subtours);
            let mut cut_path = out.clone().into_os_string();
            cut_path.push(".cuts");
            write(Path::new(&cut_path), &rows_to_lp(&model.vars, &cuts))?;
            eprintln!("{} subtours, {} cut rows", subtours.len(), cuts.len());
        }
        write(&out, &model.to_lp())?;
        if let Some(p) = &a.dump_roadmap {
            write(p, &serde_json::to_string_pretty(&roadmap.dump())?)?;
        }
        let report = RunReport::for_export(
            &inst,
            model.vars.len(),
            model.rows.len(),
            start.elapsed().as_secs_f64(),
        );
        return emit_report(&a.report, &report);
    }

    let mut ma = MaParams {
        seed: a.seed,
        time_limit: a.time_limit,
        ..MaParams::default()
    };
    if let Some(p) = a.population {
        ma.population_size = p;
    }
    if let Some(g) = a.max_generations {
        ma.max_generations = g;
    }
    ma.validate().map_err(usage)?;
    let (roadmap, solved) = solve(&inst, method, &ma, &RefineParams::default())?;
    if let Some(p) = &a.dump_roadmap {
        write(p, &serde_json::to_string_pretty(&roadmap.dump())?)?;
    }
    let refined = solved
        .ma
        .as_ref()
        .and_then(|m| m.refined.as_ref())
        .map(|(_, r)| r);
    let tours = TourFile::new(&inst, &roadmap, method, &solved.tours, refined);
    if let Some(p) = &a.out {
        write(p, &tours.to_json())?;
    }
    if let Some(p) = &a.svg {
        write(p, &svg::render(&inst, &tours))?;
    }
    emit_report(
        &a.report,
        &RunReport::for_solve(&inst, method, &solved, a.seed),
    )
}

fn emit_report(path: &Option<PathBuf>, report: &RunReport) -> Result<()> {
    match path {
        Some(p) => write(p, &report.to_json()),
        None => {
            println!("{}", report.to_json());
            Ok(())
        }
    }
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    let text = read(&a.config)?;
    let cfg: BenchConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", a.config.display()))?;
    let result = run_bench(&cfg)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &a.csv {
        write(p, &result.to_csv())?;
    }
    if let Some(p) = &a.json {
        write(p, &serde_json::to_string_pretty(&result)?)?;
    }
    match &a.markdown {
        Some(p) => write(p, &result.to_markdown())?,
        None => print!("{}", result.to_markdown()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
