use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ddwp::bench::{
    aggregate_table, fleet_comparison, fleet_csv, records_csv, run_episode, run_matrix, standard_policies, sweep,
    sweep_csv, BenchConfig, SweepDimension,
};
use ddwp::env::{
    gap_percent, hindsight_instance, limited_fleet, realize_episode, solve_hindsight, EpochConfig, SolveBudget,
};
use ddwp::instgen::{
    build_class_matrix, full_factorial, parse_class, InstanceClassSpec, Normalization, SourceInstance, TopologyStore,
};
use ddwp::model::{read_instance, write_instance, write_routes};
use ddwp::policies::{IcdConfig, Policy};
use ddwp::solver::{solve_detailed, SolverParams, StopCriterion};

#[derive(Parser)]
#[command(name = "ddwp", version, about = "Dynamic dispatch waves: solver, simulator and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Realize episodes and write their full request sets as instance files.
    Generate(GenerateArgs),
    /// Solve one static instance file.
    SolveStatic(SolveArgs),
    /// Run one policy on one episode and print the epoch log.
    Simulate(SimulateArgs),
    /// Run a class x policy matrix and write records, a gap table and p-values.
    Benchmark(BenchmarkArgs),
    /// Mean gap per policy over scenario budgets or iteration counts.
    Sweep(SweepArgs),
    /// Compare unlimited and limited fleets on the same episodes.
    FleetCompare(BenchmarkArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Default,
    Scenario,
}

impl Profile {
    fn params(self) -> SolverParams {
        match self {
            Profile::Default => SolverParams::default_profile(),
            Profile::Scenario => SolverParams::scenario_profile(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Iteration-bounded single-core budgets.
    Desk,
    /// Wall-clock budgets of the full-scale experiments.
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyName {
    Greedy,
    Rh,
    IcdDouble,
    Dshh,
    IcdPostpone,
    IcdHamming,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dimension {
    Budget,
    Iterations,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    MaxPairwise,
    DepotRoundTrip,
}

/// Instance classes and topologies.
#[derive(Args, Clone)]
struct ClassArgs {
    /// Class labels such as `R/HOM/TW2`, or `all` for the full factorial.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    classes: Vec<String>,
    /// Expected requests per episode (600 at full scale).
    #[arg(long, default_value_t = 150)]
    total: u32,
    #[arg(long, default_value_t = 1)]
    replications: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory with `<SOURCE>.txt` Solomon files; synthetic topologies
    /// are used for missing files.
    #[arg(long)]
    topology_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "max-pairwise")]
    normalization: NormalizationArg,
}

impl ClassArgs {
    fn classes(&self) -> Result<Vec<InstanceClassSpec>> {
        if self.classes.iter().any(|c| c.eq_ignore_ascii_case("all")) {
            return Ok(full_factorial(self.total));
        }
        self.classes
            .iter()
            .map(|c| parse_class(c, self.total).map_err(Into::into))
            .collect()
    }

    fn store(&self) -> TopologyStore {
        let norm = match self.normalization {
            NormalizationArg::MaxPairwise => Normalization::MaxPairwise,
            NormalizationArg::DepotRoundTrip => Normalization::DepotRoundTrip,
        };
        TopologyStore::new(self.topology_dir.clone(), self.seed, norm)
    }
}

/// Budget and policy parameters. Unset values come from the preset.
#[derive(Args, Clone)]
struct BudgetArgs {
    #[arg(long, value_enum, default_value = "desk")]
    preset: Preset,
    /// ICD iterations per epoch.
    #[arg(long)]
    icd_iterations: Option<usize>,
    /// Scenarios per ICD iteration.
    #[arg(long)]
    scenarios: Option<usize>,
    #[arg(long)]
    lookahead: Option<usize>,
    /// Overrides the dispatch threshold of every ICD policy.
    #[arg(long)]
    dispatch_threshold: Option<f64>,
    /// Overrides the postpone threshold of every ICD policy.
    #[arg(long)]
    postpone_threshold: Option<f64>,
    /// Per-scenario solver iterations.
    #[arg(long)]
    scenario_iterations: Option<u64>,
    /// Per-scenario time limit in milliseconds.
    #[arg(long)]
    scenario_ms: Option<u64>,
    #[arg(long)]
    routing_iterations: Option<u64>,
    #[arg(long)]
    routing_ms: Option<u64>,
    #[arg(long)]
    hindsight_iterations: Option<u64>,
    #[arg(long)]
    hindsight_ms: Option<u64>,
    /// Policies to run (default: rh, dshh, icd-postpone, icd-hamming, icd-double).
    #[arg(long, value_enum, value_delimiter = ',')]
    policies: Vec<PolicyName>,
    /// Worker threads for running episodes in parallel.
    #[arg(long)]
    workers: Option<usize>,
}

fn stop(base: StopCriterion, iterations: Option<u64>, ms: Option<u64>) -> StopCriterion {
    if iterations.is_none() && ms.is_none() {
        return base;
    }
    StopCriterion {
        time_limit: ms.map(Duration::from_millis),
        max_iterations: iterations,
    }
}

impl BudgetArgs {
    fn bench(&self) -> Result<BenchConfig> {
        let mut bench = match self.preset {
            Preset::Desk => BenchConfig::desk(),
            Preset::Paper => BenchConfig::paper(),
        };
        let (base_iters, base_scen, base_stop) = match self.preset {
            Preset::Desk => (3, 10, StopCriterion::iterations(60)),
            Preset::Paper => (3, 30, StopCriterion::millis(1000)),
        };
        let scenario = SolveBudget::new(
            SolverParams::scenario_profile(),
            stop(base_stop, self.scenario_iterations, self.scenario_ms),
        );
        scenario.stop.validate()?;
        let iterations = self.icd_iterations.unwrap_or(base_iters);
        let scenarios = self.scenarios.unwrap_or(base_scen);
        let mut policies = standard_policies(iterations, scenarios, scenario);
        for p in &mut policies {
            if let Policy::Icd(c) = p {
                if let Some(l) = self.lookahead {
                    c.lookahead = l;
                }
                if let Some(d) = self.dispatch_threshold {
                    c.dispatch_threshold = d;
                }
                if let Some(e) = self.postpone_threshold {
                    c.postpone_threshold = e;
                }
                c.validate()?;
            }
        }
        if !self.policies.is_empty() {
            policies = self
                .policies
                .iter()
                .map(|name| pick(&policies, *name))
                .collect();
        }
        bench.policies = policies;
        bench.routing.stop = stop(bench.routing.stop, self.routing_iterations, self.routing_ms);
        bench.hindsight.stop = stop(bench.hindsight.stop, self.hindsight_iterations, self.hindsight_ms);
        bench.routing.stop.validate()?;
        bench.hindsight.stop.validate()?;
        Ok(bench)
    }

    fn init_workers(&self) -> Result<()> {
        if let Some(n) = self.workers {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        Ok(())
    }
}

fn pick(policies: &[Policy], name: PolicyName) -> Policy {
    let key = match name {
        PolicyName::Greedy => return Policy::Greedy,
        PolicyName::Rh => "rh",
        PolicyName::IcdDouble => "icd-double",
        PolicyName::Dshh => "dshh",
        PolicyName::IcdPostpone => "icd-postpone",
        PolicyName::IcdHamming => "icd-hamming",
    };
    policies
        .iter()
        .find(|p| p.name() == key)
        .cloned()
        .unwrap_or_else(|| Policy::Icd(IcdConfig::double_threshold()))
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    classes: ClassArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "default")]
    profile: Profile,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    time_ms: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write routes here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Class label such as `R/HOM/TW2`.
    #[arg(long, default_value = "R/HOM/TW2")]
    class: String,
    #[arg(long, default_value = "R1_10_1")]
    source: String,
    #[arg(long, default_value_t = 150)]
    total: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "icd-double")]
    policy: PolicyName,
    /// Use greedy-planned primaries and paid secondary vehicles.
    #[arg(long)]
    limited_fleet: bool,
    #[arg(long)]
    topology_dir: Option<PathBuf>,
    /// Write the JSON-lines epoch log here instead of stdout.
    #[arg(long)]
    log: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    classes: ClassArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    limited_fleet: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    classes: ClassArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, value_enum)]
    dimension: Dimension,
    /// Budget multipliers or iteration counts.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn generate(args: &GenerateArgs) -> Result<()> {
    fs::create_dir_all(&args.out)?;
    let store = args.classes.store();
    let episodes = build_class_matrix(&args.classes.classes()?, args.classes.replications, args.classes.seed);
    let mut index = String::new();
    for spec in &episodes {
        let topo = store.get(spec.source)?;
        let config = EpochConfig::new(topo, spec.class, BenchConfig::desk().routing);
        let episode = realize_episode(&config, spec.seed);
        let name = format!("{}-{}-{}", spec.class.label().replace('/', "_"), spec.source, spec.replication);
        write(&args.out.join(format!("{name}.txt")), &write_instance(&hindsight_instance(&config, &episode)?))?;
        index.push_str(&serde_json::to_string(spec)?);
        index.push('\n');
    }
    write(&args.out.join("episodes.jsonl"), &index)?;
    println!("wrote {} episodes to {}", episodes.len(), args.out.display());
    Ok(())
}

fn solve_static(args: &SolveArgs) -> Result<()> {
    let text = fs::read_to_string(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let inst = read_instance(&text)?;
    let base = StopCriterion::iterations(10_000);
    let stop = stop(base, args.iterations, args.time_ms);
    let out = solve_detailed(&inst, &args.profile.params(), stop, args.seed)?;
    let sol = &out.solution;
    eprintln!(
        "cost {} routes {} feasible {} iterations {} time {:.2} s",
        sol.cost,
        sol.routes.len(),
        sol.feasible,
        out.iterations,
        out.elapsed.as_secs_f64()
    );
    match &args.out {
        Some(p) => write(p, &write_routes(sol))?,
        None => print!("{}", write_routes(sol)),
    }
    if !sol.feasible {
        bail!("no feasible solution found");
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    args.budget.init_workers()?;
    let class = parse_class(&args.class, args.total)?;
    let source: SourceInstance = args.source.parse()?;
    let store = TopologyStore::new(args.topology_dir.clone(), args.seed, Normalization::MaxPairwise);
    let bench = args.budget.bench()?;
    let policy = pick(&bench.policies, args.policy);
    let mut config = EpochConfig::new(store.get(source)?, class, bench.routing.clone());
    let episode = realize_episode(&config, args.seed);
    let hindsight = solve_hindsight(&config, &episode, &bench.hindsight)?;
    if args.limited_fleet {
        config = config.clone().with_fleet(limited_fleet(&config, &episode)?);
    }
    let run = run_episode(Arc::new(config), &episode, &policy)?;
    let summary = ddwp::env::EpisodeSummary {
        total_cost: run.total_cost,
        hindsight_cost: Some(hindsight),
        gap_percent: Some(gap_percent(run.total_cost, hindsight)),
    };
    let mut sink: Box<dyn Write> = match &args.log {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    ddwp::env::write_episode_log(&mut sink, &run.records, &summary)?;
    eprintln!(
        "{}: cost {} hindsight {} gap {:.2}%",
        policy.name(),
        run.total_cost,
        hindsight,
        gap_percent(run.total_cost, hindsight)
    );
    if run.invariants.violations() > 0 {
        bail!("invariant violations: {:?}", run.invariants);
    }
    Ok(())
}

fn benchmark(args: &BenchmarkArgs) -> Result<()> {
    args.budget.init_workers()?;
    fs::create_dir_all(&args.out)?;
    let mut bench = args.budget.bench()?;
    bench.limited_fleet = args.limited_fleet;
    let episodes = build_class_matrix(&args.classes.classes()?, args.classes.replications, args.classes.seed);
    let records = run_matrix(&episodes, &args.classes.store(), &bench)?;
    let table = aggregate_table(&records);
    write(&args.out.join("records.csv"), &records_csv(&records))?;
    write(&args.out.join("table.md"), &table.to_markdown())?;
    write(&args.out.join("pvalues.csv"), &table.p_values_csv())?;
    print!("{}", table.to_markdown());
    let failed = records.iter().filter(|r| !r.ok()).count();
    let violations: usize = records.iter().map(|r| r.invariants.violations()).sum();
    if failed > 0 || violations > 0 {
        bail!("{failed} failed runs, {violations} invariant violations");
    }
    Ok(())
}

fn sweep_cmd(args: &SweepArgs) -> Result<()> {
    args.budget.init_workers()?;
    let bench = args.budget.bench()?;
    let dimension = match args.dimension {
        Dimension::Budget => SweepDimension::ScenarioBudget,
        Dimension::Iterations => SweepDimension::Iterations,
    };
    let episodes = build_class_matrix(&args.classes.classes()?, args.classes.replications, args.classes.seed);
    let points = sweep(&episodes, &args.classes.store(), &bench, dimension, &args.values)?;
    let csv = sweep_csv(dimension, &points);
    write(&args.out, &csv)?;
    print!("{csv}");
    Ok(())
}

fn fleet_compare(args: &BenchmarkArgs) -> Result<()> {
    args.budget.init_workers()?;
    let bench = args.budget.bench()?;
    let episodes = build_class_matrix(&args.classes.classes()?, args.classes.replications, args.classes.seed);
    let points = fleet_comparison(&episodes, &args.classes.store(), &bench)?;
    fs::create_dir_all(&args.out)?;
    let csv = fleet_csv(&points);
    write(&args.out.join("fleet.csv"), &csv)?;
    print!("{csv}");
    let violations: usize = points.iter().map(|p| p.invariants.violations()).sum();
    if violations > 0 {
        bail!("{violations} invariant violations");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::SolveStatic(a) => solve_static(a),
        Command::Simulate(a) => simulate(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::FleetCompare(a) => fleet_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
