//! `sia`: solve, verify and benchmark service-to-interface assignments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use sia_core::bnb::{root_relaxation, solve, BnbConfig, BranchRule, SearchOrder, SolveError};
use sia_core::instance::{split_count, Allocation, SiaInstance, SolveStatus};
use sia_core::instance_file::{read_instance, InstanceFileError};
use sia_core::lp::{LpStatus, PivotRule};
use sia_core::lpformat::{export_lp, ExportError};
use sia_core::milp::build_named_milp;
use sia_core::oracle::{brute_force_solve, OracleError, DEFAULT_SEARCH_CAP};
use sia_core::rational::Rational;
use sia_core::reduction::{pp_to_sia, solve_reduction, PartitionInstance, ReductionError};
use sia_core::simbench::{emit_report, run_benchmark, BenchError, BenchReport, ScenarioSpec};

const SCHEMAS: &str = "\
INSTANCE FILES (TOML)
  num_interfaces = 2
  num_services = 1
  num_resources = 1
  demand = [[5]]                 # J rows of K nonnegative integers
  capacity = [[3], [4]]          # I rows of K nonnegative integers
  unit_cost = [[1], [\"2\"]]       # I rows of K rationals
  activation_cost = [10, \"21/2\"] # I rationals
  overhead = [[[0]], [[\"1/2\"]]]  # optional I x J x K rationals, default 0
  Rationals are integers or strings \"p/q\", \"p\" or finite decimals \"0.25\".
  Unknown keys are rejected.

SCENARIO FILES (TOML)
  version = 1
  seed = 20170605
  replications = 1000
  services = { min = 3, max = 10 }
  num_interfaces = 4
  num_resources = 3
  unit_cost = [[1, 4, 3], [2, 1, 4], [3, 2, 1], [4, 3, 2]]
  capacity_factor = 2
  [demand]     low = { min = 1, max = 3 }, high = { min = 6, max = 10 },
               mixed_high_probability = \"1/2\"
  [activation] low = 1, high_multiplier = 10, mixed_high_probability = \"1/4\"
  [[scenario]] name = \"mixed-mixedf\", demand = \"mixed-random\", activation = \"mixed-f\"
  Demand classes: low, high, mixed-random. Activation regimes: low-f, high-f, mixed-f.

EXIT CODES
  0  success (optimal solution, decision printed, files written)
  1  unreadable or invalid input
  2  instance infeasible
  3  solver limit reached before optimality was proven
  4  search space too large for the exhaustive oracle
  5  output could not be produced (I/O failure, non-decimal coefficient)";

#[derive(Parser)]
#[command(name = "sia", version, about = "Exact service-to-interface assignment solver", after_help = SCHEMAS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance to proven optimality by branch and bound.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Only solve the root LP relaxation and report its bound.
        #[arg(long)]
        relax_integrality: bool,
    },
    /// Solve a tiny instance by exhaustive enumeration.
    Oracle {
        instance: PathBuf,
        /// Largest number of allocations to enumerate.
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        max_allocations: u128,
    },
    /// Decide a Partition instance through the assignment solver.
    Reduce {
        /// Positive integers forming the multiset.
        #[arg(required = true)]
        integers: Vec<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run the scenario sweep and write report.csv, records.csv and charts.
    Bench {
        config: PathBuf,
        output_dir: PathBuf,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Override the replication count from the config.
        #[arg(long)]
        replications: Option<u64>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Write the MILP model of an instance in LP format.
    ExportLp { instance: PathBuf, output: PathBuf },
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 1_000_000)]
    node_limit: u64,
    /// Seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// act-first-most-fractional or x-most-fractional.
    #[arg(long, default_value_t = BranchRule::default())]
    branch_rule: BranchRule,
    /// best-bound or depth-first.
    #[arg(long, default_value_t = SearchOrder::default())]
    search_order: SearchOrder,
    /// bland or dantzig.
    #[arg(long, default_value_t = PivotRule::default())]
    pivot_rule: PivotRule,
    /// For `bench`, replaces the config seed. The solver itself is
    /// deterministic, so `solve` and `reduce` only echo it.
    #[arg(long)]
    seed: Option<u64>,
}

impl SolverArgs {
    fn config(&self) -> Result<BnbConfig, Failure> {
        if !(self.time_limit.is_finite() && self.time_limit > 0.0) {
            return Err(Failure::input("--time-limit must be a positive number of seconds"));
        }
        let config = BnbConfig {
            node_limit: self.node_limit,
            time_limit: Duration::from_secs_f64(self.time_limit),
            branch_rule: self.branch_rule,
            search_order: self.search_order,
            pivot_rule: self.pivot_rule,
            prune: true,
        };
        config.validate().map_err(|e| Failure::input(e.to_string()))?;
        Ok(config)
    }
}

const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;
const EXIT_OUTPUT: u8 = 5;

/// A message for stderr and the exit code that goes with it.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure::new(EXIT_INPUT, message)
    }
}

fn load(path: &Path) -> Result<SiaInstance, Failure> {
    read_instance(path).map_err(|e| match e {
        InstanceFileError::Io { .. } => Failure::input(e.to_string()),
        other => Failure::input(format!("{}: {other}", path.display())),
    })
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::NodeLimit | SolveStatus::TimeLimit => EXIT_LIMIT,
    }
}

fn optional(q: &Option<Rational>) -> String {
    q.as_ref().map_or("none".to_string(), Rational::to_fraction_string)
}

/// `service_<j>: <i>=<amounts>` with 1-based indices, listing only the
/// interfaces that serve the service.
fn print_assignments(alloc: &Allocation) {
    let d = alloc.dims();
    for j in 0..d.services {
        let parts: Vec<String> = (0..d.interfaces)
            .filter(|&i| (0..d.resources).any(|k| alloc.get(i, j, k) > 0))
            .map(|i| {
                let amounts: Vec<String> = (0..d.resources).map(|k| alloc.get(i, j, k).to_string()).collect();
                format!("{}={}", i + 1, amounts.join(","))
            })
            .collect();
        println!("service_{}: {}", j + 1, parts.join(" "));
    }
}

fn cmd_solve(path: &Path, args: &SolverArgs, relax: bool) -> Result<u8, Failure> {
    let instance = load(path)?;
    let config = args.config()?;
    if relax {
        let lp = root_relaxation(&instance, &config).map_err(|e| Failure::new(EXIT_OUTPUT, e.to_string()))?;
        println!("status: {}", if lp.status == LpStatus::Optimal { "relaxed" } else { "infeasible" });
        if let Some(v) = &lp.value {
            println!("lp_bound: {}", v.to_fraction_string());
            println!("lp_bound_decimal: {}", v.to_decimal(6));
        }
        println!("lp_iterations: {}", lp.iterations);
        return Ok(if lp.status == LpStatus::Optimal { 0 } else { EXIT_INFEASIBLE });
    }
    match solve(&instance, &config) {
        Ok(sol) => {
            println!("status: {}", sol.status());
            println!("objective: {}", sol.objective().to_fraction_string());
            println!("objective_decimal: {}", sol.objective().to_decimal(6));
            println!("splits: {}", split_count(&sol));
            print_assignments(sol.allocation());
            let stats = sol.stats();
            println!("nodes: {}", stats.nodes);
            println!("lp_iterations: {}", stats.lp_iterations);
            println!("root_bound: {}", optional(&stats.root_bound));
            println!("best_bound: {}", optional(&stats.best_bound));
            println!("wall_time_ms: {}", stats.wall_time.as_millis());
            if let Some(seed) = args.seed {
                println!("seed: {seed}");
            }
            Ok(status_code(sol.status()))
        }
        Err(SolveError::InfeasibleInstance) => {
            println!("status: infeasible");
            Ok(EXIT_INFEASIBLE)
        }
        Err(SolveError::NoIncumbent { status, best_bound }) => {
            println!("status: {status}");
            println!("objective: none");
            println!("best_bound: {}", optional(&best_bound));
            Ok(EXIT_LIMIT)
        }
        Err(e) => Err(Failure::new(EXIT_OUTPUT, e.to_string())),
    }
}

fn cmd_oracle(path: &Path, cap: u128) -> Result<u8, Failure> {
    let instance = load(path)?;
    match brute_force_solve(&instance, cap) {
        Ok(result) => {
            println!("objective: {}", result.objective.to_fraction_string());
            println!("objective_decimal: {}", result.objective.to_decimal(6));
            print_assignments(&result.allocation);
            println!("allocations_evaluated: {}", result.leaves);
            Ok(0)
        }
        Err(OracleError::InfeasibleInstance) => {
            println!("status: infeasible");
            Ok(EXIT_INFEASIBLE)
        }
        Err(e @ OracleError::SearchSpaceTooLarge { .. }) => Err(Failure::new(EXIT_TOO_LARGE, e.to_string())),
        Err(e @ OracleError::Overflow) => Err(Failure::new(EXIT_TOO_LARGE, e.to_string())),
    }
}

fn cmd_reduce(integers: &[String], args: &SolverArgs) -> Result<u8, Failure> {
    let elements = integers
        .iter()
        .map(|s| s.parse::<u64>().map_err(|_| Failure::input(format!("`{s}` is not a positive integer"))))
        .collect::<Result<Vec<_>, _>>()?;
    let config = args.config()?;
    let pp = PartitionInstance::new(elements).map_err(|e| Failure::input(e.to_string()))?;
    let listed: Vec<String> = pp.elements().iter().map(u64::to_string).collect();
    println!("elements: {}", listed.join(" "));
    println!("total: {}", pp.total());
    if pp.total() % 2 == 1 {
        println!("note: odd total, no equal split exists");
        println!("partition: no");
        return Ok(0);
    }
    let instance = pp_to_sia(&pp).map_err(|e| Failure::input(e.to_string()))?;
    let d = instance.dims();
    println!("interfaces: {}", d.interfaces);
    println!("services: {}", d.services);
    println!("resources: {}", d.resources);
    println!("capacity: {}", instance.capacity(0, 0));
    println!("activation_cost: 1");
    match solve_reduction(&pp, &config) {
        Ok(out) => {
            println!("objective: {}", out.solution.objective().to_fraction_string());
            println!("splits: {}", split_count(&out.solution));
            println!("partition: {}", if out.partition_exists { "yes" } else { "no" });
            Ok(0)
        }
        Err(ReductionError::SolverLimitHit(status)) => Err(Failure::new(EXIT_LIMIT, format!("solver stopped at {status}"))),
        Err(e) => Err(Failure::new(EXIT_OUTPUT, e.to_string())),
    }
}

fn print_table(report: &BenchReport) {
    println!("{:>3}  {:<14} {:>14} {:>12} {:>6} {:>8}", "J", "scenario", "mean_cost", "mean_splits", "reps", "unsolved");
    for row in &report.rows {
        let mean = |q: &Option<Rational>| q.as_ref().map_or("-".to_string(), |q| q.to_decimal(3));
        println!(
            "{:>3}  {:<14} {:>14} {:>12} {:>6} {:>8}",
            row.num_services,
            row.scenario,
            mean(&row.mean_cost),
            mean(&row.mean_splits),
            row.replications,
            row.unsolved
        );
    }
}

fn write_report(report: &BenchReport, dir: &Path) -> Result<(), Failure> {
    let files = emit_report(report, dir).map_err(|e| Failure::new(EXIT_OUTPUT, e.to_string()))?;
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_bench(config: &Path, out: &Path, jobs: usize, replications: Option<u64>, args: &SolverArgs) -> Result<u8, Failure> {
    let mut spec = ScenarioSpec::read(config).map_err(|e| Failure::input(e.to_string()))?;
    if let Some(r) = replications {
        spec.replications = r;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(|e| Failure::input(e.to_string()))?;
    let solver = args.config()?;
    match run_benchmark(&spec, &solver, jobs) {
        Ok(report) => {
            write_report(&report, out)?;
            print_table(&report);
            Ok(0)
        }
        Err(BenchError::TooManyUnsolved { unsolved, total, report }) => {
            write_report(&report, out)?;
            print_table(&report);
            Err(Failure::new(EXIT_LIMIT, format!("{unsolved} of {total} replications hit a solver limit; report is invalid")))
        }
        Err(BenchError::Spec(e)) => Err(Failure::input(e.to_string())),
        Err(e) => Err(Failure::new(EXIT_OUTPUT, e.to_string())),
    }
}

fn cmd_export_lp(path: &Path, output: &Path) -> Result<u8, Failure> {
    let instance = load(path)?;
    let name = path.file_stem().map_or("sia".to_string(), |s| s.to_string_lossy().into_owned());
    let model = build_named_milp(&instance, &name);
    export_lp(&model, output).map_err(|e| match e {
        ExportError::NonDecimalRational { .. } => Failure::new(EXIT_OUTPUT, format!("{e}; scale the instance first")),
        other => Failure::new(EXIT_OUTPUT, other.to_string()),
    })?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve { instance, solver, relax_integrality } => cmd_solve(instance, solver, *relax_integrality),
        Command::Oracle { instance, max_allocations } => cmd_oracle(instance, *max_allocations),
        Command::Reduce { integers, solver } => cmd_reduce(integers, solver),
        Command::Bench { config, output_dir, jobs, replications, solver } => {
            cmd_bench(config, output_dir, *jobs, *replications, solver)
        }
        Command::ExportLp { instance, output } => cmd_export_lp(instance, output),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
