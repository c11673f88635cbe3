//! Seeded scenario sweeps over the number of services.
//!
//! Every instance is a pure function of `(seed, J, replication)` and the
//! scenario's demand class and activation regime. Demands are drawn from a
//! stream that depends only on the demand class, so two scenarios that share
//! a demand class see identical demands and differ only in `F`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::bnb::{solve, BnbConfig, SolveError};
use crate::instance::{split_count, validate, RawInstance, SiaInstance, SolveStatus};
use crate::instance_file::RationalLit;
use crate::rational::Rational;

pub const CONFIG_VERSION: u32 = 1;

/// The scenario file shipped with the crate.
pub const DEFAULT_SCENARIOS: &str = include_str!("../config/default_scenarios.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandClass {
    Low,
    High,
    MixedRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationRegime {
    LowF,
    HighF,
    MixedF,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntRange {
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub demand: DemandClass,
    pub activation: ActivationRegime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub replications: u64,
    pub services: IntRange,
    pub num_interfaces: usize,
    pub num_resources: usize,
    pub low_demand: IntRange,
    pub high_demand: IntRange,
    /// Chance that a service in a mixed draw is high-demand.
    pub mixed_high_probability: Rational,
    /// `I x K`, constant across all draws.
    pub unit_cost: Vec<Vec<Rational>>,
    /// `b_ik = max(ceil(factor * D_k / I), max_j d_jk)`.
    pub capacity_factor: Rational,
    pub low_activation: Rational,
    /// High `F` is this multiple of the costliest possible single-service
    /// utilization.
    pub high_activation_multiplier: Rational,
    /// Chance that an interface gets the high `F` under the mixed regime.
    pub mixed_activation_probability: Rational,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Syntax(String),
    #[error("unsupported config version {found}; expected {CONFIG_VERSION}")]
    Version { found: u32 },
    #[error("invalid scenario config: {0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandDoc {
    low: IntRange,
    high: IntRange,
    mixed_high_probability: RationalLit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActivationDoc {
    low: RationalLit,
    high_multiplier: RationalLit,
    mixed_high_probability: RationalLit,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    version: u32,
    seed: u64,
    replications: u64,
    services: IntRange,
    num_interfaces: usize,
    num_resources: usize,
    unit_cost: Vec<Vec<RationalLit>>,
    capacity_factor: RationalLit,
    demand: DemandDoc,
    activation: ActivationDoc,
    scenario: Vec<Scenario>,
}

impl ScenarioSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let doc: SpecDoc = toml::from_str(text).map_err(|e| SpecError::Syntax(e.to_string()))?;
        if doc.version != CONFIG_VERSION {
            return Err(SpecError::Version { found: doc.version });
        }
        let spec = ScenarioSpec {
            seed: doc.seed,
            replications: doc.replications,
            services: doc.services,
            num_interfaces: doc.num_interfaces,
            num_resources: doc.num_resources,
            low_demand: doc.demand.low,
            high_demand: doc.demand.high,
            mixed_high_probability: doc.demand.mixed_high_probability.0,
            unit_cost: doc.unit_cost.into_iter().map(|r| r.into_iter().map(|l| l.0).collect()).collect(),
            capacity_factor: doc.capacity_factor.0,
            low_activation: doc.activation.low.0,
            high_activation_multiplier: doc.activation.high_multiplier.0,
            mixed_activation_probability: doc.activation.mixed_high_probability.0,
            scenarios: doc.scenario,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_SCENARIOS).expect("shipped scenario config is valid")
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |m: String| Err(SpecError::Invalid(m));
        if self.replications == 0 {
            return bad("replications must be positive".into());
        }
        for (name, r) in [("services", self.services), ("demand.low", self.low_demand), ("demand.high", self.high_demand)] {
            if r.min > r.max {
                return bad(format!("{name} range {}..{} is empty", r.min, r.max));
            }
        }
        if self.services.min == 0 {
            return bad("services range must start at 1 or more".into());
        }
        if self.low_demand.min == 0 || self.high_demand.min == 0 {
            return bad("demand ranges must be positive".into());
        }
        if self.num_interfaces == 0 || self.num_resources == 0 {
            return bad("num_interfaces and num_resources must be positive".into());
        }
        if self.unit_cost.len() != self.num_interfaces
            || self.unit_cost.iter().any(|r| r.len() != self.num_resources)
        {
            return bad(format!("unit_cost must be {} rows of {} entries", self.num_interfaces, self.num_resources));
        }
        if self.unit_cost.iter().flatten().any(Rational::is_negative) {
            return bad("unit_cost entries must be nonnegative".into());
        }
        for (name, p) in [
            ("demand.mixed_high_probability", &self.mixed_high_probability),
            ("activation.mixed_high_probability", &self.mixed_activation_probability),
        ] {
            if p.is_negative() || *p > Rational::one() {
                return bad(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.capacity_factor < Rational::one() {
            return bad("capacity_factor must be at least 1".into());
        }
        if self.low_activation.is_negative() || self.high_activation_multiplier.is_negative() {
            return bad("activation costs must be nonnegative".into());
        }
        if self.scenarios.is_empty() {
            return bad("at least one [[scenario]] is required".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.scenarios {
            if s.name.is_empty() || s.name.contains([',', '"', '\n']) {
                return bad(format!("scenario name {:?} must be nonempty plain text", s.name));
            }
            if !seen.insert(&s.name) {
                return bad(format!("duplicate scenario name {:?}", s.name));
            }
        }
        Ok(())
    }

    /// The high-regime `F`: the multiplier times the largest cost any single
    /// service could incur on any single interface, so it dominates every
    /// instance the scenario config can generate.
    pub fn high_activation_cost(&self) -> Rational {
        let worst = self.low_demand.max.max(self.high_demand.max);
        let costliest = self
            .unit_cost
            .iter()
            .map(|row| row.iter().sum::<Rational>() * Rational::from(worst))
            .max()
            .unwrap_or_else(Rational::zero);
        &self.high_activation_multiplier * &costliest
    }

    pub fn service_counts(&self) -> impl Iterator<Item = usize> {
        self.services.min as usize..=self.services.max as usize
    }
}

/// Draw streams; distinct streams never share ChaCha output.
#[derive(Clone, Copy)]
enum Stream {
    Demand(DemandClass),
    Activation,
}

/// Streams ignore the service count: service `j` draws the same demand at
/// every `J`, so the sweep over `J` compares nested instances.
fn rng_for(seed: u64, replication: u64, stream: Stream) -> ChaCha8Rng {
    let tag: u64 = match stream {
        Stream::Demand(DemandClass::Low) => 0,
        Stream::Demand(DemandClass::High) => 1,
        Stream::Demand(DemandClass::MixedRandom) => 2,
        Stream::Activation => 3,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication << 4 ^ tag);
    rng
}

/// `true` with probability `p`, drawn exactly.
fn bernoulli(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    match (p.numer().to_u64(), p.denom().to_u64()) {
        (Some(n), Some(d)) => rng.gen_range(0..d) < n,
        _ => rng.gen_bool(p.to_f64()),
    }
}

fn draw(rng: &mut ChaCha8Rng, r: IntRange) -> i64 {
    rng.gen_range(r.min..=r.max) as i64
}

/// The instance for replication `replication` at `services` services.
pub fn generate_instance(spec: &ScenarioSpec, scenario: &Scenario, services: usize, replication: u64) -> SiaInstance {
    let (ni, nk) = (spec.num_interfaces, spec.num_resources);
    let mut rng = rng_for(spec.seed, replication, Stream::Demand(scenario.demand));
    let demand: Vec<Vec<i64>> = (0..services)
        .map(|_| {
            let range = match scenario.demand {
                DemandClass::Low => spec.low_demand,
                DemandClass::High => spec.high_demand,
                DemandClass::MixedRandom if bernoulli(&mut rng, &spec.mixed_high_probability) => spec.high_demand,
                DemandClass::MixedRandom => spec.low_demand,
            };
            (0..nk).map(|_| draw(&mut rng, range)).collect()
        })
        .collect();

    let capacity: Vec<Vec<i64>> = (0..ni)
        .map(|_| {
            (0..nk)
                .map(|k| {
                    let total: i64 = demand.iter().map(|d| d[k]).sum();
                    let largest = demand.iter().map(|d| d[k]).max().unwrap_or(0);
                    let share = (&spec.capacity_factor * &Rational::from_int(total) / Rational::from(ni as u64)).ceil();
                    share.to_i64().expect("capacity fits in i64").max(largest)
                })
                .collect()
        })
        .collect();

    let high = spec.high_activation_cost();
    let mut frng = rng_for(spec.seed, replication, Stream::Activation);
    let activation_cost: Vec<Rational> = (0..ni)
        .map(|_| match scenario.activation {
            ActivationRegime::LowF => spec.low_activation.clone(),
            ActivationRegime::HighF => high.clone(),
            ActivationRegime::MixedF if bernoulli(&mut frng, &spec.mixed_activation_probability) => high.clone(),
            ActivationRegime::MixedF => spec.low_activation.clone(),
        })
        .collect();

    validate(RawInstance {
        num_interfaces: ni,
        num_services: services,
        num_resources: nk,
        demand,
        capacity,
        unit_cost: spec.unit_cost.clone(),
        activation_cost,
        overhead: None,
    })
    .expect("generated instances are well formed")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub num_services: usize,
    pub scenario: String,
    pub replication: u64,
    pub status: SolveStatus,
    /// Present when a feasible allocation was found.
    pub objective: Option<Rational>,
    pub splits: Option<u64>,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub num_services: usize,
    pub scenario: String,
    /// Mean over proven optima only; `None` when nothing was solved.
    pub mean_cost: Option<Rational>,
    pub mean_splits: Option<Rational>,
    pub replications: u64,
    pub unsolved: u64,
    pub status_tally: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
    pub records: Vec<Record>,
}

impl BenchReport {
    pub fn row(&self, num_services: usize, scenario: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.num_services == num_services && r.scenario == scenario)
    }

    pub fn unsolved(&self) -> u64 {
        self.rows.iter().map(|r| r.unsolved).sum()
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.replications).sum()
    }

    /// Rows aggregated from per-replication records, in record order.
    pub fn from_records(records: Vec<Record>) -> Self {
        let mut rows: Vec<ReportRow> = Vec::new();
        let mut sums: Vec<(Rational, u64)> = Vec::new();
        for rec in &records {
            let pos = match rows.iter().position(|r| r.num_services == rec.num_services && r.scenario == rec.scenario) {
                Some(p) => p,
                None => {
                    rows.push(ReportRow {
                        num_services: rec.num_services,
                        scenario: rec.scenario.clone(),
                        mean_cost: None,
                        mean_splits: None,
                        replications: 0,
                        unsolved: 0,
                        status_tally: BTreeMap::new(),
                    });
                    sums.push((Rational::zero(), 0));
                    rows.len() - 1
                }
            };
            let row = &mut rows[pos];
            row.replications += 1;
            *row.status_tally.entry(rec.status.to_string()).or_insert(0) += 1;
            match (rec.status, &rec.objective, rec.splits) {
                (SolveStatus::Optimal, Some(obj), Some(splits)) => {
                    sums[pos].0 += obj;
                    sums[pos].1 += splits;
                }
                _ => row.unsolved += 1,
            }
        }
        for (row, (cost, splits)) in rows.iter_mut().zip(sums) {
            let solved = row.replications - row.unsolved;
            if solved > 0 {
                let n = Rational::from(solved);
                row.mean_cost = Some(&cost / &n);
                row.mean_splits = Some(Rational::from(splits) / n);
            }
        }
        BenchReport { rows, records }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{unsolved} of {total} replications hit a solver limit (more than 1%); the report is invalid")]
    TooManyUnsolved { unsolved: u64, total: u64, report: Box<BenchReport> },
    #[error("generated instance for {scenario}, J={services}, replication {replication} failed: {source}")]
    Solve { scenario: String, services: usize, replication: u64, source: SolveError },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn run_one(spec: &ScenarioSpec, scenario: &Scenario, services: usize, replication: u64, config: &BnbConfig) -> Result<Record, BenchError> {
    let instance = generate_instance(spec, scenario, services, replication);
    let record = |status, objective, splits, nodes| Record {
        num_services: services,
        scenario: scenario.name.clone(),
        replication,
        status,
        objective,
        splits,
        nodes,
    };
    match solve(&instance, config) {
        Ok(sol) => Ok(record(sol.status(), Some(sol.objective().clone()), Some(split_count(&sol)), sol.stats().nodes)),
        Err(SolveError::NoIncumbent { status, .. }) => Ok(record(status, None, None, config.node_limit)),
        Err(source) => Err(BenchError::Solve { scenario: scenario.name.clone(), services, replication, source }),
    }
}

/// Solves every replication of every scenario. `jobs` is the worker count;
/// results do not depend on it.
pub fn run_benchmark(spec: &ScenarioSpec, config: &BnbConfig, jobs: usize) -> Result<BenchReport, BenchError> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for services in spec.service_counts() {
        for scenario in &spec.scenarios {
            for replication in 0..spec.replications {
                tasks.push((scenario, services, replication));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    let records = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(scenario, services, replication)| run_one(spec, scenario, services, replication, config))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let report = BenchReport::from_records(records);
    let (unsolved, total) = (report.unsolved(), report.total());
    if unsolved * 100 > total {
        return Err(BenchError::TooManyUnsolved { unsolved, total, report: Box::new(report) });
    }
    Ok(report)
}

pub const CSV_HEADER: &str = "num_services,scenario,mean_cost,mean_splits,replications,unsolved";

fn mean_text(q: &Option<Rational>) -> String {
    q.as_ref().map_or(String::new(), |q| q.to_decimal(6))
}

/// One row per `(J, scenario)` with means rounded to six places.
pub fn report_csv(report: &BenchReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.num_services,
            r.scenario,
            mean_text(&r.mean_cost),
            mean_text(&r.mean_splits),
            r.replications,
            r.unsolved
        );
    }
    out
}

/// Per-replication records; objectives stay exact.
pub fn records_csv(report: &BenchReport) -> String {
    let mut out = String::from("num_services,scenario,replication,status,objective,splits,nodes\n");
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.num_services,
            r.scenario,
            r.replication,
            r.status,
            r.objective.as_ref().map_or(String::new(), |q| q.to_string()),
            r.splits.map_or(String::new(), |s| s.to_string()),
            r.nodes
        );
    }
    out
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A tick step of 1, 2 or 5 times a power of ten giving at most ~6 ticks.
fn nice_step(span: f64) -> f64 {
    let raw = (span / 5.0).max(1e-9);
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

/// Line chart of a per-row metric against `J`, one series per scenario.
pub fn line_chart_svg(report: &BenchReport, title: &str, y_label: &str, metric: impl Fn(&ReportRow) -> Option<f64>) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 60.0);
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &report.rows {
        let Some(y) = metric(r) else { continue };
        match series.iter_mut().find(|(n, _)| *n == r.scenario) {
            Some((_, pts)) => pts.push((r.num_services as f64, y)),
            None => series.push((r.scenario.clone(), vec![(r.num_services as f64, y)])),
        }
    }
    let xs = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0));
    let ys = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1));
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let y1 = ys.fold(0.0f64, f64::max);
    let (x0, x1) = if x0.is_finite() { (x0, x1.max(x0 + 1.0)) } else { (0.0, 1.0) };
    let ystep = nice_step(if y1 > 0.0 { y1 } else { 1.0 });
    let y1 = (y1 / ystep).ceil().max(1.0) * ystep;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - y / y1 * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, (left + w - right) / 2.0, escape(title));
    let _ = writeln!(s, r#"<g stroke="black"><line x1="{left}" y1="{}" x2="{}" y2="{}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{}"/></g>"#,
        h - bottom, w - right, h - bottom, h - bottom);
    let mut x = x0;
    while x <= x1 + 1e-9 {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{x}</text>"#, px(x), h - bottom + 18.0);
        x += 1.0;
    }
    let mut y = 0.0;
    while y <= y1 + 1e-9 {
        let _ = writeln!(s, r##"<line x1="{left}" y1="{0:.1}" x2="{1}" y2="{0:.1}" stroke="#dddddd"/>"##, py(y), w - right);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, left - 6.0, py(y) + 4.0, trim_float(y));
        y += ystep;
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">Number of services</text>"#, (left + w - right) / 2.0, h - 18.0);
    let _ = writeln!(s, r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#, (top + h - bottom) / 2.0, escape(y_label));
    for (n, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, path.join(" "));
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, px(x), py(y));
        }
        let ly = top + 10.0 + 20.0 * n as f64;
        let _ = writeln!(s, r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, w - right + 15.0, w - right + 40.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w - right + 46.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

fn trim_float(v: f64) -> String {
    let t = format!("{v:.3}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn cost_chart(report: &BenchReport) -> String {
    line_chart_svg(report, "Total cost vs number of services", "Mean total cost", |r| r.mean_cost.as_ref().map(Rational::to_f64))
}

pub fn splits_chart(report: &BenchReport) -> String {
    line_chart_svg(report, "Number of splits vs number of services", "Mean splits", |r| r.mean_splits.as_ref().map(Rational::to_f64))
}

/// Writes `report.csv`, `records.csv` and both charts into `dir`, returning
/// the paths written.
pub fn emit_report(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.display().to_string(), source })?;
    let files = [
        ("report.csv", report_csv(report)),
        ("records.csv", records_csv(report)),
        ("cost_vs_services.svg", cost_chart(report)),
        ("splits_vs_services.svg", splits_chart(report)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|source| BenchError::Io { path: path.display().to_string(), source })?;
        written.push(path);
    }
    Ok(written)
}
