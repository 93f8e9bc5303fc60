//! One-factor-at-a-time sensitivity sweeps and the docked vs dockless
//! capacity comparison.
//!
//! Every scenario starts from the base instance with the sweep defaults
//! pinned (trike count, fleet size, handling cost, price), then changes the
//! one parameter on the grid axis. Scenarios run on a bounded thread pool and
//! come back in grid order, so output does not depend on the worker count.

use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flows::FlowSolution;
use crate::instance::{scale_fleet, Cents, DemandTensor, Instance, Mode, TrikePlacement};
use crate::metrics::{compute_metrics, round_to, ScenarioMetrics};
use crate::pipeline::solve_instance;
use crate::solver::{MilpLimits, MilpStatus};

/// Revenues closer than this are treated as equal.
pub const REVENUE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    TrikeCount,
    BikeCount,
    /// Per-bike loading plus unloading cost, in currency units.
    HandlingCost,
    /// Unit price per tariff block, in currency units.
    Price,
    DockCap,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::TrikeCount => "trike_count",
            Axis::BikeCount => "bike_count",
            Axis::HandlingCost => "handling_cost",
            Axis::Price => "price",
            Axis::DockCap => "dock_cap",
        }
    }

    fn integral(self) -> bool {
        matches!(self, Axis::TrikeCount | Axis::BikeCount | Axis::DockCap)
    }
}

/// Values every scenario is pinned to apart from its own axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub trikes: u32,
    pub bikes: u64,
    pub handling_cost: f64,
    pub price: f64,
}

impl Defaults {
    /// Two trikes, 899 bikes, 0.5 handling, price 1.
    pub fn reference() -> Self {
        Self { trikes: 2, bikes: 899, handling_cost: 0.5, price: 1.0 }
    }

    /// The base instance's own values, for grids over synthetic instances
    /// whose fleet is nowhere near the reference size.
    pub fn from_instance(instance: &Instance) -> Self {
        Self {
            trikes: instance.trike_count,
            bikes: instance.total_bikes(),
            handling_cost: instance.cost_model.handling_per_bike.to_currency(),
            price: instance.tariff.unit_price.to_currency(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGrid {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub defaults: Defaults,
}

impl ScenarioGrid {
    pub fn new(axis: Axis, values: Vec<f64>, defaults: Defaults) -> Self {
        Self { axis, values, defaults }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(invalid("a sweep needs at least one value"));
        }
        for &v in &self.values {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(format!("sweep value {v} must be finite and nonnegative")));
            }
            if self.axis.integral() && v.fract() != 0.0 {
                return Err(invalid(format!("{} values must be whole numbers, got {v}", self.axis.name())));
            }
            if self.axis == Axis::Price && v == 0.0 {
                return Err(invalid("price must be positive"));
            }
        }
        if self.defaults.price <= 0.0 || self.defaults.handling_cost < 0.0 {
            return Err(invalid("default price must be positive and handling cost nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub price: f64,
    pub factor: f64,
}

/// Piecewise-linear demand multiplier over price. An empty table is the
/// identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DemandResponse {
    pub points: Vec<ResponsePoint>,
}

impl DemandResponse {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let response: Self = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        response.validate()?;
        Ok(response)
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if !p.price.is_finite() || !(0.0..=1.0).contains(&p.factor) {
                return Err(invalid("response factors must lie in [0, 1] at finite prices"));
            }
        }
        for w in self.points.windows(2) {
            if w[1].price <= w[0].price {
                return Err(invalid("response prices must be strictly increasing"));
            }
            if w[1].factor > w[0].factor {
                return Err(invalid("response factors must not increase with price"));
            }
        }
        Ok(())
    }

    /// Interpolated factor and whether `price` had to be clamped into the
    /// table's range.
    pub fn factor(&self, price: f64) -> (f64, bool) {
        let (first, last) = match (self.points.first(), self.points.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return (1.0, false),
        };
        if price < first.price {
            return (first.factor, true);
        }
        if price > last.price {
            return (last.factor, true);
        }
        for w in self.points.windows(2) {
            if price <= w[1].price {
                let s = (price - w[0].price) / (w[1].price - w[0].price);
                return (w[0].factor + s * (w[1].factor - w[0].factor), false);
            }
        }
        (last.factor, false)
    }
}

/// Scales every demand entry by the response at `price`, rounding half to
/// even. Prices outside the table are clamped with a warning.
pub fn apply_demand_response(demand: &DemandTensor, price: f64, response: &DemandResponse) -> Result<DemandTensor> {
    response.validate()?;
    let (factor, clamped) = response.factor(price);
    if clamped {
        warn!("price {price} is outside the demand response table; using the nearest endpoint factor {factor}");
    }
    if factor == 1.0 {
        return Ok(demand.clone());
    }
    Ok(demand.map_counts(|c| (c as f64 * factor).round_ties_even() as u32))
}

/// The base instance with all defaults applied, before any axis change.
pub fn pinned_instance(base: &Instance, defaults: &Defaults, response: &DemandResponse) -> Result<Instance> {
    let mut inst = base.clone();
    set_trikes(&mut inst, defaults.trikes)?;
    inst.initial_bikes = scale_fleet(&base.initial_bikes, defaults.bikes)?;
    inst.cost_model.handling_per_bike = Cents::from_currency(defaults.handling_cost);
    inst.cost_model.handling_by_pair = None;
    inst.tariff.unit_price = Cents::from_currency(defaults.price);
    inst.demand = apply_demand_response(&base.demand, defaults.price, response)?;
    Ok(inst)
}

fn set_trikes(inst: &mut Instance, count: u32) -> Result<()> {
    if let TrikePlacement::Fixed { counts } = &inst.trike_placement {
        let placed: u64 = counts.iter().map(|&c| c as u64).sum();
        if placed != count as u64 {
            return Err(invalid("changing the trike count needs free trike placement"));
        }
    }
    inst.trike_count = count;
    Ok(())
}

/// The instance for one grid value.
pub fn scenario_instance(base: &Instance, grid: &ScenarioGrid, value: f64, response: &DemandResponse) -> Result<Instance> {
    let mut inst = pinned_instance(base, &grid.defaults, response)?;
    match grid.axis {
        Axis::TrikeCount => set_trikes(&mut inst, value as u32)?,
        Axis::BikeCount => inst.initial_bikes = scale_fleet(&base.initial_bikes, value as u64)?,
        Axis::HandlingCost => inst.cost_model.handling_per_bike = Cents::from_currency(value),
        Axis::Price => {
            inst.tariff.unit_price = Cents::from_currency(value);
            inst.demand = apply_demand_response(&base.demand, value, response)?;
        }
        Axis::DockCap => inst.mode = Mode::uniform_cap(inst.num_sites(), value as u32),
    }
    Ok(inst)
}

/// Names of the parameters in which `scenario` differs from `reference`
/// that the axis does not account for. Empty for a valid scenario.
pub fn one_factor_violations(reference: &Instance, scenario: &Instance, axis: Axis) -> Vec<&'static str> {
    let mut differs = Vec::new();
    let mut check = |name: &'static str, same: bool| {
        if !same {
            differs.push(name);
        }
    };
    check("trike_count", reference.trike_count == scenario.trike_count);
    check("initial_bikes", reference.initial_bikes == scenario.initial_bikes);
    check("cost_model", reference.cost_model == scenario.cost_model);
    check("tariff", reference.tariff == scenario.tariff);
    check("demand", reference.demand == scenario.demand);
    check("mode", reference.mode == scenario.mode);
    check("trike_placement", reference.trike_placement == scenario.trike_placement);
    check("site_graph", reference.site_graph == scenario.site_graph);
    check("time_grid", reference.time_grid == scenario.time_grid);
    check(
        "speeds",
        reference.bike_speed_kmh == scenario.bike_speed_kmh && reference.trike_speed_kmh == scenario.trike_speed_kmh,
    );
    let allowed: &[&str] = match axis {
        Axis::TrikeCount => &["trike_count"],
        Axis::BikeCount => &["initial_bikes"],
        Axis::HandlingCost => &["cost_model"],
        Axis::Price => &["tariff", "demand"],
        Axis::DockCap => &["mode"],
    };
    differs.retain(|name| !allowed.contains(name));
    differs
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub index: usize,
    pub axis: Axis,
    pub value: f64,
    pub status: MilpStatus,
    /// Objective including fixed trike cost; absent without an incumbent.
    pub objective: Option<f64>,
    pub bound: f64,
    pub gap: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub max_residual: Option<f64>,
    pub metrics: Option<ScenarioMetrics>,
    /// Why no solve happened, e.g. dock caps below the initial stock.
    pub note: Option<String>,
    #[serde(skip)]
    pub flows: Option<FlowSolution>,
}

fn solve_scenario(index: usize, axis: Axis, value: f64, instance: &Instance, limits: &MilpLimits) -> Result<ScenarioResult> {
    let mut result = ScenarioResult {
        index,
        axis,
        value,
        status: MilpStatus::Infeasible,
        objective: None,
        bound: f64::NEG_INFINITY,
        gap: f64::INFINITY,
        nodes: 0,
        lp_iterations: 0,
        max_residual: None,
        metrics: None,
        note: None,
        flows: None,
    };
    let solved = match solve_instance(instance, limits) {
        Ok(s) => s,
        Err(Error::InfeasibleByConstruction(why)) => {
            result.note = Some(why);
            return Ok(result);
        }
        Err(e) => return Err(e),
    };
    let sol = &solved.solution;
    result.status = sol.status;
    result.bound = sol.bound;
    result.gap = sol.gap;
    result.nodes = sol.nodes;
    result.lp_iterations = sol.lp_iterations;
    if let Some(flows) = solved.flows {
        result.objective = Some(sol.objective);
        result.max_residual = solved.verification.as_ref().map(|r| r.max_residual());
        result.metrics = Some(compute_metrics(instance, &flows)?);
        result.flows = Some(flows);
    }
    Ok(result)
}

fn run_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Solves every grid value on `workers` threads; results are in grid order.
/// Scenarios stopped by a limit are returned with their status and gap.
pub fn run_sweep(
    base: &Instance,
    grid: &ScenarioGrid,
    limits: &MilpLimits,
    response: &DemandResponse,
    workers: usize,
) -> Result<Vec<ScenarioResult>> {
    grid.validate()?;
    response.validate()?;
    let reference = pinned_instance(base, &grid.defaults, response)?;
    let mut instances = Vec::with_capacity(grid.values.len());
    for &v in &grid.values {
        let inst = scenario_instance(base, grid, v, response)?;
        let stray = one_factor_violations(&reference, &inst, grid.axis);
        if !stray.is_empty() {
            return Err(invalid(format!("scenario {} = {v} also changes {}", grid.axis.name(), stray.join(", "))));
        }
        instances.push(inst);
    }
    let axis = grid.axis;
    run_pool(workers, || {
        instances
            .par_iter()
            .zip(grid.values.par_iter())
            .enumerate()
            .map(|(k, (inst, &v))| solve_scenario(k, axis, v, inst, limits))
            .collect::<Result<Vec<_>>>()
    })?
}

/// One flat row per scenario, appendable across runs. Currency in cents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub run_id: String,
    pub index: usize,
    pub axis: String,
    pub value: f64,
    pub status: String,
    pub gap: Option<f64>,
    pub nodes: u64,
    pub revenue_cents: Option<i64>,
    pub revenue_excluding_fixed_cents: Option<i64>,
    pub profit_after_bike_amortization_cents: Option<i64>,
    pub satisfaction_level: Option<f64>,
    pub total_demand: Option<u64>,
    pub met_demand: Option<f64>,
    pub relocation_bike_count: Option<f64>,
    pub trike_distance_km: Option<f64>,
}

pub fn status_label(status: &MilpStatus) -> &'static str {
    match status {
        MilpStatus::Optimal => "optimal",
        MilpStatus::Feasible { .. } => "feasible",
        MilpStatus::Infeasible => "infeasible",
        MilpStatus::LimitReached => "limit_reached",
        MilpStatus::Unbounded => "unbounded",
        MilpStatus::NumericalFailure => "numerical_failure",
    }
}

impl SweepRecord {
    pub fn new(run_id: &str, r: &ScenarioResult) -> Self {
        let m = r.metrics.as_ref();
        Self {
            run_id: run_id.to_string(),
            index: r.index,
            axis: r.axis.name().to_string(),
            value: r.value,
            status: status_label(&r.status).to_string(),
            gap: r.gap.is_finite().then(|| round_to(r.gap, 9)),
            nodes: r.nodes,
            revenue_cents: m.map(|m| Cents::from_currency(m.revenue).0),
            revenue_excluding_fixed_cents: m.map(|m| Cents::from_currency(m.revenue_excluding_fixed).0),
            profit_after_bike_amortization_cents: m.map(|m| Cents::from_currency(m.profit_after_bike_amortization).0),
            satisfaction_level: m.map(|m| round_to(m.satisfaction_level, 9)),
            total_demand: m.map(|m| m.total_demand),
            met_demand: m.map(|m| round_to(m.met_demand, 6)),
            relocation_bike_count: m.map(|m| round_to(m.relocation_bike_count, 6)),
            trike_distance_km: m.map(|m| round_to(m.trike_distance_km, 6)),
        }
    }
}

pub fn write_sweep_records(out: impl Write, records: &[SweepRecord], header: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Appends to `path`, writing the header only when the file is new or empty.
pub fn append_sweep_records(path: impl AsRef<Path>, records: &[SweepRecord]) -> Result<()> {
    let path = path.as_ref();
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    write_sweep_records(file, records, fresh)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsSpec {
    #[serde(default = "default_time_limit")]
    pub time_limit_s: f64,
    #[serde(default = "default_node_limit")]
    pub node_limit: u64,
    #[serde(default = "default_gap")]
    pub gap: f64,
}

fn default_time_limit() -> f64 {
    300.0
}

fn default_node_limit() -> u64 {
    1_000_000
}

fn default_gap() -> f64 {
    1e-6
}

impl Default for LimitsSpec {
    fn default() -> Self {
        Self { time_limit_s: default_time_limit(), node_limit: default_node_limit(), gap: default_gap() }
    }
}

impl LimitsSpec {
    pub fn to_limits(&self) -> Result<MilpLimits> {
        if !(self.time_limit_s > 0.0) || !(self.gap >= 0.0) {
            return Err(invalid("time limit must be positive and gap nonnegative"));
        }
        Ok(MilpLimits {
            time_limit: Duration::from_secs_f64(self.time_limit_s),
            node_limit: self.node_limit,
            gap: self.gap,
            ..MilpLimits::default()
        })
    }
}

/// A sweep described in a JSON file. Paths are relative to the working
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub instance: PathBuf,
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Defaults to the base instance's own values.
    #[serde(default)]
    pub defaults: Option<Defaults>,
    #[serde(default)]
    pub demand_response: Option<DemandResponse>,
    #[serde(default)]
    pub limits: LimitsSpec,
    pub output: PathBuf,
    /// Defaults to the spec file's stem.
    #[serde(default)]
    pub run_id: Option<String>,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut spec: Self = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if spec.run_id.is_none() {
            spec.run_id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(spec)
    }

    pub fn grid(&self, base: &Instance) -> ScenarioGrid {
        let defaults = self.defaults.unwrap_or_else(|| Defaults::from_instance(base));
        ScenarioGrid::new(self.axis, self.values.clone(), defaults)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapOutcome {
    /// `None` leaves every site uncapped.
    pub cap: Option<u32>,
    pub status: MilpStatus,
    pub revenue: Option<f64>,
    pub gap: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DockComparison {
    pub initial_bikes: Vec<u32>,
    pub dockless: CapOutcome,
    /// Largest stock any site holds in the dockless optimum.
    pub dockless_max_stock: Option<f64>,
    pub caps: Vec<CapOutcome>,
    /// Smallest cap whose revenue matches the dockless revenue.
    pub converged_at: Option<Option<u32>>,
    /// Revenue never drops as the cap grows, over the caps that solved.
    pub monotone: bool,
}

/// Largest-remainder downscale so no site starts above `max_per_site`.
pub fn downscale_fleet(b0: &[u32], max_per_site: u32) -> Result<Vec<u32>> {
    let max = b0.iter().copied().max().unwrap_or(0);
    if max <= max_per_site {
        return Ok(b0.to_vec());
    }
    let total: u64 = b0.iter().map(|&b| b as u64).sum();
    let mut target = total * max_per_site as u64 / max as u64;
    loop {
        let scaled = scale_fleet(b0, target)?;
        if scaled.iter().all(|&b| b <= max_per_site) {
            return Ok(scaled);
        }
        target -= 1;
    }
}

fn cap_outcome(cap: Option<u32>, r: &ScenarioResult) -> CapOutcome {
    CapOutcome { cap, status: r.status, revenue: r.objective, gap: r.gap, note: r.note.clone() }
}

/// Solves the dockless reference and each cap (caps ascending, `None` last
/// as the uncapped sentinel) after shrinking the fleet to `max_per_site`.
pub fn compare_dock(
    base: &Instance,
    caps: &[Option<u32>],
    max_per_site: u32,
    limits: &MilpLimits,
    workers: usize,
) -> Result<DockComparison> {
    let key = |c: &Option<u32>| c.map_or(u64::MAX, |v| v as u64);
    if caps.windows(2).any(|w| key(&w[0]) > key(&w[1])) {
        return Err(invalid("caps must be sorted ascending"));
    }
    let mut reference = base.clone();
    reference.initial_bikes = downscale_fleet(&base.initial_bikes, max_per_site)?;
    reference.mode = Mode::Dockless;
    let mut instances = vec![reference.clone()];
    for cap in caps {
        let mut inst = reference.clone();
        inst.mode = Mode::Docked { caps: vec![*cap; inst.num_sites()] };
        instances.push(inst);
    }
    let results = run_pool(workers, || {
        instances
            .par_iter()
            .enumerate()
            .map(|(k, inst)| {
                let value = if k == 0 { f64::INFINITY } else { key(&caps[k - 1]) as f64 };
                solve_scenario(k, Axis::DockCap, value, inst, limits)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let dockless = cap_outcome(None, &results[0]);
    let dockless_max_stock =
        results[0].flows.as_ref().map(|f| f.bike_stock.iter().flatten().copied().fold(0.0, f64::max));
    let outcomes: Vec<CapOutcome> = caps.iter().zip(&results[1..]).map(|(&c, r)| cap_outcome(c, r)).collect();
    let proven = |o: &CapOutcome| o.status == MilpStatus::Optimal;
    let converged_at = match (proven(&dockless), dockless.revenue) {
        (true, Some(reference)) => outcomes
            .iter()
            .find(|o| proven(o) && o.revenue.is_some_and(|r| (r - reference).abs() <= REVENUE_TOL))
            .map(|o| o.cap),
        _ => None,
    };
    let solved: Vec<f64> = outcomes.iter().filter(|o| proven(o)).filter_map(|o| o.revenue).collect();
    let monotone = solved.windows(2).all(|w| w[0] <= w[1] + REVENUE_TOL);
    Ok(DockComparison {
        initial_bikes: reference.initial_bikes,
        dockless,
        dockless_max_stock,
        caps: outcomes,
        converged_at,
        monotone,
    })
}
