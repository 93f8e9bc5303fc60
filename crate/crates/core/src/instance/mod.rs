//! Problem data: sites, time grid, demand, fleets, tariff and costs.

mod ingest;

pub use ingest::{
    aggregate_demand, grid_assign, ingest, initial_distribution, read_bike_fixes, read_trips,
    AggregatedDemand, BikeFix, CellId, GridSpec, IngestConfig, IngestReport, LatLon, TripRecord,
};

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::timespace::{build_network, SiteGraph, SpaceTimeNetwork, TimeGrid};

pub const DEFAULT_BIKE_SPEED_KMH: f64 = 12.0;
pub const DEFAULT_TRIKE_SPEED_KMH: f64 = 25.0;

/// Currency amount in integer cents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cents(pub i64);

impl Cents {
    pub fn from_currency(value: f64) -> Self {
        Cents((value * 100.0).round() as i64)
    }

    pub fn to_currency(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

/// Rider fare: `unit_price` per started block of `block_minutes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tariff {
    pub unit_price: Cents,
    pub block_minutes: u32,
}

impl Default for Tariff {
    fn default() -> Self {
        Self { unit_price: Cents(100), block_minutes: 15 }
    }
}

impl Tariff {
    pub fn validate(&self) -> Result<()> {
        if self.unit_price.0 <= 0 {
            return Err(invalid("unit_price must be positive"));
        }
        if self.block_minutes == 0 {
            return Err(invalid("block_minutes must be positive"));
        }
        Ok(())
    }
}

/// Fare for a ride of `duration_minutes`, charged per started block.
pub fn fare(duration_minutes: f64, tariff: &Tariff) -> Result<f64> {
    if !(duration_minutes > 0.0) || !duration_minutes.is_finite() {
        return Err(invalid(format!("ride duration must be positive, got {duration_minutes}")));
    }
    tariff.validate()?;
    let blocks = (duration_minutes / tariff.block_minutes as f64 - 1e-9).ceil().max(1.0);
    Ok(blocks * tariff.unit_price.to_currency())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    /// Loading plus unloading cost per relocated bike.
    pub handling_per_bike: Cents,
    /// Optional per-pair handling costs overriding `handling_per_bike`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub handling_by_pair: Option<Vec<Vec<Cents>>>,
    /// Trike operating cost per kilometer driven.
    pub trike_km_rate: Cents,
    /// Bikes one trike can carry per movement.
    pub trike_capacity: u32,
    /// Fixed cost per trike per hour of operation.
    pub trike_fixed_per_hour: Cents,
    /// Purchase cost of one bike amortized per day; applied after solving.
    pub bike_amortized_per_day: Cents,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            handling_per_bike: Cents(50),
            handling_by_pair: None,
            trike_km_rate: Cents(40),
            trike_capacity: 20,
            trike_fixed_per_hour: Cents(7000),
            bike_amortized_per_day: Cents(150),
        }
    }
}

impl CostModel {
    pub fn handling_cost(&self, from: usize, to: usize) -> f64 {
        match &self.handling_by_pair {
            Some(matrix) => matrix[from][to].to_currency(),
            None => self.handling_per_bike.to_currency(),
        }
    }

    pub fn trike_travel_cost(&self, distance_km: f64) -> f64 {
        self.trike_km_rate.to_currency() * distance_km
    }

    fn validate(&self, num_sites: usize) -> Result<()> {
        let amounts = [
            self.handling_per_bike,
            self.trike_km_rate,
            self.trike_fixed_per_hour,
            self.bike_amortized_per_day,
        ];
        if amounts.iter().any(|c| c.0 < 0) {
            return Err(invalid("cost parameters must be nonnegative"));
        }
        if self.trike_capacity == 0 {
            return Err(invalid("trike_capacity must be at least 1"));
        }
        if let Some(matrix) = &self.handling_by_pair {
            if matrix.len() != num_sites || matrix.iter().any(|r| r.len() != num_sites) {
                return Err(invalid("handling_by_pair must be a square site matrix"));
            }
            if matrix.iter().flatten().any(|c| c.0 < 0) {
                return Err(invalid("handling_by_pair entries must be nonnegative"));
            }
        }
        Ok(())
    }
}

/// Rider counts `r[i][j][t]` wanting to ride from `i` to `j` departing in `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SparseDemand", into = "SparseDemand")]
pub struct DemandTensor {
    num_sites: usize,
    num_periods: usize,
    counts: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SparseDemand {
    num_sites: usize,
    num_periods: usize,
    /// `(origin, destination, period, count)`
    entries: Vec<(usize, usize, usize, u32)>,
}

impl From<DemandTensor> for SparseDemand {
    fn from(d: DemandTensor) -> Self {
        let entries = d.entries().collect();
        SparseDemand { num_sites: d.num_sites, num_periods: d.num_periods, entries }
    }
}

impl TryFrom<SparseDemand> for DemandTensor {
    type Error = Error;

    fn try_from(s: SparseDemand) -> Result<Self> {
        let mut d = DemandTensor::zeros(s.num_sites, s.num_periods);
        for (i, j, t, c) in s.entries {
            if i >= s.num_sites || j >= s.num_sites || t >= s.num_periods {
                return Err(invalid(format!("demand entry ({i}, {j}, {t}) out of range")));
            }
            if i == j && c > 0 {
                return Err(invalid(format!("intra-site demand at site {i} is not allowed")));
            }
            d.add(i, j, t, c);
        }
        Ok(d)
    }
}

impl DemandTensor {
    pub fn zeros(num_sites: usize, num_periods: usize) -> Self {
        Self { num_sites, num_periods, counts: vec![0; num_sites * num_sites * num_periods] }
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_periods(&self) -> usize {
        self.num_periods
    }

    fn offset(&self, i: usize, j: usize, t: usize) -> usize {
        (i * self.num_sites + j) * self.num_periods + t
    }

    pub fn get(&self, i: usize, j: usize, t: usize) -> u32 {
        self.counts[self.offset(i, j, t)]
    }

    pub fn set(&mut self, i: usize, j: usize, t: usize, count: u32) {
        assert!(i != j || count == 0, "intra-site demand is not representable");
        let k = self.offset(i, j, t);
        self.counts[k] = count;
    }

    pub fn add(&mut self, i: usize, j: usize, t: usize, count: u32) {
        let current = self.get(i, j, t);
        self.set(i, j, t, current + count);
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Nonzero entries as `(i, j, t, count)` in index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, u32)> + '_ {
        let (n, horizon) = (self.num_sites, self.num_periods);
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(k, &c)| {
            let t = k % horizon;
            let ij = k / horizon;
            (ij / n, ij % n, t, c)
        })
    }

    pub fn map_counts(&self, mut f: impl FnMut(u32) -> u32) -> Self {
        let mut out = self.clone();
        for c in out.counts.iter_mut() {
            *c = f(*c);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrikePlacement {
    /// The optimizer chooses where trikes start.
    Free,
    /// Trike counts per site at period 0.
    Fixed { counts: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Dockless,
    /// Per-site stock caps; `None` leaves that site uncapped.
    Docked { caps: Vec<Option<u32>> },
}

impl Mode {
    pub fn uniform_cap(num_sites: usize, cap: u32) -> Self {
        Mode::Docked { caps: vec![Some(cap); num_sites] }
    }
}

fn default_bike_speed() -> f64 {
    DEFAULT_BIKE_SPEED_KMH
}

fn default_trike_speed() -> f64 {
    DEFAULT_TRIKE_SPEED_KMH
}

fn default_placement() -> TrikePlacement {
    TrikePlacement::Free
}

fn default_mode() -> Mode {
    Mode::Dockless
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub site_graph: SiteGraph,
    pub time_grid: TimeGrid,
    pub demand: DemandTensor,
    pub initial_bikes: Vec<u32>,
    pub trike_count: u32,
    #[serde(default = "default_placement")]
    pub trike_placement: TrikePlacement,
    #[serde(default)]
    pub tariff: Tariff,
    #[serde(default)]
    pub cost_model: CostModel,
    #[serde(default = "default_bike_speed")]
    pub bike_speed_kmh: f64,
    #[serde(default = "default_trike_speed")]
    pub trike_speed_kmh: f64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
}

impl Instance {
    pub fn num_sites(&self) -> usize {
        self.site_graph.len()
    }

    pub fn num_periods(&self) -> usize {
        self.time_grid.num_intervals
    }

    pub fn total_bikes(&self) -> u64 {
        self.initial_bikes.iter().map(|&b| b as u64).sum()
    }

    /// Per-trike fixed cost scaled to the horizon.
    pub fn fixed_cost_per_trike(&self) -> f64 {
        self.cost_model.trike_fixed_per_hour.to_currency() * self.time_grid.horizon_hours()
    }

    /// `n · P_horizon`, the solution-independent part of the objective.
    pub fn fixed_cost(&self) -> f64 {
        self.trike_count as f64 * self.fixed_cost_per_trike()
    }

    pub fn network(&self) -> Result<SpaceTimeNetwork> {
        build_network(&self.site_graph, &self.time_grid, self.bike_speed_kmh, self.trike_speed_kmh)
    }

    /// Fare for a ride from `i` to `j`, priced on the network's bike travel time.
    pub fn ride_fare(&self, ride_periods: usize) -> Result<f64> {
        fare((ride_periods as u64 * self.time_grid.interval_minutes as u64) as f64, &self.tariff)
    }

    /// Checks shapes and the cross-field invariants. Dock caps below the
    /// initial stock are reported by `milp::formulate`, not here.
    pub fn validate(&self) -> Result<()> {
        self.site_graph.validate()?;
        self.time_grid.validate()?;
        self.tariff.validate()?;
        let n = self.num_sites();
        self.cost_model.validate(n)?;
        if self.demand.num_sites() != n || self.demand.num_periods() != self.num_periods() {
            return Err(invalid(format!(
                "demand tensor is {}x{}x{}, expected {n}x{n}x{}",
                self.demand.num_sites(),
                self.demand.num_sites(),
                self.demand.num_periods(),
                self.num_periods()
            )));
        }
        if self.initial_bikes.len() != n {
            return Err(invalid(format!("initial_bikes has {} entries, expected {n}", self.initial_bikes.len())));
        }
        if let TrikePlacement::Fixed { counts } = &self.trike_placement {
            if counts.len() != n {
                return Err(invalid("fixed trike placement must list every site"));
            }
            let placed: u64 = counts.iter().map(|&c| c as u64).sum();
            if placed != self.trike_count as u64 {
                return Err(invalid(format!(
                    "fixed placement puts {placed} trikes but trike_count is {}",
                    self.trike_count
                )));
            }
        }
        if let Mode::Docked { caps } = &self.mode {
            if caps.len() != n {
                return Err(invalid("dock caps must list every site"));
            }
        }
        for speed in [self.bike_speed_kmh, self.trike_speed_kmh] {
            if !(speed > 0.0) || !speed.is_finite() {
                return Err(invalid("speeds must be positive"));
            }
        }
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let instance: Instance = serde_json::from_reader(BufReader::new(file))?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

/// Proportional integer rescaling of a fleet to exactly `target_total`
/// bikes by largest-remainder apportionment; ties go to the lowest index.
pub fn scale_fleet(b0: &[u32], target_total: u64) -> Result<Vec<u32>> {
    let total: u128 = b0.iter().map(|&b| b as u128).sum();
    if total == 0 {
        if target_total == 0 {
            return Ok(vec![0; b0.len()]);
        }
        return Err(invalid("cannot scale an empty fleet to a positive total"));
    }
    let target = target_total as u128;
    let mut seats: Vec<u128> = Vec::with_capacity(b0.len());
    let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(b0.len());
    for (i, &b) in b0.iter().enumerate() {
        let scaled = b as u128 * target;
        seats.push(scaled / total);
        remainders.push((scaled % total, i));
    }
    let assigned: u128 = seats.iter().sum();
    let leftover = (target - assigned) as usize;
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take(leftover) {
        seats[i] += 1;
    }
    seats
        .into_iter()
        .map(|s| u32::try_from(s).map_err(|_| invalid("scaled site count overflows u32")))
        .collect()
}
