//! Trip-record ingestion: grid discretization, period bucketing, low-demand
//! filtering and initial bike distribution.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use chrono::{DateTime, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use super::{CostModel, DemandTensor, Instance, Mode, Tariff, TrikePlacement};
use crate::error::{invalid, Error, Result};
use crate::timespace::{Site, SiteGraph, TimeGrid};

const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

/// Square-cell grid anchored at its south-west corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: LatLon,
    pub cell_m: f64,
    pub cols: u32,
    pub rows: u32,
}

/// `(column, row)` of a grid cell; column grows eastward, row northward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellId {
    pub col: u32,
    pub row: u32,
}

impl CellId {
    pub fn label(&self) -> String {
        format!("c{}_{}", self.col, self.row)
    }
}

impl GridSpec {
    /// Local equirectangular projection to (east, north) meters.
    pub fn project(&self, p: LatLon) -> (f64, f64) {
        let lat0 = self.origin.lat.to_radians();
        let east = (p.lon - self.origin.lon).to_radians() * EARTH_RADIUS_M * lat0.cos();
        let north = (p.lat - self.origin.lat).to_radians() * EARTH_RADIUS_M;
        (east, north)
    }

    /// Inverse of [`GridSpec::project`].
    pub fn unproject(&self, east: f64, north: f64) -> LatLon {
        let lat0 = self.origin.lat.to_radians();
        LatLon {
            lat: self.origin.lat + (north / EARTH_RADIUS_M).to_degrees(),
            lon: self.origin.lon + (east / (EARTH_RADIUS_M * lat0.cos())).to_degrees(),
        }
    }

    /// Cell containing a planar offset, using half-open cells
    /// `[k·cell, (k+1)·cell)`.
    pub fn cell_of_offset(&self, east: f64, north: f64) -> Option<CellId> {
        // snap sub-micrometer projection noise onto the boundary
        let col = (east / self.cell_m + 1e-9).floor();
        let row = (north / self.cell_m + 1e-9).floor();
        if col < 0.0 || row < 0.0 || col >= self.cols as f64 || row >= self.rows as f64 {
            return None;
        }
        Some(CellId { col: col as u32, row: row as u32 })
    }

    pub fn centroid(&self, cell: CellId) -> (f64, f64) {
        ((cell.col as f64 + 0.5) * self.cell_m, (cell.row as f64 + 0.5) * self.cell_m)
    }

    fn validate(&self) -> Result<()> {
        if !(self.cell_m > 0.0) || self.cols == 0 || self.rows == 0 {
            return Err(invalid("grid needs a positive cell size and extent"));
        }
        Ok(())
    }
}

/// Grid cell of a coordinate; `None` outside the grid's bounding box.
pub fn grid_assign(point: LatLon, grid: &GridSpec) -> Option<CellId> {
    let (east, north) = grid.project(point);
    grid.cell_of_offset(east, north)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub origin: LatLon,
    pub destination: LatLon,
}

fn clock_minutes(t: &NaiveDateTime) -> f64 {
    t.num_seconds_from_midnight() as f64 / 60.0 + t.nanosecond() as f64 / 6.0e10
}

fn parse_time(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t);
        }
    }
    DateTime::parse_from_rfc3339(s).ok().map(|t| t.naive_local())
}

/// Counts kept per ingestion stage. Every input record lands in exactly one
/// bucket.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records_read: usize,
    pub malformed: usize,
    pub outside_grid: usize,
    pub outside_horizon: usize,
    pub intra_cell: usize,
    pub filtered_low_demand: usize,
    pub retained_trips: usize,
    pub cells_seen: usize,
    pub cells_retained: usize,
    pub bikes_placed: usize,
    pub bikes_excluded: usize,
}

impl IngestReport {
    pub fn dropped(&self) -> usize {
        self.malformed + self.outside_grid + self.outside_horizon + self.intra_cell + self.filtered_low_demand
    }
}

/// Reads trip records from delimiter-separated text with a header row:
/// `start_iso_time,end_iso_time,start_lat,start_lon,end_lat,end_lon`.
/// Malformed rows are skipped and counted.
pub fn read_trips(reader: impl Read) -> Result<(Vec<TripRecord>, usize)> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let headers = csv.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| invalid(format!("trip file is missing the `{name}` column")))
    };
    let idx = [
        col("start_iso_time")?,
        col("end_iso_time")?,
        col("start_lat")?,
        col("start_lon")?,
        col("end_lat")?,
        col("end_lon")?,
    ];
    let mut trips = Vec::new();
    let mut malformed = 0;
    for row in csv.records() {
        let Ok(row) = row else {
            malformed += 1;
            continue;
        };
        let field = |k: usize| row.get(idx[k]).map(str::trim);
        let coord = |k: usize| field(k).and_then(|s| s.parse::<f64>().ok()).filter(|v| v.is_finite());
        let parsed = (|| {
            let start = parse_time(field(0)?)?;
            let end = parse_time(field(1)?)?;
            let origin = LatLon { lat: coord(2)?, lon: coord(3)? };
            let destination = LatLon { lat: coord(4)?, lon: coord(5)? };
            (end > start).then_some(TripRecord { start, end, origin, destination })
        })();
        match parsed {
            Some(trip) => trips.push(trip),
            None => malformed += 1,
        }
    }
    Ok((trips, malformed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BikeFix {
    pub bike_id: String,
    pub time: NaiveDateTime,
    pub position: LatLon,
}

/// Reads GPS fixes with header `bike_id,time,lat,lon`.
pub fn read_bike_fixes(reader: impl Read) -> Result<(Vec<BikeFix>, usize)> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let headers = csv.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| invalid(format!("bike file is missing the `{name}` column")))
    };
    let idx = [col("bike_id")?, col("time")?, col("lat")?, col("lon")?];
    let mut fixes = Vec::new();
    let mut malformed = 0;
    for row in csv.records() {
        let Ok(row) = row else {
            malformed += 1;
            continue;
        };
        let field = |k: usize| row.get(idx[k]).map(str::trim);
        let parsed = (|| {
            Some(BikeFix {
                bike_id: field(0)?.to_string(),
                time: parse_time(field(1)?)?,
                position: LatLon { lat: field(2)?.parse().ok()?, lon: field(3)?.parse().ok()? },
            })
        })();
        match parsed {
            Some(f) => fixes.push(f),
            None => malformed += 1,
        }
    }
    Ok((fixes, malformed))
}

#[derive(Debug, Clone)]
pub struct AggregatedDemand {
    pub demand: DemandTensor,
    /// Retained cells in site order.
    pub cells: Vec<CellId>,
    pub report: IngestReport,
}

/// Buckets trips by origin cell, destination cell and departure period, then
/// drops cells whose origin-plus-destination trip count is below
/// `min_trips` together with every trip touching them.
pub fn aggregate_demand(
    trips: &[TripRecord],
    grid: &GridSpec,
    time_grid: &TimeGrid,
    min_trips: u32,
) -> Result<AggregatedDemand> {
    grid.validate()?;
    time_grid.validate()?;
    let mut report = IngestReport { records_read: trips.len(), ..Default::default() };

    let mut candidates = Vec::new();
    for trip in trips {
        let (Some(o), Some(d)) = (grid_assign(trip.origin, grid), grid_assign(trip.destination, grid)) else {
            report.outside_grid += 1;
            continue;
        };
        let Some(t) = time_grid.period_of(clock_minutes(&trip.start)) else {
            report.outside_horizon += 1;
            continue;
        };
        if o == d {
            report.intra_cell += 1;
            continue;
        }
        candidates.push((o, d, t));
    }

    let mut totals: BTreeMap<CellId, u64> = BTreeMap::new();
    for &(o, d, _) in &candidates {
        *totals.entry(o).or_default() += 1;
        *totals.entry(d).or_default() += 1;
    }
    report.cells_seen = totals.len();
    let cells: Vec<CellId> =
        totals.iter().filter(|(_, &count)| count >= min_trips as u64).map(|(&c, _)| c).collect();
    report.cells_retained = cells.len();
    let site_of: HashMap<CellId, usize> = cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();

    let mut demand = DemandTensor::zeros(cells.len(), time_grid.num_intervals);
    for (o, d, t) in candidates {
        match (site_of.get(&o), site_of.get(&d)) {
            (Some(&i), Some(&j)) => {
                demand.add(i, j, t, 1);
                report.retained_trips += 1;
            }
            _ => report.filtered_low_demand += 1,
        }
    }
    Ok(AggregatedDemand { demand, cells, report })
}

/// Bikes per retained cell; positions in other cells are excluded.
pub fn initial_distribution(positions: &[LatLon], grid: &GridSpec, cells: &[CellId]) -> Vec<u32> {
    let site_of: HashMap<CellId, usize> = cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut counts = vec![0u32; cells.len()];
    for &p in positions {
        if let Some(&i) = grid_assign(p, grid).and_then(|c| site_of.get(&c)) {
            counts[i] += 1;
        }
    }
    counts
}

/// Last known position per bike at or before the horizon start clock.
fn last_fixes_before(fixes: &[BikeFix], start_clock: u32) -> Vec<LatLon> {
    let mut latest: BTreeMap<&str, &BikeFix> = BTreeMap::new();
    for fix in fixes {
        if clock_minutes(&fix.time) > start_clock as f64 {
            continue;
        }
        let slot = latest.entry(fix.bike_id.as_str()).or_insert(fix);
        if fix.time > slot.time {
            *slot = fix;
        }
    }
    latest.values().map(|f| f.position).collect()
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub grid: GridSpec,
    pub interval_minutes: u32,
    /// Minutes from midnight.
    pub start_clock: u32,
    pub end_clock: u32,
    pub min_trips: u32,
    pub trike_count: u32,
    pub tariff: Tariff,
    pub cost_model: CostModel,
    pub bike_speed_kmh: f64,
    pub trike_speed_kmh: f64,
    /// Abort when more than this share of rows is malformed.
    pub max_malformed_share: f64,
}

impl IngestConfig {
    pub fn new(grid: GridSpec, start_clock: u32, end_clock: u32) -> Self {
        Self {
            grid,
            interval_minutes: 5,
            start_clock,
            end_clock,
            min_trips: 10,
            trike_count: 2,
            tariff: Tariff::default(),
            cost_model: CostModel::default(),
            bike_speed_kmh: super::DEFAULT_BIKE_SPEED_KMH,
            trike_speed_kmh: super::DEFAULT_TRIKE_SPEED_KMH,
            max_malformed_share: 0.5,
        }
    }

    fn time_grid(&self) -> Result<TimeGrid> {
        if self.end_clock <= self.start_clock {
            return Err(invalid("horizon end must be after its start"));
        }
        let span = self.end_clock - self.start_clock;
        if self.interval_minutes == 0 || !span.is_multiple_of(self.interval_minutes) {
            return Err(invalid("horizon length must be a whole number of intervals"));
        }
        TimeGrid::new(self.start_clock, self.interval_minutes, (span / self.interval_minutes) as usize)
    }
}

/// Full pipeline from raw records to a solvable instance.
///
/// Initial bikes come from the last fix of each bike at or before the horizon
/// start when `bikes` is given; otherwise every trip that ended by the horizon
/// start contributes one bike at its destination.
pub fn ingest(trips: impl Read, bikes: Option<&mut dyn Read>, config: &IngestConfig) -> Result<(Instance, IngestReport)> {
    let time_grid = config.time_grid()?;
    let (records, malformed) = read_trips(trips)?;
    let total_rows = records.len() + malformed;
    if total_rows > 0 && malformed as f64 > config.max_malformed_share * total_rows as f64 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{malformed} of {total_rows} trip rows are malformed"),
        });
    }

    let mut agg = aggregate_demand(&records, &config.grid, &time_grid, config.min_trips)?;
    agg.report.records_read = total_rows;
    agg.report.malformed = malformed;

    let positions: Vec<LatLon> = match bikes {
        Some(reader) => {
            let (fixes, _) = read_bike_fixes(reader)?;
            last_fixes_before(&fixes, config.start_clock)
        }
        None => records
            .iter()
            .filter(|t| clock_minutes(&t.end) <= config.start_clock as f64)
            .map(|t| t.destination)
            .collect(),
    };
    let initial_bikes = initial_distribution(&positions, &config.grid, &agg.cells);
    let placed: usize = initial_bikes.iter().map(|&b| b as usize).sum();
    agg.report.bikes_placed = placed;
    agg.report.bikes_excluded = positions.len() - placed;

    let sites = agg
        .cells
        .iter()
        .map(|&cell| {
            let (x_m, y_m) = config.grid.centroid(cell);
            Site { id: cell.label(), x_m, y_m }
        })
        .collect();
    let instance = Instance {
        site_graph: SiteGraph::from_centroids(sites)?,
        time_grid,
        demand: agg.demand,
        initial_bikes,
        trike_count: config.trike_count,
        trike_placement: TrikePlacement::Free,
        tariff: config.tariff,
        cost_model: config.cost_model.clone(),
        bike_speed_kmh: config.bike_speed_kmh,
        trike_speed_kmh: config.trike_speed_kmh,
        mode: Mode::Dockless,
    };
    instance.validate()?;
    Ok((instance, agg.report))
}
