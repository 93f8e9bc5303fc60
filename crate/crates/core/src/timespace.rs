//! Discretized spatiotemporal network.
//!
//! Nodes are `(site, period)` pairs with periods `0..=T`. Movement arcs leave
//! a site at period `t` and arrive at another site at `t + τ`, where `τ` is the
//! pair's travel duration rounded up to whole periods. Holding arcs
//! `(i, t) -> (i, t + 1)` are implicit.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform discretization of the analysis horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Wall-clock minutes from midnight at period 0.
    pub start_clock: u32,
    pub interval_minutes: u32,
    /// `T`; stocks exist for periods `0..=T`, departures for `0..T`.
    pub num_intervals: usize,
}

impl TimeGrid {
    pub fn new(start_clock: u32, interval_minutes: u32, num_intervals: usize) -> Result<Self> {
        let grid = Self { start_clock, interval_minutes, num_intervals };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.interval_minutes == 0 {
            return Err(invalid("interval_minutes must be positive"));
        }
        if self.num_intervals == 0 {
            return Err(invalid("num_intervals must be at least 1"));
        }
        Ok(())
    }

    pub fn horizon_minutes(&self) -> u64 {
        self.interval_minutes as u64 * self.num_intervals as u64
    }

    pub fn horizon_hours(&self) -> f64 {
        self.horizon_minutes() as f64 / 60.0
    }

    /// Period containing a wall-clock instant (minutes from midnight), using
    /// half-open intervals. `None` outside `[start, start + horizon)`.
    pub fn period_of(&self, clock_minutes: f64) -> Option<usize> {
        let offset = clock_minutes - self.start_clock as f64;
        if offset < 0.0 {
            return None;
        }
        let period = (offset / self.interval_minutes as f64).floor() as usize;
        (period < self.num_intervals).then_some(period)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: String,
    /// Centroid easting in meters, relative to the grid origin.
    pub x_m: f64,
    /// Centroid northing in meters, relative to the grid origin.
    pub y_m: f64,
}

/// Parking sites plus the pairwise distance matrix (kilometers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteGraph {
    pub sites: Vec<Site>,
    pub distance_km: Vec<Vec<f64>>,
}

impl SiteGraph {
    pub fn new(sites: Vec<Site>, distance_km: Vec<Vec<f64>>) -> Result<Self> {
        let graph = Self { sites, distance_km };
        graph.validate()?;
        Ok(graph)
    }

    /// Fills the distance matrix with straight-line centroid distances.
    pub fn from_centroids(sites: Vec<Site>) -> Result<Self> {
        let distance_km = sites
            .iter()
            .map(|a| {
                sites
                    .iter()
                    .map(|b| (a.x_m - b.x_m).hypot(a.y_m - b.y_m) / 1000.0)
                    .collect()
            })
            .collect();
        Self::new(sites, distance_km)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.sites.len();
        let mut ids: Vec<&str> = self.sites.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("site ids must be unique"));
        }
        if self.distance_km.len() != n || self.distance_km.iter().any(|row| row.len() != n) {
            return Err(invalid(format!("distance matrix must be {n}x{n}")));
        }
        for (i, row) in self.distance_km.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(invalid(format!("distance[{i}][{j}] = {d} is not a finite nonnegative value")));
                }
                if i == j && d != 0.0 {
                    return Err(invalid(format!("distance[{i}][{i}] must be 0")));
                }
                if i != j && d <= 0.0 {
                    return Err(invalid(format!("distance[{i}][{j}] must be positive")));
                }
            }
        }
        Ok(())
    }
}

/// Whole periods needed to cover `distance_km` at `speed_kmh`, never fewer
/// than one.
pub fn travel_periods(distance_km: f64, speed_kmh: f64, interval_minutes: u32) -> Result<usize> {
    if !(distance_km > 0.0) || !distance_km.is_finite() {
        return Err(invalid(format!("distance must be positive, got {distance_km}")));
    }
    if !(speed_kmh > 0.0) || !speed_kmh.is_finite() {
        return Err(invalid(format!("speed must be positive, got {speed_kmh}")));
    }
    if interval_minutes == 0 {
        return Err(invalid("interval_minutes must be positive"));
    }
    let periods = (distance_km * 60.0) / (speed_kmh * interval_minutes as f64);
    // absorb representation error on exact multiples
    let periods = (periods - 1e-9).ceil();
    Ok((periods as usize).max(1))
}

/// A movement arc in the time-expanded graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub depart: usize,
    pub arrive: usize,
}

impl Arc {
    pub fn duration(&self) -> usize {
        self.arrive - self.depart
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeNetwork {
    pub num_sites: usize,
    pub num_periods: usize,
    /// Rider (bike speed) arcs, ordered by `(from, to, depart)`.
    pub ride_arcs: Vec<Arc>,
    /// Trike relocation arcs, ordered by `(from, to, depart)`.
    pub reloc_arcs: Vec<Arc>,
    /// `ride_periods[i][j]`, zero on the diagonal.
    pub ride_periods: Vec<Vec<usize>>,
    pub reloc_periods: Vec<Vec<usize>>,
}

impl SpaceTimeNetwork {
    pub fn node_count(&self) -> usize {
        self.num_sites * (self.num_periods + 1)
    }

    pub fn holding_arc_count(&self) -> usize {
        self.num_sites * self.num_periods
    }

    pub fn movement_arc_count(&self) -> usize {
        self.ride_arcs.len() + self.reloc_arcs.len()
    }
}

pub fn build_network(
    sites: &SiteGraph,
    grid: &TimeGrid,
    bike_speed_kmh: f64,
    trike_speed_kmh: f64,
) -> Result<SpaceTimeNetwork> {
    sites.validate()?;
    grid.validate()?;
    if !(bike_speed_kmh > 0.0) || !(trike_speed_kmh > 0.0) {
        return Err(invalid("speeds must be positive"));
    }
    let n = sites.len();
    let horizon = grid.num_intervals;
    let mut ride_periods = vec![vec![0; n]; n];
    let mut reloc_periods = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = sites.distance_km[i][j];
                ride_periods[i][j] = travel_periods(d, bike_speed_kmh, grid.interval_minutes)?;
                reloc_periods[i][j] = travel_periods(d, trike_speed_kmh, grid.interval_minutes)?;
            }
        }
    }

    let arcs = |periods: &[Vec<usize>]| {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let tau = periods[i][j];
                for t in 0..horizon {
                    if t + tau <= horizon {
                        out.push(Arc { from: i, to: j, depart: t, arrive: t + tau });
                    }
                }
            }
        }
        out
    };

    Ok(SpaceTimeNetwork {
        num_sites: n,
        num_periods: horizon,
        ride_arcs: arcs(&ride_periods),
        reloc_arcs: arcs(&reloc_periods),
        ride_periods,
        reloc_periods,
    })
}
