//! Ground truth for tests: an exhaustive optimizer for toy instances and a
//! feasibility checker that reads constraints straight off the instance.
//!
//! Nothing here touches the program builder or the solver. Travel periods
//! and fares are recomputed from the instance fields.

mod verify;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::flows::{FlowSolution, Movement};
use crate::instance::{Instance, Mode, TrikePlacement};

pub use verify::{verify_solution, VerificationReport, FEASIBILITY_TOL};

pub const MAX_SITES: usize = 3;
pub const MAX_PERIODS: usize = 5;
pub const MAX_TRIKES: u32 = 1;
pub const MAX_TRIKE_CAPACITY: u32 = 3;
pub const MAX_DEMAND_ENTRY: u32 = 2;
/// Keeps the stock state space small enough to enumerate.
pub const MAX_TOTAL_BIKES: u64 = 12;

/// Periods to cover `distance_km` at `speed_kmh`, at least one.
pub(crate) fn periods_between(distance_km: f64, speed_kmh: f64, interval_minutes: u32) -> usize {
    let exact = distance_km * 60.0 / (speed_kmh * interval_minutes as f64);
    ((exact - 1e-9).ceil() as i64).max(1) as usize
}

/// Fare per started tariff block for a ride lasting `periods` periods.
pub(crate) fn fare_for(instance: &Instance, periods: usize) -> f64 {
    let minutes = (periods * instance.time_grid.interval_minutes as usize) as f64;
    let block = instance.tariff.block_minutes as f64;
    let blocks = ((minutes / block) - 1e-9).ceil().max(1.0);
    blocks * instance.tariff.unit_price.0 as f64 / 100.0
}

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub objective: f64,
    pub flows: FlowSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Trike {
    Absent,
    At(usize),
    Transit { to: usize, arrive: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    t: usize,
    stock: Vec<u32>,
    /// Bikes arriving at `(period, site)`, flattened period-major.
    pending: Vec<u32>,
    trike: Trike,
}

#[derive(Debug, Clone, Default)]
struct Decision {
    riders: Vec<(usize, usize, u32)>,
    trike_move: Option<(usize, usize)>,
    bikes: u32,
}

struct Search<'a> {
    instance: &'a Instance,
    sites: usize,
    horizon: usize,
    capacity: u32,
    ride_tau: Vec<Vec<usize>>,
    reloc_tau: Vec<Vec<usize>>,
    fare: Vec<Vec<f64>>,
    memo: HashMap<State, (f64, Decision)>,
}

impl Search<'_> {
    fn handling(&self, i: usize, k: usize) -> f64 {
        let cents = match &self.instance.cost_model.handling_by_pair {
            Some(m) => m[i][k].0,
            None => self.instance.cost_model.handling_per_bike.0,
        };
        cents as f64 / 100.0
    }

    fn travel(&self, i: usize, k: usize) -> f64 {
        self.instance.cost_model.trike_km_rate.0 as f64 / 100.0 * self.instance.site_graph.distance_km[i][k]
    }

    fn cap(&self, i: usize) -> Option<u32> {
        match &self.instance.mode {
            Mode::Dockless => None,
            Mode::Docked { caps } => caps[i],
        }
    }

    fn best(&mut self, state: &State) -> f64 {
        if state.t == self.horizon {
            return 0.0;
        }
        if let Some((v, _)) = self.memo.get(state) {
            return *v;
        }
        let t = state.t;
        let s = self.sites;
        let mut rides = Vec::new();
        for i in 0..s {
            for j in 0..s {
                let r = self.instance.demand.get(i, j, t);
                if i != j && r > 0 && t + self.ride_tau[i][j] <= self.horizon {
                    rides.push((i, j, r));
                }
            }
        }
        // (move, max bikes carried)
        let mut trike_options: Vec<Option<(usize, usize)>> = vec![None];
        if let Trike::At(i) = state.trike {
            for k in 0..s {
                if k != i && t + self.reloc_tau[i][k] <= self.horizon {
                    trike_options.push(Some((i, k)));
                }
            }
        }

        let mut best_value = f64::NEG_INFINITY;
        let mut best_decision = Decision::default();
        let mut counts = vec![0u32; rides.len()];
        for &mv in &trike_options {
            let max_bikes = if mv.is_some() { self.capacity } else { 0 };
            for bikes in 0..=max_bikes {
                counts.iter_mut().for_each(|c| *c = 0);
                loop {
                    if let Some((value, next)) = self.evaluate(state, &rides, &counts, mv, bikes) {
                        let total = value + self.best(&next);
                        if total > best_value + 1e-12 {
                            best_value = total;
                            best_decision = Decision {
                                riders: rides
                                    .iter()
                                    .zip(&counts)
                                    .filter(|(_, &c)| c > 0)
                                    .map(|(&(i, j, _), &c)| (i, j, c))
                                    .collect(),
                                trike_move: mv,
                                bikes,
                            };
                        }
                    }
                    // odometer over rider counts
                    let mut pos = 0;
                    while pos < counts.len() && counts[pos] == rides[pos].2 {
                        counts[pos] = 0;
                        pos += 1;
                    }
                    if pos == counts.len() {
                        break;
                    }
                    counts[pos] += 1;
                }
            }
        }
        self.memo.insert(state.clone(), (best_value, best_decision));
        best_value
    }

    /// Immediate profit and successor state, or `None` if more bikes leave a
    /// site than are parked there or a stock exceeds its cap.
    fn evaluate(
        &self,
        state: &State,
        rides: &[(usize, usize, u32)],
        counts: &[u32],
        mv: Option<(usize, usize)>,
        bikes: u32,
    ) -> Option<(f64, State)> {
        let s = self.sites;
        let t = state.t;
        let mut pending = state.pending.clone();
        let mut out = vec![0i64; s];
        let mut value = 0.0;
        for (&(i, j, _), &c) in rides.iter().zip(counts) {
            if c > 0 {
                out[i] += c as i64;
                pending[(t + self.ride_tau[i][j]) * s + j] += c;
                value += self.fare[i][j] * c as f64;
            }
        }
        let mut trike = state.trike;
        if let Some((i, k)) = mv {
            let arrive = t + self.reloc_tau[i][k];
            out[i] += bikes as i64;
            pending[arrive * s + k] += bikes;
            value -= self.handling(i, k) * bikes as f64 + self.travel(i, k);
            trike = Trike::Transit { to: k, arrive };
        }
        let mut stock = Vec::with_capacity(s);
        for i in 0..s {
            // only bikes parked at (i, t) can leave it
            if out[i] > state.stock[i] as i64 {
                return None;
            }
            let next = state.stock[i] as i64 - out[i] + pending[(t + 1) * s + i] as i64;
            if self.cap(i).is_some_and(|c| next > c as i64) {
                return None;
            }
            stock.push(next as u32);
            pending[(t + 1) * s + i] = 0;
        }
        if let Trike::Transit { to, arrive } = trike {
            if arrive == t + 1 {
                trike = Trike::At(to);
            }
        }
        Some((value, State { t: t + 1, stock, pending, trike }))
    }
}

fn check_size(instance: &Instance) -> Result<()> {
    let too_large = |what: String| Err(Error::OracleTooLarge(what));
    if instance.num_sites() > MAX_SITES {
        return too_large(format!("{} sites (max {MAX_SITES})", instance.num_sites()));
    }
    if instance.num_periods() > MAX_PERIODS {
        return too_large(format!("{} periods (max {MAX_PERIODS})", instance.num_periods()));
    }
    if instance.trike_count > MAX_TRIKES {
        return too_large(format!("{} trikes (max {MAX_TRIKES})", instance.trike_count));
    }
    if instance.cost_model.trike_capacity > MAX_TRIKE_CAPACITY {
        return too_large(format!("trike capacity {} (max {MAX_TRIKE_CAPACITY})", instance.cost_model.trike_capacity));
    }
    if let Some((i, j, t, c)) = instance.demand.entries().find(|e| e.3 > MAX_DEMAND_ENTRY) {
        return too_large(format!("demand {c} on ({i}, {j}, {t}) (max {MAX_DEMAND_ENTRY})"));
    }
    if instance.total_bikes() > MAX_TOTAL_BIKES {
        return too_large(format!("{} bikes (max {MAX_TOTAL_BIKES})", instance.total_bikes()));
    }
    Ok(())
}

/// Exact optimum of a toy instance by exhaustive search over every integral
/// trike route (including the starting site) and every integral rider and
/// relocation flow, memoized on the period-by-period state.
pub fn brute_force(instance: &Instance) -> Result<BruteForceResult> {
    instance.validate()?;
    check_size(instance)?;
    let s = instance.num_sites();
    let horizon = instance.num_periods();
    let interval = instance.time_grid.interval_minutes;
    let d = &instance.site_graph.distance_km;
    let ride_tau: Vec<Vec<usize>> =
        (0..s).map(|i| (0..s).map(|j| periods_between(d[i][j], instance.bike_speed_kmh, interval)).collect()).collect();
    let reloc_tau: Vec<Vec<usize>> =
        (0..s).map(|i| (0..s).map(|j| periods_between(d[i][j], instance.trike_speed_kmh, interval)).collect()).collect();
    let fare = ride_tau.iter().map(|row| row.iter().map(|&p| fare_for(instance, p)).collect()).collect();

    for i in 0..s {
        let cap = match &instance.mode {
            Mode::Docked { caps } => caps[i],
            Mode::Dockless => None,
        };
        if cap.is_some_and(|c| instance.initial_bikes[i] > c) {
            return Err(Error::InfeasibleByConstruction(format!("site {i} starts above its dock cap")));
        }
    }

    let starts: Vec<Trike> = if instance.trike_count == 0 {
        vec![Trike::Absent]
    } else {
        match &instance.trike_placement {
            TrikePlacement::Free => (0..s).map(Trike::At).collect(),
            TrikePlacement::Fixed { counts } => {
                vec![Trike::At(counts.iter().position(|&c| c > 0).expect("one trike placed"))]
            }
        }
    };

    let mut search = Search {
        instance,
        sites: s,
        horizon,
        capacity: instance.cost_model.trike_capacity,
        ride_tau,
        reloc_tau,
        fare,
        memo: HashMap::new(),
    };
    let mut best: Option<(f64, State)> = None;
    for trike in starts {
        let state = State { t: 0, stock: instance.initial_bikes.clone(), pending: vec![0; (horizon + 1) * s], trike };
        let v = search.best(&state);
        if best.as_ref().is_none_or(|(b, _)| v > *b + 1e-12) {
            best = Some((v, state));
        }
    }
    let (value, start) = best.expect("at least one start");
    let fixed = instance.trike_count as f64
        * (instance.cost_model.trike_fixed_per_hour.0 as f64 / 100.0)
        * (horizon as f64 * interval as f64 / 60.0);

    // replay the stored decisions
    let mut flows = FlowSolution {
        bike_stock: vec![vec![0.0; horizon + 1]; s],
        trike_stock: vec![vec![0.0; horizon + 1]; s],
        rider_moves: Vec::new(),
        bike_moves: Vec::new(),
        trike_moves: Vec::new(),
    };
    let mut state = start;
    let mut trike_departures: Vec<(usize, usize, usize)> = Vec::new();
    let mut initial_site = None;
    if let Trike::At(i) = state.trike {
        initial_site = Some(i);
    }
    loop {
        for i in 0..s {
            flows.bike_stock[i][state.t] = state.stock[i] as f64;
        }
        if state.t == horizon {
            break;
        }
        let decision = search.memo[&state].1.clone();
        let mut counts = Vec::new();
        let mut rides = Vec::new();
        for &(i, j, c) in &decision.riders {
            rides.push((i, j, c));
            counts.push(c);
            flows.rider_moves.push(Movement { from: i, to: j, depart: state.t, amount: c as f64 });
        }
        if let Some((i, k)) = decision.trike_move {
            trike_departures.push((i, k, state.t));
            flows.trike_moves.push(Movement { from: i, to: k, depart: state.t, amount: 1.0 });
            if decision.bikes > 0 {
                flows.bike_moves.push(Movement { from: i, to: k, depart: state.t, amount: decision.bikes as f64 });
            }
        }
        let (_, next) = search
            .evaluate(&state, &rides, &counts, decision.trike_move, decision.bikes)
            .expect("stored decision is feasible");
        state = next;
    }
    // trike stocks from its route
    if let Some(start_site) = initial_site {
        let mut site = Some(start_site);
        let mut t = 0;
        while t <= horizon {
            match trike_departures.iter().find(|d| d.2 == t) {
                Some(&(from, to, _)) => {
                    flows.trike_stock[from][t] = 1.0;
                    let arrive = t + search.reloc_tau[from][to];
                    site = Some(to);
                    t = arrive;
                }
                None => {
                    if let Some(i) = site {
                        flows.trike_stock[i][t] = 1.0;
                    }
                    t += 1;
                }
            }
        }
    }
    flows.rider_moves.sort_by_key(|m| (m.from, m.to, m.depart));
    Ok(BruteForceResult { objective: value - fixed, flows })
}
