use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{fare_for, periods_between};
use crate::flows::{FlowSolution, Movement};
use crate::instance::{Instance, Mode, TrikePlacement};

/// Largest residual accepted on any row.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Largest distance to an integer accepted on trike quantities.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Residuals per constraint family; all are nonnegative and zero means
/// satisfied exactly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub feasible: bool,
    pub bike_conservation: f64,
    pub trike_conservation: f64,
    /// Departures from a node beyond the stock parked there.
    pub departure_limit: f64,
    pub capacity_coupling: f64,
    pub demand_bound: f64,
    pub initial_state: f64,
    pub dock_caps: f64,
    pub sign: f64,
    pub integrality: f64,
    /// Recomputed objective, including the fixed trike cost.
    pub objective: f64,
    /// Structural problems: wrong dimensions or movements on arcs that do
    /// not exist.
    pub problems: Vec<String>,
}

impl VerificationReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.bike_conservation,
            self.trike_conservation,
            self.departure_limit,
            self.capacity_coupling,
            self.demand_bound,
            self.initial_state,
            self.dock_caps,
            self.sign,
        ]
        .into_iter()
        .fold(0.0, f64::max)
            + 0.0
    }
}

type Key = (usize, usize, usize);

/// Sums movements per `(from, to, depart)`, rejecting arcs outside the
/// lattice.
fn collect(
    moves: &[Movement],
    tau: &[Vec<usize>],
    sites: usize,
    horizon: usize,
    label: &str,
    problems: &mut Vec<String>,
) -> BTreeMap<Key, f64> {
    let mut out = BTreeMap::new();
    for m in moves {
        let valid = m.from < sites && m.to < sites && m.from != m.to && m.depart + tau[m.from][m.to] <= horizon;
        if !valid {
            problems.push(format!("{label} movement {} -> {} at {} is not an arc", m.from, m.to, m.depart));
            continue;
        }
        *out.entry((m.from, m.to, m.depart)).or_insert(0.0) += m.amount;
    }
    out
}

/// Checks `solution` against the instance's constraints, computed from the
/// instance data alone.
pub fn verify_solution(instance: &Instance, solution: &FlowSolution) -> VerificationReport {
    let mut report = VerificationReport::default();
    let s = instance.num_sites();
    let horizon = instance.num_periods();
    let shape_ok = |stocks: &Vec<Vec<f64>>| stocks.len() == s && stocks.iter().all(|r| r.len() == horizon + 1);
    if !shape_ok(&solution.bike_stock) || !shape_ok(&solution.trike_stock) {
        report.problems.push(format!("stocks must be {s} sites by {} periods", horizon + 1));
        report.objective = f64::NAN;
        return report;
    }
    let interval = instance.time_grid.interval_minutes;
    let d = &instance.site_graph.distance_km;
    let ride_tau: Vec<Vec<usize>> =
        (0..s).map(|i| (0..s).map(|j| periods_between(d[i][j], instance.bike_speed_kmh, interval)).collect()).collect();
    let reloc_tau: Vec<Vec<usize>> =
        (0..s).map(|i| (0..s).map(|j| periods_between(d[i][j], instance.trike_speed_kmh, interval)).collect()).collect();

    let mut problems = Vec::new();
    let riders = collect(&solution.rider_moves, &ride_tau, s, horizon, "rider", &mut problems);
    let bikes = collect(&solution.bike_moves, &reloc_tau, s, horizon, "bike", &mut problems);
    let trikes = collect(&solution.trike_moves, &reloc_tau, s, horizon, "trike", &mut problems);
    report.problems = problems;

    // conservation: stock(t+1) = stock(t) - departures(t) + arrivals(t+1)
    let b = &solution.bike_stock;
    let u = &solution.trike_stock;
    for i in 0..s {
        for t in 0..horizon {
            let bike_flow = -departures(&riders, &bikes, i, t)
                + arrivals(&riders, &ride_tau, i, t + 1)
                + arrivals(&bikes, &reloc_tau, i, t + 1);
            let trike_flow = -departures(&trikes, &BTreeMap::new(), i, t) + arrivals(&trikes, &reloc_tau, i, t + 1);
            report.bike_conservation = report.bike_conservation.max((b[i][t + 1] - b[i][t] - bike_flow).abs());
            report.trike_conservation = report.trike_conservation.max((u[i][t + 1] - u[i][t] - trike_flow).abs());
            let bikes_out = departures(&riders, &bikes, i, t);
            let trikes_out = departures(&trikes, &BTreeMap::new(), i, t);
            report.departure_limit = report.departure_limit.max(bikes_out - b[i][t]).max(trikes_out - u[i][t]);
        }
    }

    let a = instance.cost_model.trike_capacity as f64;
    for (&key, &v) in &bikes {
        let w = trikes.get(&key).copied().unwrap_or(0.0);
        report.capacity_coupling = report.capacity_coupling.max(v - a * w);
    }
    for (&(i, j, t), &v) in &riders {
        let r = instance.demand.get(i, j, t) as f64;
        report.demand_bound = report.demand_bound.max(v - r);
    }

    for i in 0..s {
        report.initial_state = report.initial_state.max((b[i][0] - instance.initial_bikes[i] as f64).abs());
    }
    match &instance.trike_placement {
        TrikePlacement::Free => {
            let placed: f64 = (0..s).map(|i| u[i][0]).sum();
            report.initial_state = report.initial_state.max((placed - instance.trike_count as f64).abs());
        }
        TrikePlacement::Fixed { counts } => {
            for i in 0..s {
                report.initial_state = report.initial_state.max((u[i][0] - counts[i] as f64).abs());
            }
        }
    }
    if let Mode::Docked { caps } = &instance.mode {
        for i in 0..s {
            if let Some(cap) = caps[i] {
                for t in 0..=horizon {
                    report.dock_caps = report.dock_caps.max(b[i][t] - cap as f64);
                }
            }
        }
    }

    let all_values = b
        .iter()
        .chain(u)
        .flatten()
        .copied()
        .chain(riders.values().copied())
        .chain(bikes.values().copied())
        .chain(trikes.values().copied());
    for v in all_values {
        if v.is_nan() {
            report.sign = f64::INFINITY;
        }
        report.sign = report.sign.max(-v);
    }
    for v in u.iter().flatten().chain(trikes.values()) {
        report.integrality = report.integrality.max((v - v.round()).abs());
    }

    let handling = |i: usize, k: usize| match &instance.cost_model.handling_by_pair {
        Some(m) => m[i][k].0 as f64 / 100.0,
        None => instance.cost_model.handling_per_bike.0 as f64 / 100.0,
    };
    let km_rate = instance.cost_model.trike_km_rate.0 as f64 / 100.0;
    let revenue: f64 = riders.iter().map(|(&(i, j, _), &v)| fare_for(instance, ride_tau[i][j]) * v).sum();
    let handled: f64 = bikes.iter().map(|(&(i, k, _), &v)| handling(i, k) * v).sum();
    let driven: f64 = trikes.iter().map(|(&(i, k, _), &v)| km_rate * d[i][k] * v).sum();
    let fixed = instance.trike_count as f64
        * (instance.cost_model.trike_fixed_per_hour.0 as f64 / 100.0)
        * (horizon as f64 * interval as f64 / 60.0);
    report.objective = revenue - handled - driven - fixed;

    report.feasible = report.problems.is_empty()
        && report.max_residual() <= FEASIBILITY_TOL
        && report.integrality <= INTEGRALITY_TOL;
    report
}

fn departures(a: &BTreeMap<Key, f64>, b: &BTreeMap<Key, f64>, site: usize, t: usize) -> f64 {
    a.iter().chain(b).filter(|(&(i, _, d), _)| i == site && d == t).map(|(_, v)| v).sum()
}

fn arrivals(moves: &BTreeMap<Key, f64>, tau: &[Vec<usize>], site: usize, t: usize) -> f64 {
    moves.iter().filter(|(&(i, j, d), _)| j == site && d + tau[i][j] == t).map(|(_, v)| v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{CostModel, DemandTensor, Tariff};
    use crate::timespace::{Site, SiteGraph, TimeGrid};

    fn pair() -> Instance {
        let sites = (0..2).map(|i| Site { id: format!("s{i}"), x_m: 0.0, y_m: 0.0 }).collect();
        let mut demand = DemandTensor::zeros(2, 3);
        demand.set(0, 1, 0, 2);
        Instance {
            site_graph: SiteGraph::new(sites, vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            time_grid: TimeGrid::new(420, 5, 3).unwrap(),
            demand,
            initial_bikes: vec![2, 3],
            trike_count: 1,
            trike_placement: TrikePlacement::Free,
            tariff: Tariff::default(),
            cost_model: CostModel { trike_capacity: 2, ..CostModel::default() },
            bike_speed_kmh: 12.0,
            trike_speed_kmh: 25.0,
            mode: Mode::Dockless,
        }
    }

    fn idle(instance: &Instance) -> FlowSolution {
        FlowSolution::idle(instance, &[1, 0])
    }

    #[test]
    fn idle_solution_is_feasible() {
        let inst = pair();
        let r = verify_solution(&inst, &idle(&inst));
        assert!(r.feasible, "{r:?}");
        // fixed cost only: 70 per hour for 15 minutes
        assert!((r.objective + 17.5).abs() < 1e-9);
    }

    #[test]
    fn overloaded_trike_is_reported() {
        let inst = pair();
        let mut f = idle(&inst);
        // trike carries a + 1 = 3 bikes from 0 to 1 departing 0, arriving 1
        f.trike_moves.push(Movement { from: 0, to: 1, depart: 0, amount: 1.0 });
        f.bike_moves.push(Movement { from: 0, to: 1, depart: 0, amount: 3.0 });
        for t in 1..=3 {
            f.trike_stock[0][t] = 0.0;
            f.trike_stock[1][t] = 1.0;
            f.bike_stock[0][t] = -1.0;
            f.bike_stock[1][t] = 6.0;
        }
        let r = verify_solution(&inst, &f);
        assert!(!r.feasible);
        assert!((r.capacity_coupling - 1.0).abs() < 1e-12);
        assert!((r.departure_limit - 1.0).abs() < 1e-12);
        assert!(r.bike_conservation < 1e-12 && r.trike_conservation < 1e-12);
        assert!((r.sign - 1.0).abs() < 1e-12);
    }

    #[test]
    fn riders_over_demand_and_phantom_arcs() {
        let inst = pair();
        let mut f = idle(&inst);
        f.rider_moves.push(Movement { from: 0, to: 1, depart: 0, amount: 3.0 });
        let r = verify_solution(&inst, &f);
        assert!((r.demand_bound - 1.0).abs() < 1e-12);
        assert!(r.bike_conservation > 0.0);

        let mut g = idle(&inst);
        g.rider_moves.push(Movement { from: 0, to: 1, depart: 3, amount: 1.0 });
        let r = verify_solution(&inst, &g);
        assert!(!r.feasible);
        assert_eq!(r.problems.len(), 1);
    }

    #[test]
    fn swapping_trikes_that_do_not_exist_is_caught() {
        // no trikes, yet two cross in the same period: balances hold
        let mut inst = pair();
        inst.trike_count = 0;
        let mut f = FlowSolution::idle(&inst, &[0, 0]);
        f.trike_moves.push(Movement { from: 0, to: 1, depart: 1, amount: 1.0 });
        f.trike_moves.push(Movement { from: 1, to: 0, depart: 1, amount: 1.0 });
        let r = verify_solution(&inst, &f);
        assert_eq!(r.trike_conservation, 0.0);
        assert_eq!(r.departure_limit, 1.0);
        assert!(!r.feasible);
    }

    #[test]
    fn caps_and_fractional_trikes() {
        let mut inst = pair();
        inst.mode = Mode::Docked { caps: vec![None, Some(2)] };
        let r = verify_solution(&inst, &idle(&inst));
        assert!((r.dock_caps - 1.0).abs() < 1e-12);

        let inst = pair();
        let mut f = idle(&inst);
        f.trike_stock[0] = vec![0.5; 4];
        f.trike_stock[1] = vec![0.5; 4];
        let r = verify_solution(&inst, &f);
        assert!(r.max_residual() < 1e-12);
        assert!((r.integrality - 0.5).abs() < 1e-12);
        assert!(!r.feasible);
    }

    #[test]
    fn wrong_shape_is_a_problem_not_a_panic() {
        let inst = pair();
        let mut f = idle(&inst);
        f.bike_stock.pop();
        assert!(!verify_solution(&inst, &f).feasible);
    }
}
