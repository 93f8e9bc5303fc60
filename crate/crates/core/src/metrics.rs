//! Reported quantities for a solved instance: revenue, profit, satisfaction
//! and fleet usage.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::FlowSolution;
use crate::instance::{Cents, Instance};
use crate::oracle::verify_solution;
use crate::timespace::travel_periods;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetrics {
    /// Objective value, fixed trike cost included.
    pub revenue: f64,
    pub revenue_excluding_fixed: f64,
    /// `revenue` minus the bike purchase cost amortized over the horizon.
    pub profit_after_bike_amortization: f64,
    pub satisfaction_level: f64,
    pub total_demand: u64,
    pub met_demand: f64,
    pub relocation_bike_count: f64,
    pub trike_distance_km: f64,
}

/// Metrics for a solution that passes verification; anything else is
/// rejected with the verifier's findings.
pub fn compute_metrics(instance: &Instance, flows: &FlowSolution) -> Result<ScenarioMetrics> {
    let report = verify_solution(instance, flows);
    if !report.feasible {
        let mut why = report.problems.clone();
        why.push(format!("max residual {:.3e}, integrality {:.3e}", report.max_residual(), report.integrality));
        return Err(Error::InfeasibleSolution(why.join("; ")));
    }
    let d = &instance.site_graph.distance_km;
    let interval = instance.time_grid.interval_minutes;
    let cm = &instance.cost_model;

    let mut ride_revenue = 0.0;
    for m in &flows.rider_moves {
        let periods = travel_periods(d[m.from][m.to], instance.bike_speed_kmh, interval)?;
        ride_revenue += instance.ride_fare(periods)? * m.amount;
    }
    let handling: f64 = flows.bike_moves.iter().map(|m| cm.handling_cost(m.from, m.to) * m.amount).sum();
    let trike_distance_km: f64 = flows.trike_moves.iter().map(|m| d[m.from][m.to] * m.amount).sum();
    let travel = cm.trike_travel_cost(trike_distance_km);

    let revenue_excluding_fixed = ride_revenue - handling - travel;
    let revenue = revenue_excluding_fixed - instance.fixed_cost();
    let amortization =
        instance.total_bikes() as f64 * cm.bike_amortized_per_day.to_currency() * instance.time_grid.horizon_hours() / 24.0;
    let total_demand = instance.demand.total();
    let met_demand = flows.total_riders();
    let satisfaction_level = if total_demand == 0 { 1.0 } else { (met_demand / total_demand as f64).clamp(0.0, 1.0) };

    Ok(ScenarioMetrics {
        revenue,
        revenue_excluding_fixed,
        profit_after_bike_amortization: revenue - amortization,
        satisfaction_level,
        total_demand,
        met_demand,
        relocation_bike_count: flows.total_relocated(),
        trike_distance_km,
    })
}

/// Per site, the share of initially parked bikes that never left:
/// `max(0, b0 - departures) / b0`, counting every rider and relocation
/// departure from the site against its initial stock. Sites that start
/// empty report 1.
pub fn unused_bike_ratio(instance: &Instance, flows: &FlowSolution) -> Vec<f64> {
    let mut outflow = vec![0.0; instance.num_sites()];
    for m in flows.rider_moves.iter().chain(&flows.bike_moves) {
        outflow[m.from] += m.amount;
    }
    instance
        .initial_bikes
        .iter()
        .zip(outflow)
        .map(|(&b0, out)| {
            if b0 == 0 {
                1.0
            } else {
                (b0 as f64 - out).max(0.0) / b0 as f64
            }
        })
        .collect()
}

/// One flat metrics row. Currency is in integer cents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub scenario: String,
    pub revenue_cents: i64,
    pub revenue_excluding_fixed_cents: i64,
    pub profit_after_bike_amortization_cents: i64,
    pub satisfaction_level: f64,
    pub total_demand: u64,
    pub met_demand: f64,
    pub relocation_bike_count: f64,
    pub trike_distance_km: f64,
}

impl MetricsRecord {
    pub fn new(scenario: impl Into<String>, m: &ScenarioMetrics) -> Self {
        Self {
            scenario: scenario.into(),
            revenue_cents: Cents::from_currency(m.revenue).0,
            revenue_excluding_fixed_cents: Cents::from_currency(m.revenue_excluding_fixed).0,
            profit_after_bike_amortization_cents: Cents::from_currency(m.profit_after_bike_amortization).0,
            satisfaction_level: round_to(m.satisfaction_level, 9),
            total_demand: m.total_demand,
            met_demand: round_to(m.met_demand, 6),
            relocation_bike_count: round_to(m.relocation_bike_count, 6),
            trike_distance_km: round_to(m.trike_distance_km, 6),
        }
    }
}

/// Rounds away float noise so records compare byte for byte.
pub(crate) fn round_to(v: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    let r = (v * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn write_metrics_csv(out: impl Write, records: &[MetricsRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::Movement;
    use crate::instance::{CostModel, DemandTensor, Mode, Tariff, TrikePlacement};
    use crate::timespace::{Site, SiteGraph, TimeGrid};

    /// Two sites 1 km apart: rides take 1 period, trike hops 1 period.
    fn pair(demand_01: u32, bikes: [u32; 2], trikes: u32) -> Instance {
        let sites = (0..2).map(|i| Site { id: format!("s{i}"), x_m: 0.0, y_m: 0.0 }).collect();
        let mut demand = DemandTensor::zeros(2, 2);
        demand.set(0, 1, 0, demand_01);
        Instance {
            site_graph: SiteGraph::new(sites, vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            time_grid: TimeGrid::new(420, 5, 2).unwrap(),
            demand,
            initial_bikes: bikes.to_vec(),
            trike_count: trikes,
            trike_placement: TrikePlacement::Free,
            tariff: Tariff::default(),
            cost_model: CostModel::default(),
            bike_speed_kmh: 12.0,
            trike_speed_kmh: 25.0,
            mode: Mode::Dockless,
        }
    }

    fn ride(inst: &Instance, riders: u32) -> FlowSolution {
        let mut f = FlowSolution::idle(inst, &[0; 2]);
        if inst.trike_count > 0 {
            f.trike_stock[0] = vec![inst.trike_count as f64; 3];
        }
        f.rider_moves.push(Movement { from: 0, to: 1, depart: 0, amount: riders as f64 });
        for t in 1..=2 {
            f.bike_stock[0][t] -= riders as f64;
            f.bike_stock[1][t] += riders as f64;
        }
        f
    }

    #[test]
    fn full_service_and_half_service() {
        let inst = pair(10, [10, 0], 0);
        let m = compute_metrics(&inst, &ride(&inst, 10)).unwrap();
        assert_eq!(m.satisfaction_level, 1.0);
        assert!((m.revenue - 10.0).abs() < 1e-12);

        let m = compute_metrics(&inst, &ride(&inst, 5)).unwrap();
        assert_eq!(m.satisfaction_level, 0.5);
        assert_eq!(m.total_demand, 10);
        assert_eq!(m.met_demand, 5.0);
    }

    #[test]
    fn zero_demand_is_vacuously_satisfied() {
        let inst = pair(0, [3, 1], 1);
        let mut f = FlowSolution::idle(&inst, &[1, 0]);
        f.trike_stock[0] = vec![1.0; 3];
        let m = compute_metrics(&inst, &f).unwrap();
        assert_eq!(m.satisfaction_level, 1.0);
        // one trike, 70 per hour, 10 minutes
        assert!((m.revenue + 70.0 / 6.0).abs() < 1e-9);
        assert_eq!(m.revenue, m.revenue_excluding_fixed - inst.fixed_cost());
        // 4 bikes at 1.5 per day over 10 minutes
        let amort = 4.0 * 1.5 / 144.0;
        assert!((m.profit_after_bike_amortization - (m.revenue - amort)).abs() < 1e-12);
    }

    #[test]
    fn infeasible_solution_is_rejected() {
        let inst = pair(2, [1, 0], 0);
        let f = ride(&inst, 2);
        assert!(matches!(compute_metrics(&inst, &f), Err(Error::InfeasibleSolution(_))));
    }

    #[test]
    fn unused_ratio_examples() {
        let inst = pair(1, [4, 0], 0);
        let idle = FlowSolution::idle(&inst, &[0, 0]);
        assert_eq!(unused_bike_ratio(&inst, &idle), vec![1.0, 1.0]);
        assert_eq!(unused_bike_ratio(&inst, &ride(&inst, 1)), vec![0.75, 1.0]);
        let all = pair(4, [4, 0], 0);
        assert_eq!(unused_bike_ratio(&all, &ride(&all, 4))[0], 0.0);
    }

    #[test]
    fn record_columns_are_stable() {
        let inst = pair(10, [10, 0], 0);
        let m = compute_metrics(&inst, &ride(&inst, 5)).unwrap();
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[MetricsRecord::new("base", &m)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "scenario,revenue_cents,revenue_excluding_fixed_cents,profit_after_bike_amortization_cents,\
             satisfaction_level,total_demand,met_demand,relocation_bike_count,trike_distance_km"
        );
        assert_eq!(lines.next().unwrap(), "base,500,500,490,0.5,10,5.0,0.0,0.0");
    }
}
