#![allow(dead_code)]

use bikeflow::instance::{Cents, CostModel, DemandTensor, Instance, Mode, Tariff, TrikePlacement};
use bikeflow::timespace::{Site, SiteGraph, TimeGrid};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sites on a line, `spacing_m` apart.
pub fn line_sites(n: usize, spacing_m: f64) -> SiteGraph {
    let sites = (0..n).map(|k| Site { id: format!("s{k}"), x_m: spacing_m * k as f64, y_m: 0.0 }).collect();
    SiteGraph::from_centroids(sites).unwrap()
}

pub fn base_instance(graph: SiteGraph, periods: usize, bikes: Vec<u32>, trikes: u32) -> Instance {
    let n = graph.len();
    Instance {
        site_graph: graph,
        time_grid: TimeGrid::new(420, 5, periods).unwrap(),
        demand: DemandTensor::zeros(n, periods),
        initial_bikes: bikes,
        trike_count: trikes,
        trike_placement: TrikePlacement::Free,
        tariff: Tariff::default(),
        cost_model: CostModel::default(),
        bike_speed_kmh: 12.0,
        trike_speed_kmh: 25.0,
        mode: Mode::Dockless,
    }
}

/// A random instance within the exhaustive oracle's size limits.
pub fn tiny_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(2..=3);
    let periods = rng.gen_range(2..=5);
    let sites = (0..n)
        .map(|k| Site { id: format!("s{k}"), x_m: rng.gen_range(0.0..2500.0), y_m: rng.gen_range(0.0..2500.0) })
        .collect();
    let graph = SiteGraph::from_centroids(sites).unwrap();
    let mut demand = DemandTensor::zeros(n, periods);
    for i in 0..n {
        for j in 0..n {
            for t in 0..periods {
                if i != j && rng.gen_bool(0.35) {
                    demand.set(i, j, t, rng.gen_range(1..=2));
                }
            }
        }
    }
    let initial_bikes: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
    let trike_count = rng.gen_range(0..=1);
    let trike_placement = if trike_count == 1 && rng.gen_bool(0.3) {
        let mut counts = vec![0; n];
        counts[rng.gen_range(0..n)] = 1;
        TrikePlacement::Fixed { counts }
    } else {
        TrikePlacement::Free
    };
    let mode = if rng.gen_bool(0.25) {
        Mode::Docked {
            caps: initial_bikes
                .iter()
                .map(|&b| rng.gen_bool(0.7).then(|| b + rng.gen_range(0..=2)))
                .collect(),
        }
    } else {
        Mode::Dockless
    };
    Instance {
        site_graph: graph,
        time_grid: TimeGrid::new(420, 5, periods).unwrap(),
        demand,
        initial_bikes,
        trike_count,
        trike_placement,
        tariff: Tariff { unit_price: Cents(rng.gen_range(50..=300)), block_minutes: [5, 10, 15][rng.gen_range(0..3)] },
        cost_model: CostModel {
            handling_per_bike: Cents(rng.gen_range(0..=100)),
            handling_by_pair: None,
            trike_km_rate: Cents(rng.gen_range(0..=100)),
            trike_capacity: rng.gen_range(1..=3),
            trike_fixed_per_hour: Cents(rng.gen_range(0..=8000)),
            bike_amortized_per_day: Cents(150),
        },
        bike_speed_kmh: 12.0,
        trike_speed_kmh: 25.0,
        mode,
    }
}

/// A mid-sized random instance: sites scattered over a 2 km square, up to
/// seven bikes per site, rides requested on about 30% of (pair, period)
/// slots.
pub fn synthetic_instance(seed: u64, sites: usize, periods: usize, trikes: u32) -> Instance {
    let mut rng = rng(seed);
    let list: Vec<Site> = (0..sites)
        .map(|k| Site { id: format!("s{k}"), x_m: rng.gen_range(0.0..2000.0), y_m: rng.gen_range(0.0..2000.0) })
        .collect();
    let mut inst = base_instance(SiteGraph::from_centroids(list).unwrap(), periods, vec![0; sites], trikes);
    for b in inst.initial_bikes.iter_mut() {
        *b = rng.gen_range(0..8);
    }
    for i in 0..sites {
        for j in 0..sites {
            for t in 0..periods {
                if i != j && rng.gen_bool(0.3) {
                    inst.demand.set(i, j, t, rng.gen_range(1..4));
                }
            }
        }
    }
    inst
}

/// Stationary plus in-transit totals against the initial fleets, per
/// period; returns the largest bike and trike residuals.
pub fn telescoping_residual(instance: &Instance, flows: &bikeflow::flows::FlowSolution) -> (f64, f64) {
    use bikeflow::timespace::travel_periods;
    let d = &instance.site_graph.distance_km;
    let interval = instance.time_grid.interval_minutes;
    let horizon = instance.num_periods();
    let ride = |i: usize, j: usize| travel_periods(d[i][j], instance.bike_speed_kmh, interval).unwrap();
    let hop = |i: usize, j: usize| travel_periods(d[i][j], instance.trike_speed_kmh, interval).unwrap();
    let in_transit = |moves: &[bikeflow::flows::Movement], tau: &dyn Fn(usize, usize) -> usize, t: usize| -> f64 {
        moves.iter().filter(|m| m.depart < t && t < m.depart + tau(m.from, m.to)).map(|m| m.amount).sum()
    };
    let bikes = instance.total_bikes() as f64;
    let trikes = instance.trike_count as f64;
    let (mut rb, mut ru) = (0.0f64, 0.0f64);
    for t in 0..=horizon {
        let parked: f64 = flows.bike_stock.iter().map(|s| s[t]).sum();
        let moving = in_transit(&flows.rider_moves, &ride, t) + in_transit(&flows.bike_moves, &hop, t);
        rb = rb.max((parked + moving - bikes).abs());
        let parked: f64 = flows.trike_stock.iter().map(|s| s[t]).sum();
        ru = ru.max((parked + in_transit(&flows.trike_moves, &hop, t) - trikes).abs());
    }
    (rb, ru)
}
