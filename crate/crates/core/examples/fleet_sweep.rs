//! Revenue against fleet size, scaling the initial distribution
//! proportionally (largest remainder) to 25%, 50%, 75% and 100%.

use bikeflow::instance::Instance;
use bikeflow::solver::MilpLimits;
use bikeflow::sweep::{run_sweep, Axis, DemandResponse, Defaults, ScenarioGrid};

fn main() -> bikeflow::Result<()> {
    let mut base = Instance::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/data/five_sites.json"))?;
    base.trike_count = 1;
    for b in base.initial_bikes.iter_mut() {
        *b *= 4;
    }
    let total = base.total_bikes() as f64;
    let values = [0.25, 0.5, 0.75, 1.0].iter().map(|f| (f * total).round()).collect();
    let grid = ScenarioGrid::new(Axis::BikeCount, values, Defaults::from_instance(&base));
    let results = run_sweep(&base, &grid, &MilpLimits::exact(), &DemandResponse::identity(), 4)?;
    println!("bikes  excl. fixed  after amortization  satisfaction");
    for r in &results {
        let m = r.metrics.as_ref().expect("every scenario solves");
        println!(
            "{:>5}  {:>11.2}  {:>18.2}  {:>12.3}",
            r.value, m.revenue_excluding_fixed, m.profit_after_bike_amortization, m.satisfaction_level
        );
    }
    Ok(())
}
