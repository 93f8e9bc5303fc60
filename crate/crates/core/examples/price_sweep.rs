//! Price sweep with the illustrative demand response in `data/`.
//! The response table is made up; swap in your own estimate.

use bikeflow::instance::Instance;
use bikeflow::solver::MilpLimits;
use bikeflow::sweep::{run_sweep, Axis, DemandResponse, Defaults, ScenarioGrid};

fn main() -> bikeflow::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let mut base = Instance::read_json(format!("{data}/five_sites.json"))?;
    base.trike_count = 1;
    let response = DemandResponse::read_json(format!("{data}/demand_response_illustrative.json"))?;
    let grid = ScenarioGrid::new(Axis::Price, vec![0.5, 1.0, 1.5, 2.0, 3.0], Defaults::from_instance(&base));
    let results = run_sweep(&base, &grid, &MilpLimits::exact(), &response, 4)?;
    println!("price  demand  served  revenue");
    for r in &results {
        let m = r.metrics.as_ref().expect("every scenario solves");
        println!("{:>5.2}  {:>6}  {:>6}  {:>7.2}", r.value, m.total_demand, m.met_demand, m.revenue);
    }
    Ok(())
}
