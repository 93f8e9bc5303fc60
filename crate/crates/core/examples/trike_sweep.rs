//! Revenue against fleet of trikes on the shipped five-site instance.
//! Revenue before fixed cost can only grow with more trikes; the fixed
//! charge decides whether they pay off.

use bikeflow::instance::Instance;
use bikeflow::solver::MilpLimits;
use bikeflow::sweep::{run_sweep, Axis, DemandResponse, Defaults, ScenarioGrid};

fn main() -> bikeflow::Result<()> {
    let base = Instance::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/data/five_sites.json"))?;
    let grid = ScenarioGrid::new(Axis::TrikeCount, vec![0.0, 1.0, 2.0, 3.0], Defaults::from_instance(&base));
    let results = run_sweep(&base, &grid, &MilpLimits::exact(), &DemandResponse::identity(), 4)?;
    println!("trikes  status     revenue  excl. fixed  satisfaction");
    for r in &results {
        let m = r.metrics.as_ref().expect("every scenario solves");
        println!(
            "{:>6}  {:<9}  {:>7.2}  {:>11.2}  {:>12.3}",
            r.value,
            format!("{:?}", r.status),
            m.revenue,
            m.revenue_excluding_fixed,
            m.satisfaction_level
        );
    }
    Ok(())
}
