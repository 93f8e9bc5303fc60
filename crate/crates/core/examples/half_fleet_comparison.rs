//! Half the bikes plus two trikes against the full fleet with no trikes.
//! Which one wins depends entirely on the data; this just runs both.

use bikeflow::instance::{scale_fleet, Instance};
use bikeflow::metrics::compute_metrics;
use bikeflow::pipeline::solve_instance;
use bikeflow::solver::MilpLimits;

fn main() -> bikeflow::Result<()> {
    let mut full = Instance::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/data/five_sites.json"))?;
    for b in full.initial_bikes.iter_mut() {
        *b *= 2;
    }
    full.trike_count = 0;
    let mut half = full.clone();
    half.initial_bikes = scale_fleet(&full.initial_bikes, full.total_bikes() / 2)?;
    half.trike_count = 2;

    for (label, inst) in [("full fleet, no trikes", &full), ("half fleet, two trikes", &half)] {
        let solved = solve_instance(inst, &MilpLimits::exact())?;
        let m = compute_metrics(inst, solved.flows.as_ref().expect("solvable"))?;
        println!(
            "{label:<24} bikes {:>3}  revenue {:>7.2}  excl. fixed {:>7.2}  after amortization {:>7.2}  satisfaction {:.3}",
            inst.total_bikes(),
            m.revenue,
            m.revenue_excluding_fixed,
            m.profit_after_bike_amortization,
            m.satisfaction_level
        );
    }
    Ok(())
}
