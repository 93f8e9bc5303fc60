//! The full pipeline on the shipped data: ingest, solve, verify, report.

use std::fs::File;

use bikeflow::instance::{ingest, GridSpec, IngestConfig, LatLon};
use bikeflow::metrics::{compute_metrics, unused_bike_ratio};
use bikeflow::pipeline::solve_instance;
use bikeflow::solver::MilpLimits;

fn main() -> bikeflow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let grid = GridSpec { origin: LatLon { lat: 1.4150, lon: 103.8250 }, cell_m: 300.0, cols: 8, rows: 6 };
    let mut config = IngestConfig::new(grid, 7 * 60, 8 * 60);
    config.trike_count = 1;
    let mut bikes = File::open(format!("{data}/synthetic_bikes.csv"))?;
    let (instance, _) = ingest(File::open(format!("{data}/synthetic_trips.csv"))?, Some(&mut bikes), &config)?;

    let solved = solve_instance(&instance, &MilpLimits::default())?;
    let Some(flows) = &solved.flows else {
        println!("no solution: {:?}", solved.solution.status);
        return Ok(());
    };
    let m = compute_metrics(&instance, flows)?;
    println!("status                 {:?}", solved.solution.status);
    println!("revenue                {:.2}", m.revenue);
    println!("  excluding fixed      {:.2}", m.revenue_excluding_fixed);
    println!("  after bike purchase  {:.2}", m.profit_after_bike_amortization);
    println!("satisfaction           {:.3} ({} of {})", m.satisfaction_level, m.met_demand, m.total_demand);
    println!("bikes relocated        {}", m.relocation_bike_count);
    println!("trike km               {:.2}", m.trike_distance_km);
    let unused = unused_bike_ratio(&instance, flows);
    println!("unused share per cell  {:.2?}", unused);
    Ok(())
}
