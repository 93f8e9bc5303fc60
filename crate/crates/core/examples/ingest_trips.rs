//! Ingests the shipped synthetic trips on 300 m cells and 5-minute periods.
//!
//!     cargo run --example ingest_trips -- [out.json]

use std::fs::File;

use bikeflow::instance::{ingest, GridSpec, IngestConfig, LatLon};

fn main() -> bikeflow::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let grid = GridSpec { origin: LatLon { lat: 1.4150, lon: 103.8250 }, cell_m: 300.0, cols: 8, rows: 6 };
    let mut config = IngestConfig::new(grid, 7 * 60, 8 * 60);
    config.trike_count = 1;
    let mut bikes = File::open(format!("{data}/synthetic_bikes.csv"))?;
    let (instance, report) = ingest(File::open(format!("{data}/synthetic_trips.csv"))?, Some(&mut bikes), &config)?;

    println!("{}", serde_json::to_string_pretty(&report)?);
    for (site, b0) in instance.site_graph.sites.iter().zip(&instance.initial_bikes) {
        let outgoing: u64 = instance
            .demand
            .entries()
            .filter(|&(i, _, _, _)| instance.site_graph.sites[i].id == site.id)
            .map(|(_, _, _, c)| c as u64)
            .sum();
        println!("{:>6}: {b0:>3} bikes parked, {outgoing:>3} rides requested", site.id);
    }
    if let Some(path) = std::env::args().nth(1) {
        instance.write_json(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}
