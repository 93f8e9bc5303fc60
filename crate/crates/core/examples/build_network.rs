//! Builds the time-expanded network for four sites on a 5-minute lattice and
//! prints travel times and arc counts.

use bikeflow::timespace::{build_network, travel_periods, Site, SiteGraph, TimeGrid};

fn main() -> bikeflow::Result<()> {
    let sites: Vec<Site> = [(0.0, 0.0), (300.0, 0.0), (900.0, 300.0), (2400.0, 1200.0)]
        .iter()
        .enumerate()
        .map(|(k, &(x_m, y_m))| Site { id: format!("s{k}"), x_m, y_m })
        .collect();
    let graph = SiteGraph::from_centroids(sites)?;
    let grid = TimeGrid::new(7 * 60, 5, 12)?;
    let net = build_network(&graph, &grid, 12.0, 25.0)?;

    println!("periods per hop (bike / trike):");
    for i in 0..graph.len() {
        let row: Vec<String> = (0..graph.len())
            .map(|j| {
                let d = graph.distance_km[i][j];
                if i == j {
                    return "-".to_string();
                }
                format!("{}/{}", travel_periods(d, 12.0, 5).unwrap(), travel_periods(d, 25.0, 5).unwrap())
            })
            .collect();
        println!("  {}: {}", graph.sites[i].id, row.join("  "));
    }
    println!("nodes            {}", net.node_count());
    println!("holding arcs     {}", net.holding_arc_count());
    println!("ride arcs        {}", net.ride_arcs.len());
    println!("relocation arcs  {}", net.reloc_arcs.len());
    Ok(())
}
