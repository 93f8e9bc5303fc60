//! Solves the five-site instance and prints its time-space diagram as DOT.
//!
//!     cargo run --example export_diagram | dot -Tsvg > diagram.svg

use bikeflow::diagram::build_diagram;
use bikeflow::instance::Instance;
use bikeflow::pipeline::solve_instance;
use bikeflow::solver::MilpLimits;

fn main() -> bikeflow::Result<()> {
    let mut inst = Instance::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/data/five_sites.json"))?;
    inst.trike_count = 1;
    let solved = solve_instance(&inst, &MilpLimits::exact())?;
    let flows = solved.flows.expect("instance has a solution");
    let diagram = build_diagram(&inst, &flows)?;
    eprintln!(
        "{} nodes, {} rider arcs, {} trike arcs",
        diagram.nodes.len(),
        diagram.rider_arcs.len(),
        diagram.trike_arcs.len()
    );
    print!("{}", diagram.to_dot());
    Ok(())
}
