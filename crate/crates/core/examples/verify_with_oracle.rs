//! Cross-checks the MILP against exhaustive enumeration on a toy instance,
//! then runs the independent verifier on the MILP's flows.
//!
//!     cargo run --example verify_with_oracle
//!     cargo run --example verify_with_oracle -- --write-golden data/golden

use std::path::PathBuf;

use bikeflow::instance::{Cents, CostModel, DemandTensor, Instance, Mode, Tariff, TrikePlacement};
use bikeflow::oracle::{brute_force, verify_solution};
use bikeflow::pipeline::solve_instance;
use bikeflow::solver::MilpLimits;
use bikeflow::timespace::{Site, SiteGraph, TimeGrid};

fn toy() -> Instance {
    // three cells in an L, 600 m legs
    let sites = vec![
        Site { id: "home".into(), x_m: 0.0, y_m: 0.0 },
        Site { id: "station".into(), x_m: 600.0, y_m: 0.0 },
        Site { id: "school".into(), x_m: 600.0, y_m: 600.0 },
    ];
    let mut demand = DemandTensor::zeros(3, 5);
    demand.set(0, 1, 0, 2);
    demand.set(0, 1, 2, 2);
    demand.set(0, 2, 3, 1);
    demand.set(2, 1, 1, 1);
    Instance {
        site_graph: SiteGraph::from_centroids(sites).unwrap(),
        time_grid: TimeGrid::new(7 * 60, 5, 5).unwrap(),
        demand,
        initial_bikes: vec![2, 3, 1],
        trike_count: 1,
        trike_placement: TrikePlacement::Free,
        tariff: Tariff::default(),
        cost_model: CostModel {
            trike_capacity: 3,
            trike_fixed_per_hour: Cents(600),
            ..CostModel::default()
        },
        bike_speed_kmh: 12.0,
        trike_speed_kmh: 25.0,
        mode: Mode::Dockless,
    }
}

fn main() -> bikeflow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let golden = args.iter().position(|a| a == "--write-golden").map(|k| PathBuf::from(&args[k + 1]));

    let inst = toy();
    let exhaustive = brute_force(&inst)?;
    let solved = solve_instance(&inst, &MilpLimits::exact())?;
    let flows = solved.flows.expect("toy instance has a solution");
    let report = verify_solution(&inst, &flows);

    println!("exhaustive optimum  {:.6}", exhaustive.objective);
    println!("MILP optimum        {:.6} ({} nodes)", solved.solution.objective, solved.solution.nodes);
    println!("verifier            feasible={} max residual {:.1e}", report.feasible, report.max_residual());
    println!("relocated bikes     {}", flows.total_relocated());
    assert!((exhaustive.objective - solved.solution.objective).abs() < 1e-6);
    assert!(report.feasible);

    if let Some(dir) = golden {
        std::fs::create_dir_all(&dir)?;
        inst.write_json(dir.join("toy_instance.json"))?;
        flows.write_json(dir.join("toy_solution.json"))?;
        println!("wrote golden files to {}", dir.display());
    }
    Ok(())
}
