//! Docked stations of growing capacity against the dockless system on the
//! shipped six-site instance.

use bikeflow::instance::Instance;
use bikeflow::solver::MilpLimits;
use bikeflow::sweep::compare_dock;

fn main() -> bikeflow::Result<()> {
    let base = Instance::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/data/six_sites.json"))?;
    let lowest = *base.initial_bikes.iter().max().unwrap();
    let caps: Vec<Option<u32>> = (lowest..lowest + 5).map(Some).chain([None]).collect();
    let cmp = compare_dock(&base, &caps, u32::MAX, &MilpLimits::exact(), 4)?;

    println!("dockless revenue {:.3}, peak stock {:?}", cmp.dockless.revenue.unwrap_or(f64::NAN), cmp.dockless_max_stock);
    for c in &cmp.caps {
        let cap = c.cap.map_or("none".to_string(), |v| v.to_string());
        println!("cap {cap:>4}: {:?} revenue {:.3}", c.status, c.revenue.unwrap_or(f64::NAN));
    }
    match cmp.converged_at {
        Some(Some(cap)) => println!("docked matches dockless from cap {cap}"),
        Some(None) => println!("docked matches dockless only when uncapped"),
        None => println!("no cap matched"),
    }
    Ok(())
}
