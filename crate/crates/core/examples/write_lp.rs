//! Prints the program for the toy-sized golden instance in LP format.

use bikeflow::instance::Instance;
use bikeflow::milp::{formulate_instance, write_lp};

fn main() -> bikeflow::Result<()> {
    let inst = Instance::read_json(concat!(env!("CARGO_MANIFEST_DIR"), "/data/golden/toy_instance.json"))?;
    let f = formulate_instance(&inst)?;
    eprintln!("{} columns, {} rows", f.problem.num_cols(), f.problem.num_rows());
    print!("{}", write_lp(&f.problem));
    Ok(())
}
