//! Writes the synthetic morning-commute data set shipped in `data/`.
//!
//! Eight 300 m cells around a transit hub: most riders head for the hub
//! early, a few come back, and the parked fleet starts bunched near the hub.
//! The draw is seeded, so rerunning reproduces the shipped files exactly.
//!
//!     cargo run --example generate_synthetic_trips -- [out_dir]

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use bikeflow::instance::{GridSpec, LatLon};
use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORIGIN: LatLon = LatLon { lat: 1.4150, lon: 103.8250 };
const HUB: (u32, u32) = (4, 2);
const HOMES: [(u32, u32); 7] = [(1, 1), (2, 4), (6, 4), (7, 1), (3, 0), (5, 5), (0, 3)];
const TRIPS: usize = 500;
const BIKES: usize = 60;

fn point_in(grid: &GridSpec, cell: (u32, u32), rng: &mut ChaCha8Rng) -> LatLon {
    // stay clear of cell edges so projection noise never changes the cell
    let east = (cell.0 as f64 + rng.gen_range(0.1..0.9)) * grid.cell_m;
    let north = (cell.1 as f64 + rng.gen_range(0.1..0.9)) * grid.cell_m;
    grid.unproject(east, north)
}

fn stamp(t: NaiveDateTime) -> String {
    t.format("%Y-%m-%dT%H:%M:%S").to_string()
}

fn main() {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"));
    let grid = GridSpec { origin: ORIGIN, cell_m: 300.0, cols: 8, rows: 6 };
    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let day = NaiveDate::from_ymd_opt(2017, 5, 8).unwrap().and_hms_opt(6, 15, 0).unwrap();

    let mut trips = String::from("start_iso_time,end_iso_time,start_lat,start_lon,end_lat,end_lon\n");
    for _ in 0..TRIPS {
        let home = HOMES[rng.gen_range(0..HOMES.len())];
        let other = HOMES[rng.gen_range(0..HOMES.len())];
        let roll: f64 = rng.gen();
        let (from, to) = if roll < 0.65 {
            (home, HUB)
        } else if roll < 0.85 || home == other {
            (HUB, home)
        } else {
            (home, other)
        };
        let a = point_in(&grid, from, &mut rng);
        let b = point_in(&grid, to, &mut rng);
        let (ax, ay) = grid.project(a);
        let (bx, by) = grid.project(b);
        let km = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt() / 1000.0;
        let speed = rng.gen_range(9.0..14.0);
        let start = day + Duration::seconds(rng.gen_range(0..150 * 60));
        let ride = Duration::seconds((km / speed * 3600.0) as i64 + 60);
        let _ = writeln!(
            trips,
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            stamp(start),
            stamp(start + ride),
            a.lat,
            a.lon,
            b.lat,
            b.lon
        );
    }

    let fix_time = day + Duration::minutes(35);
    let mut bikes = String::from("bike_id,time,lat,lon\n");
    for k in 0..BIKES {
        let cell = if rng.gen_bool(0.45) { HUB } else { HOMES[rng.gen_range(0..HOMES.len())] };
        let p = point_in(&grid, cell, &mut rng);
        let _ = writeln!(bikes, "b{k:03},{},{:.6},{:.6}", stamp(fix_time), p.lat, p.lon);
    }

    fs::create_dir_all(&out_dir).expect("create output directory");
    fs::write(out_dir.join("synthetic_trips.csv"), trips).expect("write trips");
    fs::write(out_dir.join("synthetic_bikes.csv"), bikes).expect("write bikes");
    println!("wrote {TRIPS} trips and {BIKES} bike fixes to {}", out_dir.display());
}
