//! Solutions in domain terms: stocks per node and flows per movement arc.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Movement {
    pub from: usize,
    pub to: usize,
    pub depart: usize,
    pub amount: f64,
}

/// Stocks are indexed `[site][period]` for periods `0..=T`. Movement lists
/// hold only nonzero flows; arrival periods are implied by the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSolution {
    pub bike_stock: Vec<Vec<f64>>,
    pub trike_stock: Vec<Vec<f64>>,
    pub rider_moves: Vec<Movement>,
    pub bike_moves: Vec<Movement>,
    pub trike_moves: Vec<Movement>,
}

impl FlowSolution {
    /// Everything parked where it starts: bikes at `initial_bikes`, trikes at
    /// `placement` for the whole horizon.
    pub fn idle(instance: &Instance, trike_placement: &[u32]) -> Self {
        let periods = instance.num_periods() + 1;
        Self {
            bike_stock: instance.initial_bikes.iter().map(|&b| vec![b as f64; periods]).collect(),
            trike_stock: trike_placement.iter().map(|&u| vec![u as f64; periods]).collect(),
            rider_moves: Vec::new(),
            bike_moves: Vec::new(),
            trike_moves: Vec::new(),
        }
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn total_riders(&self) -> f64 {
        self.rider_moves.iter().map(|m| m.amount).sum()
    }

    pub fn total_relocated(&self) -> f64 {
        self.bike_moves.iter().map(|m| m.amount).sum()
    }
}
