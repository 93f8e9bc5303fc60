//! Sparse mixed-integer program for joint bike relocation and trike
//! assignment on the time-expanded network.
//!
//! Columns, in order: bike stocks `b[i][t]`, trike stocks `u[i][t]`
//! (both site-major over periods `0..=T`), rider flows per ride arc, bike
//! relocations per relocation arc, trike movements per relocation arc.
//!
//! Rows, in order: bike conservation per `(i, t < T)`, trike conservation per
//! `(i, t < T)`, bike then trike departure limits per node with outgoing
//! arcs, capacity coupling per relocation arc, initial bike stocks,
//! initial trike placement, then dock caps per `(i, t)` in docked mode.
//! A stock at `t + 1` receives exactly the flows whose arrival period is
//! `t + 1`.

mod lpfile;

pub use lpfile::{read_lp, write_lp};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::flows::{FlowSolution, Movement};
use crate::instance::{Instance, Mode, TrikePlacement};
use crate::timespace::{Arc, SpaceTimeNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

/// Maximization problem `max c·x + offset` over `A x (sense) b`,
/// `lower <= x <= upper`, with integrality on masked columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    /// `(row, col, value)`, row-major, sorted by column within a row, no
    /// duplicates and no explicit zeros.
    pub triplets: Vec<(usize, usize, f64)>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub integer: Vec<bool>,
    pub col_names: Vec<String>,
    pub row_names: Vec<String>,
}

impl Default for MilpProblem {
    fn default() -> Self {
        Self::new()
    }
}

impl MilpProblem {
    pub fn new() -> Self {
        Self {
            triplets: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            col_lower: Vec::new(),
            col_upper: Vec::new(),
            objective: Vec::new(),
            objective_offset: 0.0,
            integer: Vec::new(),
            col_names: Vec::new(),
            row_names: Vec::new(),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn add_col(&mut self, name: impl Into<String>, lower: f64, upper: f64, obj: f64, integer: bool) -> usize {
        self.col_names.push(name.into());
        self.col_lower.push(lower);
        self.col_upper.push(upper);
        self.objective.push(obj);
        self.integer.push(integer);
        self.objective.len() - 1
    }

    /// Appends a row; repeated columns are merged and zeros dropped.
    pub fn add_row(&mut self, name: impl Into<String>, mut terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        let row = self.rhs.len();
        terms.sort_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (c, v) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == c => *acc += v,
                _ => merged.push((c, v)),
            }
        }
        self.triplets.extend(merged.into_iter().filter(|&(_, v)| v != 0.0).map(|(c, v)| (row, c, v)));
        self.row_names.push(name.into());
        self.senses.push(sense);
        self.rhs.push(rhs);
        row
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_cols();
        if [self.col_lower.len(), self.col_upper.len(), self.integer.len(), self.col_names.len()]
            .iter()
            .any(|&len| len != n)
        {
            return Err(invalid("column arrays disagree in length"));
        }
        if self.senses.len() != self.num_rows() || self.row_names.len() != self.num_rows() {
            return Err(invalid("row arrays disagree in length"));
        }
        for w in self.triplets.windows(2) {
            if (w[0].0, w[0].1) >= (w[1].0, w[1].1) {
                return Err(invalid(format!("triplets out of order or duplicated at {:?}", w[1])));
            }
        }
        for &(r, c, v) in &self.triplets {
            if r >= self.num_rows() || c >= n || !v.is_finite() {
                return Err(invalid(format!("bad triplet ({r}, {c}, {v})")));
            }
        }
        for j in 0..n {
            if self.col_lower[j] > self.col_upper[j] || self.col_lower[j].is_nan() || self.col_upper[j].is_nan() {
                return Err(invalid(format!("column {j} has inverted bounds")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + self.objective_offset
    }

    pub fn row_activities(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.num_rows()];
        for &(r, c, v) in &self.triplets {
            act[r] += v * x[c];
        }
        act
    }

    /// Largest violation over rows and column bounds.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, a) in self.row_activities(x).into_iter().enumerate() {
            let excess = match self.senses[r] {
                Sense::Eq => (a - self.rhs[r]).abs(),
                Sense::Le => (a - self.rhs[r]).max(0.0),
                Sense::Ge => (self.rhs[r] - a).max(0.0),
            };
            worst = worst.max(excess);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.col_lower[j] - v).max(v - self.col_upper[j]);
        }
        worst
    }

    pub fn max_integrality_violation(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.integer)
            .filter(|(_, &int)| int)
            .map(|(v, _)| (v - v.round()).abs())
            .fold(0.0, f64::max)
    }

    /// Copy with integrality dropped.
    pub fn relaxation(&self) -> Self {
        let mut p = self.clone();
        p.integer.iter_mut().for_each(|b| *b = false);
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    BikeStock { site: usize, period: usize },
    TrikeStock { site: usize, period: usize },
    /// Index into `network.ride_arcs`.
    RiderMove(usize),
    /// Index into `network.reloc_arcs`.
    BikeMove(usize),
    /// Index into `network.reloc_arcs`.
    TrikeMove(usize),
}

/// Objective split into its four terms; `total()` recombines them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub ride_revenue: f64,
    pub trike_travel_cost: f64,
    pub bike_handling_cost: f64,
    pub fixed_cost: f64,
}

impl ObjectiveBreakdown {
    pub fn total(&self) -> f64 {
        self.ride_revenue - self.trike_travel_cost - self.bike_handling_cost - self.fixed_cost
    }
}

/// A formulated instance: the program plus the column map back to the
/// network.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub problem: MilpProblem,
    pub network: SpaceTimeNetwork,
    num_sites: usize,
    num_periods: usize,
    trike_stock_base: usize,
    rider_base: usize,
    bike_move_base: usize,
    trike_move_base: usize,
}

impl Formulation {
    pub fn column(&self, var: Variable) -> usize {
        let stride = self.num_periods + 1;
        match var {
            Variable::BikeStock { site, period } => site * stride + period,
            Variable::TrikeStock { site, period } => self.trike_stock_base + site * stride + period,
            Variable::RiderMove(k) => self.rider_base + k,
            Variable::BikeMove(k) => self.bike_move_base + k,
            Variable::TrikeMove(k) => self.trike_move_base + k,
        }
    }

    pub fn variable(&self, col: usize) -> Variable {
        let stride = self.num_periods + 1;
        if col < self.trike_stock_base {
            Variable::BikeStock { site: col / stride, period: col % stride }
        } else if col < self.rider_base {
            let k = col - self.trike_stock_base;
            Variable::TrikeStock { site: k / stride, period: k % stride }
        } else if col < self.bike_move_base {
            Variable::RiderMove(col - self.rider_base)
        } else if col < self.trike_move_base {
            Variable::BikeMove(col - self.bike_move_base)
        } else {
            assert!(col < self.problem.num_cols(), "column {col} out of range");
            Variable::TrikeMove(col - self.trike_move_base)
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.problem.num_cols() {
            return Err(Error::DimensionMismatch { expected: self.problem.num_cols(), got: x.len() });
        }
        Ok(())
    }

    pub fn objective_breakdown(&self, x: &[f64]) -> Result<ObjectiveBreakdown> {
        self.check_len(x)?;
        let c = &self.problem.objective;
        let sum = |range: std::ops::Range<usize>| range.map(|j| c[j] * x[j]).sum::<f64>();
        Ok(ObjectiveBreakdown {
            ride_revenue: sum(self.rider_base..self.bike_move_base),
            bike_handling_cost: -sum(self.bike_move_base..self.trike_move_base),
            trike_travel_cost: -sum(self.trike_move_base..self.problem.num_cols()),
            fixed_cost: -self.problem.objective_offset,
        })
    }

    /// Maps a column vector to stocks and nonzero arc flows.
    pub fn to_flows(&self, x: &[f64]) -> Result<FlowSolution> {
        self.check_len(x)?;
        let stride = self.num_periods + 1;
        let stocks = |base: usize| {
            (0..self.num_sites).map(|i| x[base + i * stride..base + (i + 1) * stride].to_vec()).collect()
        };
        let moves = |arcs: &[Arc], base: usize| {
            arcs.iter()
                .enumerate()
                .filter(|&(k, _)| x[base + k] != 0.0)
                .map(|(k, a)| Movement { from: a.from, to: a.to, depart: a.depart, amount: x[base + k] })
                .collect()
        };
        Ok(FlowSolution {
            bike_stock: stocks(0),
            trike_stock: stocks(self.trike_stock_base),
            rider_moves: moves(&self.network.ride_arcs, self.rider_base),
            bike_moves: moves(&self.network.reloc_arcs, self.bike_move_base),
            trike_moves: moves(&self.network.reloc_arcs, self.trike_move_base),
        })
    }

    /// Inverse of [`Formulation::to_flows`]. Movements on arcs absent from
    /// the network are rejected.
    pub fn from_flows(&self, flows: &FlowSolution) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.problem.num_cols()];
        let stride = self.num_periods + 1;
        for (base, stocks) in [(0, &flows.bike_stock), (self.trike_stock_base, &flows.trike_stock)] {
            if stocks.len() != self.num_sites || stocks.iter().any(|s| s.len() != stride) {
                return Err(invalid("stock arrays do not match the instance dimensions"));
            }
            for (i, s) in stocks.iter().enumerate() {
                x[base + i * stride..base + (i + 1) * stride].copy_from_slice(s);
            }
        }
        let place = |x: &mut Vec<f64>, arcs: &[Arc], base: usize, moves: &[Movement]| -> Result<()> {
            for m in moves {
                let k = arcs
                    .binary_search_by(|a| (a.from, a.to, a.depart).cmp(&(m.from, m.to, m.depart)))
                    .map_err(|_| invalid(format!("no arc {} -> {} departing {}", m.from, m.to, m.depart)))?;
                x[base + k] += m.amount;
            }
            Ok(())
        };
        place(&mut x, &self.network.ride_arcs, self.rider_base, &flows.rider_moves)?;
        place(&mut x, &self.network.reloc_arcs, self.bike_move_base, &flows.bike_moves)?;
        place(&mut x, &self.network.reloc_arcs, self.trike_move_base, &flows.trike_moves)?;
        Ok(x)
    }

    /// Trike stocks for every period, which conservation makes integral once
    /// trike movements and initial placements are.
    pub fn trike_stock_columns(&self) -> std::ops::Range<usize> {
        self.trike_stock_base..self.rider_base
    }
}

/// Builds the program for `instance` on `network`.
pub fn formulate(instance: &Instance, network: &SpaceTimeNetwork) -> Result<Formulation> {
    instance.validate()?;
    let n = instance.num_sites();
    let horizon = instance.num_periods();
    if network.num_sites != n || network.num_periods != horizon {
        return Err(invalid("network does not match the instance's sites and time grid"));
    }
    if let Mode::Docked { caps } = &instance.mode {
        for (i, (&b0, cap)) in instance.initial_bikes.iter().zip(caps).enumerate() {
            if let Some(cap) = cap {
                if b0 > *cap {
                    return Err(Error::InfeasibleByConstruction(format!(
                        "site {i} starts with {b0} bikes but its dock capacity is {cap}"
                    )));
                }
            }
        }
    }

    let free_placement = matches!(instance.trike_placement, TrikePlacement::Free);
    let mut p = MilpProblem::new();
    p.objective_offset = -instance.fixed_cost();
    let stride = horizon + 1;

    for i in 0..n {
        for t in 0..stride {
            p.add_col(format!("bs_{i}_{t}"), 0.0, f64::INFINITY, 0.0, false);
        }
    }
    let trike_stock_base = p.num_cols();
    for i in 0..n {
        for t in 0..stride {
            p.add_col(format!("us_{i}_{t}"), 0.0, f64::INFINITY, 0.0, free_placement && t == 0);
        }
    }
    let rider_base = p.num_cols();
    for a in &network.ride_arcs {
        let fare = instance.ride_fare(a.duration())?;
        let demand = instance.demand.get(a.from, a.to, a.depart) as f64;
        p.add_col(format!("rm_{}_{}_{}", a.from, a.to, a.depart), 0.0, demand, fare, false);
    }
    let bike_move_base = p.num_cols();
    for a in &network.reloc_arcs {
        let handling = instance.cost_model.handling_cost(a.from, a.to);
        p.add_col(format!("bm_{}_{}_{}", a.from, a.to, a.depart), 0.0, f64::INFINITY, -handling, false);
    }
    let trike_move_base = p.num_cols();
    for a in &network.reloc_arcs {
        let travel = instance.cost_model.trike_travel_cost(instance.site_graph.distance_km[a.from][a.to]);
        p.add_col(format!("tm_{}_{}_{}", a.from, a.to, a.depart), 0.0, f64::INFINITY, -travel, true);
    }

    let f = Formulation {
        problem: MilpProblem::new(),
        network: network.clone(),
        num_sites: n,
        num_periods: horizon,
        trike_stock_base,
        rider_base,
        bike_move_base,
        trike_move_base,
    };

    // departures and arrivals per node, as column lists
    let node = |i: usize, t: usize| i * stride + t;
    let mut bike_out: Vec<Vec<usize>> = vec![Vec::new(); n * stride];
    let mut bike_in: Vec<Vec<usize>> = vec![Vec::new(); n * stride];
    let mut trike_out: Vec<Vec<usize>> = vec![Vec::new(); n * stride];
    let mut trike_in: Vec<Vec<usize>> = vec![Vec::new(); n * stride];
    for (k, a) in network.ride_arcs.iter().enumerate() {
        let col = f.column(Variable::RiderMove(k));
        bike_out[node(a.from, a.depart)].push(col);
        bike_in[node(a.to, a.arrive)].push(col);
    }
    for (k, a) in network.reloc_arcs.iter().enumerate() {
        let bikes = f.column(Variable::BikeMove(k));
        bike_out[node(a.from, a.depart)].push(bikes);
        bike_in[node(a.to, a.arrive)].push(bikes);
        let trikes = f.column(Variable::TrikeMove(k));
        trike_out[node(a.from, a.depart)].push(trikes);
        trike_in[node(a.to, a.arrive)].push(trikes);
    }

    // b[t+1] - b[t] + out(t) - in(t+1) = 0
    let mut conservation = |prefix: &str, stock: &dyn Fn(usize, usize) -> usize, out: &[Vec<usize>], inflow: &[Vec<usize>]| {
        for i in 0..n {
            for t in 0..horizon {
                let mut terms = vec![(stock(i, t + 1), 1.0), (stock(i, t), -1.0)];
                terms.extend(out[node(i, t)].iter().map(|&c| (c, 1.0)));
                terms.extend(inflow[node(i, t + 1)].iter().map(|&c| (c, -1.0)));
                p.add_row(format!("{prefix}_{i}_{t}"), terms, Sense::Eq, 0.0);
            }
        }
    };
    conservation("bc", &|i, t| f.column(Variable::BikeStock { site: i, period: t }), &bike_out, &bike_in);
    conservation("tc", &|i, t| f.column(Variable::TrikeStock { site: i, period: t }), &trike_out, &trike_in);

    // departures(t) <= stock(t): what leaves a node must be there, so the
    // holding arc to t + 1 stays nonnegative
    let mut departures = |prefix: &str, stock: &dyn Fn(usize, usize) -> usize, out: &[Vec<usize>]| {
        for i in 0..n {
            for t in 0..horizon {
                if out[node(i, t)].is_empty() {
                    continue;
                }
                let mut terms = vec![(stock(i, t), -1.0)];
                terms.extend(out[node(i, t)].iter().map(|&c| (c, 1.0)));
                p.add_row(format!("{prefix}_{i}_{t}"), terms, Sense::Le, 0.0);
            }
        }
    };
    departures("bd", &|i, t| f.column(Variable::BikeStock { site: i, period: t }), &bike_out);
    departures("td", &|i, t| f.column(Variable::TrikeStock { site: i, period: t }), &trike_out);

    let capacity = instance.cost_model.trike_capacity as f64;
    for (k, a) in network.reloc_arcs.iter().enumerate() {
        p.add_row(
            format!("cap_{}_{}_{}", a.from, a.to, a.depart),
            vec![(f.column(Variable::BikeMove(k)), 1.0), (f.column(Variable::TrikeMove(k)), -capacity)],
            Sense::Le,
            0.0,
        );
    }

    for (i, &b0) in instance.initial_bikes.iter().enumerate() {
        p.add_row(format!("b0_{i}"), vec![(f.column(Variable::BikeStock { site: i, period: 0 }), 1.0)], Sense::Eq, b0 as f64);
    }
    match &instance.trike_placement {
        TrikePlacement::Free => {
            let terms = (0..n).map(|i| (f.column(Variable::TrikeStock { site: i, period: 0 }), 1.0)).collect();
            p.add_row("u0_total", terms, Sense::Eq, instance.trike_count as f64);
        }
        TrikePlacement::Fixed { counts } => {
            for (i, &u0) in counts.iter().enumerate() {
                p.add_row(
                    format!("u0_{i}"),
                    vec![(f.column(Variable::TrikeStock { site: i, period: 0 }), 1.0)],
                    Sense::Eq,
                    u0 as f64,
                );
            }
        }
    }

    if let Mode::Docked { caps } = &instance.mode {
        for (i, cap) in caps.iter().enumerate() {
            let Some(cap) = cap else { continue };
            for t in 0..stride {
                p.add_row(
                    format!("dock_{i}_{t}"),
                    vec![(f.column(Variable::BikeStock { site: i, period: t }), 1.0)],
                    Sense::Le,
                    *cap as f64,
                );
            }
        }
    }

    debug_assert!(p.validate().is_ok());
    Ok(Formulation { problem: p, ..f })
}

/// Builds the network and the program in one step.
pub fn formulate_instance(instance: &Instance) -> Result<Formulation> {
    let network = instance.network()?;
    formulate(instance, &network)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{CostModel, DemandTensor, Tariff};
    use crate::timespace::{Site, SiteGraph, TimeGrid};

    fn instance(n: usize, horizon: usize, trikes: u32) -> Instance {
        let sites = (0..n).map(|k| Site { id: format!("s{k}"), x_m: 600.0 * k as f64, y_m: 0.0 }).collect();
        Instance {
            site_graph: SiteGraph::from_centroids(sites).unwrap(),
            time_grid: TimeGrid::new(420, 5, horizon).unwrap(),
            demand: DemandTensor::zeros(n, horizon),
            initial_bikes: vec![2; n],
            trike_count: trikes,
            trike_placement: TrikePlacement::Free,
            tariff: Tariff::default(),
            cost_model: CostModel::default(),
            bike_speed_kmh: 12.0,
            trike_speed_kmh: 25.0,
            mode: Mode::Dockless,
        }
    }

    #[test]
    fn single_site_dimensions() {
        let f = formulate_instance(&instance(1, 2, 0)).unwrap();
        let p = &f.problem;
        assert_eq!(p.num_cols(), 3 + 3);
        // 2 bike + 2 trike conservation, 1 bike boundary, 1 trike total
        assert_eq!(p.num_rows(), 2 + 2 + 1 + 1);
        assert_eq!(p.senses.iter().filter(|&&s| s == Sense::Eq).count(), 6);
        assert!(p.integer[f.column(Variable::TrikeStock { site: 0, period: 0 })]);
        assert!(!p.integer[f.column(Variable::TrikeStock { site: 0, period: 1 })]);
        p.validate().unwrap();
    }

    #[test]
    fn column_map_is_a_bijection() {
        let f = formulate_instance(&instance(3, 4, 1)).unwrap();
        for col in 0..f.problem.num_cols() {
            assert_eq!(f.column(f.variable(col)), col);
        }
        let masked: Vec<usize> = (0..f.problem.num_cols()).filter(|&c| f.problem.integer[c]).collect();
        let expected: Vec<usize> = (0..f.problem.num_cols())
            .filter(|&c| match f.variable(c) {
                Variable::TrikeMove(_) => true,
                Variable::TrikeStock { period, .. } => period == 0,
                _ => false,
            })
            .collect();
        assert_eq!(masked, expected);
    }

    #[test]
    fn rider_bounds_follow_demand() {
        let mut inst = instance(2, 3, 1);
        inst.demand.set(0, 1, 1, 4);
        let f = formulate_instance(&inst).unwrap();
        for (k, a) in f.network.ride_arcs.iter().enumerate() {
            let col = f.column(Variable::RiderMove(k));
            assert_eq!(f.problem.col_upper[col], inst.demand.get(a.from, a.to, a.depart) as f64);
        }
    }

    #[test]
    fn coupling_uses_trike_capacity() {
        let f = formulate_instance(&instance(2, 3, 1)).unwrap();
        let row = f.problem.row_names.iter().position(|r| r == "cap_0_1_0").unwrap();
        let coefs: Vec<f64> = f.problem.triplets.iter().filter(|t| t.0 == row).map(|t| t.2).collect();
        assert_eq!(coefs, vec![1.0, -20.0]);
        // one trike movement admits 20 bikes and no more
        let mut x = vec![0.0; f.problem.num_cols()];
        x[f.column(Variable::TrikeMove(0))] = 1.0;
        x[f.column(Variable::BikeMove(0))] = 20.0;
        let act = f.problem.row_activities(&x);
        assert!(act[row] <= 0.0);
        x[f.column(Variable::BikeMove(0))] = 21.0;
        assert!(f.problem.row_activities(&x)[row] > 0.0);
    }

    #[test]
    fn docked_initial_overflow_is_rejected() {
        let mut inst = instance(2, 2, 0);
        inst.mode = Mode::uniform_cap(2, 1);
        assert!(matches!(formulate_instance(&inst), Err(Error::InfeasibleByConstruction(_))));
        inst.mode = Mode::Docked { caps: vec![Some(2), None] };
        let f = formulate_instance(&inst).unwrap();
        assert_eq!(f.problem.row_names.iter().filter(|r| r.starts_with("dock_")).count(), 3);
    }

    #[test]
    fn breakdown_of_single_relocation() {
        // 2 km apart, S$0.4 per km, S$0.5 per bike handled
        let sites = vec![
            Site { id: "a".into(), x_m: 0.0, y_m: 0.0 },
            Site { id: "b".into(), x_m: 2000.0, y_m: 0.0 },
        ];
        let mut inst = instance(2, 3, 0);
        inst.site_graph = SiteGraph::from_centroids(sites).unwrap();
        let f = formulate_instance(&inst).unwrap();
        let k = f.network.reloc_arcs.iter().position(|a| a.from == 0 && a.to == 1 && a.depart == 0).unwrap();
        let mut x = vec![0.0; f.problem.num_cols()];
        x[f.column(Variable::TrikeMove(k))] = 1.0;
        x[f.column(Variable::BikeMove(k))] = 5.0;
        let br = f.objective_breakdown(&x).unwrap();
        assert!((br.trike_travel_cost - 0.8).abs() < 1e-12);
        assert!((br.bike_handling_cost - 2.5).abs() < 1e-12);
        assert_eq!(br.ride_revenue, 0.0);
        assert!((br.total() - f.problem.objective_value(&x)).abs() < 1e-9);
        assert!(f.objective_breakdown(&x[1..]).is_err());
    }

    #[test]
    fn breakdown_of_zero_flows_is_fixed_cost() {
        let f = formulate_instance(&instance(2, 3, 2)).unwrap();
        let x = vec![0.0; f.problem.num_cols()];
        let br = f.objective_breakdown(&x).unwrap();
        assert_eq!((br.ride_revenue, br.trike_travel_cost, br.bike_handling_cost), (0.0, 0.0, 0.0));
        // 2 trikes, 15 minutes at S$70 per hour
        assert!((br.fixed_cost - 35.0).abs() < 1e-12);
    }

    #[test]
    fn flows_round_trip() {
        let mut inst = instance(3, 4, 1);
        inst.demand.set(0, 2, 1, 1);
        let f = formulate_instance(&inst).unwrap();
        let x: Vec<f64> = (0..f.problem.num_cols()).map(|j| (j % 5) as f64).collect();
        let flows = f.to_flows(&x).unwrap();
        assert_eq!(f.from_flows(&flows).unwrap(), x);
    }

    #[test]
    fn formulate_is_deterministic() {
        let inst = instance(3, 4, 2);
        let a = formulate_instance(&inst).unwrap();
        let b = formulate_instance(&inst).unwrap();
        assert_eq!(a.problem, b.problem);
    }
}
