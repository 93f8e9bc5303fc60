//! Best-bound branch-and-bound over the simplex relaxation.
//!
//! Nodes carry their bound changes relative to the root and a shared handle
//! on the parent's final basis. A child is re-solved with the dual simplex
//! from that basis; when the solver still holds the parent's basis (the
//! usual case when diving) no refactorization is needed at all. Ties in the
//! node bound go to the newest node, so the search dives until an incumbent
//! exists.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use log::info;

use super::simplex::{Basis, Outcome, Simplex};
use super::{relative_gap, MilpLimits, MilpSolution, MilpStatus, INTEGRALITY_TOL};
use crate::milp::MilpProblem;

struct Node {
    id: u64,
    parent: u64,
    bound: f64,
    changes: Vec<(usize, f64, f64)>,
    warm: Option<Rc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then(self.id.cmp(&other.id))
    }
}

/// The column to branch on: fractional part closest to one half, lowest
/// index on ties.
fn branching_column(problem: &MilpProblem, x: &[f64]) -> Option<usize> {
    let mut best = None;
    let mut best_score = INTEGRALITY_TOL;
    for (j, &v) in x.iter().enumerate() {
        if !problem.integer[j] {
            continue;
        }
        let frac = v - v.floor();
        let score = frac.min(1.0 - frac);
        if score > best_score + 1e-12 {
            best_score = score;
            best = Some(j);
        }
    }
    best
}

/// Re-solves with the integer columns fixed at their rounded values so the
/// continuous part is exact for the rounded point.
fn polish(problem: &MilpProblem, x: Vec<f64>) -> Vec<f64> {
    let mut fixed = problem.relaxation();
    for j in 0..x.len() {
        if problem.integer[j] {
            fixed.col_lower[j] = x[j];
            fixed.col_upper[j] = x[j];
        }
    }
    let mut s = Simplex::new(&fixed);
    if s.solve() == Outcome::Optimal && fixed.max_violation(s.values()) <= problem.max_violation(&x) {
        s.values().to_vec()
    } else {
        x
    }
}

pub fn solve_milp(problem: &MilpProblem, limits: &MilpLimits) -> MilpSolution {
    let started = Instant::now();
    let offset = problem.objective_offset;
    let mut simplex = Simplex::new(problem);
    let root_bounds: Vec<(f64, f64)> = (0..problem.num_cols()).map(|j| simplex.bounds(j)).collect();

    let mut heap = BinaryHeap::new();
    heap.push(Node { id: 0, parent: u64::MAX, bound: f64::INFINITY, changes: Vec::new(), warm: None });
    let mut next_id = 1u64;
    let mut loaded: Option<u64> = None;
    let mut applied: Vec<usize> = Vec::new();

    let mut incumbent = f64::NEG_INFINITY;
    let mut incumbent_x: Vec<f64> = Vec::new();
    let mut nodes = 0u64;
    let mut trace = Vec::new();
    let prune_tol = |inc: f64| {
        let scale = if inc.is_finite() { (inc + offset).abs().max(1.0) } else { 1.0 };
        (limits.gap * scale).max(1e-9)
    };

    let finish = |status: MilpStatus, bound: f64, x: Vec<f64>, inc: f64, nodes: u64, iters: u64, trace: Vec<f64>| {
        let x = if x.is_empty() { x } else { polish(problem, x) };
        // `+ 0.0` turns a negative zero positive
        let objective = if inc.is_finite() { problem.objective_value(&x) + 0.0 } else { f64::NEG_INFINITY };
        let bound = if bound.is_finite() { bound + offset } else { bound };
        let bound = bound.max(objective) + 0.0;
        let gap = relative_gap(bound, objective);
        let status = match status {
            MilpStatus::Feasible { .. } => MilpStatus::Feasible { gap },
            s => s,
        };
        let sol = MilpSolution {
            status,
            values: x,
            objective,
            bound,
            gap: if status == MilpStatus::Optimal { 0.0f64.max(gap) } else { gap },
            nodes,
            lp_iterations: iters,
            elapsed: started.elapsed(),
            bound_trace: trace,
        };
        info!(
            "branch-and-bound done: status={:?} objective={:.6} bound={:.6} nodes={} lp_iterations={} elapsed={:.3}s",
            sol.status,
            sol.objective,
            sol.bound,
            sol.nodes,
            sol.lp_iterations,
            sol.elapsed.as_secs_f64()
        );
        sol
    };

    while let Some(node) = heap.pop() {
        if incumbent.is_finite() && node.bound <= incumbent + prune_tol(incumbent) {
            // best-bound order: nothing left can improve enough
            let bound = node.bound.max(incumbent);
            return finish(MilpStatus::Optimal, bound, incumbent_x, incumbent, nodes, simplex.iterations, trace);
        }
        if nodes >= limits.node_limit || started.elapsed() >= limits.time_limit {
            let status = if incumbent.is_finite() { MilpStatus::Feasible { gap: 0.0 } } else { MilpStatus::LimitReached };
            let bound = node.bound;
            return finish(status, bound, incumbent_x, incumbent, nodes, simplex.iterations, trace);
        }
        nodes += 1;
        if limits.record_trace {
            trace.push(node.bound + offset);
        }
        if limits.log_every > 0 && nodes.is_multiple_of(limits.log_every) {
            info!(
                "nodes={} open={} incumbent={:.6} bound={:.6} gap={:.3e}",
                nodes,
                heap.len() + 1,
                incumbent + offset,
                node.bound + offset,
                relative_gap(node.bound + offset, incumbent + offset)
            );
        }

        for &j in &applied {
            simplex.set_bounds(j, root_bounds[j].0, root_bounds[j].1);
        }
        applied.clear();
        for &(j, lo, hi) in &node.changes {
            simplex.set_bounds(j, lo, hi);
            applied.push(j);
        }

        let mut outcome = if node.id == 0 {
            simplex.solve()
        } else if loaded == Some(node.parent) {
            simplex.reoptimize()
        } else {
            if let Some(basis) = &node.warm {
                simplex.restore(basis);
            }
            simplex.reoptimize()
        };
        if outcome == Outcome::NumericalFailure {
            outcome = simplex.solve();
        }
        loaded = Some(node.id);

        match outcome {
            Outcome::Infeasible => continue,
            Outcome::Unbounded => {
                return finish(MilpStatus::Unbounded, f64::INFINITY, incumbent_x, incumbent, nodes, simplex.iterations, trace);
            }
            Outcome::NumericalFailure => {
                return finish(
                    MilpStatus::NumericalFailure,
                    node.bound,
                    incumbent_x,
                    incumbent,
                    nodes,
                    simplex.iterations,
                    trace,
                );
            }
            Outcome::Optimal => {}
        }
        let value = simplex.objective().min(node.bound);
        if incumbent.is_finite() && value <= incumbent + prune_tol(incumbent) {
            continue;
        }
        let x = simplex.values();
        match branching_column(problem, x) {
            None => {
                incumbent = value;
                incumbent_x = x.iter().enumerate().map(|(j, &v)| if problem.integer[j] { v.round() } else { v }).collect();
                info!("incumbent {:.6} at node {}", incumbent + offset, nodes);
            }
            Some(j) => {
                let v = x[j];
                let (lo, hi) = simplex.bounds(j);
                let warm = Rc::new(simplex.snapshot());
                let mut down = node.changes.clone();
                down.push((j, lo, v.floor()));
                let mut up = node.changes;
                up.push((j, v.ceil(), hi));
                // the child pushed last is explored first on equal bounds
                let (first, second) = if v - v.floor() >= 0.5 { (down, up) } else { (up, down) };
                for changes in [first, second] {
                    heap.push(Node { id: next_id, parent: node.id, bound: value, changes, warm: Some(warm.clone()) });
                    next_id += 1;
                }
            }
        }
    }

    let status = if incumbent.is_finite() { MilpStatus::Optimal } else { MilpStatus::Infeasible };
    let bound = if incumbent.is_finite() { incumbent } else { f64::NEG_INFINITY };
    finish(status, bound, incumbent_x, incumbent, nodes, simplex.iterations, trace)
}
