//! LP and MILP solving for [`MilpProblem`].

mod branch;
mod simplex;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::milp::MilpProblem;

pub use branch::solve_milp;

/// Integrality tolerance used by branching and by feasibility checks.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Column values; meaningful only when optimal.
    pub values: Vec<f64>,
    /// Objective including the constant offset.
    pub objective: f64,
    /// Row duals for the maximization: `∂objective / ∂rhs`.
    pub duals: Vec<f64>,
    /// `c_j - duals · A_j` per column.
    pub reduced_costs: Vec<f64>,
    pub iterations: u64,
}

/// Solves the continuous relaxation (integrality flags are ignored).
pub fn solve_lp(problem: &MilpProblem) -> LpSolution {
    let mut s = simplex::Simplex::new(problem);
    let mut outcome = s.solve();
    if outcome == simplex::Outcome::Optimal && problem.max_violation(s.values()) > 1e-7 {
        outcome = s.reoptimize();
        if outcome == simplex::Outcome::Optimal && problem.max_violation(s.values()) > 1e-7 {
            outcome = simplex::Outcome::NumericalFailure;
        }
    }
    let status = match outcome {
        simplex::Outcome::Optimal => LpStatus::Optimal,
        simplex::Outcome::Infeasible => LpStatus::Infeasible,
        simplex::Outcome::Unbounded => LpStatus::Unbounded,
        simplex::Outcome::NumericalFailure => LpStatus::NumericalFailure,
    };
    let (duals, reduced_costs) = s.dual_values();
    LpSolution {
        status,
        values: s.values().to_vec(),
        objective: s.objective() + problem.objective_offset,
        duals,
        reduced_costs,
        iterations: s.iterations,
    }
}

#[derive(Debug, Clone)]
pub struct MilpLimits {
    pub time_limit: Duration,
    pub node_limit: u64,
    /// Relative gap `(bound - objective) / max(1, |objective|)` at which the
    /// search stops.
    pub gap: f64,
    /// Log a progress line every this many nodes (0 disables).
    pub log_every: u64,
    /// Keep the sequence of node bounds in [`MilpSolution::bound_trace`].
    pub record_trace: bool,
}

impl Default for MilpLimits {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(30 * 60),
            node_limit: 1_000_000,
            gap: 1e-6,
            log_every: 1000,
            record_trace: false,
        }
    }
}

impl MilpLimits {
    /// Proves optimality up to round-off; for tests and small instances.
    pub fn exact() -> Self {
        Self { gap: 0.0, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MilpStatus {
    Optimal,
    /// A limit stopped the search with an incumbent at this relative gap.
    Feasible { gap: f64 },
    Infeasible,
    /// A limit stopped the search before any integer solution was found.
    LimitReached,
    Unbounded,
    NumericalFailure,
}

impl MilpStatus {
    pub fn has_solution(&self) -> bool {
        matches!(self, MilpStatus::Optimal | MilpStatus::Feasible { .. })
    }
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Incumbent column values (empty without a solution).
    pub values: Vec<f64>,
    /// Incumbent objective including the offset, `-inf` without a solution.
    pub objective: f64,
    /// Best proven upper bound including the offset.
    pub bound: f64,
    pub gap: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub elapsed: Duration,
    /// Bounds of the nodes in processing order (when requested).
    pub bound_trace: Vec<f64>,
}

/// Relative gap as reported by the solver.
pub fn relative_gap(bound: f64, objective: f64) -> f64 {
    if !objective.is_finite() {
        return f64::INFINITY;
    }
    ((bound - objective) / objective.abs().max(1.0)).max(0.0)
}

/// Checks that the relaxation bound dominates an integer objective.
pub fn lp_bound_check(problem: &MilpProblem, integer_objective: f64) -> Option<bool> {
    let lp = solve_lp(&problem.relaxation());
    (lp.status == LpStatus::Optimal).then_some(lp.objective >= integer_objective - 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::Sense;

    fn knapsack() -> MilpProblem {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut p = MilpProblem::new();
        for (name, c) in [("a", 5.0), ("b", 4.0), ("c", 3.0)] {
            p.add_col(name, 0.0, f64::INFINITY, c, false);
        }
        p.add_row("r0", vec![(0, 2.0), (1, 3.0), (2, 1.0)], Sense::Le, 5.0);
        p.add_row("r1", vec![(0, 4.0), (1, 1.0), (2, 2.0)], Sense::Le, 11.0);
        p.add_row("r2", vec![(0, 3.0), (1, 4.0), (2, 2.0)], Sense::Le, 8.0);
        p
    }

    #[test]
    fn textbook_lp() {
        let sol = solve_lp(&knapsack());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 13.0).abs() < 1e-9);
        assert!((sol.values[0] - 2.0).abs() < 1e-9);
        assert!((sol.values[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn strong_duality_and_complementary_slackness() {
        let p = knapsack();
        let sol = solve_lp(&p);
        let dual_obj: f64 = sol.duals.iter().zip(&p.rhs).map(|(y, b)| y * b).sum();
        assert!((dual_obj - sol.objective).abs() < 1e-9);
        for (y, act) in sol.duals.iter().zip(p.row_activities(&sol.values).iter().zip(&p.rhs)) {
            assert!(*y >= -1e-9);
            assert!((y * (act.1 - act.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut p = MilpProblem::new();
        p.add_col("x", 0.0, f64::INFINITY, 1.0, false);
        p.add_row("lo", vec![(0, 1.0)], Sense::Ge, 3.0);
        p.add_row("hi", vec![(0, 1.0)], Sense::Le, 2.0);
        assert_eq!(solve_lp(&p).status, LpStatus::Infeasible);

        let mut q = MilpProblem::new();
        q.add_col("x", 0.0, f64::INFINITY, 1.0, false);
        q.add_col("y", 0.0, f64::INFINITY, 0.0, false);
        q.add_row("r", vec![(0, 1.0), (1, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&q).status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_free_columns_and_offset() {
        // max x - y + 10  s.t. x + y = 4, x - y >= -2, x <= 3, y free
        let mut p = MilpProblem::new();
        p.add_col("x", f64::NEG_INFINITY, 3.0, 1.0, false);
        p.add_col("y", f64::NEG_INFINITY, f64::INFINITY, -1.0, false);
        p.add_row("sum", vec![(0, 1.0), (1, 1.0)], Sense::Eq, 4.0);
        p.add_row("diff", vec![(0, 1.0), (1, -1.0)], Sense::Ge, -2.0);
        p.objective_offset = 10.0;
        let sol = solve_lp(&p);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 12.0).abs() < 1e-9, "{}", sol.objective);
    }

    #[test]
    fn integer_knapsack() {
        let mut p = knapsack();
        p.integer = vec![true; 3];
        let sol = solve_milp(&p, &MilpLimits::exact());
        assert_eq!(sol.status, MilpStatus::Optimal);
        // enumerate small integer points
        let mut best = f64::NEG_INFINITY;
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let x = [a as f64, b as f64, c as f64];
                    if p.max_violation(&x) <= 0.0 {
                        best = best.max(p.objective_value(&x));
                    }
                }
            }
        }
        assert!((sol.objective - best).abs() < 1e-9, "{} vs {best}", sol.objective);
        assert!(sol.bound >= sol.objective - 1e-9);
    }

    #[test]
    fn integer_infeasible() {
        // 2x = 1 has no integer solution
        let mut p = MilpProblem::new();
        p.add_col("x", 0.0, 10.0, 1.0, true);
        p.add_row("half", vec![(0, 2.0)], Sense::Eq, 1.0);
        assert_eq!(solve_milp(&p, &MilpLimits::exact()).status, MilpStatus::Infeasible);
    }

    #[test]
    fn node_limit_reports_limit() {
        let mut p = MilpProblem::new();
        for j in 0..12 {
            p.add_col(format!("x{j}"), 0.0, 1.0, 1.0 + j as f64 * 0.01, true);
        }
        p.add_row("r", (0..12).map(|j| (j, 2.0)).collect(), Sense::Le, 11.0);
        let limits = MilpLimits { node_limit: 1, ..MilpLimits::exact() };
        let sol = solve_milp(&p, &limits);
        assert!(matches!(sol.status, MilpStatus::LimitReached | MilpStatus::Feasible { .. }));
        assert!(sol.bound >= sol.objective);
    }
}
