//! Instance in, verified flows out.

use crate::error::Result;
use crate::flows::FlowSolution;
use crate::instance::Instance;
use crate::milp::{formulate_instance, Formulation};
use crate::oracle::{verify_solution, VerificationReport};
use crate::solver::{solve_milp, MilpLimits, MilpSolution, MilpStatus};

#[derive(Debug, Clone)]
pub struct SolvedInstance {
    pub formulation: Formulation,
    pub solution: MilpSolution,
    /// Present whenever the solver returned an incumbent.
    pub flows: Option<FlowSolution>,
    pub verification: Option<VerificationReport>,
}

impl SolvedInstance {
    pub fn status(&self) -> MilpStatus {
        self.solution.status
    }
}

/// Formulates, solves and verifies. Instances that are infeasible by
/// construction (dock caps below the initial stock) come back as an
/// `Error::InfeasibleByConstruction`.
pub fn solve_instance(instance: &Instance, limits: &MilpLimits) -> Result<SolvedInstance> {
    instance.validate()?;
    let formulation = formulate_instance(instance)?;
    let solution = solve_milp(&formulation.problem, limits);
    let flows = if solution.status.has_solution() {
        Some(formulation.to_flows(&snap(&solution.values))?)
    } else {
        None
    };
    let verification = flows.as_ref().map(|f| verify_solution(instance, f));
    Ok(SolvedInstance { formulation, solution, flows, verification })
}

/// Values within round-off of an integer become that integer, so written
/// solutions are clean and conservation sums are exact.
fn snap(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let r = v.round();
            if (v - r).abs() <= SNAP_TOL {
                r + 0.0
            } else {
                v
            }
        })
        .collect()
}

const SNAP_TOL: f64 = 1e-9;
