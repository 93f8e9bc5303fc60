mod common;

use bikeflow::flows::FlowSolution;
use bikeflow::instance::{Cents, Instance, Mode};
use bikeflow::milp::formulate_instance;
use bikeflow::oracle::{verify_solution, FEASIBILITY_TOL};
use bikeflow::pipeline::solve_instance;
use bikeflow::solver::{solve_milp, MilpLimits, MilpStatus};
use rand::Rng;

fn optimum(inst: &Instance) -> (f64, FlowSolution) {
    let s = solve_instance(inst, &MilpLimits::exact()).unwrap();
    assert_eq!(s.solution.status, MilpStatus::Optimal);
    (s.solution.objective, s.flows.unwrap())
}

/// The verifier accepts a perturbed solution exactly when the program's own
/// rows and integrality accept it.
#[test]
fn verifier_agrees_with_program_rows() {
    let mut rng = common::rng(3);
    let mut rejected = 0;
    let mut accepted = 0;
    for _ in 0..30 {
        let inst = common::tiny_instance(&mut rng);
        let f = formulate_instance(&inst).unwrap();
        let sol = solve_milp(&f.problem, &MilpLimits::exact());
        for _ in 0..20 {
            let mut x = sol.values.clone();
            let k = rng.gen_range(0..x.len());
            x[k] += [-1.0, 1.0, 0.5, 1e-9][rng.gen_range(0..4)];
            let flows = f.to_flows(&x).unwrap();
            let by_rows = f.problem.max_violation(&x) <= FEASIBILITY_TOL
                && f.problem.max_integrality_violation(&x) <= 1e-6
                && x.iter().all(|&v| v >= -FEASIBILITY_TOL);
            let report = verify_solution(&inst, &flows);
            assert_eq!(report.feasible, by_rows, "{report:?}");
            if by_rows {
                accepted += 1;
            } else {
                rejected += 1;
            }
        }
    }
    assert!(accepted > 0 && rejected > 0);
}

#[test]
fn verifier_objective_matches_program_objective() {
    let mut rng = common::rng(4);
    for _ in 0..20 {
        let inst = common::tiny_instance(&mut rng);
        let f = formulate_instance(&inst).unwrap();
        let sol = solve_milp(&f.problem, &MilpLimits::exact());
        let report = verify_solution(&inst, &f.to_flows(&sol.values).unwrap());
        assert!((report.objective - sol.objective).abs() < 1e-9);
        let breakdown = f.objective_breakdown(&sol.values).unwrap();
        assert!((breakdown.total() - sol.objective).abs() < 1e-9);
    }
}

#[test]
fn repeated_solves_are_bit_identical() {
    let inst = common::synthetic_instance(12, 4, 8, 1);
    let f = formulate_instance(&inst).unwrap();
    let a = solve_milp(&f.problem, &MilpLimits::exact());
    let b = solve_milp(&f.problem, &MilpLimits::exact());
    assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
}

/// Every currency amount times ten scales the optimum by ten.
#[test]
fn currency_scaling_scales_the_optimum() {
    let mut rng = common::rng(5);
    for _ in 0..15 {
        let inst = common::tiny_instance(&mut rng);
        let mut scaled = inst.clone();
        let ten = |c: Cents| Cents(c.0 * 10);
        scaled.tariff.unit_price = ten(inst.tariff.unit_price);
        scaled.cost_model.handling_per_bike = ten(inst.cost_model.handling_per_bike);
        scaled.cost_model.trike_km_rate = ten(inst.cost_model.trike_km_rate);
        scaled.cost_model.trike_fixed_per_hour = ten(inst.cost_model.trike_fixed_per_hour);
        let (a, _) = optimum(&inst);
        let (b, _) = optimum(&scaled);
        assert!((b - 10.0 * a).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
    }
}

/// Best-bound order: node bounds never rise while the search runs.
#[test]
fn node_bounds_are_non_increasing() {
    for seed in [1, 2] {
        let inst = common::synthetic_instance(seed, 4, 8, 2);
        let f = formulate_instance(&inst).unwrap();
        let limits = MilpLimits { record_trace: true, ..MilpLimits::exact() };
        let sol = solve_milp(&f.problem, &limits);
        assert_eq!(sol.status, MilpStatus::Optimal);
        let trace = &sol.bound_trace;
        assert!(trace.len() as u64 == sol.nodes);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{} then {}", w[0], w[1]);
        }
        assert!(trace[0] >= sol.objective - 1e-9);
    }
}

#[test]
fn uncapped_docks_equal_dockless() {
    let mut rng = common::rng(6);
    for _ in 0..10 {
        let mut inst = common::tiny_instance(&mut rng);
        inst.mode = Mode::Dockless;
        let (free, _) = optimum(&inst);
        inst.mode = Mode::Docked { caps: vec![None; inst.num_sites()] };
        let (uncapped, _) = optimum(&inst);
        inst.mode = Mode::uniform_cap(inst.num_sites(), inst.total_bikes() as u32);
        let (whole_fleet, _) = optimum(&inst);
        assert_eq!(free, uncapped);
        assert!((free - whole_fleet).abs() <= 1e-9);
    }
}

#[test]
fn zero_demand_costs_exactly_the_fixed_charge() {
    let mut inst = common::synthetic_instance(7, 4, 6, 3);
    inst.demand = inst.demand.map_counts(|_| 0);
    let (objective, flows) = optimum(&inst);
    assert_eq!(objective, -inst.fixed_cost());
    assert!(flows.rider_moves.is_empty() && flows.bike_moves.is_empty());
}

#[test]
fn solutions_telescope_exactly() {
    let mut rng = common::rng(8);
    for _ in 0..20 {
        let inst = common::tiny_instance(&mut rng);
        let (_, flows) = optimum(&inst);
        let (rb, ru) = common::telescoping_residual(&inst, &flows);
        assert!(rb <= 1e-9 && ru <= 1e-9);
    }
}
