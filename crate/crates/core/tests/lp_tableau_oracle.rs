//! The bounded revised simplex against a textbook dense tableau.

mod common;

use bikeflow::milp::{formulate_instance, MilpProblem, Sense};
use bikeflow::solver::{solve_lp, LpStatus};
use rand::Rng;

#[derive(Debug, PartialEq)]
enum Tableau {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Two-phase tableau simplex with Bland's rule. Columns are shifted to a zero
/// lower bound (free columns split), finite upper bounds become rows.
fn tableau_max(p: &MilpProblem) -> Tableau {
    // column j maps to (plus, minus, shift): x_j = shift + x+ - x-
    let mut map = Vec::new();
    let mut nvars = 0;
    for j in 0..p.num_cols() {
        let (lo, hi) = (p.col_lower[j], p.col_upper[j]);
        if lo.is_finite() {
            map.push((nvars, None, lo));
            nvars += 1;
        } else if hi.is_finite() {
            // x = hi - x-
            map.push((usize::MAX, Some(nvars), hi));
            nvars += 1;
        } else {
            map.push((nvars, Some(nvars + 1), 0.0));
            nvars += 2;
        }
    }
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    let mut dense_row = |terms: &[(usize, f64)], sense: Sense, rhs: f64| {
        let mut a = vec![0.0; nvars];
        let mut b = rhs;
        for &(j, v) in terms {
            let (plus, minus, shift) = map[j];
            b -= v * shift;
            if plus != usize::MAX {
                a[plus] += v;
            }
            if let Some(m) = minus {
                a[m] -= v;
            }
        }
        rows.push((a, sense, b));
    };
    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p.num_rows()];
    for &(r, c, v) in &p.triplets {
        by_row[r].push((c, v));
    }
    for r in 0..p.num_rows() {
        dense_row(&by_row[r], p.senses[r], p.rhs[r]);
    }
    for j in 0..p.num_cols() {
        let (lo, hi) = (p.col_lower[j], p.col_upper[j]);
        if lo.is_finite() && hi.is_finite() {
            dense_row(&[(j, 1.0)], Sense::Le, hi);
        }
    }
    let mut cost = vec![0.0; nvars];
    for j in 0..p.num_cols() {
        let (plus, minus, _) = map[j];
        if plus != usize::MAX {
            cost[plus] += p.objective[j];
        }
        if let Some(m) = minus {
            cost[m] -= p.objective[j];
        }
    }
    let shift_value: f64 = (0..p.num_cols()).map(|j| p.objective[j] * map[j].2).sum::<f64>() + p.objective_offset;

    // standard form with slacks and artificials
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let width = nvars + slack_count + m;
    let mut t = vec![vec![0.0; width + 1]; m];
    let mut basis = vec![0; m];
    let mut s = nvars;
    for (i, (a, sense, b)) in rows.iter().enumerate() {
        let flip = if *b < 0.0 { -1.0 } else { 1.0 };
        for k in 0..nvars {
            t[i][k] = flip * a[k];
        }
        match sense {
            Sense::Le => {
                t[i][s] = flip;
                s += 1;
            }
            Sense::Ge => {
                t[i][s] = -flip;
                s += 1;
            }
            Sense::Eq => {}
        }
        t[i][nvars + slack_count + i] = 1.0;
        t[i][width] = flip * b;
        basis[i] = nvars + slack_count + i;
    }
    let artificial = |k: usize| k >= nvars + slack_count;

    let pivot = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, r: usize, c: usize| {
        let pv = t[r][c];
        for v in t[r].iter_mut() {
            *v /= pv;
        }
        for i in 0..t.len() {
            if i != r && t[i][c] != 0.0 {
                let f = t[i][c];
                let (src, dst) = if i < r {
                    let (a, b) = t.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = t.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for k in 0..dst.len() {
                    dst[k] -= f * src[k];
                }
            }
        }
        basis[r] = c;
    };

    // minimizes obj · x over the tableau; `allowed` masks entering columns
    let run = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, obj: &[f64], allowed: &dyn Fn(usize) -> bool| -> bool {
        loop {
            let mut entering = None;
            for c in 0..width {
                if !allowed(c) || basis.contains(&c) {
                    continue;
                }
                let reduced = obj[c] - (0..m).map(|i| obj[basis[i]] * t[i][c]).sum::<f64>();
                if reduced < -1e-10 {
                    entering = Some(c);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave = None;
            let mut best = f64::INFINITY;
            for i in 0..m {
                if t[i][c] > 1e-10 {
                    let ratio = t[i][width] / t[i][c];
                    if ratio < best - 1e-12 || (ratio <= best + 1e-12 && leave.is_some_and(|l: usize| basis[i] < basis[l])) {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            match leave {
                Some(r) => pivot(t, basis, r, c),
                None => return false,
            }
        }
    };

    let phase1: Vec<f64> = (0..width).map(|k| if artificial(k) { 1.0 } else { 0.0 }).collect();
    run(&mut t, &mut basis, &phase1, &|_| true);
    let infeasibility: f64 = (0..m).filter(|&i| artificial(basis[i])).map(|i| t[i][width]).sum();
    if infeasibility > 1e-7 {
        return Tableau::Infeasible;
    }
    // drive degenerate artificials out where possible
    for i in 0..m {
        if artificial(basis[i]) {
            if let Some(c) = (0..nvars + slack_count).find(|&c| t[i][c].abs() > 1e-9) {
                pivot(&mut t, &mut basis, i, c);
            }
        }
    }
    let phase2: Vec<f64> = (0..width).map(|k| if k < nvars { -cost[k] } else { 0.0 }).collect();
    if !run(&mut t, &mut basis, &phase2, &|c| !artificial(c)) {
        return Tableau::Unbounded;
    }
    let value: f64 = (0..m).filter(|&i| basis[i] < nvars).map(|i| cost[basis[i]] * t[i][width]).sum();
    Tableau::Optimal(value + shift_value)
}

fn random_lp(rng: &mut rand_chacha::ChaCha8Rng) -> MilpProblem {
    let mut p = MilpProblem::new();
    let n = rng.gen_range(2..=6);
    for j in 0..n {
        let lo = if rng.gen_bool(0.2) { f64::NEG_INFINITY } else { rng.gen_range(-2..=1) as f64 };
        let hi = if rng.gen_bool(0.4) { f64::INFINITY } else { lo.max(-2.0) + rng.gen_range(1..=6) as f64 };
        p.add_col(format!("x{j}"), lo, hi, rng.gen_range(-5..=5) as f64, false);
    }
    for r in 0..rng.gen_range(1..=5) {
        let mut terms = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.6) {
                terms.push((j, rng.gen_range(-4..=4) as f64));
            }
        }
        let sense = [Sense::Le, Sense::Le, Sense::Ge, Sense::Eq][rng.gen_range(0..4)];
        p.add_row(format!("r{r}"), terms, sense, rng.gen_range(-6..=10) as f64);
    }
    p.objective_offset = rng.gen_range(-3..=3) as f64;
    p
}

#[test]
fn random_small_lps_agree() {
    let mut rng = common::rng(31);
    let mut seen = [0usize; 3];
    for case in 0..300 {
        let p = random_lp(&mut rng);
        let ours = solve_lp(&p);
        match tableau_max(&p) {
            Tableau::Optimal(v) => {
                seen[0] += 1;
                assert_eq!(ours.status, LpStatus::Optimal, "case {case}");
                assert!((ours.objective - v).abs() <= 1e-8, "case {case}: {} vs {v}", ours.objective);
            }
            Tableau::Infeasible => {
                seen[1] += 1;
                assert_eq!(ours.status, LpStatus::Infeasible, "case {case}");
            }
            Tableau::Unbounded => {
                seen[2] += 1;
                assert_eq!(ours.status, LpStatus::Unbounded, "case {case}");
            }
        }
    }
    // the generator exercises every outcome
    assert!(seen.iter().all(|&k| k > 0), "{seen:?}");
}

#[test]
fn relaxations_of_tiny_instances_agree() {
    let mut rng = common::rng(77);
    for case in 0..40 {
        let inst = common::tiny_instance(&mut rng);
        let p = formulate_instance(&inst).unwrap().problem.relaxation();
        let ours = solve_lp(&p);
        let Tableau::Optimal(v) = tableau_max(&p) else { panic!("case {case}: tableau found no optimum") };
        assert_eq!(ours.status, LpStatus::Optimal);
        assert!((ours.objective - v).abs() <= 1e-8, "case {case}: {} vs {v}", ours.objective);
    }
}
