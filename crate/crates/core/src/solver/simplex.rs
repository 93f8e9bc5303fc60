//! Bounded-variable revised simplex.
//!
//! Every row `i` gets a logical column `n + i` so that `A x + s = b`; the row
//! sense becomes the logical's bounds (`=` → `[0, 0]`, `<=` → `[0, ∞)`,
//! `>=` → `(-∞, 0]`). Column bounds are handled implicitly: nonbasic columns
//! sit at one of their bounds. The basis inverse is held in product form, a
//! list of elementary column transformations (etas): one per structural
//! column at refactorization, plus one per pivot, rebuilt from scratch every
//! [`REFACTOR_EVERY`] updates. The matrices here are network-like, so etas
//! stay sparse and both solves cost roughly their nonzeros.
//!
//! Internally the problem is a minimization of `-objective`.
//!
//! Pricing is Dantzig's rule; after [`BLAND_AFTER`] consecutive degenerate
//! pivots both the primal and the dual loop fall back to Bland's
//! smallest-index rule until progress resumes, which rules out cycling.

use crate::milp::{MilpProblem, Sense};

pub(crate) const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const BLAND_AFTER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free column held at zero.
    Zero,
}

/// A basis that can be reinstalled with [`Simplex::restore`].
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    basis: Vec<usize>,
    state: Vec<State>,
}

#[derive(Debug, Clone)]
pub(crate) struct Simplex {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// Position in `basis` for basic columns.
    position: Vec<usize>,
    state: Vec<State>,
    x: Vec<f64>,
    /// `B⁻¹ = E_k ⋯ E_1`, applied in order by `ftran`, in reverse by `btran`.
    etas: Vec<Eta>,
    updates: usize,
    /// Phase-two reduced costs, kept current across pivots when valid.
    d: Vec<f64>,
    /// Scratch: row `r` of `B⁻¹ [A | I]`.
    row_alpha: Vec<f64>,
    pub(crate) iterations: u64,
    max_iterations: u64,
    /// Iteration count at which the current solve gives up.
    budget: u64,
}

impl Simplex {
    pub(crate) fn new(problem: &MilpProblem) -> Self {
        let m = problem.num_rows();
        let n = problem.num_cols();
        let mut cols = vec![Vec::new(); n];
        let mut rows = vec![Vec::new(); m];
        for &(r, c, v) in &problem.triplets {
            cols[c].push((r, v));
            rows[r].push((c, v));
        }
        let mut lower = problem.col_lower.clone();
        let mut upper = problem.col_upper.clone();
        for s in &problem.senses {
            let (lo, hi) = match s {
                Sense::Eq => (0.0, 0.0),
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
        }
        let mut cost: Vec<f64> = problem.objective.iter().map(|c| -c).collect();
        cost.resize(n + m, 0.0);
        let max_iterations = 200_000 + 50 * (n + m) as u64;
        let mut s = Self {
            m,
            n,
            cols,
            rows,
            lower,
            upper,
            cost,
            rhs: problem.rhs.clone(),
            basis: Vec::new(),
            position: vec![usize::MAX; n + m],
            state: vec![State::Lower; n + m],
            x: vec![0.0; n + m],
            etas: Vec::new(),
            updates: 0,
            d: vec![0.0; n + m],
            row_alpha: vec![0.0; n + m],
            iterations: 0,
            max_iterations,
            budget: max_iterations,
        };
        s.install_slack_basis();
        s
    }

    fn install_slack_basis(&mut self) {
        let (m, n) = (self.m, self.n);
        for j in 0..n {
            self.state[j] = self.resting_state(j, State::Lower);
            self.position[j] = usize::MAX;
        }
        self.basis = (n..n + m).collect();
        for i in 0..m {
            self.state[n + i] = State::Basic;
            self.position[n + i] = i;
        }
        self.etas.clear();
        self.updates = 0;
        self.sync_nonbasic_values();
        self.compute_basic_values();
    }

    /// Nonbasic state honoring which bounds are finite.
    fn resting_state(&self, j: usize, preferred: State) -> State {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        match preferred {
            State::Upper if hi.is_finite() => State::Upper,
            _ if lo.is_finite() => State::Lower,
            _ if hi.is_finite() => State::Upper,
            _ => State::Zero,
        }
    }

    fn sync_nonbasic_values(&mut self) {
        for j in 0..self.n + self.m {
            match self.state[j] {
                State::Basic => {}
                State::Lower => self.x[j] = self.lower[j],
                State::Upper => self.x[j] = self.upper[j],
                State::Zero => self.x[j] = 0.0,
            }
        }
    }

    fn column(&self, j: usize) -> ColumnIter<'_> {
        if j < self.n {
            ColumnIter::Structural(self.cols[j].iter())
        } else {
            ColumnIter::Unit(Some(j - self.n))
        }
    }

    /// `x_B = B⁻¹ (b - N x_N)`.
    fn compute_basic_values(&mut self) {
        let m = self.m;
        let mut residual = self.rhs.clone();
        for j in 0..self.n + m {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                let v = self.x[j];
                for (i, a) in self.column(j) {
                    residual[i] -= a * v;
                }
            }
        }
        self.apply_ftran(&mut residual);
        for (p, &j) in self.basis.iter().enumerate() {
            self.x[j] = residual[p];
        }
    }

    fn apply_ftran(&self, v: &mut [f64]) {
        for eta in &self.etas {
            let xr = v[eta.row];
            if xr == 0.0 {
                continue;
            }
            let xr = xr / eta.pivot;
            v[eta.row] = xr;
            for &(i, a) in &eta.entries {
                v[i] -= a * xr;
            }
        }
    }

    fn apply_btran(&self, v: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut acc = v[eta.row];
            for &(i, a) in &eta.entries {
                acc -= a * v[i];
            }
            v[eta.row] = acc / eta.pivot;
        }
    }

    /// `B⁻¹ a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let mut alpha = vec![0.0; self.m];
        for (k, a) in self.column(j) {
            alpha[k] += a;
        }
        self.apply_ftran(&mut alpha);
        alpha
    }

    /// `y = c_B B⁻¹` for the given basic costs.
    fn duals(&self, basic_cost: &[f64]) -> Vec<f64> {
        let mut y = basic_cost.to_vec();
        self.apply_btran(&mut y);
        y
    }

    fn reduced_cost(&self, j: usize, own_cost: f64, y: &[f64]) -> f64 {
        own_cost - self.column(j).map(|(i, a)| y[i] * a).sum::<f64>()
    }

    /// Replaces `basis[r]` by the column whose transformed column is `alpha`.
    fn update_inverse(&mut self, r: usize, alpha: &[f64]) {
        let entries =
            alpha.iter().enumerate().filter(|&(i, &a)| i != r && a.abs() > 1e-14).map(|(i, &a)| (i, a)).collect();
        self.etas.push(Eta { row: r, pivot: alpha[r], entries });
        self.updates += 1;
    }

    /// Rebuilds the inverse from the current basis. Columns that turn out
    /// dependent are swapped for logicals. Returns `false` if no repair was
    /// possible.
    fn refactor(&mut self) -> bool {
        let (m, n) = (self.m, self.n);
        let old = std::mem::take(&mut self.basis);
        self.etas.clear();
        let mut assigned = vec![usize::MAX; m];
        let mut rejected = Vec::new();
        // logicals take their own rows without an eta
        for &j in old.iter().filter(|&&j| j >= n) {
            assigned[j - n] = j;
        }
        let mut structurals: Vec<usize> = old.iter().copied().filter(|&j| j < n).collect();
        structurals.sort_unstable();
        for j in structurals {
            let alpha = self.ftran(j);
            let mut best = None;
            let mut best_abs = PIVOT_TOL * 10.0;
            for (i, &a) in alpha.iter().enumerate() {
                if assigned[i] == usize::MAX && a.abs() > best_abs {
                    best_abs = a.abs();
                    best = Some(i);
                }
            }
            match best {
                Some(r) => {
                    self.update_inverse(r, &alpha);
                    assigned[r] = j;
                }
                None => rejected.push(j),
            }
        }
        if !rejected.is_empty() {
            for &j in &rejected {
                self.state[j] = self.resting_state(j, State::Lower);
                self.position[j] = usize::MAX;
            }
            for q in n..n + m {
                if !assigned.contains(&usize::MAX) {
                    break;
                }
                if self.state[q] == State::Basic {
                    continue;
                }
                let alpha = self.ftran(q);
                let mut best = None;
                let mut best_abs = PIVOT_TOL * 10.0;
                for (i, &a) in alpha.iter().enumerate() {
                    if assigned[i] == usize::MAX && a.abs() > best_abs {
                        best_abs = a.abs();
                        best = Some(i);
                    }
                }
                if let Some(r) = best {
                    self.update_inverse(r, &alpha);
                    assigned[r] = q;
                    self.state[q] = State::Basic;
                }
            }
            if assigned.contains(&usize::MAX) {
                return false;
            }
            self.sync_nonbasic_values();
        }
        self.basis = assigned;
        for (p, &j) in self.basis.iter().enumerate() {
            self.position[j] = p;
            self.state[j] = State::Basic;
        }
        self.updates = 0;
        self.compute_basic_values();
        true
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lower[j] - PRIMAL_TOL {
            self.lower[j] - v
        } else if v > self.upper[j] + PRIMAL_TOL {
            v - self.upper[j]
        } else {
            0.0
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lower[j] == self.upper[j]
    }

    /// Solves from the all-logical basis.
    pub(crate) fn solve(&mut self) -> Outcome {
        self.budget = self.iterations + self.max_iterations;
        self.install_slack_basis();
        self.primal()
    }

    /// Re-solves after bound changes, keeping the current basis.
    pub(crate) fn reoptimize(&mut self) -> Outcome {
        self.budget = self.iterations + self.max_iterations;
        for j in 0..self.n + self.m {
            if self.state[j] != State::Basic {
                self.state[j] = self.resting_state(j, self.state[j]);
            }
        }
        self.sync_nonbasic_values();
        if self.updates >= REFACTOR_EVERY && !self.refactor() {
            return self.solve();
        }
        self.compute_basic_values();
        self.recompute_reduced_costs();
        if self.is_dual_feasible() {
            match self.dual() {
                Outcome::Optimal => self.primal(),
                Outcome::NumericalFailure => self.solve(),
                other => other,
            }
        } else {
            self.primal()
        }
    }

    pub(crate) fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub(crate) fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub(crate) fn snapshot(&self) -> Basis {
        Basis { basis: self.basis.clone(), state: self.state.clone() }
    }

    pub(crate) fn restore(&mut self, basis: &Basis) {
        self.basis = basis.basis.clone();
        self.state = basis.state.clone();
        self.position.iter_mut().for_each(|p| *p = usize::MAX);
        for (p, &j) in self.basis.iter().enumerate() {
            self.position[j] = p;
        }
        for j in 0..self.n + self.m {
            if self.state[j] != State::Basic {
                self.state[j] = self.resting_state(j, self.state[j]);
            }
        }
        self.sync_nonbasic_values();
        if !self.refactor() {
            self.install_slack_basis();
        }
    }

    fn basic_costs(&self) -> Vec<f64> {
        self.basis.iter().map(|&j| self.cost[j]).collect()
    }

    fn is_dual_feasible(&self) -> bool {
        (0..self.n + self.m).all(|j| {
            if self.state[j] == State::Basic || self.is_fixed(j) {
                return true;
            }
            let d = self.d[j];
            match self.state[j] {
                State::Lower => d >= -DUAL_TOL,
                State::Upper => d <= DUAL_TOL,
                State::Zero => d.abs() <= DUAL_TOL,
                State::Basic => true,
            }
        })
    }

    fn recompute_reduced_costs(&mut self) {
        let y = self.duals(&self.basic_costs());
        for j in 0..self.n + self.m {
            self.d[j] = if self.state[j] == State::Basic { 0.0 } else { self.reduced_cost(j, self.cost[j], &y) };
        }
    }

    /// Fills `row_alpha` with row `r` of `B⁻¹ [A | I]`.
    fn compute_pivot_row(&mut self, r: usize) {
        let (n, m) = (self.n, self.m);
        let mut rho_r = vec![0.0; m];
        rho_r[r] = 1.0;
        self.apply_btran(&mut rho_r);
        self.row_alpha.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..m {
            let rho = rho_r[k];
            if rho == 0.0 {
                continue;
            }
            for &(c, a) in &self.rows[k] {
                self.row_alpha[c] += rho * a;
            }
            self.row_alpha[n + k] = rho;
        }
    }

    /// Updates `d` for a pivot on row `r` (before the basis changes), with
    /// entering column `q` and pivot element `pivot`.
    fn update_reduced_costs(&mut self, r: usize, q: usize, pivot: f64) {
        let theta = self.d[q] / pivot;
        if theta != 0.0 {
            for j in 0..self.n + self.m {
                if self.state[j] != State::Basic && self.row_alpha[j] != 0.0 {
                    self.d[j] -= theta * self.row_alpha[j];
                }
            }
        }
        self.d[q] = 0.0;
        self.d[self.basis[r]] = -theta;
    }

    /// Applies a step of length `step` in direction `dir` on entering column
    /// `q` with transformed column `alpha`.
    fn move_along(&mut self, q: usize, dir: f64, step: f64, alpha: &[f64]) {
        if step == 0.0 {
            return;
        }
        self.x[q] += dir * step;
        for (p, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                let j = self.basis[p];
                self.x[j] -= dir * step * a;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], leaving_state: State) {
        let leaving = self.basis[r];
        self.state[leaving] = leaving_state;
        self.position[leaving] = usize::MAX;
        self.x[leaving] = match leaving_state {
            State::Lower => self.lower[leaving],
            State::Upper => self.upper[leaving],
            _ => 0.0,
        };
        self.basis[r] = q;
        self.position[q] = r;
        self.state[q] = State::Basic;
        self.update_inverse(r, alpha);
    }

    /// Composite primal simplex: minimizes the sum of bound violations while
    /// any basic column is out of bounds, then the true objective.
    fn primal(&mut self) -> Outcome {
        let total = self.n + self.m;
        let mut degenerate = 0usize;
        let mut cleanups = 0;
        let mut d_valid = false;
        loop {
            self.iterations += 1;
            if self.iterations > self.budget {
                return Outcome::NumericalFailure;
            }
            if self.updates >= REFACTOR_EVERY {
                if !self.refactor() {
                    return Outcome::NumericalFailure;
                }
                d_valid = false;
            }
            let infeasible = self.basis.iter().any(|&j| self.infeasibility(j) > 0.0);
            let phase_one_duals = if infeasible {
                let costs: Vec<f64> = self
                    .basis
                    .iter()
                    .map(|&j| {
                        if self.x[j] < self.lower[j] - PRIMAL_TOL {
                            -1.0
                        } else if self.x[j] > self.upper[j] + PRIMAL_TOL {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                d_valid = false;
                Some(self.duals(&costs))
            } else {
                if !d_valid {
                    self.recompute_reduced_costs();
                    d_valid = true;
                }
                None
            };
            let bland = degenerate >= BLAND_AFTER;

            let mut entering: Option<(usize, f64)> = None;
            let mut best_score = 0.0;
            for j in 0..total {
                if self.state[j] == State::Basic || self.is_fixed(j) {
                    continue;
                }
                let d = match &phase_one_duals {
                    Some(y) => self.reduced_cost(j, 0.0, y),
                    None => self.d[j],
                };
                let dir = match self.state[j] {
                    State::Lower if d < -DUAL_TOL => 1.0,
                    State::Upper if d > DUAL_TOL => -1.0,
                    State::Zero if d.abs() > DUAL_TOL => -d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if d.abs() > best_score {
                    best_score = d.abs();
                    entering = Some((j, dir));
                }
            }

            let Some((q, dir)) = entering else {
                if infeasible {
                    return Outcome::Infeasible;
                }
                // confirm on a fresh factorization before declaring victory
                if self.updates > 0 && cleanups < 3 {
                    cleanups += 1;
                    if !self.refactor() {
                        return Outcome::NumericalFailure;
                    }
                    d_valid = false;
                    continue;
                }
                return Outcome::Optimal;
            };

            let alpha = self.ftran(q);
            let flip = self.upper[q] - self.lower[q];
            // (ratio, row, leaving state)
            let mut candidates: Vec<(f64, usize, State)> = Vec::new();
            for (p, &a) in alpha.iter().enumerate() {
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let j = self.basis[p];
                let rate = -dir * a;
                let (v, lo, hi) = (self.x[j], self.lower[j], self.upper[j]);
                let hit = if infeasible && v < lo - PRIMAL_TOL {
                    (rate > 0.0).then(|| ((lo - v) / rate, State::Lower))
                } else if infeasible && v > hi + PRIMAL_TOL {
                    (rate < 0.0).then(|| ((v - hi) / -rate, State::Upper))
                } else if rate > 0.0 && hi.is_finite() {
                    Some((((hi - v) / rate).max(0.0), State::Upper))
                } else if rate < 0.0 && lo.is_finite() {
                    Some((((v - lo) / -rate).max(0.0), State::Lower))
                } else {
                    None
                };
                if let Some((ratio, st)) = hit {
                    candidates.push((ratio, p, st));
                }
            }
            let min_ratio = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);

            if flip <= min_ratio && flip.is_finite() {
                self.move_along(q, dir, flip, &alpha);
                self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                degenerate = 0;
                continue;
            }
            if candidates.is_empty() {
                return if infeasible { Outcome::NumericalFailure } else { Outcome::Unbounded };
            }
            let tie = min_ratio + 1e-12 * (1.0 + min_ratio);
            let chosen = candidates
                .iter()
                .filter(|c| c.0 <= tie)
                .min_by(|a, b| {
                    if bland {
                        self.basis[a.1].cmp(&self.basis[b.1])
                    } else {
                        alpha[b.1].abs().total_cmp(&alpha[a.1].abs()).then(a.1.cmp(&b.1))
                    }
                })
                .copied()
                .expect("nonempty");
            let (step, r, leaving_state) = chosen;
            degenerate = if step <= 1e-12 { degenerate + 1 } else { 0 };
            if d_valid {
                self.compute_pivot_row(r);
                self.update_reduced_costs(r, q, alpha[r]);
            }
            self.move_along(q, dir, step, &alpha);
            self.pivot(r, q, &alpha, leaving_state);
        }
    }

    /// Dual simplex from a dual feasible basis with current `d`.
    fn dual(&mut self) -> Outcome {
        let (n, m) = (self.n, self.m);
        let mut degenerate = 0usize;
        loop {
            self.iterations += 1;
            if self.iterations > self.budget {
                return Outcome::NumericalFailure;
            }
            if self.updates >= REFACTOR_EVERY {
                if !self.refactor() {
                    return Outcome::NumericalFailure;
                }
                self.recompute_reduced_costs();
            }
            let bland = degenerate >= BLAND_AFTER;
            let mut leave: Option<usize> = None;
            let mut worst = 0.0;
            for p in 0..m {
                let j = self.basis[p];
                let infeas = self.infeasibility(j);
                if infeas <= 0.0 {
                    continue;
                }
                let better = if bland {
                    leave.is_none_or(|r| j < self.basis[r])
                } else {
                    infeas > worst
                };
                if better {
                    worst = infeas;
                    leave = Some(p);
                }
            }
            let Some(r) = leave else { return Outcome::Optimal };
            let leaving = self.basis[r];
            let below = self.x[leaving] < self.lower[leaving];
            let target = if below { self.lower[leaving] } else { self.upper[leaving] };
            let delta = self.x[leaving] - target;

            self.compute_pivot_row(r);
            let mut best: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_mag = 0.0;
            for j in 0..n + m {
                let a = self.row_alpha[j];
                if self.state[j] == State::Basic || self.is_fixed(j) || a.abs() <= PIVOT_TOL {
                    continue;
                }
                // entering moves x_leaving toward its violated bound
                let eligible = match self.state[j] {
                    State::Lower => (below && a < 0.0) || (!below && a > 0.0),
                    State::Upper => (below && a > 0.0) || (!below && a < 0.0),
                    State::Zero => true,
                    State::Basic => false,
                };
                if !eligible {
                    continue;
                }
                let d = match self.state[j] {
                    State::Lower => self.d[j].max(0.0),
                    State::Upper => self.d[j].min(0.0),
                    _ => self.d[j],
                };
                let ratio = d.abs() / a.abs();
                let slack = 1e-12 * (1.0 + best_ratio);
                let take = if bland {
                    ratio < best_ratio - slack
                } else {
                    ratio < best_ratio - slack || (ratio <= best_ratio + slack && a.abs() > best_mag)
                };
                if take || best.is_none() {
                    best = Some(j);
                    best_ratio = ratio;
                    best_mag = a.abs();
                }
            }
            let Some(q) = best else { return Outcome::Infeasible };

            let alpha = self.ftran(q);
            if alpha[r].abs() <= PIVOT_TOL {
                // row and column computations disagree: rebuild and retry
                if !self.refactor() {
                    return Outcome::NumericalFailure;
                }
                self.recompute_reduced_costs();
                degenerate += 1;
                continue;
            }
            let step = delta / alpha[r];
            self.update_reduced_costs(r, q, alpha[r]);
            self.move_along(q, 1.0, step, &alpha);
            let leaving_state = if below { State::Lower } else { State::Upper };
            degenerate = if best_ratio <= 1e-12 { degenerate + 1 } else { 0 };
            self.pivot(r, q, &alpha, leaving_state);
        }
    }

    /// Structural column values.
    pub(crate) fn values(&self) -> &[f64] {
        &self.x[..self.n]
    }

    /// Objective in the maximization sense, without the constant offset.
    pub(crate) fn objective(&self) -> f64 {
        -(0..self.n).map(|j| self.cost[j] * self.x[j]).sum::<f64>()
    }

    /// Row duals and structural reduced costs, both in the maximization
    /// sense.
    pub(crate) fn dual_values(&self) -> (Vec<f64>, Vec<f64>) {
        let y = self.duals(&self.basic_costs());
        let reduced = (0..self.n).map(|j| -self.reduced_cost(j, self.cost[j], &y)).collect();
        (y.into_iter().map(|v| -v).collect(), reduced)
    }
}

#[derive(Debug, Clone)]
struct Eta {
    row: usize,
    pivot: f64,
    /// Off-pivot entries of the entering column in the old basis.
    entries: Vec<(usize, f64)>,
}

enum ColumnIter<'a> {
    Structural(std::slice::Iter<'a, (usize, f64)>),
    Unit(Option<usize>),
}

impl Iterator for ColumnIter<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColumnIter::Structural(it) => it.next().copied(),
            ColumnIter::Unit(slot) => slot.take().map(|i| (i, 1.0)),
        }
    }
}
