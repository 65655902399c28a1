//! Bounded-variable simplex on a condensed tableau.
//!
//! Every row gets a slack (`[0,inf)` for `<=`, `(-inf,0]` for `>=`, `[0,0]`
//! for `=`), and rows whose slack cannot absorb the initial residual get an
//! artificial. Only nonbasic columns are stored, so a model with many rows
//! and few variables stays cheap to pivot. Phase one drives artificials to
//! zero, phase two optimizes the real objective with artificials fixed at
//! zero. Pricing is Dantzig's rule until a run of degenerate pivots triggers
//! Bland's rule.
//!
//! [`LpEngine`] keeps the last optimal basis and re-solves after bound
//! changes and appended rows with the dual simplex.

use crate::error::{Error, Result};

use super::model::{Constraint, LinearModel, Relation};

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
pub const FEAS_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;
const REFRESH_EVERY: usize = 100;
/// Residual allowed on a warm-started answer before it is redone cold.
const WARM_CHECK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values of the model's variables (meaningful when optimal).
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Solves the continuous relaxation of `model` with its declared bounds.
pub fn solve_lp(model: &LinearModel) -> Result<LpSolution> {
    let bounds: Vec<(f64, f64)> = model.variables().iter().map(|v| (v.lb, v.ub)).collect();
    solve_relaxation(model, &bounds)
}

/// Solves the relaxation with per-variable bound overrides.
pub fn solve_relaxation(model: &LinearModel, bounds: &[(f64, f64)]) -> Result<LpSolution> {
    cold_solve(model, bounds).map(|(sol, _)| sol)
}

fn infeasible(iterations: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        objective: f64::INFINITY,
        iterations,
    }
}

/// Two-phase solve from a slack basis. The final tableau comes back when the
/// relaxation is optimal so it can seed later solves.
fn cold_solve(model: &LinearModel, bounds: &[(f64, f64)]) -> Result<(LpSolution, Option<Tableau>)> {
    let mut tab = Tableau::build(model, bounds, true);
    let ns = model.num_vars();
    let mut iterations = 0;

    if tab.has_artificials() {
        let cost: Vec<f64> = (0..tab.nv()).map(|j| if j >= tab.first_art { 1.0 } else { 0.0 }).collect();
        tab.set_cost(cost);
        tab.run(&mut iterations)?;
        tab.refresh_values();
        let infeasibility: f64 = (tab.first_art..tab.nv()).map(|j| tab.x[j].max(0.0)).sum();
        if infeasibility > FEAS_TOL * (1.0 + tab.rhs_scale) {
            return Ok((infeasible(iterations), None));
        }
        for j in tab.first_art..tab.nv() {
            tab.ub[j] = 0.0;
            if tab.status[j] != Status::Basic {
                tab.x[j] = 0.0;
            }
        }
    }

    let mut cost = vec![0.0; tab.nv()];
    cost[..ns].copy_from_slice(model.objective());
    tab.set_cost(cost);
    if tab.run(&mut iterations)? == RunOutcome::Unbounded {
        let sol = LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective: f64::NEG_INFINITY,
            iterations,
        };
        return Ok((sol, None));
    }
    tab.refresh_values();
    let values = tab.structural_values(ns);
    let objective = model.objective_value(&values);
    let sol = LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
        iterations,
    };
    Ok((sol, Some(tab)))
}

/// Re-solves one model under changing bounds and a growing row set. The last
/// optimal basis is kept; a new solve moves the bounds, appends the new rows
/// and restores feasibility with the dual simplex. Anything suspicious falls
/// back to a cold solve.
pub(crate) struct LpEngine {
    tab: Option<Tableau>,
    loaded: usize,
    pivots: usize,
}

impl LpEngine {
    pub fn new() -> Self {
        LpEngine {
            tab: None,
            loaded: 0,
            pivots: 0,
        }
    }

    pub fn solve(&mut self, model: &LinearModel, bounds: &[(f64, f64)]) -> Result<LpSolution> {
        if bounds.iter().all(|(l, u)| l.is_finite() && u.is_finite()) {
            if let Some(sol) = self.warm(model, bounds) {
                return Ok(sol);
            }
            // boxed columns make the all-slack basis dual feasible
            let mut tab = Tableau::build(model, bounds, false);
            let mut cost = vec![0.0; tab.nv()];
            cost[..model.num_vars()].copy_from_slice(model.objective());
            tab.set_cost(cost);
            self.loaded = model.num_rows();
            self.pivots = 0;
            if let Some(sol) = self.resolve(tab, model, bounds) {
                return Ok(sol);
            }
        }
        let (sol, tab) = cold_solve(model, bounds)?;
        self.tab = tab;
        self.loaded = model.num_rows();
        self.pivots = 0;
        Ok(sol)
    }

    fn warm(&mut self, model: &LinearModel, bounds: &[(f64, f64)]) -> Option<LpSolution> {
        let mut tab = self.tab.take()?;
        let rows = model.num_rows();
        if rows < self.loaded || self.pivots > 5_000 + 20 * (rows + model.num_vars()) {
            return None;
        }
        tab.append_rows(model.rows().skip(self.loaded));
        self.loaded = rows;
        self.resolve(tab, model, bounds)
    }

    /// Moves the bounds, then restores primal feasibility with the dual
    /// simplex and checks the answer against the model.
    fn resolve(&mut self, mut tab: Tableau, model: &LinearModel, bounds: &[(f64, f64)]) -> Option<LpSolution> {
        let ns = model.num_vars();
        for (j, &(l, u)) in bounds.iter().enumerate() {
            tab.lb[j] = l;
            tab.ub[j] = u;
            if tab.status[j] != Status::Basic {
                // the side that keeps the reduced cost dual feasible
                let dj = tab.d[tab.pos[j]];
                let upper = if l == u || dj > DUAL_TOL {
                    false
                } else if dj < -DUAL_TOL {
                    true
                } else {
                    tab.status[j] == Status::Upper
                };
                tab.status[j] = if upper { Status::Upper } else { Status::Lower };
                tab.x[j] = if upper { u } else { l };
            }
        }
        tab.refresh_values();

        let mut iterations = 0;
        let feasible = tab.dual(&mut iterations).ok()?;
        self.pivots += iterations;
        if !feasible {
            self.tab = Some(tab);
            return Some(infeasible(iterations));
        }
        let before = iterations;
        if tab.run(&mut iterations).ok()? != RunOutcome::Optimal {
            return None;
        }
        self.pivots += iterations - before;
        tab.refresh_values();
        let values = tab.structural_values(ns);
        let in_box = values
            .iter()
            .zip(bounds)
            .all(|(&v, &(l, u))| v >= l - WARM_CHECK && v <= u + WARM_CHECK);
        let rows_ok = model.rows().all(|row| {
            let lhs = row.lhs(&values);
            let slack = WARM_CHECK * (1.0 + row.rhs.abs());
            match row.relation {
                Relation::Le => lhs <= row.rhs + slack,
                Relation::Ge => lhs >= row.rhs - slack,
                Relation::Eq => (lhs - row.rhs).abs() <= slack,
            }
        });
        if !(in_box && rows_ok) {
            return None;
        }
        self.tab = Some(tab);
        let objective = model.objective_value(&values);
        Some(LpSolution {
            status: LpStatus::Optimal,
            values,
            objective,
            iterations,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RunOutcome {
    Optimal,
    Unbounded,
}

fn slack_bounds(relation: Relation) -> (f64, f64, Status) {
    match relation {
        Relation::Le => (0.0, f64::INFINITY, Status::Lower),
        Relation::Ge => (f64::NEG_INFINITY, 0.0, Status::Upper),
        Relation::Eq => (0.0, 0.0, Status::Lower),
    }
}

/// Row `i` reads `x[basis[i]] = beta[i] - sum_p t[i][p] * x[nb[p]]`.
struct Tableau {
    r: usize,
    w: usize,
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    nb: Vec<usize>,
    first_art: usize,
    /// Row of a basic variable, column of a nonbasic one.
    pos: Vec<usize>,
    status: Vec<Status>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    /// Reduced costs by column.
    d: Vec<f64>,
    rhs_scale: f64,
}

impl Tableau {
    /// Without `artificials` every slack starts basic, possibly out of its
    /// bounds, which only the dual simplex can repair.
    fn build(model: &LinearModel, bounds: &[(f64, f64)], artificials: bool) -> Self {
        let ns = model.num_vars();
        let rows: Vec<&Constraint> = model.rows().collect();
        let r = rows.len();

        let mut x = Vec::with_capacity(ns + 2 * r);
        let mut lb = Vec::with_capacity(ns + 2 * r);
        let mut ub = Vec::with_capacity(ns + 2 * r);
        let mut status = Vec::with_capacity(ns + 2 * r);
        for &(l, u) in bounds {
            lb.push(l);
            ub.push(u);
            x.push(l);
            status.push(Status::Lower);
        }
        for row in &rows {
            let (l, u, s) = slack_bounds(row.relation);
            lb.push(l);
            ub.push(u);
            x.push(0.0);
            status.push(s);
        }

        // rows whose slack cannot take the residual get an artificial
        let mut art_sign = vec![0.0; r];
        let mut residual = vec![0.0; r];
        for (i, row) in rows.iter().enumerate() {
            let res = row.rhs - row.lhs(&x[..ns]);
            residual[i] = res;
            let slack_ok = match row.relation {
                Relation::Le => res >= 0.0,
                Relation::Ge => res <= 0.0,
                Relation::Eq => res == 0.0,
            };
            if artificials && !slack_ok {
                art_sign[i] = if res >= 0.0 { 1.0 } else { -1.0 };
            }
        }
        let first_art = ns + r;
        let n_art = art_sign.iter().filter(|s| **s != 0.0).count();
        for _ in 0..n_art {
            lb.push(0.0);
            ub.push(f64::INFINITY);
            x.push(0.0);
            status.push(Status::Lower);
        }
        let nv = first_art + n_art;

        let mut nb: Vec<usize> = (0..ns).collect();
        nb.extend((0..r).filter(|&i| art_sign[i] != 0.0).map(|i| ns + i));
        let w = nb.len();
        let mut pos = vec![0; nv];
        for (p, &j) in nb.iter().enumerate() {
            pos[j] = p;
        }

        let mut t = vec![0.0; r * w];
        let mut beta = vec![0.0; r];
        let mut basis = vec![0; r];
        let mut next_art = first_art;
        let mut rhs_scale: f64 = 0.0;
        for (i, row) in rows.iter().enumerate() {
            let line = &mut t[i * w..(i + 1) * w];
            for &(v, a) in &row.terms {
                line[v] += a;
            }
            beta[i] = row.rhs;
            rhs_scale = rhs_scale.max(row.rhs.abs());
            let sign = art_sign[i];
            let k = if sign != 0.0 {
                // art = sign * (rhs - a x - s)
                line[pos[ns + i]] = 1.0;
                line.iter_mut().for_each(|a| *a *= sign);
                beta[i] *= sign;
                let col = next_art;
                next_art += 1;
                x[col] = residual[i].abs();
                col
            } else {
                x[ns + i] = residual[i];
                ns + i
            };
            basis[i] = k;
            status[k] = Status::Basic;
            pos[k] = i;
        }

        Tableau {
            r,
            w,
            t,
            beta,
            basis,
            nb,
            first_art,
            pos,
            status,
            lb,
            ub,
            x,
            cost: vec![0.0; nv],
            d: vec![0.0; w],
            rhs_scale,
        }
    }

    fn nv(&self) -> usize {
        self.x.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.w..(i + 1) * self.w]
    }

    fn structural_values(&self, ns: usize) -> Vec<f64> {
        (0..ns)
            .map(|j| {
                let v = self.x[j];
                // snap roundoff back inside the box
                if v < self.lb[j] && v > self.lb[j] - 1e-7 {
                    self.lb[j]
                } else if v > self.ub[j] && v < self.ub[j] + 1e-7 {
                    self.ub[j]
                } else {
                    v
                }
            })
            .collect()
    }

    /// Adds rows with basic slacks, written in terms of the current basis.
    fn append_rows<'a>(&mut self, rows: impl Iterator<Item = &'a Constraint>) {
        for row in rows {
            let mut line = vec![0.0; self.w];
            let mut beta = row.rhs;
            for &(j, a) in &row.terms {
                if self.status[j] == Status::Basic {
                    let i = self.pos[j];
                    for (l, v) in line.iter_mut().zip(self.row(i)) {
                        *l -= a * v;
                    }
                    beta -= a * self.beta[i];
                } else {
                    line[self.pos[j]] += a;
                }
            }
            let (l, u, _) = slack_bounds(row.relation);
            let k = self.nv();
            self.lb.push(l);
            self.ub.push(u);
            self.x.push(0.0);
            self.status.push(Status::Basic);
            self.cost.push(0.0);
            self.pos.push(self.r);
            self.t.extend_from_slice(&line);
            self.beta.push(beta);
            self.basis.push(k);
            self.r += 1;
            self.rhs_scale = self.rhs_scale.max(row.rhs.abs());
        }
    }

    fn has_artificials(&self) -> bool {
        self.nv() > self.first_art
    }

    fn set_cost(&mut self, cost: Vec<f64>) {
        for (p, &j) in self.nb.iter().enumerate() {
            self.d[p] = cost[j];
        }
        for i in 0..self.r {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.w..(i + 1) * self.w];
                for (dp, a) in self.d.iter_mut().zip(row) {
                    *dp -= cb * a;
                }
            }
        }
        self.cost = cost;
    }

    /// Recomputes basic values from the nonbasic ones.
    fn refresh_values(&mut self) {
        for i in 0..self.r {
            let row = &self.t[i * self.w..(i + 1) * self.w];
            let mut v = self.beta[i];
            for (a, &j) in row.iter().zip(&self.nb) {
                let xj = self.x[j];
                if xj != 0.0 {
                    v -= a * xj;
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    /// Entering column by Dantzig's rule, or the lowest variable index
    /// under Bland's rule.
    fn entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (p, &j) in self.nb.iter().enumerate() {
            if self.ub[j] <= self.lb[j] {
                continue;
            }
            let score = match self.status[j] {
                Status::Lower if self.d[p] < -DUAL_TOL => -self.d[p],
                Status::Upper if self.d[p] > DUAL_TOL => self.d[p],
                _ => continue,
            };
            let better = match best {
                None => true,
                Some((bp, s)) => {
                    if bland {
                        j < self.nb[bp]
                    } else {
                        score > s
                    }
                }
            };
            if better {
                best = Some((p, score));
            }
        }
        best.map(|(p, _)| p)
    }

    /// Moves every basic variable for a step of `delta` in column `p`.
    fn shift(&mut self, p: usize, delta: f64) {
        for i in 0..self.r {
            let a = self.t[i * self.w + p];
            if a != 0.0 {
                self.x[self.basis[i]] -= a * delta;
            }
        }
        let q = self.nb[p];
        self.x[q] += delta;
    }

    fn run(&mut self, iterations: &mut usize) -> Result<RunOutcome> {
        let cap = 20_000 + 50 * (self.r + self.w);
        let mut bland = false;
        let mut streak = 0;
        let mut local = 0;
        loop {
            let Some(p) = self.entering(bland) else {
                return Ok(RunOutcome::Optimal);
            };
            local += 1;
            *iterations += 1;
            if local > cap {
                return Err(Error::Numerical(format!("simplex exceeded {cap} iterations")));
            }
            let q = self.nb[p];
            let dir = if self.status[q] == Status::Lower { 1.0 } else { -1.0 };

            let mut step = self.ub[q] - self.lb[q];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.r {
                let alpha = self.t[i * self.w + p];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let k = self.basis[i];
                let delta = -alpha * dir;
                let limit = if delta < 0.0 {
                    if self.lb[k].is_finite() {
                        (self.x[k] - self.lb[k]) / -delta
                    } else {
                        continue;
                    }
                } else if self.ub[k].is_finite() {
                    (self.ub[k] - self.x[k]) / delta
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = match leave {
                    _ if limit < step - 1e-12 => true,
                    Some((li, la)) if limit <= step + 1e-12 => {
                        if bland {
                            k < self.basis[li]
                        } else {
                            alpha.abs() > la.abs()
                        }
                    }
                    _ => false,
                };
                if better {
                    step = limit;
                    leave = Some((i, alpha));
                }
            }
            if step.is_infinite() {
                return Ok(RunOutcome::Unbounded);
            }

            self.shift(p, dir * step);
            match leave {
                None => {
                    self.status[q] = if dir > 0.0 { Status::Upper } else { Status::Lower };
                    self.x[q] = if dir > 0.0 { self.ub[q] } else { self.lb[q] };
                }
                Some((row, alpha)) => {
                    let k = self.basis[row];
                    let to_lower = -alpha * dir < 0.0;
                    self.x[k] = if to_lower { self.lb[k] } else { self.ub[k] };
                    self.pivot(row, p, if to_lower { Status::Lower } else { Status::Upper });
                }
            }

            if step <= 1e-12 {
                streak += 1;
                if streak > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
            }
            if local % REFRESH_EVERY == 0 {
                self.refresh_values();
            }
        }
    }

    /// Bounded dual simplex from a dual feasible basis. Returns `false` when
    /// a row proves the bounds infeasible.
    fn dual(&mut self, iterations: &mut usize) -> Result<bool> {
        let cap = 20_000 + 50 * (self.r + self.w);
        let mut local = 0;
        loop {
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.r {
                let k = self.basis[i];
                let v = (self.lb[k] - self.x[k]).max(self.x[k] - self.ub[k]);
                if v > FEAS_TOL && leave.is_none_or(|(_, w)| v > w) {
                    leave = Some((i, v));
                }
            }
            let Some((row, _)) = leave else {
                return Ok(true);
            };
            local += 1;
            *iterations += 1;
            if local > cap {
                return Err(Error::Numerical(format!("dual simplex exceeded {cap} iterations")));
            }
            let k = self.basis[row];
            let below = self.x[k] < self.lb[k];
            let target = if below { self.lb[k] } else { self.ub[k] };
            let want = if below { 1.0 } else { -1.0 };

            let mut enter: Option<(usize, f64, f64)> = None;
            for (p, (&alpha, &j)) in self.row(row).iter().zip(&self.nb).enumerate() {
                if self.ub[j] <= self.lb[j] || alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let dir = if self.status[j] == Status::Lower { 1.0 } else { -1.0 };
                if -alpha * dir * want <= 0.0 {
                    continue;
                }
                let ratio = (self.d[p] * dir).max(0.0) / alpha.abs();
                let better = match enter {
                    None => true,
                    Some((_, r0, a0)) => ratio < r0 - 1e-12 || (ratio <= r0 + 1e-12 && alpha.abs() > a0.abs()),
                };
                if better {
                    enter = Some((p, ratio, alpha));
                }
            }
            let Some((p, _, alpha)) = enter else {
                return Ok(false);
            };
            let q = self.nb[p];
            let dir = if self.status[q] == Status::Lower { 1.0 } else { -1.0 };
            let step = (target - self.x[k]) / (-alpha * dir);
            self.shift(p, dir * step);
            self.x[k] = target;
            self.pivot(row, p, if below { Status::Lower } else { Status::Upper });
            if local % REFRESH_EVERY == 0 {
                self.refresh_values();
            }
        }
    }

    /// Exchanges the basic variable of `row` with the nonbasic one in column
    /// `p`; the leaving variable gets status `leaving`.
    fn pivot(&mut self, row: usize, p: usize, leaving: Status) {
        let w = self.w;
        let piv = self.t[row * w + p];
        {
            let line = &mut self.t[row * w..(row + 1) * w];
            line.iter_mut().for_each(|a| *a /= piv);
            line[p] = 1.0 / piv;
        }
        self.beta[row] /= piv;
        let pivot_row: Vec<f64> = self.t[row * w..(row + 1) * w].to_vec();
        let pivot_beta = self.beta[row];
        for i in 0..self.r {
            if i == row {
                continue;
            }
            let f = self.t[i * w + p];
            if f == 0.0 {
                continue;
            }
            let line = &mut self.t[i * w..(i + 1) * w];
            line[p] = 0.0;
            for (a, v) in line.iter_mut().zip(&pivot_row) {
                if *v != 0.0 {
                    *a -= f * v;
                }
            }
            self.beta[i] -= f * pivot_beta;
        }
        let dq = self.d[p];
        self.d[p] = 0.0;
        if dq != 0.0 {
            for (dj, v) in self.d.iter_mut().zip(&pivot_row) {
                *dj -= dq * v;
            }
        }
        let q = self.nb[p];
        let k = self.basis[row];
        self.basis[row] = q;
        self.nb[p] = k;
        self.status[q] = Status::Basic;
        self.status[k] = leaving;
        self.pos[q] = row;
        self.pos[k] = p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mip::model::VarKind;

    #[test]
    fn box_constrained_maximization() {
        let mut m = LinearModel::new();
        let a = m.add_continuous("x1", 0.0, 1.0).unwrap();
        let b = m.add_continuous("x2", 0.0, 1.0).unwrap();
        m.set_objective(a, -1.0);
        m.set_objective(b, -1.0);
        m.add_constraint("c", vec![(a, 1.0), (b, 1.0)], Relation::Le, 1.0).unwrap();
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_model() {
        let mut m = LinearModel::new();
        m.add_continuous("x", 0.0, 3.0).unwrap();
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, 0.0);
        let sol = solve_lp(&LinearModel::new()).unwrap();
        assert_eq!((sol.status, sol.objective), (LpStatus::Optimal, 0.0));
    }

    #[test]
    fn bound_conflict_is_infeasible() {
        let mut m = LinearModel::new();
        let a = m.add_continuous("x1", 0.0, 1.0).unwrap();
        m.add_constraint("c", vec![(a, 1.0)], Relation::Ge, 2.0).unwrap();
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_mixed_rows() {
        // min 2a + 3b + c  s.t. a + b + c = 4, a - b >= -1, b + c <= 3, all in [0,5]
        let mut m = LinearModel::new();
        let a = m.add_continuous("a", 0.0, 5.0).unwrap();
        let b = m.add_continuous("b", 0.0, 5.0).unwrap();
        let c = m.add_continuous("c", 0.0, 5.0).unwrap();
        m.set_objective(a, 2.0);
        m.set_objective(b, 3.0);
        m.set_objective(c, 1.0);
        m.add_constraint("e", vec![(a, 1.0), (b, 1.0), (c, 1.0)], Relation::Eq, 4.0).unwrap();
        m.add_constraint("g", vec![(a, 1.0), (b, -1.0)], Relation::Ge, -1.0).unwrap();
        m.add_constraint("l", vec![(b, 1.0), (c, 1.0)], Relation::Le, 3.0).unwrap();
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // c = 3 - b, a = 1; cheapest is b = 0, c = 3: objective 2 + 3 = 5
        assert!((sol.objective - 5.0).abs() < 1e-9, "{}", sol.objective);
        assert!(m.is_feasible(&sol.values, 1e-9));
    }

    #[test]
    fn relaxation_with_negative_lower_bounds() {
        let mut m = LinearModel::new();
        let a = m.add_var("a", VarKind::Continuous, -3.0, 2.0).unwrap();
        let b = m.add_var("b", VarKind::Continuous, -1.0, 4.0).unwrap();
        m.set_objective(a, 1.0);
        m.set_objective(b, 1.0);
        m.add_constraint("c", vec![(a, 1.0), (b, 2.0)], Relation::Ge, 1.0).unwrap();
        let sol = solve_lp(&m).unwrap();
        // a = -3 forces b = 2: objective -1
        assert!((sol.objective + 1.0).abs() < 1e-9, "{}", sol.objective);
    }

    fn random_model(n: usize, rows: &[(Vec<i32>, u8, i32)], obj: &[i32]) -> LinearModel {
        let mut m = LinearModel::new();
        for (j, &c) in obj.iter().enumerate().take(n) {
            let v = m.add_continuous(format!("v{j}"), 0.0, 1.0).unwrap();
            m.set_objective(v, c as f64);
        }
        for (k, (coefs, rel, rhs)) in rows.iter().enumerate() {
            let terms: Vec<(usize, f64)> = coefs.iter().take(n).enumerate().map(|(j, &a)| (j, a as f64)).collect();
            let rel = match rel % 3 {
                0 => Relation::Le,
                1 => Relation::Ge,
                _ => Relation::Eq,
            };
            m.add_constraint(format!("r{k}"), terms, rel, *rhs as f64).unwrap();
        }
        m
    }

    fn same(a: &LpSolution, b: &LpSolution) -> bool {
        a.status == b.status && (a.status != LpStatus::Optimal || (a.objective - b.objective).abs() < 1e-7)
    }

    #[test]
    fn warm_engine_tracks_appended_rows() {
        let mut m = LinearModel::new();
        let a = m.add_continuous("a", 0.0, 1.0).unwrap();
        let b = m.add_continuous("b", 0.0, 1.0).unwrap();
        m.set_objective(a, 1.0);
        m.set_objective(b, 2.0);
        m.add_constraint("c", vec![(a, 1.0), (b, 1.0)], Relation::Ge, 1.0).unwrap();
        let mut engine = LpEngine::new();
        let bounds = vec![(0.0, 1.0); 2];
        assert!((engine.solve(&m, &bounds).unwrap().objective - 1.0).abs() < 1e-12);
        m.add_constraint("d", vec![(a, 1.0)], Relation::Le, 0.25).unwrap();
        let sol = engine.solve(&m, &bounds).unwrap();
        assert!((sol.objective - 1.75).abs() < 1e-9, "{}", sol.objective);
        let sol = engine.solve(&m, &[(0.0, 1.0), (0.0, 0.5)]).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let sol = engine.solve(&m, &bounds).unwrap();
        assert!((sol.objective - 1.75).abs() < 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn warm_engine_matches_cold_solves(
            n in 2usize..6,
            obj in proptest::collection::vec(-3i32..4, 6),
            rows in proptest::collection::vec((proptest::collection::vec(-3i32..4, 6), 0u8..3, -2i32..4), 0..5),
            extra in proptest::collection::vec((proptest::collection::vec(-3i32..4, 6), 0u8..2, -2i32..4), 0..4),
            fixes in proptest::collection::vec(proptest::collection::vec((0usize..6, 0u8..3), 0..4), 1..8),
        ) {
            let mut m = random_model(n, &rows, &obj);
            let mut engine = LpEngine::new();
            let mut extra = extra.into_iter();
            for (step, fix) in fixes.iter().enumerate() {
                if step % 2 == 1 {
                    if let Some((coefs, rel, rhs)) = extra.next() {
                        let terms: Vec<(usize, f64)> =
                            coefs.iter().take(n).enumerate().map(|(j, &a)| (j, a as f64)).collect();
                        let rel = if rel == 0 { Relation::Le } else { Relation::Ge };
                        m.add_constraint(format!("e{step}"), terms, rel, rhs as f64).unwrap();
                    }
                }
                let mut bounds = vec![(0.0, 1.0); n];
                for &(j, how) in fix {
                    if j < n {
                        bounds[j] = match how {
                            0 => (0.0, 0.0),
                            1 => (1.0, 1.0),
                            _ => (0.0, 0.5),
                        };
                    }
                }
                let warm = engine.solve(&m, &bounds).unwrap();
                let cold = solve_relaxation(&m, &bounds).unwrap();
                proptest::prop_assert!(same(&warm, &cold), "warm {:?} cold {:?}", warm, cold);
                if warm.status == LpStatus::Optimal {
                    proptest::prop_assert!(m.is_feasible(&warm.values, 1e-7));
                }
            }
        }
    }
}
