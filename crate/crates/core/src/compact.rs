//! Compact MIP for the linear-threshold model: the coverage-count recursion
//! written as linear rows, with the products `A[i][j] * x_u` replaced by
//! McCormick variables `gamma[u][i][j]`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::exact::x_var;
use crate::instance::{CoverageModel, PpscInstance, Selection};
use crate::mip::{accept_all, solve_bnb, solve_relaxation, LinearModel, Limits, LpStatus, Relation};
use crate::oracle::Oracle;
use crate::report::{SolveReport, SolveStatus};

/// Offset of cell `(i, j)`, `j <= i`, in a row-major triangle.
pub fn tri(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

#[derive(Debug, Clone)]
pub struct LtmipModel {
    pub model: LinearModel,
    n: usize,
    m: usize,
    tau: usize,
    goal_row: usize,
}

impl LtmipModel {
    fn cells(&self) -> usize {
        (self.m + 1) * (self.m + 2) / 2
    }

    pub fn x(&self, u: usize) -> usize {
        u
    }

    pub fn abar(&self, i: usize, j: usize) -> usize {
        self.n + tri(i, j)
    }

    pub fn gamma(&self, u: usize, i: usize, j: usize) -> usize {
        self.n + self.cells() * (1 + u) + tri(i, j)
    }

    /// `sum_{j >= tau} A[m][j]` at an assignment.
    pub fn goal_value(&self, values: &[f64]) -> f64 {
        (self.tau..=self.m).map(|j| values[self.abar(self.m, j)]).sum()
    }

    /// Drops the chance requirement so every selection is admissible.
    pub fn relax_goal(&mut self) {
        self.model.set_rhs(self.goal_row, 0.0);
    }

    /// Solves the rows with `x` fixed at `selection` and returns the full
    /// assignment; `None` when the fixed point is infeasible.
    pub fn evaluate_at(&self, selection: &Selection) -> Result<Option<Vec<f64>>> {
        selection.check_len(self.n)?;
        let mut bounds: Vec<(f64, f64)> = self.model.variables().iter().map(|v| (v.lb, v.ub)).collect();
        for u in 0..self.n {
            let v = if selection.contains(u) { 1.0 } else { 0.0 };
            bounds[self.x(u)] = (v, v);
        }
        let lp = solve_relaxation(&self.model, &bounds)?;
        Ok((lp.status == LpStatus::Optimal).then_some(lp.values))
    }
}

pub fn build_ltmip(instance: &PpscInstance) -> Result<LtmipModel> {
    if instance.model() != CoverageModel::LinearThreshold {
        return Err(Error::Incompatible("the compact model needs a linear-threshold instance".into()));
    }
    let (n, m) = (instance.n(), instance.m());
    let mut model = LinearModel::new();
    for (u, &b) in instance.costs().iter().enumerate() {
        let v = model.add_binary(x_var(u))?;
        model.set_objective(v, b);
    }
    for i in 0..=m {
        for j in 0..=i {
            model.add_continuous(format!("A{i}_{j}"), 0.0, 1.0)?;
        }
    }
    for u in 0..n {
        for i in 0..=m {
            for j in 0..=i {
                model.add_continuous(format!("g{u}_{i}_{j}"), 0.0, 1.0)?;
            }
        }
    }
    let mut lt = LtmipModel {
        model,
        n,
        m,
        tau: instance.tau(),
        goal_row: 0,
    };

    lt.model.add_constraint("boundary", vec![(lt.abar(0, 0), 1.0)], Relation::Eq, 1.0)?;
    for i in 1..=m {
        // items are 0-based, so row i of the triangle adds item i - 1
        let weights = instance.incoming(i - 1);
        for j in 0..=i {
            let mut terms = vec![(lt.abar(i, j), 1.0)];
            if j < i {
                terms.push((lt.abar(i - 1, j), -1.0));
                terms.extend(weights.iter().map(|&(u, a)| (lt.gamma(u, i - 1, j), a)));
            }
            if j > 0 {
                terms.extend(weights.iter().map(|&(u, a)| (lt.gamma(u, i - 1, j - 1), -a)));
            }
            lt.model.add_constraint(format!("dp{i}_{j}"), terms, Relation::Eq, 0.0)?;
        }
    }
    let goal: Vec<(usize, f64)> = (lt.tau..=m).map(|j| (lt.abar(m, j), 1.0)).collect();
    lt.goal_row = lt.model.add_constraint("goal", goal, Relation::Ge, 1.0 - instance.epsilon())?;
    for u in 0..n {
        for i in 0..=m {
            for j in 0..=i {
                let (g, a, x) = (lt.gamma(u, i, j), lt.abar(i, j), lt.x(u));
                lt.model.add_constraint(format!("mc1_{u}_{i}_{j}"), vec![(g, 1.0), (x, -1.0)], Relation::Le, 0.0)?;
                lt.model.add_constraint(format!("mc2_{u}_{i}_{j}"), vec![(g, 1.0), (a, -1.0)], Relation::Le, 0.0)?;
                lt.model.add_constraint(
                    format!("mc3_{u}_{i}_{j}"),
                    vec![(g, 1.0), (a, -1.0), (x, -1.0)],
                    Relation::Ge,
                    -1.0,
                )?;
            }
        }
    }
    Ok(lt)
}

pub fn solve_ltmip(instance: &PpscInstance, limits: &Limits) -> Result<SolveReport> {
    let mut lt = build_ltmip(instance)?;
    let mut report = SolveReport::empty();
    let t = Instant::now();
    let out = solve_bnb(&mut lt.model, accept_all, limits)?;
    report.time_master = t.elapsed().as_secs_f64();
    report.status = SolveStatus::from_mip(out.status);
    report.master_iterations = 1;
    report.nodes = out.nodes;
    report.lp_iterations = out.lp_iterations;
    report.bound = out.bound;
    if out.has_incumbent() {
        let x = Selection::from_values(&out.values[..lt.n]);
        let t = Instant::now();
        let oracle = Oracle::new(instance);
        let prob = oracle.probability(&x);
        report.time_oracle = t.elapsed().as_secs_f64();
        report.objective = instance.cost_of(&x);
        report.master_objective = Some(out.objective);
        report.master_history.push(out.objective);
        report.probability = Some(prob);
        report.feasible_true = Some(oracle.accepts(prob));
        report.selection = Some(x);
    }
    Ok(report)
}
