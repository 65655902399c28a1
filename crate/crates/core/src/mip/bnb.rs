use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

use super::model::{LinearCut, LinearModel, VarKind};
use super::simplex::{LpEngine, LpStatus};
use super::{CUT_VIOLATION, INT_TOL};

const PRUNE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Limits {
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
    /// A proven lower bound on the optimum. The search stops as soon as an
    /// incumbent reaches it.
    pub floor: Option<f64>,
}

impl Limits {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_time(secs: f64) -> Self {
        Limits {
            node_limit: None,
            time_limit: Some(Duration::from_secs_f64(secs)),
            floor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Limit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: MipStatus,
    /// Best incumbent, empty when none was found.
    pub values: Vec<f64>,
    /// Objective of the incumbent, `+inf` without one.
    pub objective: f64,
    /// Proven lower bound on the optimum.
    pub bound: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub cuts_added: usize,
}

impl SolveOutcome {
    pub fn has_incumbent(&self) -> bool {
        !self.values.is_empty()
    }
}

/// An integer-feasible LP solution offered to the callback.
pub struct Candidate<'a> {
    pub model: &'a LinearModel,
    pub values: &'a [f64],
    pub objective: f64,
}

impl Candidate<'_> {
    /// Value of a named variable; unknown names read as zero.
    pub fn value(&self, name: &str) -> f64 {
        self.model.value_of(self.values, name).unwrap_or(0.0)
    }
}

pub enum LazyDecision {
    Accept,
    /// Reject the candidate; at least one cut must cut it off.
    Reject(Vec<LinearCut>),
}

/// Callback that accepts every candidate.
pub fn accept_all(_: &Candidate<'_>) -> Result<LazyDecision> {
    Ok(LazyDecision::Accept)
}

/// Anything that can solve a [`LinearModel`] under a lazy callback. The
/// built-in [`BranchAndBound`] is the reference; adapters for external
/// engines implement the same contract.
pub trait MipSolver {
    fn solve(
        &self,
        model: &mut LinearModel,
        callback: &mut dyn FnMut(&Candidate<'_>) -> Result<LazyDecision>,
        limits: &Limits,
    ) -> Result<SolveOutcome>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BranchAndBound;

impl MipSolver for BranchAndBound {
    fn solve(
        &self,
        model: &mut LinearModel,
        callback: &mut dyn FnMut(&Candidate<'_>) -> Result<LazyDecision>,
        limits: &Limits,
    ) -> Result<SolveOutcome> {
        Search::new(model, limits).run(callback)
    }
}

/// Solves `model` to optimality. Cuts returned by `callback` are installed in
/// the model's pool, so they survive the call.
pub fn solve_bnb<F>(model: &mut LinearModel, mut callback: F, limits: &Limits) -> Result<SolveOutcome>
where
    F: FnMut(&Candidate<'_>) -> Result<LazyDecision>,
{
    BranchAndBound.solve(model, &mut callback, limits)
}

struct Node {
    id: usize,
    bound: f64,
    fixes: Vec<(usize, f64)>,
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
    // max-heap: smallest bound first, then the newest node
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(self.id.cmp(&other.id))
    }
}

struct Search<'m> {
    model: &'m mut LinearModel,
    limits: Limits,
    start: Instant,
    integral: bool,
    base: Vec<(f64, f64)>,
    incumbent: Vec<f64>,
    inc_obj: f64,
    nodes: usize,
    lp_iterations: usize,
    cuts_added: usize,
    next_id: usize,
    lp: LpEngine,
}

impl<'m> Search<'m> {
    fn new(model: &'m mut LinearModel, limits: &Limits) -> Self {
        let integral = model.has_integral_objective();
        let base = model.variables().iter().map(|v| (v.lb, v.ub)).collect();
        Search {
            model,
            limits: *limits,
            start: Instant::now(),
            integral,
            base,
            incumbent: Vec::new(),
            inc_obj: f64::INFINITY,
            nodes: 0,
            lp_iterations: 0,
            cuts_added: 0,
            next_id: 0,
            lp: LpEngine::new(),
        }
    }

    fn prunable(&self, bound: f64) -> bool {
        if bound >= self.inc_obj - PRUNE_TOL {
            return true;
        }
        self.integral && self.inc_obj.is_finite() && (bound - INT_TOL).ceil() >= self.inc_obj - PRUNE_TOL
    }

    fn out_of_budget(&self) -> bool {
        self.limits.node_limit.is_some_and(|n| self.nodes >= n)
            || self.limits.time_limit.is_some_and(|t| self.start.elapsed() >= t)
    }

    fn node(&mut self, bound: f64, fixes: Vec<(usize, f64)>) -> Node {
        self.next_id += 1;
        Node {
            id: self.next_id,
            bound,
            fixes,
        }
    }

    fn outcome(&self, status: MipStatus, bound: f64) -> SolveOutcome {
        SolveOutcome {
            status,
            values: self.incumbent.clone(),
            objective: self.inc_obj,
            bound,
            nodes: self.nodes,
            lp_iterations: self.lp_iterations,
            cuts_added: self.cuts_added,
        }
    }

    fn run(mut self, callback: &mut dyn FnMut(&Candidate<'_>) -> Result<LazyDecision>) -> Result<SolveOutcome> {
        let mut heap = BinaryHeap::new();
        let root = self.node(f64::NEG_INFINITY, Vec::new());
        heap.push(root);

        while let Some(node) = heap.pop() {
            if self.limits.floor.is_some_and(|f| self.inc_obj <= f + PRUNE_TOL) {
                break;
            }
            if self.prunable(node.bound) {
                continue;
            }
            if self.out_of_budget() {
                let bound = node.bound.min(self.inc_obj);
                return Ok(self.outcome(MipStatus::Limit, bound));
            }
            self.nodes += 1;

            let mut bounds = self.base.clone();
            for &(v, val) in &node.fixes {
                bounds[v] = (val, val);
            }

            loop {
                let lp = self.lp.solve(self.model, &bounds)?;
                self.lp_iterations += lp.iterations;
                match lp.status {
                    LpStatus::Infeasible => break,
                    LpStatus::Unbounded => {
                        return Ok(self.outcome(MipStatus::Unbounded, f64::NEG_INFINITY));
                    }
                    LpStatus::Optimal => {}
                }
                if self.prunable(lp.objective) {
                    break;
                }
                if let Some(j) = self.branching_var(&lp.values) {
                    let mut down = node.fixes.clone();
                    down.push((j, 0.0));
                    let mut up = node.fixes.clone();
                    up.push((j, 1.0));
                    let d = self.node(lp.objective, down);
                    let u = self.node(lp.objective, up);
                    heap.push(d);
                    heap.push(u);
                    break;
                }

                let values = self.snap(lp.values);
                let objective = self.model.objective_value(&values);
                let decision = callback(&Candidate {
                    model: self.model,
                    values: &values,
                    objective,
                })?;
                match decision {
                    LazyDecision::Accept => {
                        if objective < self.inc_obj {
                            self.inc_obj = objective;
                            self.incumbent = values;
                        }
                        break;
                    }
                    LazyDecision::Reject(cuts) => {
                        let mut cuts_off = false;
                        for cut in &cuts {
                            let model = &*self.model;
                            let violation = cut.violation(|name| model.value_of(&values, name).unwrap_or(f64::NAN));
                            if violation.is_nan() {
                                return Err(Error::UnknownVariable(format!("in lazy cut {cut}")));
                            }
                            cuts_off |= violation > CUT_VIOLATION;
                            if self.model.add_cut(cut)? {
                                self.cuts_added += 1;
                            }
                        }
                        if !cuts_off {
                            return Err(Error::Numerical(
                                "lazy callback rejected a candidate without a violated cut".into(),
                            ));
                        }
                        // re-solve this node with the new cuts
                    }
                }
            }
        }

        if self.incumbent.is_empty() {
            Ok(self.outcome(MipStatus::Infeasible, f64::INFINITY))
        } else {
            let obj = self.inc_obj;
            Ok(self.outcome(MipStatus::Optimal, obj))
        }
    }

    /// Most fractional binary of the highest priority class, lowest index
    /// on ties.
    fn branching_var(&self, values: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, i32, f64)> = None;
        for (j, v) in self.model.variables().iter().enumerate() {
            if v.kind != VarKind::Binary {
                continue;
            }
            let frac = (values[j] - values[j].floor()).min(values[j].ceil() - values[j]);
            if frac <= INT_TOL {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, p, f)) => v.priority > p || (v.priority == p && frac > f + 1e-12),
            };
            if better {
                best = Some((j, v.priority, frac));
            }
        }
        best.map(|(j, _, _)| j)
    }

    fn snap(&self, mut values: Vec<f64>) -> Vec<f64> {
        for (j, v) in self.model.variables().iter().enumerate() {
            if v.kind == VarKind::Binary {
                values[j] = values[j].round();
            }
        }
        values
    }
}
