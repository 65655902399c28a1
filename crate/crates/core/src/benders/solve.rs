use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exact::{check_kappa, remaining, strengthened_cut};
use crate::instance::{PpscInstance, Selection};
use crate::mip::{solve_bnb, Candidate, CutTag, LazyDecision, LinearCut, LinearModel, Limits, SolveOutcome, CUT_VIOLATION};
use crate::oracle::{Oracle, FEASIBILITY_TOL};
use crate::report::{SolveReport, SolveStatus};
use crate::scenario::ScenarioSet;

use super::cuts::{separate_new_valid, separate_submodular, theta_var};
use super::model::{build_dep, build_dep_lt, build_master};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutFamily {
    Submodular,
    NewValid,
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutFamily::Submodular => "submodular",
            CutFamily::NewValid => "new_valid",
        })
    }
}

impl FromStr for CutFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "submodular" | "sub" => Ok(CutFamily::Submodular),
            "new_valid" | "new-valid" | "nv" => Ok(CutFamily::NewValid),
            other => Err(Error::InvalidArgument(format!("unknown cut family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    pub family: CutFamily,
    kappa: u8,
    /// Repair the sampled optimum against the exact oracle.
    pub oracle_phase: bool,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    pub tol: f64,
}

impl SamplingConfig {
    pub fn new(family: CutFamily, kappa: u8) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(SamplingConfig {
            family,
            kappa,
            oracle_phase: true,
            time_limit: None,
            node_limit: None,
            tol: FEASIBILITY_TOL,
        })
    }

    pub fn kappa(&self) -> u8 {
        self.kappa
    }
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self::new(CutFamily::NewValid, 2).expect("valid kappa")
    }
}

/// Lazy callback for the scenario master: accepts a candidate once it meets
/// the sampled chance constraint, otherwise cuts every scenario that the
/// candidate over-counts.
struct Separator<'a> {
    scenarios: &'a ScenarioSet,
    tau: usize,
    threshold: f64,
    family: Option<CutFamily>,
    n: usize,
    log: Vec<LinearCut>,
}

impl Separator<'_> {
    fn decide(&mut self, cand: &Candidate<'_>) -> Result<LazyDecision> {
        let Some(family) = self.family else {
            return Ok(LazyDecision::Accept);
        };
        let x = Selection::from_values(&cand.values[..self.n]);
        if self.scenarios.empirical_prob(&x, self.tau) >= self.threshold {
            return Ok(LazyDecision::Accept);
        }
        let mut cuts = Vec::new();
        for (w, s) in self.scenarios.scenarios().iter().enumerate() {
            let sigma = s.sigma_of(&x);
            if self.tau > sigma && cand.value(&theta_var(w)) > sigma as f64 + CUT_VIOLATION {
                cuts.push(match family {
                    CutFamily::Submodular => separate_submodular(s, w, &x)?,
                    CutFamily::NewValid => separate_new_valid(s, w, &x)?,
                });
            }
        }
        if cuts.is_empty() {
            return Err(Error::Numerical(format!(
                "candidate {x} misses the sampled target but no scenario cut is violated"
            )));
        }
        self.log.extend(cuts.iter().cloned());
        Ok(LazyDecision::Reject(cuts))
    }
}

struct Run<'a> {
    cfg: &'a SamplingConfig,
    start: Instant,
    report: SolveReport,
}

impl Run<'_> {
    fn master(&mut self, model: &mut LinearModel, sep: &mut Separator<'_>) -> Result<SolveOutcome> {
        let limits = Limits {
            node_limit: self.cfg.node_limit.map(|k| k.saturating_sub(self.report.nodes)),
            floor: self.report.master_history.last().copied(),
            time_limit: remaining(self.cfg.time_limit, self.start),
        };
        let out = solve_bnb(model, |c| sep.decide(c), &limits)?;
        let r = &mut self.report;
        r.master_iterations += 1;
        r.nodes += out.nodes;
        r.lp_iterations += out.lp_iterations;
        r.bound = out.bound;
        for cut in sep.log.drain(..) {
            r.record_cut(&cut);
        }
        if out.has_incumbent() {
            r.master_history.push(out.objective);
        }
        Ok(out)
    }
}

fn settle(report: &mut SolveReport, instance: &PpscInstance, oracle: &Oracle<'_>, x: Selection, prob: f64) {
    report.objective = instance.cost_of(&x);
    report.probability = Some(prob);
    report.feasible_true = Some(oracle.accepts(prob));
    report.selection = Some(x);
}

/// Solves the sampled problem on `model`, then (optionally) repairs the
/// answer with oracle cuts until it is feasible for the true distribution.
fn two_phase(
    instance: &PpscInstance,
    scenarios: &ScenarioSet,
    mut model: LinearModel,
    family: Option<CutFamily>,
    cfg: &SamplingConfig,
) -> Result<SolveReport> {
    check_kappa(cfg.kappa)?;
    let oracle = Oracle::with_tolerance(instance, cfg.tol);
    let n = instance.n();
    let mut sep = Separator {
        scenarios,
        tau: instance.tau(),
        threshold: 1.0 - instance.epsilon() - FEASIBILITY_TOL,
        family,
        n,
        log: Vec::new(),
    };
    let mut run = Run {
        cfg,
        start: Instant::now(),
        report: SolveReport::empty(),
    };

    let t = Instant::now();
    let out = run.master(&mut model, &mut sep)?;
    run.report.time_master = t.elapsed().as_secs_f64();
    let status = SolveStatus::from_mip(out.status);
    run.report.status = status;
    if out.has_incumbent() {
        let x = Selection::from_values(&out.values[..n]);
        let prob = oracle.probability(&x);
        settle(&mut run.report, instance, &oracle, x, prob);
    }
    if status != SolveStatus::Optimal {
        return Ok(run.report);
    }
    run.report.master_objective = Some(out.objective);
    if !cfg.oracle_phase {
        return Ok(run.report);
    }

    let t = Instant::now();
    loop {
        let x = run.report.selection.clone().expect("optimal master has an incumbent");
        let prob = run.report.probability.expect("set with the selection");
        if oracle.accepts(prob) {
            break;
        }
        if x.zeros().next().is_none() {
            // even selecting everything misses the target
            run.report.status = SolveStatus::Infeasible;
            break;
        }
        let cut = strengthened_cut(&oracle, &x, cfg.kappa, CutTag::OraclePhase)?;
        if !model.add_cut(&cut)? {
            return Err(Error::Numerical(format!("oracle cut {cut} was already in the master")));
        }
        run.report.record_cut(&cut);
        let out = run.master(&mut model, &mut sep)?;
        run.report.status = SolveStatus::from_mip(out.status);
        if !out.has_incumbent() {
            run.report.selection = None;
            run.report.objective = f64::INFINITY;
            run.report.probability = None;
            run.report.feasible_true = None;
            break;
        }
        let x = Selection::from_values(&out.values[..n]);
        let prob = oracle.probability(&x);
        settle(&mut run.report, instance, &oracle, x, prob);
        if run.report.status != SolveStatus::Optimal {
            break;
        }
    }
    run.report.time_oracle = t.elapsed().as_secs_f64();
    Ok(run.report)
}

/// Scenario decomposition: lazy scenario cuts of the configured family, then
/// the oracle phase.
pub fn solve_sampling(instance: &PpscInstance, scenarios: &ScenarioSet, cfg: &SamplingConfig) -> Result<SolveReport> {
    let master = build_master(instance, scenarios)?;
    two_phase(instance, scenarios, master.model, Some(cfg.family), cfg)
}

/// Deterministic equivalent, then the oracle phase. `cfg.family` is unused.
pub fn solve_dep(instance: &PpscInstance, scenarios: &ScenarioSet, cfg: &SamplingConfig) -> Result<SolveReport> {
    let model = build_dep(instance, scenarios)?;
    two_phase(instance, scenarios, model, None, cfg)
}

/// Reduced `(x, z)` formulation, then the oracle phase.
pub fn solve_dep_lt(instance: &PpscInstance, scenarios: &ScenarioSet, cfg: &SamplingConfig) -> Result<SolveReport> {
    let model = build_dep_lt(instance, scenarios)?;
    two_phase(instance, scenarios, model, None, cfg)
}
