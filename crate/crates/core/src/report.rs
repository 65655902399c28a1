use std::collections::BTreeMap;
use std::fmt;

use crate::instance::Selection;
use crate::mip::{CutTag, LinearCut, MipStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Limit,
}

impl SolveStatus {
    pub(crate) fn from_mip(status: MipStatus) -> Self {
        match status {
            MipStatus::Optimal => SolveStatus::Optimal,
            // every model here has bounded variables, so unbounded means broken data
            MipStatus::Infeasible | MipStatus::Unbounded => SolveStatus::Infeasible,
            MipStatus::Limit => SolveStatus::Limit,
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Limit => "limit",
        })
    }
}

/// What a solver run produced.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Best selection found, if any.
    pub selection: Option<Selection>,
    /// Cost of `selection`; `+inf` without one.
    pub objective: f64,
    /// Proven lower bound.
    pub bound: f64,
    /// Exact chance-constraint probability of `selection`.
    pub probability: Option<f64>,
    /// Oracle verdict on `selection`.
    pub feasible_true: Option<bool>,
    /// Optimum of the sampled problem, before any oracle repair.
    pub master_objective: Option<f64>,
    /// Master objective after every master solve, in order.
    pub master_history: Vec<f64>,
    pub master_iterations: usize,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub cut_counts: BTreeMap<CutTag, usize>,
    /// Every cut that was installed, in order.
    pub cut_log: Vec<LinearCut>,
    pub time_master: f64,
    pub time_oracle: f64,
}

impl SolveReport {
    pub(crate) fn empty() -> Self {
        SolveReport {
            status: SolveStatus::Infeasible,
            selection: None,
            objective: f64::INFINITY,
            bound: f64::NEG_INFINITY,
            probability: None,
            feasible_true: None,
            master_objective: None,
            master_history: Vec::new(),
            master_iterations: 0,
            nodes: 0,
            lp_iterations: 0,
            cut_counts: BTreeMap::new(),
            cut_log: Vec::new(),
            time_master: 0.0,
            time_oracle: 0.0,
        }
    }

    pub(crate) fn record_cut(&mut self, cut: &LinearCut) {
        *self.cut_counts.entry(cut.tag()).or_insert(0) += 1;
        self.cut_log.push(cut.clone());
    }

    pub fn cuts(&self, tag: CutTag) -> usize {
        self.cut_counts.get(&tag).copied().unwrap_or(0)
    }

    /// Cuts separated from scenarios.
    pub fn master_cuts(&self) -> usize {
        self.cuts(CutTag::Submodular) + self.cuts(CutTag::NewValid)
    }

    /// Cuts certified by the probability oracle.
    pub fn oracle_cuts(&self) -> usize {
        self.cuts(CutTag::NoGood) + self.cuts(CutTag::StrengthenedNoGood) + self.cuts(CutTag::OraclePhase)
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "status={} objective={}", self.status, self.objective)?;
        if let Some(x) = &self.selection {
            write!(f, " x={x}")?;
        }
        if let Some(p) = self.probability {
            write!(f, " prob={p:.6}")?;
        }
        write!(
            f,
            " master_cuts={} oracle_cuts={} nodes={} iterations={}",
            self.master_cuts(),
            self.oracle_cuts(),
            self.nodes,
            self.master_iterations
        )
    }
}
