//! Exact PPSC by delayed constraint generation: solve a master over the
//! binary cube, ask the oracle about the answer, and cut it off until the
//! oracle agrees.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::instance::{PpscInstance, Selection};
use crate::mip::{accept_all, solve_bnb, CutTag, LinearCut, LinearModel, Limits, Relation};
use crate::oracle::{update_coverage, Oracle, FEASIBILITY_TOL};
use crate::report::{SolveReport, SolveStatus};

/// Name of the selection variable for cover-set `i` in every master model.
pub fn x_var(i: usize) -> String {
    format!("x{i}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactConfig {
    kappa: u8,
    /// Use the plain no-good cut instead of the strengthened one.
    pub plain_no_good: bool,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    pub tol: f64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            kappa: 2,
            plain_no_good: false,
            time_limit: None,
            node_limit: None,
            tol: FEASIBILITY_TOL,
        }
    }
}

impl ExactConfig {
    pub fn new(kappa: u8) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(ExactConfig {
            kappa,
            ..Self::default()
        })
    }

    pub fn kappa(&self) -> u8 {
        self.kappa
    }
}

pub(crate) fn check_kappa(kappa: u8) -> Result<()> {
    if kappa == 1 || kappa == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("kappa must be 1 or 2, got {kappa}")))
    }
}

/// `sum_{J1} (1 - x_i) + sum_{J0} x_j >= 1`: cuts off exactly `x_bar`.
pub fn build_no_good_cut(x_bar: &Selection) -> Result<LinearCut> {
    let ones = x_bar.count() as f64;
    let terms = (0..x_bar.len()).map(|i| (x_var(i), if x_bar.contains(i) { -1.0 } else { 1.0 }));
    LinearCut::new(CutTag::NoGood, terms, ones, Relation::Ge, 1.0)
}

/// `sum_{J0} x_j >= k`, where `k = 2` only when `kappa = 2` and no single
/// addition to the support of `x_bar` satisfies the oracle.
pub fn build_strengthened_cut(oracle: &Oracle<'_>, x_bar: &Selection, kappa: u8) -> Result<LinearCut> {
    strengthened_cut(oracle, x_bar, kappa, CutTag::StrengthenedNoGood)
}

pub(crate) fn strengthened_cut(oracle: &Oracle<'_>, x_bar: &Selection, kappa: u8, tag: CutTag) -> Result<LinearCut> {
    check_kappa(kappa)?;
    let instance = oracle.instance();
    x_bar.check_len(instance.n())?;
    let zeros: Vec<usize> = x_bar.zeros().collect();
    if zeros.is_empty() {
        return Err(Error::InvalidSelection(
            "every cover-set is selected; nothing left to strengthen".into(),
        ));
    }
    let mut rhs = 1.0;
    if kappa == 2 {
        let base = oracle.coverage(x_bar);
        let mut single_suffices = false;
        for &j in &zeros {
            let probe = update_coverage(instance, &base, j)?;
            if oracle.accepts(oracle.probability_of(&probe)) {
                single_suffices = true;
                break;
            }
        }
        if !single_suffices {
            rhs = 2.0;
        }
    }
    LinearCut::new(tag, zeros.into_iter().map(|j| (x_var(j), 1.0)), 0.0, Relation::Ge, rhs)
}

/// Master over `x` only, minimizing cost.
pub(crate) fn selection_master(instance: &PpscInstance) -> Result<LinearModel> {
    let mut model = LinearModel::new();
    for (i, &b) in instance.costs().iter().enumerate() {
        let v = model.add_binary(x_var(i))?;
        model.set_objective(v, b);
    }
    Ok(model)
}

pub(crate) fn remaining(limit: Option<Duration>, start: Instant) -> Option<Duration> {
    limit.map(|t| t.saturating_sub(start.elapsed()))
}

/// Solves PPSC exactly.
pub fn solve_exact(instance: &PpscInstance, config: &ExactConfig) -> Result<SolveReport> {
    check_kappa(config.kappa)?;
    let start = Instant::now();
    let oracle = Oracle::with_tolerance(instance, config.tol);
    let n = instance.n();
    let mut report = SolveReport::empty();

    let t = Instant::now();
    let full = Selection::full(n);
    let full_prob = oracle.probability(&full);
    report.time_oracle += t.elapsed().as_secs_f64();
    if !oracle.accepts(full_prob) {
        report.bound = f64::INFINITY;
        return Ok(report);
    }

    let mut model = selection_master(instance)?;
    if instance.tau() >= 1 && instance.epsilon() < 1.0 && n > 0 {
        model.add_constraint("seed", (0..n).map(|i| (i, 1.0)).collect(), Relation::Ge, 1.0)?;
    }

    loop {
        let limits = Limits {
            node_limit: config.node_limit.map(|k| k.saturating_sub(report.nodes)),
            floor: report.master_history.last().copied(),
            time_limit: remaining(config.time_limit, start),
        };
        let t = Instant::now();
        let out = solve_bnb(&mut model, accept_all, &limits)?;
        report.time_master += t.elapsed().as_secs_f64();
        report.master_iterations += 1;
        report.nodes += out.nodes;
        report.lp_iterations += out.lp_iterations;
        report.bound = out.bound;

        let status = SolveStatus::from_mip(out.status);
        if status != SolveStatus::Optimal {
            report.status = status;
            return Ok(report);
        }
        let x_bar = Selection::from_values(&out.values[..n]);
        report.master_history.push(out.objective);

        let t = Instant::now();
        let prob = oracle.probability(&x_bar);
        if oracle.accepts(prob) {
            report.time_oracle += t.elapsed().as_secs_f64();
            report.status = SolveStatus::Optimal;
            report.objective = instance.cost_of(&x_bar);
            report.master_objective = Some(out.objective);
            report.probability = Some(prob);
            report.feasible_true = Some(true);
            report.selection = Some(x_bar);
            return Ok(report);
        }
        let cut = if config.plain_no_good {
            build_no_good_cut(&x_bar)?
        } else {
            build_strengthened_cut(&oracle, &x_bar, config.kappa)?
        };
        report.time_oracle += t.elapsed().as_secs_f64();
        if !model.add_cut(&cut)? {
            return Err(Error::Numerical(format!("oracle cut {cut} was already in the master")));
        }
        report.record_cut(&cut);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::CoverageModel;

    fn two_node(eps: f64) -> PpscInstance {
        PpscInstance::new(
            CoverageModel::IndependentCoverage,
            2,
            2,
            vec![2.0, 1.0],
            vec![(0, 0, 0.9), (0, 1, 0.9), (1, 0, 0.5), (1, 1, 0.5)],
            2,
            eps,
        )
        .unwrap()
    }

    #[test]
    fn no_good_shapes() {
        let cut = build_no_good_cut(&Selection::from_support(3, &[0])).unwrap();
        assert_eq!(cut.coefficient("x0"), -1.0);
        assert_eq!(cut.coefficient("x1"), 1.0);
        assert_eq!(cut.coefficient("x2"), 1.0);
        assert_eq!(cut.rhs(), 0.0);

        let cut = build_no_good_cut(&Selection::empty(3)).unwrap();
        assert!((0..3).all(|i| cut.coefficient(&x_var(i)) == 1.0));
        assert_eq!(cut.rhs(), 1.0);

        let cut = build_no_good_cut(&Selection::full(3)).unwrap();
        assert!((0..3).all(|i| cut.coefficient(&x_var(i)) == -1.0));
        assert_eq!(cut.rhs(), -2.0);
    }

    #[test]
    fn strengthened_kappa_values() {
        let inst = two_node(0.25);
        let oracle = Oracle::new(&inst);
        let cut = build_strengthened_cut(&oracle, &Selection::empty(2), 2).unwrap();
        assert_eq!((cut.coefficient("x0"), cut.coefficient("x1"), cut.rhs()), (1.0, 1.0, 1.0));

        let inst = two_node(0.05);
        let oracle = Oracle::new(&inst);
        let cut = build_strengthened_cut(&oracle, &Selection::empty(2), 2).unwrap();
        assert_eq!(cut.rhs(), 2.0);
        let cut = build_strengthened_cut(&oracle, &Selection::empty(2), 1).unwrap();
        assert_eq!(cut.rhs(), 1.0);

        // J0 = {1}, and adding it is enough
        let inst = two_node(0.25);
        let oracle = Oracle::new(&inst);
        let cut = build_strengthened_cut(&Oracle::new(&inst), &Selection::from_support(2, &[0]), 2).unwrap();
        assert_eq!(cut.terms().len(), 1);
        assert_eq!((cut.coefficient("x1"), cut.rhs()), (1.0, 1.0));
        assert!(build_strengthened_cut(&oracle, &Selection::empty(2), 3).is_err());
    }

    #[test]
    fn solves_two_node_example() {
        for kappa in [1, 2] {
            let rep = solve_exact(&two_node(0.25), &ExactConfig::new(kappa).unwrap()).unwrap();
            assert_eq!(rep.status, SolveStatus::Optimal);
            assert_eq!(rep.objective, 2.0);
            assert_eq!(rep.selection.unwrap(), Selection::from_support(2, &[0]));
        }
        let rep = solve_exact(&two_node(0.05), &ExactConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Infeasible);
    }

    #[test]
    fn vacuous_and_hopeless() {
        let rep = solve_exact(&two_node(1.0), &ExactConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert_eq!(rep.objective, 0.0);
        assert_eq!(rep.selection.unwrap().count(), 0);

        let zero = PpscInstance::new(CoverageModel::LinearThreshold, 2, 2, vec![1.0, 1.0], vec![], 1, 0.3).unwrap();
        assert_eq!(solve_exact(&zero, &ExactConfig::default()).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn plain_no_good_reaches_same_optimum() {
        let cfg = ExactConfig {
            plain_no_good: true,
            ..ExactConfig::default()
        };
        let rep = solve_exact(&two_node(0.25), &cfg).unwrap();
        assert_eq!(rep.objective, 2.0);
        assert!(rep.cuts(CutTag::NoGood) >= 1);
        assert!(rep.master_history.windows(2).all(|w| w[0] <= w[1] + 1e-9));
    }
}
