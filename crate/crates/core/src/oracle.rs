//! Exact evaluation of `P(sigma(x) >= tau)`.
//!
//! Item coverage events are independent given a selection, so the number of
//! covered items is Poisson-binomial. [`OracleTable`] fills the triangular
//! prefix table `A(i, j)` = probability that exactly `j` of the first `i`
//! items are covered.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{CoverageModel, PpscInstance, Selection};

/// Feasibility slack on `1 - epsilon` for oracle verdicts.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Per-item coverage probabilities `P(x, i)` for a fixed selection.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageVector {
    model: CoverageModel,
    selection: Selection,
    p: Vec<f64>,
}

impl CoverageVector {
    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn selection(&self) -> &Selection {
        &self.selection
    }

    pub fn model(&self) -> CoverageModel {
        self.model
    }

    /// Builds a vector directly from item probabilities (no selection
    /// attached). Useful for evaluating Poisson-binomial tails in isolation.
    pub fn from_probabilities(model: CoverageModel, p: Vec<f64>) -> Result<Self> {
        if let Some(bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("coverage probability {bad} outside [0,1]")));
        }
        Ok(CoverageVector {
            model,
            selection: Selection::empty(0),
            p,
        })
    }
}

/// `P(x, i)` for every item: `1 - prod(1 - a_ji x_j)` under independent
/// coverage, `sum a_ji x_j` under linear thresholds. O(nm).
pub fn coverage_vector(instance: &PpscInstance, x: &Selection) -> Result<CoverageVector> {
    x.check_len(instance.n())?;
    let p = (0..instance.m())
        .map(|item| {
            let arcs = instance.incoming(item).iter().filter(|&&(i, _)| x.contains(i));
            match instance.model() {
                CoverageModel::IndependentCoverage => {
                    1.0 - arcs.fold(1.0, |miss, &(_, a)| miss * (1.0 - a))
                }
                CoverageModel::LinearThreshold => arcs.map(|&(_, a)| a).sum::<f64>().min(1.0),
            }
        })
        .collect();
    Ok(CoverageVector {
        model: instance.model(),
        selection: x.clone(),
        p,
    })
}

/// Coverage vector of `x + e_j` from the one of `x`, touching only the arcs
/// leaving `j`.
pub fn update_coverage(instance: &PpscInstance, cv: &CoverageVector, j: usize) -> Result<CoverageVector> {
    if j >= instance.n() {
        return Err(Error::InvalidArgument(format!("set index {j} out of range")));
    }
    cv.selection.check_len(instance.n())?;
    if cv.selection.contains(j) {
        return Err(Error::InvalidSelection(format!("set {j} is already selected")));
    }
    let mut p = cv.p.clone();
    for &(item, a) in instance.outgoing(j) {
        p[item] = match cv.model {
            CoverageModel::IndependentCoverage => 1.0 - (1.0 - p[item]) * (1.0 - a),
            CoverageModel::LinearThreshold => (p[item] + a).min(1.0),
        };
    }
    Ok(CoverageVector {
        model: cv.model,
        selection: cv.selection.with(j),
        p,
    })
}

/// Filled Poisson-binomial prefix table.
#[derive(Debug, Clone)]
pub struct OracleTable {
    m: usize,
    // row i occupies [i(i+1)/2, i(i+1)/2 + i]
    cells: Vec<f64>,
}

impl OracleTable {
    /// Runs the O(m^2) recursion over items in index order.
    pub fn fill(p: &[f64]) -> Self {
        let m = p.len();
        let mut cells = vec![0.0; (m + 1) * (m + 2) / 2];
        cells[0] = 1.0;
        for i in 1..=m {
            let pi = p[i - 1];
            let prev = (i - 1) * i / 2;
            let row = i * (i + 1) / 2;
            cells[row] = cells[prev] * (1.0 - pi);
            for j in 1..i {
                cells[row + j] = cells[prev + j] * (1.0 - pi) + cells[prev + j - 1] * pi;
            }
            cells[row + i] = cells[prev + i - 1] * pi;
        }
        OracleTable { m, cells }
    }

    pub fn items(&self) -> usize {
        self.m
    }

    /// `A(i, j)` for `0 <= j <= i <= m`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(j <= i && i <= self.m, "A({i},{j}) outside table of {} items", self.m);
        self.cells[i * (i + 1) / 2 + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.cells[start..=start + i]
    }

    /// Probability mass function of the covered count over all items.
    pub fn pmf(&self) -> &[f64] {
        self.row(self.m)
    }

    /// `sum_{j >= tau} A(m, j)`.
    pub fn tail(&self, tau: usize) -> f64 {
        self.pmf()[tau.min(self.m + 1)..].iter().sum()
    }
}

/// Exact `P(sigma(x) >= tau)` together with the filled table.
pub fn tail_probability(cv: &CoverageVector, tau: usize) -> Result<(f64, OracleTable)> {
    let m = cv.p.len();
    if tau > m {
        return Err(Error::InvalidArgument(format!("target {tau} exceeds item count {m}")));
    }
    let table = OracleTable::fill(&cv.p);
    let prob = table.tail(tau).clamp(0.0, 1.0);
    Ok((prob, table))
}

/// The probability oracle `A(x)` bound to one instance.
#[derive(Debug, Clone, Copy)]
pub struct Oracle<'a> {
    instance: &'a PpscInstance,
    tol: f64,
}

impl<'a> Oracle<'a> {
    pub fn new(instance: &'a PpscInstance) -> Self {
        Oracle {
            instance,
            tol: FEASIBILITY_TOL,
        }
    }

    pub fn with_tolerance(instance: &'a PpscInstance, tol: f64) -> Self {
        Oracle { instance, tol }
    }

    pub fn instance(&self) -> &'a PpscInstance {
        self.instance
    }

    /// `1 - epsilon - tol`.
    pub fn threshold(&self) -> f64 {
        1.0 - self.instance.epsilon() - self.tol
    }

    pub fn coverage(&self, x: &Selection) -> CoverageVector {
        coverage_vector(self.instance, x).expect("selection length checked by caller")
    }

    pub fn probability_of(&self, cv: &CoverageVector) -> f64 {
        tail_probability(cv, self.instance.tau())
            .expect("instance target validated")
            .0
    }

    pub fn probability(&self, x: &Selection) -> f64 {
        self.probability_of(&self.coverage(x))
    }

    pub fn accepts(&self, probability: f64) -> bool {
        probability >= self.threshold()
    }
}

/// Oracle verdict for a selection: `(feasible, attained probability)`.
pub fn is_feasible(instance: &PpscInstance, x: &Selection, tol: f64) -> Result<(bool, f64)> {
    let cv = coverage_vector(instance, x)?;
    let (prob, _) = tail_probability(&cv, instance.tau())?;
    Ok((prob >= 1.0 - instance.epsilon() - tol, prob))
}

/// Monte-Carlo estimate of `P(sigma(x) >= tau)` by drawing each item's
/// coverage independently with probability `P(x, i)`.
/// Returns `(estimate, standard error)`.
pub fn monte_carlo_estimate(
    instance: &PpscInstance,
    x: &Selection,
    tau: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let cv = coverage_vector(instance, x)?;
    Ok(monte_carlo_tail(cv.probabilities(), tau, samples, seed))
}

pub(crate) fn monte_carlo_tail(p: &[f64], tau: usize, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let covered = p.iter().filter(|&&pi| rng.gen::<f64>() < pi).count();
        if covered >= tau {
            hits += 1;
        }
    }
    let estimate = hits as f64 / samples as f64;
    let se = (estimate * (1.0 - estimate) / samples as f64).sqrt();
    (estimate, se)
}
