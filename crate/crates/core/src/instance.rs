//! Problem instances: a bipartite coverage graph between `n` cover-sets and
//! `m` items, a probability model on its arcs, selection costs, a coverage
//! target `tau` and a risk level `epsilon`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the linear-threshold incoming weight sum.
const ROW_SUM_SLACK: f64 = 1e-12;

/// How an arc weight `a_ij` turns into coverage of item `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageModel {
    /// Each arc covers its item independently with probability `a_ij`.
    IndependentCoverage,
    /// Item `j` is covered when the selected incoming weight reaches a
    /// uniform threshold; requires `sum_i a_ij <= 1`.
    LinearThreshold,
}

impl fmt::Display for CoverageModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverageModel::IndependentCoverage => f.write_str("independent_coverage"),
            CoverageModel::LinearThreshold => f.write_str("linear_threshold"),
        }
    }
}

/// On-disk layout of an instance. Indices are 0-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    model: CoverageModel,
    n: usize,
    m: usize,
    costs: Vec<f64>,
    weights: Vec<(usize, usize, f64)>,
    tau: usize,
    epsilon: f64,
}

/// A validated probabilistic partial set covering instance.
///
/// Instances are immutable once built; adjacency lists are derived from the
/// sparse weight triples at construction time.
#[derive(Debug, Clone)]
pub struct PpscInstance {
    model: CoverageModel,
    n: usize,
    m: usize,
    costs: Vec<f64>,
    weights: Vec<(usize, usize, f64)>,
    tau: usize,
    epsilon: f64,
    // incoming[j] = [(i, a_ij)], outgoing[i] = [(j, a_ij)], both index-sorted
    incoming: Vec<Vec<(usize, f64)>>,
    outgoing: Vec<Vec<(usize, f64)>>,
}

impl PartialEq for PpscInstance {
    fn eq(&self, other: &Self) -> bool {
        self.model == other.model
            && self.n == other.n
            && self.m == other.m
            && bits_eq(&self.costs, &other.costs)
            && self.tau == other.tau
            && self.epsilon.to_bits() == other.epsilon.to_bits()
            && self.weights.len() == other.weights.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1 && a.2.to_bits() == b.2.to_bits())
    }
}

fn bits_eq(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

impl PpscInstance {
    /// Builds and validates an instance. Weight triples are `(i, j, a_ij)`
    /// with `i` a cover-set and `j` an item.
    pub fn new(
        model: CoverageModel,
        n: usize,
        m: usize,
        costs: Vec<f64>,
        weights: Vec<(usize, usize, f64)>,
        tau: usize,
        epsilon: f64,
    ) -> Result<Self> {
        let mut incoming = vec![Vec::new(); m];
        let mut outgoing = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(weights.len());
        for &(i, j, a) in &weights {
            if i >= n || j >= m {
                return Err(Error::InvalidInstance(format!(
                    "arc ({i},{j}) out of range for n={n}, m={m}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidInstance(format!("duplicate arc ({i},{j})")));
            }
            incoming[j].push((i, a));
            outgoing[i].push((j, a));
        }
        for list in incoming.iter_mut().chain(outgoing.iter_mut()) {
            list.sort_by_key(|&(k, _)| k);
        }
        let instance = PpscInstance {
            model,
            n,
            m,
            costs,
            weights,
            tau,
            epsilon,
            incoming,
            outgoing,
        };
        instance.validate()?;
        Ok(instance)
    }

    /// Checks every instance invariant and reports the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.costs.len() != self.n {
            return Err(Error::InvalidInstance(format!(
                "expected {} costs, found {}",
                self.n,
                self.costs.len()
            )));
        }
        for &(i, j, a) in &self.weights {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidInstance(format!(
                    "weight a[{i},{j}] = {a} out of range [0,1]"
                )));
            }
        }
        if self.model == CoverageModel::LinearThreshold {
            for (j, arcs) in self.incoming.iter().enumerate() {
                let sum: f64 = arcs.iter().map(|&(_, a)| a).sum();
                if sum > 1.0 + ROW_SUM_SLACK {
                    return Err(Error::InvalidInstance(format!(
                        "LT row-sum exceeds 1 at item {j} (sum {sum})"
                    )));
                }
            }
        }
        if self.tau > self.m {
            return Err(Error::InvalidInstance(format!(
                "target exceeds item count (tau={}, m={})",
                self.tau, self.m
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidInstance(format!(
                "risk level epsilon={} outside [0,1]",
                self.epsilon
            )));
        }
        if let Some((i, b)) = self
            .costs
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b >= 0.0))
        {
            return Err(Error::InvalidInstance(format!("cost b[{i}] = {b} is not a finite nonnegative value")));
        }
        Ok(())
    }

    pub fn model(&self) -> CoverageModel {
        self.model
    }

    /// Number of cover-sets.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of items.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn weights(&self) -> &[(usize, usize, f64)] {
        &self.weights
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Arcs entering item `j` as `(set, weight)`.
    pub fn incoming(&self, j: usize) -> &[(usize, f64)] {
        &self.incoming[j]
    }

    /// Arcs leaving cover-set `i` as `(item, weight)`.
    pub fn outgoing(&self, i: usize) -> &[(usize, f64)] {
        &self.outgoing[i]
    }

    /// Returns a copy with a different risk level.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let mut copy = self.clone();
        copy.epsilon = epsilon;
        copy.validate()?;
        Ok(copy)
    }

    /// Returns a copy with a different coverage target.
    pub fn with_tau(&self, tau: usize) -> Result<Self> {
        let mut copy = self.clone();
        copy.tau = tau;
        copy.validate()?;
        Ok(copy)
    }

    /// Objective value `b^T x` of a selection.
    pub fn cost_of(&self, x: &Selection) -> f64 {
        x.support().map(|i| self.costs[i]).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDoc {
            model: self.model,
            n: self.n,
            m: self.m,
            costs: self.costs.clone(),
            weights: self.weights.clone(),
            tau: self.tau,
            epsilon: self.epsilon,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        PpscInstance::new(doc.model, doc.n, doc.m, doc.costs, doc.weights, doc.tau, doc.epsilon)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Generates the complete bipartite benchmark family: `n = m = v/2`, a group
/// of at most ten strong cover-sets followed by weak ones, target
/// `ceil(0.6 m)`.
///
/// The construction is fully deterministic; `seed` is accepted so callers can
/// key derived randomness (scenario streams) off the same tuple.
pub fn generate_paper_instance(
    model: CoverageModel,
    v: usize,
    bbar: f64,
    epsilon: f64,
    seed: u64,
) -> Result<PpscInstance> {
    let _ = seed;
    if v < 2 {
        return Err(Error::InvalidArgument(format!("node count v={v} must be at least 2")));
    }
    if !v.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("node count v={v} must be even")));
    }
    if !(bbar.is_finite() && bbar > 0.0) {
        return Err(Error::InvalidArgument(format!("cost scale bbar={bbar} must be positive")));
    }
    let n = v / 2;
    let m = n;
    let strong = n.min(10);
    let weak = n - strong;

    // labels are 1-based in the weight and cost formulas
    let arc_weight = |label: usize| -> f64 {
        match model {
            CoverageModel::IndependentCoverage => {
                if label <= strong {
                    0.18 + label as f64 * 0.04 / strong as f64
                } else {
                    (label - strong) as f64 * 0.04 / weak as f64
                }
            }
            CoverageModel::LinearThreshold => {
                if label <= strong {
                    0.9 / strong as f64 - label as f64 / (100.0 * strong as f64)
                } else {
                    // The strong group falls short of 0.9 by sum_t t/(100*strong);
                    // the weak group shares exactly that deficit.
                    let deficit: f64 = (1..=strong).map(|t| t as f64 / (100.0 * strong as f64)).sum();
                    deficit / weak as f64
                }
            }
        }
    };
    let cost = |label: usize| -> f64 {
        if bbar == 1.0 {
            1.0
        } else if label <= strong {
            label as f64 * bbar / strong as f64
        } else {
            let raw = (n as f64 - label as f64 - 1.0) * bbar / (2.0 * weak as f64);
            raw.max(1.0)
        }
    };

    let costs: Vec<f64> = (1..=n).map(cost).collect();
    let mut weights = Vec::with_capacity(n * m);
    for i in 0..n {
        let a = arc_weight(i + 1);
        for j in 0..m {
            weights.push((i, j, a));
        }
    }
    let tau = (6 * m).div_ceil(10);
    PpscInstance::new(model, n, m, costs, weights, tau, epsilon)
}

/// A binary decision vector over the cover-sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection {
    bits: Vec<bool>,
}

impl Selection {
    pub fn empty(n: usize) -> Self {
        Selection { bits: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Selection { bits: vec![true; n] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Selection { bits }
    }

    pub fn from_support(n: usize, support: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &i in support {
            bits[i] = true;
        }
        Selection { bits }
    }

    /// Decodes the low `n` bits of `mask` (bit `i` selects set `i`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Selection {
            bits: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    /// Rounds a 0/1 vector of reals.
    pub fn from_values(values: &[f64]) -> Self {
        Selection {
            bits: values.iter().map(|&v| v > 0.5).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Indices `i` with `x_i = 1`.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// Indices `j` with `x_j = 0`.
    pub fn zeros(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| !b).map(|(i, _)| i)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `x + e_j`.
    pub fn with(&self, j: usize) -> Self {
        let mut bits = self.bits.clone();
        bits[j] = true;
        Selection { bits }
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.bits.len() != n {
            return Err(Error::InvalidSelection(format!(
                "selection has length {}, instance has {n} sets",
                self.bits.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
