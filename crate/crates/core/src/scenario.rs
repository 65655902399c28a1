//! Live-arc scenarios and the coverage kernels evaluated on them.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CoverageModel, PpscInstance, Selection};

/// One sampled realization: the set of arcs that turned out live.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveArcScenario {
    n: usize,
    m: usize,
    probability: f64,
    arcs: Vec<(usize, usize)>,
    reached_by: Vec<Vec<usize>>,
    reaches: Vec<Vec<usize>>,
}

impl LiveArcScenario {
    /// Builds a scenario from live arcs `(set, item)`.
    pub fn new(n: usize, m: usize, arcs: Vec<(usize, usize)>, probability: f64) -> Result<Self> {
        let mut arcs = arcs;
        arcs.sort_unstable();
        arcs.dedup();
        let mut reached_by = vec![Vec::new(); m];
        let mut reaches = vec![Vec::new(); n];
        for &(i, j) in &arcs {
            if i >= n || j >= m {
                return Err(Error::InvalidArgument(format!(
                    "live arc ({i},{j}) out of range for n={n}, m={m}"
                )));
            }
            reached_by[j].push(i);
            reaches[i].push(j);
        }
        Ok(LiveArcScenario {
            n,
            m,
            probability,
            arcs,
            reached_by,
            reaches,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Sets with a live arc into `item`, ascending.
    pub fn reached_by(&self, item: usize) -> &[usize] {
        &self.reached_by[item]
    }

    /// Items reachable from `set`, ascending.
    pub fn reaches(&self, set: usize) -> &[usize] {
        &self.reaches[set]
    }

    pub fn is_live(&self, set: usize, item: usize) -> bool {
        self.reaches[set].binary_search(&item).is_ok()
    }

    /// Every item has at most one live incoming arc.
    pub fn has_unit_in_degree(&self) -> bool {
        self.reached_by.iter().all(|r| r.len() <= 1)
    }

    /// Number of items covered by the sets in `support`.
    pub fn sigma(&self, support: &[usize]) -> usize {
        let mut covered = vec![false; self.m];
        let mut count = 0;
        for &i in support {
            for &j in &self.reaches[i] {
                if !covered[j] {
                    covered[j] = true;
                    count += 1;
                }
            }
        }
        count
    }

    pub fn sigma_of(&self, x: &Selection) -> usize {
        self.reached_by
            .iter()
            .filter(|sets| sets.iter().any(|&i| x.contains(i)))
            .count()
    }

    /// `sigma({j})`.
    pub fn singleton(&self, j: usize) -> usize {
        self.reaches[j].len()
    }

    /// `sigma(X + j) - sigma(X)`.
    pub fn marginal_gain(&self, support: &[usize], j: usize) -> Result<usize> {
        if support.contains(&j) {
            return Err(Error::InvalidArgument(format!("set {j} already in the base set")));
        }
        let mut covered = vec![false; self.m];
        for &i in support {
            for &item in &self.reaches[i] {
                covered[item] = true;
            }
        }
        Ok(self.reaches[j].iter().filter(|&&item| !covered[item]).count())
    }

    /// Items reachable from every set in `all_of` and from none in `none_of`.
    pub fn common_reach(&self, all_of: &[usize], none_of: &[usize]) -> Result<Vec<usize>> {
        if let Some(k) = all_of.iter().find(|k| none_of.contains(k)) {
            return Err(Error::InvalidArgument(format!("set {k} appears in both B and N")));
        }
        Ok((0..self.m)
            .filter(|&item| {
                all_of.iter().all(|&i| self.is_live(i, item))
                    && none_of.iter().all(|&i| !self.is_live(i, item))
            })
            .collect())
    }

    /// Number of items reachable from `k` and from no other set.
    pub fn eta(&self, k: usize) -> usize {
        self.reaches[k]
            .iter()
            .filter(|&&item| self.reached_by[item].len() == 1)
            .count()
    }

    /// For each item, how many selected sets reach it.
    pub fn reach_counts(&self, x: &Selection) -> Vec<usize> {
        self.reached_by
            .iter()
            .map(|sets| sets.iter().filter(|&&i| x.contains(i)).count())
            .collect()
    }
}

/// A weighted collection of scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    scenarios: Vec<LiveArcScenario>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    count: usize,
    weights: Vec<f64>,
    arcs: Vec<Vec<(usize, usize)>>,
}

impl ScenarioSet {
    /// Wraps scenarios whose probabilities sum to one.
    pub fn new(scenarios: Vec<LiveArcScenario>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::InvalidArgument("scenario set is empty".into()));
        }
        let total: f64 = scenarios.iter().map(|s| s.probability).sum();
        if (total - 1.0).abs() > 1e-9 || scenarios.iter().any(|s| s.probability < 0.0) {
            return Err(Error::InvalidArgument(format!("scenario probabilities sum to {total}, not 1")));
        }
        let (n, m) = (scenarios[0].n, scenarios[0].m);
        if scenarios.iter().any(|s| s.n != n || s.m != m) {
            return Err(Error::InvalidArgument("scenarios disagree on graph dimensions".into()));
        }
        Ok(ScenarioSet { scenarios })
    }

    /// Equiprobable scenarios from arc lists.
    pub fn equiprobable(n: usize, m: usize, arcs: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        let p = 1.0 / arcs.len().max(1) as f64;
        let scenarios = arcs
            .into_iter()
            .map(|a| LiveArcScenario::new(n, m, a, p))
            .collect::<Result<Vec<_>>>()?;
        ScenarioSet::new(scenarios)
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn scenarios(&self) -> &[LiveArcScenario] {
        &self.scenarios
    }

    pub fn get(&self, w: usize) -> &LiveArcScenario {
        &self.scenarios[w]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.scenarios.iter().map(|s| s.probability).collect()
    }

    pub fn is_linear_threshold(&self) -> bool {
        self.scenarios.iter().all(LiveArcScenario::has_unit_in_degree)
    }

    /// Probability mass of scenarios in which `x` covers at least `tau` items.
    pub fn empirical_prob(&self, x: &Selection, tau: usize) -> f64 {
        self.scenarios
            .iter()
            .filter(|s| s.sigma_of(x) >= tau)
            .map(|s| s.probability)
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ScenarioDoc {
            count: self.len(),
            weights: self.weights(),
            arcs: self.scenarios.iter().map(|s| s.arcs.clone()).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    /// Parses a scenario document against the dimensions of `instance`.
    pub fn from_json(text: &str, instance: &PpscInstance) -> Result<Self> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;
        if doc.count != doc.arcs.len() || doc.count != doc.weights.len() {
            return Err(Error::InvalidArgument(format!(
                "scenario document declares {} scenarios but has {} arc lists and {} weights",
                doc.count,
                doc.arcs.len(),
                doc.weights.len()
            )));
        }
        let scenarios = doc
            .arcs
            .into_iter()
            .zip(doc.weights)
            .map(|(arcs, p)| LiveArcScenario::new(instance.n(), instance.m(), arcs, p))
            .collect::<Result<Vec<_>>>()?;
        ScenarioSet::new(scenarios)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, instance: &PpscInstance) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, instance)
    }
}

/// Draws one live-arc graph. Scenario `index` uses its own ChaCha stream of
/// `seed`, so it does not depend on how many scenarios are drawn.
pub fn sample_scenario(instance: &PpscInstance, seed: u64, index: u64, probability: f64) -> LiveArcScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut arcs = Vec::new();
    for item in 0..instance.m() {
        let incoming = instance.incoming(item);
        match instance.model() {
            CoverageModel::IndependentCoverage => {
                for &(set, a) in incoming {
                    if rng.gen::<f64>() < a {
                        arcs.push((set, item));
                    }
                }
            }
            CoverageModel::LinearThreshold => {
                // pick one incoming arc with probability a_ij, none otherwise
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for &(set, a) in incoming {
                    acc += a;
                    if u < acc {
                        arcs.push((set, item));
                        break;
                    }
                }
            }
        }
    }
    LiveArcScenario::new(instance.n(), instance.m(), arcs, probability).expect("arcs come from the instance")
}

/// `count` equiprobable scenarios.
pub fn sample_scenarios(instance: &PpscInstance, count: usize, seed: u64) -> Result<ScenarioSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("scenario count must be at least 1".into()));
    }
    let p = 1.0 / count as f64;
    let scenarios = (0..count as u64)
        .map(|w| sample_scenario(instance, seed, w, p))
        .collect();
    ScenarioSet::new(scenarios)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Four sets, six items: 0->{1,2}, 1->{0,1,2}, 2->{3,5}, 3->{3,4}
    /// (0-based labels of the four-set worked example).
    pub(crate) fn four_set_graph() -> LiveArcScenario {
        LiveArcScenario::new(
            4,
            6,
            vec![(0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 3), (2, 5), (3, 3), (3, 4)],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn sigma_examples() {
        let g = four_set_graph();
        assert_eq!(g.sigma(&[1]), 3);
        assert_eq!(g.sigma(&[0, 1, 2, 3]), 6);
        assert_eq!(g.sigma(&[]), 0);
        assert_eq!(g.sigma_of(&Selection::from_support(4, &[1])), 3);
    }

    #[test]
    fn marginal_gain_examples() {
        let g = four_set_graph();
        assert_eq!(g.marginal_gain(&[1], 0).unwrap(), 0);
        assert_eq!(g.marginal_gain(&[1], 2).unwrap(), 2);
        for j in 0..4 {
            assert_eq!(g.marginal_gain(&[], j).unwrap(), g.sigma(&[j]));
        }
        assert!(g.marginal_gain(&[1], 1).is_err());
    }

    #[test]
    fn common_reach_examples() {
        let g = four_set_graph();
        assert_eq!(g.common_reach(&[0, 1], &[2, 3]).unwrap(), vec![1, 2]);
        assert_eq!(g.eta(1), 1);
        assert_eq!(g.eta(2), 1);
        assert_eq!(g.eta(0), 0);
        assert_eq!(g.common_reach(&[2], &[]).unwrap(), g.reaches(2).to_vec());
        assert!(g.common_reach(&[0, 1], &[1]).is_err());
    }

    #[test]
    fn empirical_prob_examples() {
        let set = ScenarioSet::new(vec![
            LiveArcScenario::new(2, 3, vec![(0, 0), (0, 1), (1, 2)], 0.5).unwrap(),
            LiveArcScenario::new(2, 3, vec![(0, 0)], 0.5).unwrap(),
        ])
        .unwrap();
        assert_eq!(set.empirical_prob(&Selection::full(2), 0), 1.0);
        assert_eq!(set.empirical_prob(&Selection::empty(2), 1), 0.0);
        assert_eq!(set.empirical_prob(&Selection::full(2), 2), 0.5);
    }

    fn uniform(model: CoverageModel, a: f64) -> PpscInstance {
        let weights = (0..3).flat_map(|i| (0..4).map(move |j| (i, j, a))).collect();
        PpscInstance::new(model, 3, 4, vec![1.0; 3], weights, 2, 0.1).unwrap()
    }

    #[test]
    fn sampling_extremes() {
        let full = sample_scenarios(&uniform(CoverageModel::IndependentCoverage, 1.0), 20, 5).unwrap();
        assert!(full.scenarios().iter().all(|s| s.arcs().len() == 12));
        let empty = sample_scenarios(&uniform(CoverageModel::IndependentCoverage, 0.0), 20, 5).unwrap();
        assert!(empty.scenarios().iter().all(|s| s.arcs().is_empty()));
        let lt = sample_scenarios(&uniform(CoverageModel::LinearThreshold, 0.3), 200, 5).unwrap();
        assert!(lt.is_linear_threshold());
        assert!(sample_scenarios(&uniform(CoverageModel::LinearThreshold, 0.3), 0, 5).is_err());
    }

    #[test]
    fn scenario_streams_are_index_stable() {
        let inst = uniform(CoverageModel::IndependentCoverage, 0.4);
        let few = sample_scenarios(&inst, 3, 42).unwrap();
        let many = sample_scenarios(&inst, 10, 42).unwrap();
        for w in 0..3 {
            assert_eq!(few.get(w).arcs(), many.get(w).arcs());
        }
        assert_ne!(sample_scenarios(&inst, 3, 43).unwrap(), few);
    }

    #[test]
    fn scenario_json_round_trip() {
        let inst = uniform(CoverageModel::IndependentCoverage, 0.4);
        let set = sample_scenarios(&inst, 7, 1).unwrap();
        let back = ScenarioSet::from_json(&set.to_json().unwrap(), &inst).unwrap();
        assert_eq!(set, back);
        assert!(ScenarioSet::from_json(r#"{"count":2,"weights":[1.0],"arcs":[[]]}"#, &inst).is_err());
        assert!(ScenarioSet::from_json(r#"{"count":1,"weights":[1.0],"arcs":[[[9,0]]]}"#, &inst).is_err());
    }
}
