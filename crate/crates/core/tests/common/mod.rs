//! Reference implementations used as oracles by the integration tests.
//! Everything here works from raw weights and arc lists, never from the
//! library's own coverage or reachability code.

#![allow(dead_code)]

use ppsc::scenario::{LiveArcScenario, ScenarioSet};
use ppsc::{CoverageModel, PpscInstance, Selection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Shape {
    pub model: CoverageModel,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub integer_costs: bool,
}

/// Random instance of the given shape with `tau` in `1..=m` and a risk level
/// from a short menu.
pub fn random_instance(rng: &mut ChaCha8Rng, shape: &Shape) -> PpscInstance {
    let Shape {
        model,
        n,
        m,
        density,
        integer_costs,
    } = *shape;
    let mut weights = Vec::new();
    for j in 0..m {
        let mut column: Vec<(usize, f64)> = Vec::new();
        for i in 0..n {
            if rng.gen::<f64>() < density {
                column.push((i, rng.gen_range(0.05..0.95)));
            }
        }
        if model == CoverageModel::LinearThreshold {
            let total: f64 = column.iter().map(|c| c.1).sum();
            if total > 0.0 {
                let scale = rng.gen_range(0.7..1.0) / total.max(1.0);
                column.iter_mut().for_each(|c| c.1 *= scale);
            }
        }
        weights.extend(column.into_iter().map(|(i, a)| (i, j, a)));
    }
    let costs = (0..n)
        .map(|_| {
            if integer_costs {
                rng.gen_range(1..=5) as f64
            } else {
                rng.gen_range(0.5..5.0)
            }
        })
        .collect();
    let tau = rng.gen_range(1..=m);
    let epsilon = [0.05, 0.1, 0.2, 0.3, 0.5][rng.gen_range(0..5)];
    PpscInstance::new(model, n, m, costs, weights, tau, epsilon).expect("generated instance is valid")
}

/// `P(item j covered)` straight from the weights.
pub fn coverage(instance: &PpscInstance, x: &Selection) -> Vec<f64> {
    let mut miss = vec![1.0; instance.m()];
    let mut hit = vec![0.0; instance.m()];
    for &(i, j, a) in instance.weights() {
        if x.contains(i) {
            miss[j] *= 1.0 - a;
            hit[j] += a;
        }
    }
    match instance.model() {
        CoverageModel::IndependentCoverage => miss.iter().map(|q| 1.0 - q).collect(),
        CoverageModel::LinearThreshold => hit,
    }
}

/// `P(at least tau of the independent events occur)` by summing over all
/// outcome profiles.
pub fn brute_tail(p: &[f64], tau: usize) -> f64 {
    let m = p.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << m) {
        if (mask.count_ones() as usize) < tau {
            continue;
        }
        let mut w = 1.0;
        for (i, &pi) in p.iter().enumerate() {
            w *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
        }
        total += w;
    }
    total
}

pub fn brute_probability(instance: &PpscInstance, x: &Selection) -> f64 {
    brute_tail(&coverage(instance, x), instance.tau())
}

pub fn brute_feasible(instance: &PpscInstance, x: &Selection) -> bool {
    brute_probability(instance, x) >= 1.0 - instance.epsilon() - 1e-9
}

pub fn selections(n: usize) -> impl Iterator<Item = Selection> {
    (0u64..1 << n).map(move |mask| Selection::from_mask(n, mask))
}

/// Cheapest truly feasible selection's cost.
pub fn brute_optimum(instance: &PpscInstance) -> Option<f64> {
    selections(instance.n())
        .filter(|x| brute_feasible(instance, x))
        .map(|x| instance.cost_of(&x))
        .min_by(f64::total_cmp)
}

/// Items reached by the chosen sets.
pub fn reach(arcs: &[(usize, usize)], x: &Selection) -> usize {
    let mut items: Vec<usize> = arcs.iter().filter(|(i, _)| x.contains(*i)).map(|&(_, j)| j).collect();
    items.sort_unstable();
    items.dedup();
    items.len()
}

/// Cheapest selection reaching `tau` items in enough scenario weight.
pub fn brute_sampled_optimum(instance: &PpscInstance, scenarios: &ScenarioSet) -> Option<f64> {
    let weights = scenarios.weights();
    selections(instance.n())
        .filter(|x| {
            let hit: f64 = scenarios
                .scenarios()
                .iter()
                .zip(&weights)
                .filter(|(s, _)| reach(s.arcs(), x) >= instance.tau())
                .map(|(_, w)| w)
                .sum();
            hit >= 1.0 - instance.epsilon() - 1e-9
        })
        .map(|x| instance.cost_of(&x))
        .min_by(f64::total_cmp)
}

/// A random live-arc graph, each arc present with probability `density`.
pub fn random_scenario(rng: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> LiveArcScenario {
    let arcs = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|_| rng.gen::<f64>() < density)
        .collect();
    LiveArcScenario::new(n, m, arcs, 1.0).unwrap()
}

/// Four sets and six items: 0->{1,2}, 1->{0,1,2}, 2->{3,5}, 3->{3,4}.
pub fn four_set_graph() -> LiveArcScenario {
    LiveArcScenario::new(
        4,
        6,
        vec![(0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 3), (2, 5), (3, 3), (3, 4)],
        1.0,
    )
    .unwrap()
}

/// Rank of a small dense matrix by Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[p][c].abs() < 1e-9 {
            continue;
        }
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c] / pivot[c];
                for (a, b) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *a -= f * b;
                }
            }
        }
        r += 1;
    }
    r
}
