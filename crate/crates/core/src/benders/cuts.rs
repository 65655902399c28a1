//! Per-scenario feasibility cuts on `(theta_w, x)`.
//!
//! Every cut here has the shape `theta_w <= constant + sum_j coef_j x_j` and
//! is stored as `theta_w - sum_j coef_j x_j <= constant`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exact::x_var;
use crate::instance::Selection;
use crate::mip::{CutTag, LinearCut, Relation};
use crate::scenario::LiveArcScenario;

pub fn theta_var(w: usize) -> String {
    format!("theta{w}")
}

pub fn z_var(w: usize) -> String {
    format!("z{w}")
}

/// `theta <= constant + sum coefs[j] x_j` in plain numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaBound {
    pub constant: f64,
    pub coefs: Vec<f64>,
}

impl ThetaBound {
    pub fn at(&self, x: &Selection) -> f64 {
        self.constant + x.support().map(|j| self.coefs[j]).sum::<f64>()
    }

    pub fn to_cut(&self, w: usize, tag: CutTag) -> Result<LinearCut> {
        let terms = std::iter::once((theta_var(w), 1.0))
            .chain(self.coefs.iter().enumerate().map(|(j, &c)| (x_var(j), -c)));
        LinearCut::new(tag, terms, 0.0, Relation::Le, self.constant)
    }

    /// Reads a cut produced by [`ThetaBound::to_cut`] back.
    pub fn from_cut(cut: &LinearCut, w: usize, n: usize) -> Result<Self> {
        if cut.relation() != Relation::Le || cut.coefficient(&theta_var(w)) != 1.0 {
            return Err(Error::InvalidArgument(format!("`{cut}` is not an upper bound on {}", theta_var(w))));
        }
        Ok(ThetaBound {
            constant: cut.rhs(),
            coefs: (0..n).map(|j| -cut.coefficient(&x_var(j))).collect(),
        })
    }
}

/// `theta <= sigma(X) + sum_{j not in X} rho_j(X) x_j` for `X = supp(x_bar)`.
pub fn submodular_bound(scenario: &LiveArcScenario, x_bar: &Selection) -> Result<ThetaBound> {
    x_bar.check_len(scenario.n())?;
    let support: Vec<usize> = x_bar.support().collect();
    let mut coefs = vec![0.0; scenario.n()];
    for j in x_bar.zeros() {
        coefs[j] = scenario.marginal_gain(&support, j)? as f64;
    }
    Ok(ThetaBound {
        constant: scenario.sigma(&support) as f64,
        coefs,
    })
}

pub fn separate_submodular(scenario: &LiveArcScenario, w: usize, x_bar: &Selection) -> Result<LinearCut> {
    submodular_bound(scenario, x_bar)?.to_cut(w, CutTag::Submodular)
}

/// One common-coverage family: every pair of sets in `sets` shares exactly
/// `common` items of `items` that no set outside `sets` reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageFamily {
    pub sets: Vec<usize>,
    pub items: Vec<usize>,
    pub common: usize,
}

/// Parameters of the common-coverage inequality
/// `theta <= sum_k n_k (1 - sum_{C1k} x) + sum_{k in D} eta_k (1 - x_k) + sum_j sigma({j}) x_j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NewValidInequalitySpec {
    pub families: Vec<CoverageFamily>,
    pub d: Vec<usize>,
}

impl NewValidInequalitySpec {
    /// Checks the family hypotheses against `scenario`.
    pub fn validate(&self, scenario: &LiveArcScenario) -> Result<()> {
        let n = scenario.n();
        let mut seen_items = BTreeSet::new();
        for (k, fam) in self.families.iter().enumerate() {
            let sets: BTreeSet<usize> = fam.sets.iter().copied().collect();
            if sets.len() != fam.sets.len() || sets.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "family {k} needs at least two distinct sets, got {:?}",
                    fam.sets
                )));
            }
            if let Some(&i) = sets.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidArgument(format!("family {k} names set {i} out of range")));
            }
            for &item in &fam.items {
                if item >= scenario.m() {
                    return Err(Error::InvalidArgument(format!("family {k} names item {item} out of range")));
                }
                if !seen_items.insert(item) {
                    return Err(Error::InvalidArgument(format!("item {item} belongs to two families")));
                }
            }
            let outside: Vec<usize> = (0..n).filter(|i| !sets.contains(i)).collect();
            let members: Vec<usize> = sets.into_iter().collect();
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    let shared = scenario
                        .common_reach(&[i, j], &outside)?
                        .into_iter()
                        .filter(|v| fam.items.contains(v))
                        .count();
                    if shared != fam.common {
                        return Err(Error::InvalidArgument(format!(
                            "family {k}: pair ({i}, {j}) shares {shared} items, expected {}",
                            fam.common
                        )));
                    }
                }
            }
        }
        let d: BTreeSet<usize> = self.d.iter().copied().collect();
        if d.len() != self.d.len() || d.iter().any(|&k| k >= n) {
            return Err(Error::InvalidArgument(format!("D must list distinct sets below {n}, got {:?}", self.d)));
        }
        Ok(())
    }

    /// The families used by separation: one per item that is reached by at
    /// least two sets and by at least one set of `supp(x_bar)`, grouping all
    /// of that item's reachers. `D` is empty.
    pub fn separation(scenario: &LiveArcScenario, x_bar: &Selection) -> Self {
        let families = (0..scenario.m())
            .filter_map(|item| {
                let reachers = scenario.reached_by(item);
                (reachers.len() >= 2 && reachers.iter().any(|&i| x_bar.contains(i))).then(|| CoverageFamily {
                    sets: reachers.to_vec(),
                    items: vec![item],
                    common: 1,
                })
            })
            .collect();
        NewValidInequalitySpec {
            families,
            d: Vec::new(),
        }
    }

    /// Separation families plus `D = supp(x_bar)`; evaluates to the
    /// submodular cut at `x_bar`.
    pub fn subsuming(scenario: &LiveArcScenario, x_bar: &Selection) -> Self {
        let mut spec = Self::separation(scenario, x_bar);
        spec.d = x_bar.support().collect();
        spec
    }
}

/// Evaluates the common-coverage inequality. With `include_d` false the `D`
/// terms are left out.
pub fn new_valid_bound(
    scenario: &LiveArcScenario,
    spec: &NewValidInequalitySpec,
    include_d: bool,
) -> Result<ThetaBound> {
    spec.validate(scenario)?;
    let mut constant = 0.0;
    let mut coefs: Vec<f64> = (0..scenario.n()).map(|j| scenario.singleton(j) as f64).collect();
    for fam in &spec.families {
        let c = fam.common as f64;
        constant += c;
        for &j in &fam.sets {
            coefs[j] -= c;
        }
    }
    if include_d {
        for &k in &spec.d {
            let eta = scenario.eta(k) as f64;
            constant += eta;
            coefs[k] -= eta;
        }
    }
    Ok(ThetaBound { constant, coefs })
}

pub fn evaluate_new_valid(
    scenario: &LiveArcScenario,
    w: usize,
    spec: &NewValidInequalitySpec,
    include_d: bool,
) -> Result<LinearCut> {
    new_valid_bound(scenario, spec, include_d)?.to_cut(w, CutTag::NewValid)
}

/// Separation routine for the common-coverage inequality; the result is
/// tight at `x_bar` (it evaluates to `sigma(supp(x_bar))` there).
pub fn separate_new_valid(scenario: &LiveArcScenario, w: usize, x_bar: &Selection) -> Result<LinearCut> {
    x_bar.check_len(scenario.n())?;
    let spec = NewValidInequalitySpec::separation(scenario, x_bar);
    evaluate_new_valid(scenario, w, &spec, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::tests::four_set_graph;

    fn sel(s: &[usize]) -> Selection {
        Selection::from_support(4, s)
    }

    fn bound(cut: &LinearCut) -> ThetaBound {
        ThetaBound::from_cut(cut, 0, 4).unwrap()
    }

    #[test]
    fn submodular_examples() {
        let g = four_set_graph();
        let b = bound(&separate_submodular(&g, 0, &sel(&[1])).unwrap());
        assert_eq!((b.constant, b.coefs), (3.0, vec![0.0, 0.0, 2.0, 2.0]));
        let b = bound(&separate_submodular(&g, 0, &sel(&[])).unwrap());
        assert_eq!((b.constant, b.coefs), (0.0, vec![2.0, 3.0, 2.0, 2.0]));
        let b = bound(&separate_submodular(&g, 0, &sel(&[0, 1, 2, 3])).unwrap());
        assert_eq!((b.constant, b.coefs), (6.0, vec![0.0; 4]));
    }

    fn worked_spec() -> NewValidInequalitySpec {
        NewValidInequalitySpec {
            families: vec![
                CoverageFamily {
                    sets: vec![0, 1],
                    items: vec![1, 2],
                    common: 2,
                },
                CoverageFamily {
                    sets: vec![2, 3],
                    items: vec![3],
                    common: 1,
                },
            ],
            d: vec![1, 2],
        }
    }

    #[test]
    fn worked_example_inequalities() {
        let g = four_set_graph();
        let with_d = bound(&evaluate_new_valid(&g, 0, &worked_spec(), true).unwrap());
        assert_eq!((with_d.constant, with_d.coefs), (5.0, vec![0.0, 0.0, 0.0, 1.0]));
        let without = bound(&evaluate_new_valid(&g, 0, &worked_spec(), false).unwrap());
        assert_eq!((without.constant, without.coefs), (3.0, vec![0.0, 1.0, 1.0, 1.0]));
        let empty = new_valid_bound(&g, &NewValidInequalitySpec::default(), false).unwrap();
        assert_eq!((empty.constant, empty.coefs), (0.0, vec![2.0, 3.0, 2.0, 2.0]));
    }

    #[test]
    fn bad_pair_is_reported() {
        let g = four_set_graph();
        let mut spec = worked_spec();
        spec.families[0].common = 1;
        let err = new_valid_bound(&g, &spec, false).unwrap_err().to_string();
        assert!(err.contains("pair (0, 1)"), "{err}");

        let mut spec = worked_spec();
        spec.families[1].items = vec![2];
        assert!(spec.validate(&g).is_err());
    }

    #[test]
    fn separation_examples() {
        let g = four_set_graph();
        let b = bound(&separate_new_valid(&g, 0, &sel(&[1])).unwrap());
        assert_eq!((b.constant, b.coefs), (2.0, vec![0.0, 1.0, 2.0, 2.0]));
        let b = bound(&separate_new_valid(&g, 0, &sel(&[])).unwrap());
        assert_eq!((b.constant, b.coefs), (0.0, vec![2.0, 3.0, 2.0, 2.0]));
        let b = bound(&separate_new_valid(&g, 0, &sel(&[2])).unwrap());
        assert_eq!((b.constant, b.coefs), (1.0, vec![2.0, 3.0, 1.0, 1.0]));
    }

    #[test]
    fn subsuming_spec_reproduces_submodular_cut() {
        let g = four_set_graph();
        for mask in 0..16u64 {
            let x = Selection::from_mask(4, mask);
            let sub = separate_submodular(&g, 0, &x).unwrap();
            let nv = evaluate_new_valid(&g, 0, &NewValidInequalitySpec::subsuming(&g, &x), true).unwrap();
            assert_eq!(sub.terms(), nv.terms(), "{x}");
            assert_eq!(sub.rhs(), nv.rhs());
        }
    }
}
