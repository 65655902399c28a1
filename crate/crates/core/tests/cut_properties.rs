mod common;

use common::*;
use ppsc::benders::{
    new_valid_bound, separate_new_valid, separate_submodular, submodular_bound, CoverageFamily,
    NewValidInequalitySpec, ThetaBound,
};
use ppsc::exact::{build_no_good_cut, build_strengthened_cut};
use ppsc::oracle::Oracle;
use ppsc::scenario::LiveArcScenario;
use ppsc::{CoverageModel, Selection};
use proptest::prelude::*;

fn valid_everywhere(s: &LiveArcScenario, bound: &ThetaBound) -> bool {
    selections(s.n()).all(|x| reach(s.arcs(), &x) as f64 <= bound.at(&x) + 1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn theta_cuts_are_valid_and_tight(seed in 0u64..100_000, n in 1usize..7, m in 1usize..7, mask in 0u64..64) {
        let mut r = rng(seed);
        let s = random_scenario(&mut r, n, m, 0.4);
        let x_bar = Selection::from_mask(n, mask & ((1 << n) - 1));
        let sigma = reach(s.arcs(), &x_bar) as f64;

        let sub = submodular_bound(&s, &x_bar).unwrap();
        prop_assert!(valid_everywhere(&s, &sub));
        prop_assert_eq!(sub.at(&x_bar), sigma);

        let spec = NewValidInequalitySpec::separation(&s, &x_bar);
        let nv = new_valid_bound(&s, &spec, false).unwrap();
        prop_assert!(valid_everywhere(&s, &nv));
        prop_assert_eq!(nv.at(&x_bar), sigma);

        let with_d = new_valid_bound(&s, &NewValidInequalitySpec::subsuming(&s, &x_bar), true).unwrap();
        prop_assert!(valid_everywhere(&s, &with_d));

        // the separation routines emit exactly these bounds
        prop_assert_eq!(ThetaBound::from_cut(&separate_submodular(&s, 3, &x_bar).unwrap(), 3, n).unwrap(), sub);
        prop_assert_eq!(ThetaBound::from_cut(&separate_new_valid(&s, 3, &x_bar).unwrap(), 3, n).unwrap(), nv);
    }
}

#[test]
fn facet_of_a_shared_item_family() {
    // sets 0..3 share item 0 and each owns one private item; set 3 reaches item 4
    let s = LiveArcScenario::new(4, 5, vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 2), (2, 3), (3, 4)], 1.0).unwrap();
    let spec = NewValidInequalitySpec {
        families: vec![CoverageFamily {
            sets: vec![0, 1, 2],
            items: vec![0],
            common: 1,
        }],
        d: vec![],
    };
    let bound = new_valid_bound(&s, &spec, false).unwrap();
    assert_eq!(bound.constant, 1.0);
    assert_eq!(bound.coefs, vec![1.0; 4]);
    assert!(valid_everywhere(&s, &bound));

    let tight: Vec<Vec<f64>> = selections(4)
        .filter(|x| reach(s.arcs(), x) as f64 == bound.at(x))
        .map(|x| {
            let mut row = vec![reach(s.arcs(), &x) as f64];
            row.extend((0..4).map(|i| f64::from(u8::from(x.contains(i)))));
            row.push(1.0);
            row
        })
        .collect();
    assert_eq!(rank(tight), 5);
}

#[test]
fn family_hypotheses_are_checked() {
    let s = four_set_graph();
    let wrong_count = NewValidInequalitySpec {
        families: vec![CoverageFamily {
            sets: vec![0, 1],
            items: vec![1, 2],
            common: 1,
        }],
        d: vec![],
    };
    assert!(new_valid_bound(&s, &wrong_count, false).is_err());
    let single = NewValidInequalitySpec {
        families: vec![CoverageFamily {
            sets: vec![0],
            items: vec![1],
            common: 1,
        }],
        d: vec![],
    };
    assert!(new_valid_bound(&s, &single, false).is_err());
}

#[test]
fn oracle_cuts_keep_every_feasible_point() {
    let mut r = rng(55);
    for k in 0..30 {
        let shape = Shape {
            model: if k % 2 == 0 {
                CoverageModel::IndependentCoverage
            } else {
                CoverageModel::LinearThreshold
            },
            n: 6,
            m: 5,
            density: 0.6,
            integer_costs: true,
        };
        let inst = random_instance(&mut r, &shape);
        let oracle = Oracle::new(&inst);
        for bad in selections(6).filter(|x| !brute_feasible(&inst, x)) {
            let no_good = build_no_good_cut(&bad).unwrap();
            let value = |x: &Selection| {
                let x = x.clone();
                move |name: &str| f64::from(u8::from(x.contains(name[1..].parse().unwrap())))
            };
            assert!(!no_good.is_satisfied(value(&bad), 1e-9));
            if bad.count() == 6 {
                assert!(build_strengthened_cut(&oracle, &bad, 2).is_err());
                continue;
            }
            for kappa in [1, 2] {
                let strong = build_strengthened_cut(&oracle, &bad, kappa).unwrap();
                assert!(!strong.is_satisfied(value(&bad), 1e-9));
                for good in selections(6).filter(|x| brute_feasible(&inst, x)) {
                    assert!(no_good.is_satisfied(value(&good), 1e-9));
                    assert!(strong.is_satisfied(value(&good), 1e-9), "kappa {kappa} cuts off {good:?}");
                }
            }
        }
    }
}
