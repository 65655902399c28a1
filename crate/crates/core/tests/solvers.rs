mod common;

use common::*;
use ppsc::benders::{solve_dep, solve_sampling, CutFamily, SamplingConfig};
use ppsc::compact::solve_ltmip;
use ppsc::exact::{solve_exact, ExactConfig};
use ppsc::mip::{solve_bnb, LazyDecision, LinearCut, LinearModel, Limits, Relation};
use ppsc::scenario::sample_scenarios;
use ppsc::{generate_paper_instance, CoverageModel, PpscInstance, SolveStatus};
use rand::Rng;

fn ic(seed: u64, n: usize, m: usize) -> PpscInstance {
    let mut r = rng(seed);
    random_instance(
        &mut r,
        &Shape {
            model: CoverageModel::IndependentCoverage,
            n,
            m,
            density: 0.6,
            integer_costs: true,
        },
    )
}

#[test]
fn exact_solver_agrees_with_enumeration_and_across_kappa() {
    for seed in 0..15 {
        let inst = ic(seed, 7, 5);
        let want = brute_optimum(&inst);
        let mut plain = ExactConfig::new(1).unwrap();
        plain.plain_no_good = true;
        for cfg in [ExactConfig::new(1).unwrap(), ExactConfig::new(2).unwrap(), plain] {
            let rep = solve_exact(&inst, &cfg).unwrap();
            match want {
                None => assert_eq!(rep.status, SolveStatus::Infeasible),
                Some(best) => {
                    assert_eq!(rep.status, SolveStatus::Optimal);
                    assert_eq!(rep.objective, best);
                    assert!(rep.master_history.windows(2).all(|w| w[1] >= w[0] - 1e-9));
                    assert_eq!(rep.master_history.last().copied(), Some(best));
                }
            }
        }
    }
}

#[test]
fn generated_benchmark_is_solved_consistently() {
    let inst = generate_paper_instance(CoverageModel::LinearThreshold, 10, 1.0, 0.1, 0).unwrap();
    let exact = solve_exact(&inst, &ExactConfig::default()).unwrap();
    let compact = solve_ltmip(&inst, &Limits::none()).unwrap();
    assert_eq!(exact.status, SolveStatus::Optimal);
    assert_eq!(exact.objective, compact.objective);
    assert_eq!(Some(exact.objective), brute_optimum(&inst));
}

#[test]
fn sampling_methods_agree_and_repair() {
    for seed in 0..6 {
        let inst = ic(100 + seed, 6, 4);
        let sc = sample_scenarios(&inst, 12, seed).unwrap();
        let want = brute_sampled_optimum(&inst, &sc);
        let dep = solve_dep(&inst, &sc, &SamplingConfig::default()).unwrap();
        for family in [CutFamily::Submodular, CutFamily::NewValid] {
            let mut cfg = SamplingConfig::new(family, 2).unwrap();
            cfg.oracle_phase = false;
            let lazy = solve_sampling(&inst, &sc, &cfg).unwrap();
            assert_eq!(lazy.master_objective, want);
            assert_eq!(lazy.master_objective, dep.master_objective);
            if let Some(x) = &lazy.selection {
                assert!(sc.empirical_prob(x, inst.tau()) >= 1.0 - inst.epsilon() - 1e-9);
            }

            cfg.oracle_phase = true;
            let repaired = solve_sampling(&inst, &sc, &cfg).unwrap();
            if repaired.status == SolveStatus::Optimal {
                assert!(brute_feasible(&inst, repaired.selection.as_ref().unwrap()));
                assert!(repaired.objective >= want.unwrap() - 1e-9);
            }
        }
    }
}

fn knapsack(r: &mut rand_chacha::ChaCha8Rng) -> LinearModel {
    let mut model = LinearModel::new();
    let n = 8;
    let mut terms = Vec::new();
    for j in 0..n {
        let v = model.add_binary(format!("b{j}")).unwrap();
        model.set_objective(v, -(r.gen_range(1..10) as f64));
        terms.push((v, r.gen_range(1..6) as f64));
    }
    model.add_constraint("cap", terms, Relation::Le, 10.0).unwrap();
    model
}

#[test]
fn branch_and_bound_is_deterministic() {
    let mut r = rng(77);
    for _ in 0..20 {
        let base = knapsack(&mut r);
        let a = solve_bnb(&mut base.clone(), ppsc::mip::accept_all, &Limits::none()).unwrap();
        let b = solve_bnb(&mut base.clone(), ppsc::mip::accept_all, &Limits::none()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn lazy_cuts_only_shrink_the_feasible_region() {
    // forbid more than three items through the callback; the optimum must
    // match adding the row up front and never beat the unconstrained one
    let mut r = rng(78);
    for _ in 0..20 {
        let base = knapsack(&mut r);
        let free = solve_bnb(&mut base.clone(), ppsc::mip::accept_all, &Limits::none()).unwrap();

        let mut upfront = base.clone();
        let all: Vec<(usize, f64)> = (0..8).map(|j| (j, 1.0)).collect();
        upfront.add_constraint("card", all, Relation::Le, 3.0).unwrap();
        let direct = solve_bnb(&mut upfront, ppsc::mip::accept_all, &Limits::none()).unwrap();

        let mut lazy_model = base.clone();
        let lazy = solve_bnb(
            &mut lazy_model,
            |cand: &ppsc::mip::Candidate<'_>| {
                let count: f64 = (0..8).map(|j| cand.value(&format!("b{j}"))).sum();
                Ok(if count > 3.5 {
                    let terms = (0..8).map(|j| (format!("b{j}"), 1.0));
                    LazyDecision::Reject(vec![LinearCut::new(
                        ppsc::mip::CutTag::NoGood,
                        terms,
                        0.0,
                        Relation::Le,
                        3.0,
                    )?])
                } else {
                    LazyDecision::Accept
                })
            },
            &Limits::none(),
        )
        .unwrap();
        assert!(lazy.objective >= free.objective - 1e-9);
        assert_eq!(lazy.objective, direct.objective);
        assert!(lazy_model.num_cuts() >= usize::from(free.objective < direct.objective));
    }
}
