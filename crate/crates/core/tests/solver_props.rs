mod common;

use mdpdec::model::{FiniteMdp, OptCriterion};
use mdpdec::solver::{
    bellman_backup, bounded_reach, check_sup_decisive_finite, exact_certified, exact_chain_value, exact_oracle,
    goal_targets, mec_decomposition, solve_reach_finite, solve_reach_targets, BoundedObjective, ReachOptions,
    ValueVector,
};
use mdpdec::transform::{avoid_flags, collapse, LayeredArena, DEFAULT_STATE_CAP};
use mdpdec::zoo::make_three_state;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain value iteration from zero, written independently of the library:
/// converges from below to the optimal reachability probabilities.
fn value_iteration(m: &FiniteMdp, opt: OptCriterion, rounds: usize) -> Vec<f64> {
    let n = m.num_states();
    let mut v = vec![0.0; n];
    v[m.goal()] = 1.0;
    for _ in 0..rounds {
        let mut next = v.clone();
        for s in 0..n {
            if s == m.goal() || m.actions(s).is_empty() {
                continue;
            }
            let vals = m
                .actions(s)
                .iter()
                .map(|a| a.dist.iter().map(|(t, p)| p.to_f64() * v[*t]).sum::<f64>());
            next[s] = match opt {
                OptCriterion::Sup => vals.fold(f64::NEG_INFINITY, f64::max),
                OptCriterion::Inf => vals.fold(f64::INFINITY, f64::min),
            };
        }
        v = next;
    }
    v
}

fn bound_chain(m: &FiniteMdp, opt: OptCriterion, max_n: usize) {
    let exact = common::to_f64(&exact_oracle(m, opt).unwrap().value);
    let Ok(view) = collapse(m, opt) else {
        assert_eq!(exact, 0.0);
        return;
    };
    let mut arena = LayeredArena::new(&view, opt, DEFAULT_STATE_CAP);
    let (mut last_lo, mut last_hi) = (0.0, 1.0);
    for n in 1..=max_n {
        arena.extend(n).unwrap();
        let lo = bounded_reach(&arena, n, opt, BoundedObjective::ReachWithin).unwrap();
        let hi = bounded_reach(&arena, n, opt, BoundedObjective::ReachOrSurvive).unwrap();
        let hope = bounded_reach(&arena, n, OptCriterion::Sup, BoundedObjective::Hope).unwrap();
        assert!(lo <= exact + 1e-12 && exact <= hi + 1e-12, "n={n}: {lo} {exact} {hi}");
        assert!(hi <= lo + hope + 1e-12, "n={n}: {hi} > {lo} + {hope}");
        assert!(lo >= last_lo - 1e-12 && hi <= last_hi + 1e-12);
        (last_lo, last_hi) = (lo, hi);
    }
}

/// Per-scheduler exact checks of the union bound and of the bounded values.
fn union_bound(m: &FiniteMdp, opt: OptCriterion, n: usize) {
    let Ok(view) = collapse(m, opt) else { return };
    let avoid = avoid_flags(m, opt);
    let mut arena = LayeredArena::new(&view, opt, DEFAULT_STATE_CAP);
    arena.extend(n).unwrap();
    let lo = bounded_reach(&arena, n, opt, BoundedObjective::ReachWithin).unwrap();
    let hi = bounded_reach(&arena, n, opt, BoundedObjective::ReachOrSurvive).unwrap();
    for choice in common::all_schedulers(m).into_iter().take(200) {
        let p = common::bounded_probs(m, &choice, &avoid, n);
        // F<=n goal or G<=n !avoid is the never-avoid event, goal being absorbing.
        assert!(p.never_avoid <= &p.reach + &p.never_avoid);
        assert_eq!(p.never_avoid, &p.reach + &p.hope);
        let (r, u) = (common::to_f64(&p.reach), common::to_f64(&p.never_avoid));
        match opt {
            OptCriterion::Sup => assert!(r <= lo + 1e-12 && u <= hi + 1e-12),
            OptCriterion::Inf => assert!(lo <= r + 1e-12 && hi <= u + 1e-12),
        }
    }
}

#[test]
fn three_state_values() {
    let m = make_three_state();
    let sup = exact_oracle(&m, OptCriterion::Sup).unwrap();
    assert_eq!(sup.value, common::big(1, 2));
    assert_eq!(sup.choice[0], Some(1));
    let inf = exact_oracle(&m, OptCriterion::Inf).unwrap();
    assert!(inf.value.is_zero());
    assert_eq!(inf.choice[0], Some(0));
    bound_chain(&m, OptCriterion::Sup, 20);
}

#[test]
fn corpus_oracles_agree() {
    for m in common::corpus(200) {
        let vi: Vec<Vec<f64>> = OptCriterion::BOTH.iter().map(|&o| value_iteration(&m, o, 20_000)).collect();
        for (k, opt) in OptCriterion::BOTH.into_iter().enumerate() {
            let oracle = exact_oracle(&m, opt).unwrap();
            let v = common::to_f64(&oracle.value);
            assert!((v - vi[k][m.initial_state()]).abs() < 1e-6, "{opt:?}: {v} vs {}", vi[k][0]);
            // the witness reproduces the value
            let again = exact_chain_value(&m, &goal_targets(&m), &oracle.choice, Some(m.initial_state())).unwrap();
            assert_eq!(again[m.initial_state()], oracle.value);
            // the certified solver finds the same value
            assert_eq!(exact_certified(&m, &goal_targets(&m), opt).unwrap().value, oracle.value);
            let b = solve_reach_finite(&m, opt, 1e-9).unwrap();
            assert!(b.lower <= v + 1e-12 && v <= b.upper + 1e-12, "{opt:?}: {b:?} vs {v}");
            assert!(b.upper - b.lower < 1e-9);
        }
    }
}

#[test]
fn corpus_brackets_hold_at_every_state() {
    let opts = ReachOptions {
        all_states: true,
        ..ReachOptions::with_tol(1e-9)
    };
    for m in common::corpus(60) {
        for opt in OptCriterion::BOTH {
            let sol = solve_reach_targets(&m, &goal_targets(&m), opt, &opts).unwrap();
            for s in 0..m.num_states() {
                let v = common::to_f64(&exact_oracle(&m.with_initial(s), opt).unwrap().value);
                assert!(sol.lower[s] <= v + 1e-12 && v <= sol.upper[s] + 1e-12);
            }
        }
    }
}

#[test]
fn corpus_decisiveness_matches_brute_force() {
    let mut seen = [0usize; 2];
    for m in common::corpus(200) {
        let want = common::brute_force_sup_decisive(&m);
        assert_eq!(check_sup_decisive_finite(&m).decisive, want, "{}", m.to_json());
        seen[want as usize] += 1;
    }
    // the corpus exercises both verdicts
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

#[test]
fn decisiveness_criteria_agree_with_exact_solves() {
    for m in common::corpus(80) {
        assert_eq!(common::brute_force_sup_decisive(&m), common::brute_force_sup_decisive_exact(&m));
    }
}

#[test]
fn finite_models_are_inf_decisive() {
    for m in common::corpus(200) {
        assert!(common::brute_force_inf_decisive(&m), "{}", m.to_json());
        let lib = avoid_flags(&m, OptCriterion::Inf);
        assert_eq!(lib, common::graph_sure_avoid(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn backup_is_monotone(seed in any::<u64>(), vseed in any::<u64>()) {
        let m = common::model_from_seed(seed, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(vseed);
        let v: Vec<f64> = (0..m.num_states()).map(|_| rng.gen::<f64>()).collect();
        let w: Vec<f64> = v.iter().map(|x| x + (1.0 - x) * rng.gen::<f64>()).collect();
        for opt in OptCriterion::BOTH {
            let bv = bellman_backup(&m, &ValueVector::new(v.clone()), opt).unwrap();
            let bw = bellman_backup(&m, &ValueVector::new(w.clone()), opt).unwrap();
            prop_assert!(bv.le(&bw));
        }
    }

    #[test]
    fn bound_chain_holds(seed in any::<u64>()) {
        let m = common::model_from_seed(seed, 8);
        for opt in OptCriterion::BOTH {
            bound_chain(&m, opt, 8);
        }
    }

    #[test]
    fn union_bound_holds(seed in any::<u64>(), n in 1usize..6) {
        let m = common::model_from_seed(seed, 6);
        for opt in OptCriterion::BOTH {
            union_bound(&m, opt, n);
        }
    }

    #[test]
    fn mecs_are_closed_and_disjoint(seed in any::<u64>()) {
        let m = common::model_from_seed(seed, 8);
        let mut owner = vec![None; m.num_states()];
        for (k, mec) in mec_decomposition(&m).iter().enumerate() {
            for (i, &s) in mec.states.iter().enumerate() {
                prop_assert!(owner[s].is_none());
                owner[s] = Some(k);
                for &a in &mec.actions[i] {
                    prop_assert!(m.actions(s)[a].dist.states().all(|t| mec.states.contains(t)));
                }
            }
        }
    }

    #[test]
    fn sup_decisiveness_matches_brute_force(seed in any::<u64>()) {
        let m = common::model_from_seed(seed, 7);
        prop_assert_eq!(check_sup_decisive_finite(&m).decisive, common::brute_force_sup_decisive(&m));
    }
}
