mod common;

use std::collections::BTreeMap;

use mdpdec::model::{Mdp, OptCriterion, Probability};
use mdpdec::solver::exact_oracle;
use mdpdec::transform::{collapse, collapse_finite, slice, LayeredArena, SlicedMdp, DEFAULT_STATE_CAP};
use mdpdec::zoo::{make_ml, make_mr, make_random_walk, make_three_state, MrParams, WalkParams};
use mdpdec::Error;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Every row of the slice is an exact distribution summing to one.
fn rows_sum_to_one(sl: &SlicedMdp) {
    for s in 0..sl.mdp.num_states() {
        for a in sl.mdp.actions(s) {
            assert!(a.dist.exact_sum().expect("exact slice").is_one(), "row {} of {}", a.name, sl.mdp.name(s));
        }
    }
}

/// Slices at consecutive depths agree once the deeper one is redirected
/// through the shallower sink, and arena ids stay stable.
fn check_slices<M: Mdp>(view: &M, opt: OptCriterion, max_n: usize) {
    let mut arena = LayeredArena::new(view, opt, DEFAULT_STATE_CAP);
    let mut prev: Option<SlicedMdp> = None;
    let mut prev_names: Vec<String> = Vec::new();
    for n in 0..=max_n {
        let sl = slice(&mut arena, n).unwrap();
        rows_sum_to_one(&sl);
        assert_eq!(sl.in_slice, arena.layer_size(n));
        for id in 0..prev_names.len() {
            assert_eq!(arena.state_name(id), prev_names[id]);
        }
        if let Some(p) = &prev {
            assert!(p.in_slice <= sl.in_slice);
            for s in 0..p.in_slice {
                let old = p.mdp.actions(s);
                let new = sl.mdp.actions(s);
                assert_eq!(old.len(), new.len());
                for (a, b) in old.iter().zip(new) {
                    assert_eq!(a.name, b.name);
                    let mut folded: BTreeMap<usize, Probability> = BTreeMap::new();
                    for (t, q) in b.dist.iter() {
                        let target = if *t < p.in_slice { *t } else { p.s_bot };
                        let e = folded.entry(target).or_insert_with(Probability::zero);
                        *e = e.add(q);
                    }
                    folded.retain(|_, q| !q.is_zero());
                    let mut expect: BTreeMap<usize, Probability> = BTreeMap::new();
                    for (t, q) in a.dist.iter() {
                        let e = expect.entry(*t).or_insert_with(Probability::zero);
                        *e = e.add(q);
                    }
                    expect.retain(|_, q| !q.is_zero());
                    assert_eq!(folded, expect, "depth {n}, state {}, action {}", p.mdp.name(s), a.name);
                }
            }
        }
        // one-step correspondence with the collapsed model
        for s in 0..sl.in_slice {
            let base = arena.state(s).clone();
            let labels = view.enabled(&base);
            let acts = sl.mdp.actions(s);
            if acts.is_empty() {
                continue;
            }
            assert_eq!(acts.len(), labels.len());
            for (a, l) in acts.iter().zip(&labels) {
                let d = view.successors(&base, l).unwrap();
                for (t, q) in a.dist.iter() {
                    if *t < sl.in_slice {
                        assert_eq!(&d.prob_of(arena.state(*t)), q);
                    }
                }
            }
        }
        prev_names = (0..arena.num_states()).map(|i| arena.state_name(i)).collect();
        prev = Some(sl);
    }
}

#[test]
fn zoo_slices_are_consistent() {
    let walk = make_random_walk(WalkParams::new(Probability::ratio(1, 3), Probability::ratio(1, 2)).unwrap());
    for opt in OptCriterion::BOTH {
        check_slices(&collapse(&walk, opt).unwrap(), opt, 8);
    }
    check_slices(&collapse(&make_three_state(), OptCriterion::Sup).unwrap(), OptCriterion::Sup, 4);
    check_slices(&collapse(&make_ml(), OptCriterion::Sup).unwrap(), OptCriterion::Sup, 8);
    check_slices(&collapse(&make_mr(MrParams::default()), OptCriterion::Sup).unwrap(), OptCriterion::Sup, 8);
}

#[test]
fn collapse_preserves_exact_values_on_corpus() {
    for m in common::corpus(200) {
        for opt in OptCriterion::BOTH {
            let base = exact_oracle(&m, opt).unwrap().value;
            match collapse_finite(&m, opt) {
                Ok(c) => assert_eq!(exact_oracle(&c, opt).unwrap().value, base),
                Err(Error::TrivialZero) => assert!(base.is_zero()),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_slices_are_consistent(seed in any::<u64>()) {
        let m = common::model_from_seed(seed, 8);
        for opt in OptCriterion::BOTH {
            if let Ok(view) = collapse(&m, opt) {
                check_slices(&view, opt, 6);
            }
        }
    }

    #[test]
    fn collapse_preserves_values(seed in any::<u64>()) {
        let m = common::model_from_seed(seed, 8);
        for opt in OptCriterion::BOTH {
            let base = exact_oracle(&m, opt).unwrap().value;
            match collapse_finite(&m, opt) {
                Ok(c) => prop_assert_eq!(exact_oracle(&c, opt).unwrap().value, base),
                Err(Error::TrivialZero) => prop_assert!(base.is_zero()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}
