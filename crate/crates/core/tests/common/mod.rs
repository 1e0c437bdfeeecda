//! Shared test fixtures: a seeded random corpus of small exact finite MDPs
//! and brute-force oracles that do not go through the library solvers.

#![allow(dead_code)]

use mdpdec::model::{FiniteMdp, Probability};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed of the shared corpus.
pub const CORPUS_SEED: u64 = 0x5eed_0fc0_2b05;

/// A random exact model with `2..=max_states` states and up to
/// `max_actions` actions per state. State 0 is initial; the last state is
/// the absorbing goal. With three or more states the one before it is
/// sometimes an absorbing `bad` state. Other states are occasionally dead
/// ends.
pub fn random_model(rng: &mut ChaCha8Rng, max_states: usize, max_actions: usize) -> FiniteMdp {
    let n = rng.gen_range(2..=max_states);
    let goal = n - 1;
    let with_bad = n >= 3 && rng.gen_bool(0.5);
    let mut b = FiniteMdp::builder();
    for s in 0..n {
        let name = if s == goal {
            "goal".to_string()
        } else if with_bad && s == n - 2 {
            "bad".to_string()
        } else {
            format!("s{s}")
        };
        b.state(name);
    }
    if with_bad {
        b.mark_bad(n - 2);
    }
    let targets: Vec<usize> = (0..n).collect();
    for s in 0..n {
        if s == goal || (with_bad && s == n - 2) {
            continue;
        }
        let k = if rng.gen_bool(0.08) { 0 } else { rng.gen_range(1..=max_actions) };
        for a in 0..k {
            let width = rng.gen_range(1..=3.min(n));
            let support: Vec<usize> = targets.choose_multiple(rng, width).copied().collect();
            let weights: Vec<i64> = support.iter().map(|_| rng.gen_range(1..=4)).collect();
            let total: i64 = weights.iter().sum();
            let dist = support
                .iter()
                .zip(&weights)
                .map(|(&t, &w)| (t, Probability::ratio(w, total)))
                .collect();
            b.action(s, format!("a{a}"), dist);
        }
    }
    b.build(0, goal).expect("generated model is valid")
}

/// The shared corpus of `count` models with at most 8 states and 3 actions.
pub fn corpus(count: usize) -> Vec<FiniteMdp> {
    corpus_with(CORPUS_SEED, count, 8, 3)
}

pub fn corpus_with(seed: u64, count: usize, max_states: usize, max_actions: usize) -> Vec<FiniteMdp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_model(&mut rng, max_states, max_actions)).collect()
}

pub fn model_from_seed(seed: u64, max_states: usize) -> FiniteMdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_model(&mut rng, max_states, 3)
}

fn exact(p: &Probability) -> BigRational {
    p.as_exact().expect("corpus models are exact").clone()
}

/// States from which the goal is reachable in the underlying graph.
pub fn graph_reaches_goal(m: &FiniteMdp) -> Vec<bool> {
    let n = m.num_states();
    let mut reach = vec![false; n];
    reach[m.goal()] = true;
    loop {
        let mut changed = false;
        for s in 0..n {
            if !reach[s] && m.actions(s).iter().any(|a| a.dist.states().any(|&t| reach[t])) {
                reach[s] = true;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// Every pure positional scheduler as a choice vector (`None` at states
/// without actions), first state most significant.
pub fn all_schedulers(m: &FiniteMdp) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for s in 0..m.num_states() {
        let k = m.actions(s).len();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                let opts: Vec<Option<usize>> = if k == 0 { vec![None] } else { (0..k).map(Some).collect() };
                opts.into_iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}

/// Whether the chain induced by `choice` reaches `targets` almost surely
/// from the initial state: in a finite chain this holds iff every state
/// reachable from the initial state without passing a target can still
/// reach a target.
pub fn almost_surely_reaches(m: &FiniteMdp, choice: &[Option<usize>], targets: &[bool]) -> bool {
    let n = m.num_states();
    let succ = |s: usize| -> Vec<usize> {
        match choice[s] {
            Some(a) if !targets[s] => m.actions(s)[a].dist.states().copied().collect(),
            _ => Vec::new(),
        }
    };
    let mut seen = vec![false; n];
    let mut stack = vec![m.initial_state()];
    seen[m.initial_state()] = true;
    while let Some(s) = stack.pop() {
        for t in succ(s) {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    let mut good = targets.to_vec();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !good[s] && succ(s).iter().any(|&t| good[t]) {
                good[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).all(|s| !seen[s] || good[s])
}

/// Definition-level sup-decisiveness: every pure positional scheduler
/// reaches the goal or a state that cannot reach it, almost surely.
pub fn brute_force_sup_decisive(m: &FiniteMdp) -> bool {
    let reach = graph_reaches_goal(m);
    let targets: Vec<bool> = (0..m.num_states()).map(|s| s == m.goal() || !reach[s]).collect();
    all_schedulers(m).iter().all(|c| almost_surely_reaches(m, c, &targets))
}

/// As [`brute_force_sup_decisive`], deciding each scheduler by an exact
/// solve of the induced chain instead of the graph criterion.
pub fn brute_force_sup_decisive_exact(m: &FiniteMdp) -> bool {
    let reach = graph_reaches_goal(m);
    let targets: Vec<bool> = (0..m.num_states()).map(|s| s == m.goal() || !reach[s]).collect();
    let init = m.initial_state();
    all_schedulers(m).iter().all(|c| {
        let v = mdpdec::solver::exact_chain_value(m, &targets, c, Some(init)).expect("exact corpus");
        v[init].is_one()
    })
}

/// States from which some scheduler avoids the goal surely: the greatest
/// set of non-goal states where each state is a dead end or has an action
/// staying inside the set.
pub fn graph_sure_avoid(m: &FiniteMdp) -> Vec<bool> {
    let n = m.num_states();
    let mut set: Vec<bool> = (0..n).map(|s| s != m.goal()).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if set[s]
                && !m.actions(s).is_empty()
                && !m.actions(s).iter().any(|a| a.dist.states().all(|&t| set[t]))
            {
                set[s] = false;
                changed = true;
            }
        }
        if !changed {
            return set;
        }
    }
}

/// Definition-level inf-decisiveness over pure positional schedulers.
pub fn brute_force_inf_decisive(m: &FiniteMdp) -> bool {
    let avoid = graph_sure_avoid(m);
    let targets: Vec<bool> = (0..m.num_states()).map(|s| s == m.goal() || avoid[s]).collect();
    all_schedulers(m).iter().all(|c| almost_surely_reaches(m, c, &targets))
}

/// Exact step-bounded probabilities under a pure positional scheduler.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedProbs {
    /// Goal reached within `n` steps.
    pub reach: BigRational,
    /// No `avoid` state visited within `n` steps (goal paths included).
    pub never_avoid: BigRational,
    /// Neither goal nor `avoid` visited within `n` steps, path still alive.
    pub hope: BigRational,
}

/// Forward propagation of the state distribution for `n` steps. Goal and
/// `avoid` states are absorbing; mass at a dead end is dropped.
pub fn bounded_probs(m: &FiniteMdp, choice: &[Option<usize>], avoid: &[bool], n: usize) -> BoundedProbs {
    let size = m.num_states();
    let goal = m.goal();
    let stop = |s: usize| s == goal || avoid[s];
    let mut mu = vec![BigRational::zero(); size];
    mu[m.initial_state()] = BigRational::one();
    for _ in 0..n {
        let mut next = vec![BigRational::zero(); size];
        for s in 0..size {
            if mu[s].is_zero() {
                continue;
            }
            if stop(s) {
                next[s] += &mu[s];
                continue;
            }
            if let Some(a) = choice[s] {
                for (t, p) in m.actions(s)[a].dist.iter() {
                    next[*t] += &mu[s] * exact(p);
                }
            }
        }
        mu = next;
    }
    let mut reach = BigRational::zero();
    let mut never_avoid = BigRational::zero();
    let mut hope = BigRational::zero();
    for s in 0..size {
        if s == goal {
            reach += &mu[s];
            never_avoid += &mu[s];
        } else if !avoid[s] {
            never_avoid += &mu[s];
            hope += &mu[s];
        }
    }
    BoundedProbs { reach, never_avoid, hope }
}

pub fn to_f64(r: &BigRational) -> f64 {
    mdpdec::model::ratio_to_f64(r)
}

pub fn big(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Prints a PASS/FAIL line and returns the verdict.
pub fn report(id: &str, ok: bool, detail: &str) -> bool {
    println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}
