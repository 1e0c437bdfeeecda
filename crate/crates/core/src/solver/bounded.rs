//! Bellman backups and step-bounded backward induction over layered arenas.

use crate::error::{Error, Result};
use crate::model::{FiniteMdp, Mdp, OptCriterion};
use crate::transform::{LayeredArena, StateKind};

/// A value per state of a fixed finite state set.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector {
    pub values: Vec<f64>,
    pub iteration: u64,
}

impl ValueVector {
    pub fn new(values: Vec<f64>) -> Self {
        ValueVector { values, iteration: 0 }
    }

    pub fn zeros(n: usize) -> Self {
        ValueVector::new(vec![0.0; n])
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &ValueVector) -> bool {
        self.values.len() == other.values.len() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Terminal valuation of a step-bounded evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundedObjective {
    /// Reach the goal within `n` steps (lower bound).
    ReachWithin,
    /// Reach the goal within `n` steps, or survive `n` steps without
    /// hitting an avoid state (upper bound).
    ReachOrSurvive,
    /// Survive `n` steps without hitting the goal or an avoid state.
    Hope,
}

impl BoundedObjective {
    fn goal_value(self) -> f64 {
        match self {
            BoundedObjective::Hope => 0.0,
            _ => 1.0,
        }
    }

    fn survivor_value(self) -> f64 {
        match self {
            BoundedObjective::ReachWithin => 0.0,
            _ => 1.0,
        }
    }
}

#[inline]
fn identity(opt: OptCriterion) -> f64 {
    match opt {
        OptCriterion::Inf => f64::INFINITY,
        OptCriterion::Sup => f64::NEG_INFINITY,
    }
}

/// One application of the Bellman operator on a finite MDP: the goal maps
/// to 1, declared bad states and dead ends to 0, every other state to the
/// optimum over its actions of the expected successor value.
pub fn bellman_backup(m: &FiniteMdp, v: &ValueVector, opt: OptCriterion) -> Result<ValueVector> {
    let n = m.num_states();
    let mut out = vec![0.0; n];
    for (s, slot) in out.iter_mut().enumerate() {
        if s == m.goal() {
            *slot = 1.0;
            continue;
        }
        if m.bad_states().binary_search(&s).is_ok() || m.actions(s).is_empty() {
            continue;
        }
        let mut best = identity(opt);
        for a in m.actions(s) {
            let mut acc = 0.0;
            for (t, p) in a.dist.iter() {
                let x = v.values.get(*t).ok_or(Error::MissingValue(*t))?;
                acc += p.to_f64() * x;
            }
            best = opt.pick(best, acc);
        }
        *slot = best;
    }
    Ok(ValueVector {
        values: out,
        iteration: v.iteration + 1,
    })
}

/// Outcome of a step-bounded evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedOutcome {
    pub value: f64,
    /// `decisions[d][s]`: optimal action index at state `s` of `L_d` when
    /// `n - d` steps remain (`u32::MAX` where no action is enabled).
    pub decisions: Option<Vec<Vec<u32>>>,
}

/// Layered backward induction to depth `n` on an arena whose layers are
/// complete up to `n`. Returns the optimal probability of the objective from
/// the initial state.
pub fn bounded_reach<M: Mdp>(
    arena: &LayeredArena<'_, M>,
    n: usize,
    opt: OptCriterion,
    objective: BoundedObjective,
) -> Result<f64> {
    Ok(bounded_reach_with(arena, n, opt, objective, false)?.value)
}

/// As [`bounded_reach`], optionally recording the decision table.
pub fn bounded_reach_with<M: Mdp>(
    arena: &LayeredArena<'_, M>,
    n: usize,
    opt: OptCriterion,
    objective: BoundedObjective,
    record: bool,
) -> Result<BoundedOutcome> {
    if arena.depth() < n {
        return Err(Error::InvalidParameter(format!(
            "arena explored to depth {} but depth {n} requested",
            arena.depth()
        )));
    }
    let goal = objective.goal_value();
    let mut w: Vec<f64> = (0..arena.layer_size(n))
        .map(|i| match arena.kind(i) {
            StateKind::Goal => goal,
            StateKind::Avoid => 0.0,
            StateKind::Regular => objective.survivor_value(),
        })
        .collect();
    let mut decisions = record.then(|| vec![Vec::new(); n]);
    for d in (0..n).rev() {
        let size = arena.layer_size(d);
        let mut next = vec![0.0; size];
        let mut chosen = if record { vec![u32::MAX; size] } else { Vec::new() };
        for (s, slot) in next.iter_mut().enumerate() {
            match arena.kind(s) {
                StateKind::Goal => *slot = goal,
                StateKind::Avoid => {}
                StateKind::Regular => {
                    let choices = arena.choices(s);
                    if choices.is_empty() {
                        continue;
                    }
                    let first = choices.start;
                    let mut best = identity(opt);
                    let mut arg = u32::MAX;
                    for c in choices {
                        let mut acc = 0.0;
                        for e in arena.entries(c) {
                            acc += arena.prob(e) * w[arena.succ(e)];
                        }
                        if arg == u32::MAX || opt.improves(&acc, &best) {
                            best = acc;
                            arg = (c - first) as u32;
                        }
                    }
                    *slot = best.clamp(0.0, 1.0);
                    if record {
                        chosen[s] = arg;
                    }
                }
            }
        }
        if let Some(table) = decisions.as_mut() {
            table[d] = chosen;
        }
        w = next;
    }
    Ok(BoundedOutcome { value: w[0], decisions })
}
