//! Sampling paths of the Markov chain induced by a pure positional scheduler.

use std::collections::HashMap;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ActionLabel, AvoidStatus, Mdp, OptCriterion};
use crate::error::{Error, Result};

/// A pure positional scheduler: an explicit per-state choice, with an
/// optional fallback action name used wherever the table has no entry
/// (e.g. "always alpha" on an infinite model).
#[derive(Debug, Clone)]
pub struct PurePositionalScheduler<S> {
    choice: HashMap<S, String>,
    fallback: Option<String>,
}

impl<S: Eq + Hash> PartialEq for PurePositionalScheduler<S> {
    fn eq(&self, other: &Self) -> bool {
        self.choice == other.choice && self.fallback == other.fallback
    }
}

impl<S: Eq + Hash> Default for PurePositionalScheduler<S> {
    fn default() -> Self {
        PurePositionalScheduler {
            choice: HashMap::new(),
            fallback: None,
        }
    }
}

impl<S: Eq + Hash> PurePositionalScheduler<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Picks the action with this name at every state.
    pub fn always(action: impl Into<String>) -> Self {
        PurePositionalScheduler {
            choice: HashMap::new(),
            fallback: Some(action.into()),
        }
    }

    pub fn set(&mut self, s: S, action: impl Into<String>) -> &mut Self {
        self.choice.insert(s, action.into());
        self
    }

    pub fn with(mut self, s: S, action: impl Into<String>) -> Self {
        self.set(s, action);
        self
    }

    /// The chosen action among `enabled`, if the scheduler is defined there.
    pub fn choose(&self, s: &S, enabled: &[ActionLabel]) -> Option<ActionLabel> {
        let wanted = self.choice.get(s).or(self.fallback.as_ref())?;
        enabled.iter().find(|a| &a.name == wanted).cloned()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&S, &String)> {
        self.choice.iter()
    }
}

/// Why a sampled path stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TerminalReason {
    HitGoal,
    HitAvoid,
    HorizonExhausted,
}

/// A finite sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath<S> {
    pub states: Vec<S>,
    pub terminal_reason: TerminalReason,
}

enum Node {
    Terminal(TerminalReason),
    Step { cumulative: Vec<f64>, next: Vec<u32> },
}

/// Memoized view of the chain induced by a scheduler, for fast repeated
/// sampling. Each discovered state is resolved once: either terminal, or the
/// cumulative distribution of its chosen action.
pub struct SimulationTable<'a, M: Mdp> {
    model: &'a M,
    sched: &'a PurePositionalScheduler<M::State>,
    opt: OptCriterion,
    ids: HashMap<M::State, u32>,
    states: Vec<M::State>,
    nodes: Vec<Option<Node>>,
}

impl<'a, M: Mdp> SimulationTable<'a, M> {
    /// `opt` selects which avoid oracle counts as `HitAvoid`.
    pub fn new(model: &'a M, sched: &'a PurePositionalScheduler<M::State>, opt: OptCriterion) -> Self {
        let mut t = SimulationTable {
            model,
            sched,
            opt,
            ids: HashMap::new(),
            states: Vec::new(),
            nodes: Vec::new(),
        };
        t.intern(model.initial());
        t
    }

    fn intern(&mut self, s: M::State) -> u32 {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.states.len() as u32;
        self.ids.insert(s.clone(), id);
        self.states.push(s);
        self.nodes.push(None);
        id
    }

    fn resolve(&mut self, id: u32) -> Result<()> {
        if self.nodes[id as usize].is_some() {
            return Ok(());
        }
        let s = self.states[id as usize].clone();
        let node = if self.model.is_goal(&s) {
            Node::Terminal(TerminalReason::HitGoal)
        } else if self.model.avoid_status(&s, self.opt) == AvoidStatus::Yes {
            Node::Terminal(TerminalReason::HitAvoid)
        } else {
            let enabled = self.model.enabled(&s);
            if enabled.is_empty() {
                // a non-goal dead end can never reach the goal
                Node::Terminal(TerminalReason::HitAvoid)
            } else {
                let a = self
                    .sched
                    .choose(&s, &enabled)
                    .ok_or_else(|| Error::SchedulerGap(self.model.state_name(&s)))?;
                let dist = self.model.successors(&s, &a)?;
                let mut acc = 0.0;
                let mut cumulative = Vec::with_capacity(dist.len());
                let mut next = Vec::with_capacity(dist.len());
                for (t, p) in dist.support {
                    acc += p.to_f64();
                    cumulative.push(acc);
                    next.push(self.intern(t));
                }
                Node::Step { cumulative, next }
            }
        };
        self.nodes[id as usize] = Some(node);
        Ok(())
    }

    /// Runs one path of at most `horizon` steps, optionally recording the
    /// visited state ids.
    pub fn run<R: Rng>(&mut self, rng: &mut R, horizon: u64, mut record: Option<&mut Vec<u32>>) -> Result<TerminalReason> {
        let mut cur = 0u32;
        let mut steps = 0u64;
        loop {
            if let Some(path) = record.as_deref_mut() {
                path.push(cur);
            }
            self.resolve(cur)?;
            match self.nodes[cur as usize].as_ref().expect("resolved") {
                Node::Terminal(reason) => return Ok(*reason),
                Node::Step { cumulative, next } => {
                    if steps == horizon {
                        return Ok(TerminalReason::HorizonExhausted);
                    }
                    let u: f64 = rng.gen::<f64>() * cumulative[cumulative.len() - 1];
                    let k = cumulative.iter().position(|&c| u < c).unwrap_or(next.len() - 1);
                    cur = next[k];
                    steps += 1;
                }
            }
        }
    }

    pub fn state(&self, id: u32) -> &M::State {
        &self.states[id as usize]
    }
}

/// Samples one path under `sched`, stopping at the goal, at a certified
/// sup-avoid state, or after `horizon` steps. Deterministic given `seed`.
pub fn simulate<M: Mdp>(
    model: &M,
    sched: &PurePositionalScheduler<M::State>,
    horizon: u64,
    seed: u64,
) -> Result<SamplePath<M::State>> {
    simulate_with(model, sched, horizon, seed, OptCriterion::Sup)
}

/// As [`simulate`], with the avoid oracle of `opt` deciding `HitAvoid`.
pub fn simulate_with<M: Mdp>(
    model: &M,
    sched: &PurePositionalScheduler<M::State>,
    horizon: u64,
    seed: u64,
    opt: OptCriterion,
) -> Result<SamplePath<M::State>> {
    let mut table = SimulationTable::new(model, sched, opt);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids = Vec::new();
    let reason = table.run(&mut rng, horizon, Some(&mut ids))?;
    Ok(SamplePath {
        states: ids.into_iter().map(|i| table.state(i).clone()).collect(),
        terminal_reason: reason,
    })
}
