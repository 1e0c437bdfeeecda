//! Breadth-first exploration into depth layers.
//!
//! States are stored in discovery order, so every layer `L_d` is a prefix of
//! the state vector. Distributions are cached in compressed rows for every
//! expanded state. Goal and certified-avoid states are never expanded.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{ActionLabel, AvoidStatus, Mdp, OptCriterion, Probability};

/// Default limit on the number of discovered states.
pub const DEFAULT_STATE_CAP: usize = 5_000_000;

/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "MDPDEC_STATE_CAP";

/// The state cap from the environment, or the default.
pub fn state_cap_from_env() -> usize {
    std::env::var(STATE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

/// How a discovered state behaves in the layered evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Goal,
    /// Certified-avoid (in a collapsed view, only `bad^opt`).
    Avoid,
    Regular,
}

pub struct LayeredArena<'v, M: Mdp> {
    view: &'v M,
    opt: OptCriterion,
    cap: usize,
    states: Vec<M::State>,
    ids: HashMap<M::State, u32>,
    kinds: Vec<StateKind>,
    /// `layer_end[d] = |L_d|`.
    layer_end: Vec<usize>,
    state_start: Vec<u32>,
    labels: Vec<ActionLabel>,
    choice_start: Vec<u32>,
    succ: Vec<u32>,
    prob: Vec<f64>,
    exact: Vec<Probability>,
}

/// Explores `view` to depth `n`, with the state cap taken from the
/// environment.
pub fn explore<'v, M: Mdp>(view: &'v M, opt: OptCriterion, n: usize) -> Result<LayeredArena<'v, M>> {
    let mut arena = LayeredArena::new(view, opt, state_cap_from_env());
    arena.extend(n)?;
    Ok(arena)
}

impl<'v, M: Mdp> LayeredArena<'v, M> {
    /// An arena holding only `L_0`. `opt` selects the avoid oracle that
    /// decides which states are left unexpanded.
    pub fn new(view: &'v M, opt: OptCriterion, cap: usize) -> Self {
        let mut arena = LayeredArena {
            view,
            opt,
            cap,
            states: Vec::new(),
            ids: HashMap::new(),
            kinds: Vec::new(),
            layer_end: Vec::new(),
            state_start: vec![0],
            labels: Vec::new(),
            choice_start: vec![0],
            succ: Vec::new(),
            prob: Vec::new(),
            exact: Vec::new(),
        };
        arena.intern(view.initial());
        arena.layer_end.push(1);
        arena
    }

    fn intern(&mut self, s: M::State) -> u32 {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let kind = if self.view.is_goal(&s) {
            StateKind::Goal
        } else if self.view.avoid_status(&s, self.opt) == AvoidStatus::Yes {
            StateKind::Avoid
        } else {
            StateKind::Regular
        };
        let id = self.states.len() as u32;
        self.ids.insert(s.clone(), id);
        self.states.push(s);
        self.kinds.push(kind);
        id
    }

    fn expand_next(&mut self) -> Result<()> {
        let i = self.expanded();
        if self.kinds[i] == StateKind::Regular {
            let s = self.states[i].clone();
            for a in self.view.enabled(&s) {
                let d = self.view.successors(&s, &a)?;
                for (t, p) in d.support {
                    let id = self.intern(t);
                    self.succ.push(id);
                    self.prob.push(p.to_f64());
                    self.exact.push(p);
                }
                self.choice_start.push(self.succ.len() as u32);
                self.labels.push(a);
            }
        }
        self.state_start.push(self.labels.len() as u32);
        Ok(())
    }

    /// Ensures layers `L_0..=L_n` exist, expanding every state of `L_{n-1}`.
    pub fn extend(&mut self, n: usize) -> Result<()> {
        while self.layer_end.len() <= n {
            let prev_end = *self.layer_end.last().expect("L_0 exists");
            while self.expanded() < prev_end {
                self.expand_next()?;
                if self.states.len() > self.cap {
                    return Err(Error::BranchingExplosion { cap: self.cap });
                }
            }
            self.layer_end.push(self.states.len());
        }
        Ok(())
    }

    pub fn view(&self) -> &'v M {
        self.view
    }

    pub fn opt(&self) -> OptCriterion {
        self.opt
    }

    /// Deepest complete layer.
    pub fn depth(&self) -> usize {
        self.layer_end.len() - 1
    }

    /// `|L_d|`.
    pub fn layer_size(&self, d: usize) -> usize {
        self.layer_end[d]
    }

    /// States of `L_d`, in discovery order.
    pub fn layer(&self, d: usize) -> &[M::State] {
        &self.states[..self.layer_end[d]]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Number of states whose distributions are cached.
    pub fn expanded(&self) -> usize {
        self.state_start.len() - 1
    }

    pub fn state(&self, id: usize) -> &M::State {
        &self.states[id]
    }

    pub fn id_of(&self, s: &M::State) -> Option<usize> {
        self.ids.get(s).map(|&i| i as usize)
    }

    pub fn kind(&self, id: usize) -> StateKind {
        self.kinds[id]
    }

    /// First discovered goal state, if any.
    pub fn goal_id(&self) -> Option<usize> {
        self.kinds.iter().position(|k| *k == StateKind::Goal)
    }

    /// Choice range of an expanded state.
    #[inline]
    pub fn choices(&self, id: usize) -> std::ops::Range<usize> {
        self.state_start[id] as usize..self.state_start[id + 1] as usize
    }

    pub fn label(&self, c: usize) -> &ActionLabel {
        &self.labels[c]
    }

    #[inline]
    pub fn entries(&self, c: usize) -> std::ops::Range<usize> {
        self.choice_start[c] as usize..self.choice_start[c + 1] as usize
    }

    #[inline]
    pub fn succ(&self, e: usize) -> usize {
        self.succ[e] as usize
    }

    #[inline]
    pub fn prob(&self, e: usize) -> f64 {
        self.prob[e]
    }

    pub fn exact_prob(&self, e: usize) -> &Probability {
        &self.exact[e]
    }

    pub fn state_name(&self, id: usize) -> String {
        self.view.state_name(&self.states[id])
    }
}
