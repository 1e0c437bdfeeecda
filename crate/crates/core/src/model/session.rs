//! Interned, id-based access to a model.
//!
//! States are interned on first discovery (the initial state or a state
//! appearing in a returned distribution). Ids are assigned in discovery order
//! and the table is append-only, so a fixed query order gives fixed ids.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use super::{ActionLabel, AvoidStatus, Distribution, Mdp, OptCriterion};
use crate::error::{Error, Result};

/// Interned state id. Two refs from the same session are equal iff the
/// underlying states are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateRef(pub u32);

impl StateRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

struct Table<S> {
    ids: HashMap<S, u32>,
    states: Vec<S>,
}

/// A model together with its interning table.
pub struct Session<'m, M: Mdp> {
    model: &'m M,
    table: RwLock<Table<M::State>>,
}

impl<'m, M: Mdp> Session<'m, M> {
    pub fn new(model: &'m M) -> Self {
        Session {
            model,
            table: RwLock::new(Table {
                ids: HashMap::new(),
                states: Vec::new(),
            }),
        }
    }

    pub fn model(&self) -> &'m M {
        self.model
    }

    fn intern(&self, s: M::State) -> StateRef {
        if let Some(&id) = self.table.read().expect("intern table poisoned").ids.get(&s) {
            return StateRef(id);
        }
        let mut table = self.table.write().expect("intern table poisoned");
        if let Some(&id) = table.ids.get(&s) {
            return StateRef(id);
        }
        let id = table.states.len() as u32;
        table.states.push(s.clone());
        table.ids.insert(s, id);
        StateRef(id)
    }

    /// Looks up the state behind a reference.
    pub fn state(&self, r: StateRef) -> Result<M::State> {
        self.table
            .read()
            .expect("intern table poisoned")
            .states
            .get(r.index())
            .cloned()
            .ok_or(Error::UnknownState(r.0))
    }

    /// Number of states discovered so far.
    pub fn discovered(&self) -> usize {
        self.table.read().expect("intern table poisoned").states.len()
    }

    pub fn initial(&self) -> StateRef {
        self.intern(self.model.initial())
    }

    pub fn enabled(&self, r: StateRef) -> Result<Vec<ActionLabel>> {
        let s = self.state(r)?;
        Ok(self.model.enabled(&s))
    }

    pub fn successors(&self, r: StateRef, a: &ActionLabel) -> Result<Distribution<StateRef>> {
        let s = self.state(r)?;
        let d = self.model.successors(&s, a)?;
        Ok(d.map(|t| self.intern(t)))
    }

    pub fn is_goal(&self, r: StateRef) -> Result<bool> {
        Ok(self.model.is_goal(&self.state(r)?))
    }

    pub fn avoid_status(&self, r: StateRef, opt: OptCriterion) -> Result<AvoidStatus> {
        Ok(self.model.avoid_status(&self.state(r)?, opt))
    }

    pub fn name(&self, r: StateRef) -> Result<String> {
        Ok(self.model.state_name(&self.state(r)?))
    }
}
