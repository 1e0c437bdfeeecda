//! The collapsed model: every certified-avoid state is merged into a single
//! fresh absorbing state `bad^opt`.
//!
//! The view is lazy. Each successor query consults the base model's avoid
//! oracle and remaps. States whose status is `Unknown` are kept as ordinary
//! states, and the view remembers that it met one so that callers can flag
//! their upper bounds as not certified.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::model::{ActionLabel, AvoidStatus, Distribution, FiniteMdp, Mdp, ModelFlags, OptCriterion};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Collapsed<S> {
    State(S),
    Bad,
}

#[derive(Debug)]
pub struct CollapsedView<'a, M: Mdp> {
    base: &'a M,
    opt: OptCriterion,
    unknown_seen: AtomicBool,
}

/// Builds the collapsed view. Fails with `TrivialZero` when the initial
/// state is itself certified-avoid.
pub fn collapse<M: Mdp>(model: &M, opt: OptCriterion) -> Result<CollapsedView<'_, M>> {
    let view = CollapsedView {
        base: model,
        opt,
        unknown_seen: AtomicBool::new(false),
    };
    let init = model.initial();
    match model.avoid_status(&init, opt) {
        AvoidStatus::Yes if !model.is_goal(&init) => return Err(Error::TrivialZero),
        AvoidStatus::Unknown => view.unknown_seen.store(true, Ordering::Relaxed),
        _ => {}
    }
    Ok(view)
}

impl<'a, M: Mdp> CollapsedView<'a, M> {
    pub fn base(&self) -> &'a M {
        self.base
    }

    pub fn opt(&self) -> OptCriterion {
        self.opt
    }

    /// Whether some queried state had an `Unknown` avoid status.
    pub fn saw_unknown(&self) -> bool {
        self.unknown_seen.load(Ordering::Relaxed)
    }

    fn remap(&self, s: M::State) -> Collapsed<M::State> {
        if self.base.is_goal(&s) {
            return Collapsed::State(s);
        }
        match self.base.avoid_status(&s, self.opt) {
            AvoidStatus::Yes => Collapsed::Bad,
            AvoidStatus::No => Collapsed::State(s),
            AvoidStatus::Unknown => {
                self.unknown_seen.store(true, Ordering::Relaxed);
                Collapsed::State(s)
            }
        }
    }
}

impl<M: Mdp> Mdp for CollapsedView<'_, M> {
    type State = Collapsed<M::State>;

    fn initial(&self) -> Self::State {
        Collapsed::State(self.base.initial())
    }

    fn enabled(&self, s: &Self::State) -> Vec<ActionLabel> {
        match s {
            Collapsed::State(s) => self.base.enabled(s),
            Collapsed::Bad => Vec::new(),
        }
    }

    fn successors(&self, s: &Self::State, a: &ActionLabel) -> Result<Distribution<Self::State>> {
        match s {
            Collapsed::State(s) => {
                let d = self.base.successors(s, a)?;
                let merge = d.len() > 1;
                let d = d.map(|t| self.remap(t));
                Ok(if merge { d.merged() } else { d })
            }
            Collapsed::Bad => Err(Error::DisabledAction {
                state: self.state_name(s),
                action: a.name.clone(),
            }),
        }
    }

    fn is_goal(&self, s: &Self::State) -> bool {
        matches!(s, Collapsed::State(s) if self.base.is_goal(s))
    }

    fn avoid_status(&self, s: &Self::State, opt: OptCriterion) -> AvoidStatus {
        match s {
            Collapsed::Bad => AvoidStatus::Yes,
            Collapsed::State(s) => self.base.avoid_status(s, opt),
        }
    }

    fn flags(&self) -> ModelFlags {
        self.base.flags()
    }

    fn state_name(&self, s: &Self::State) -> String {
        match s {
            Collapsed::State(s) => self.base.state_name(s),
            Collapsed::Bad => format!("bad^{}", self.opt),
        }
    }
}

/// Explicit collapsed copy of a finite MDP. Non-avoid states keep their
/// relative order; `bad^opt` is appended last.
pub fn collapse_finite(m: &FiniteMdp, opt: OptCriterion) -> Result<FiniteMdp> {
    let avoid = super::avoid_flags(m, opt);
    if avoid[m.initial_state()] {
        return Err(Error::TrivialZero);
    }
    let mut b = FiniteMdp::builder();
    let mut map = vec![usize::MAX; m.num_states()];
    for s in 0..m.num_states() {
        if !avoid[s] {
            map[s] = b.state(m.name(s));
        }
    }
    let mut bad_name = format!("bad^{opt}");
    while m.state_index(&bad_name).is_some() {
        bad_name.push('\'');
    }
    let bad = b.state(bad_name);
    b.mark_bad(bad);
    for s in 0..m.num_states() {
        if avoid[s] {
            continue;
        }
        for a in m.actions(s) {
            let d = a
                .dist
                .clone()
                .map(|t| if avoid[t] { bad } else { map[t] })
                .merged();
            b.action(map[s], a.name.clone(), d.support);
        }
    }
    b.build(map[m.initial_state()], map[m.goal()])
}
