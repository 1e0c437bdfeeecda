//! The sliced model: the states reachable within `n` steps plus a fresh sink
//! `s_bot` receiving all mass that leaves the slice.

use std::collections::HashSet;

use crate::error::Result;
use crate::model::{FiniteMdp, Mdp, Probability};

use super::arena::{LayeredArena, StateKind};

/// A transition whose mass was partly or fully redirected to `s_bot`.
#[derive(Debug, Clone, PartialEq)]
pub struct Redirect {
    pub state: usize,
    pub action: String,
    pub mass: Probability,
}

#[derive(Debug, Clone)]
pub struct SlicedMdp {
    pub mdp: FiniteMdp,
    pub depth: usize,
    /// Slice states `0..in_slice` coincide with arena ids.
    pub in_slice: usize,
    pub s_bot: usize,
    /// Whether the goal was not discovered and a placeholder was added.
    pub goal_placeholder: bool,
    pub redirects: Vec<Redirect>,
}

impl SlicedMdp {
    /// Membership mask of the `{goal, s_bot}` target set.
    pub fn goal_or_bot(&self) -> Vec<bool> {
        let mut t = vec![false; self.mdp.num_states()];
        t[self.mdp.goal()] = true;
        t[self.s_bot] = true;
        t
    }

    /// Membership mask of the `{goal}` target set.
    pub fn goal_only(&self) -> Vec<bool> {
        let mut t = vec![false; self.mdp.num_states()];
        t[self.mdp.goal()] = true;
        t
    }
}

fn unique(taken: &mut HashSet<String>, name: String) -> String {
    let mut candidate = name.clone();
    let mut k = 1;
    while !taken.insert(candidate.clone()) {
        candidate = format!("{name}#{k}");
        k += 1;
    }
    candidate
}

/// Slices the arena at depth `n`, exploring one more layer if needed so that
/// the distributions of depth-`n` states are known.
///
/// In-slice successors keep their probability; the rest of each row goes to
/// `s_bot`, so an action that leaves the slice entirely becomes a Dirac on
/// `s_bot`. The same rule applies at every depth, including 0.
pub fn slice<M: Mdp>(arena: &mut LayeredArena<'_, M>, n: usize) -> Result<SlicedMdp> {
    arena.extend(n + 1)?;
    let size = arena.layer_size(n);
    let mut taken = HashSet::with_capacity(size + 2);
    let mut b = FiniteMdp::builder();
    for i in 0..size {
        let name = unique(&mut taken, arena.state_name(i));
        let id = b.state(name);
        debug_assert_eq!(id, i);
        if arena.kind(i) == StateKind::Avoid {
            b.mark_bad(id);
        }
    }
    let s_bot = b.state(unique(&mut taken, "s_bot".to_string()));
    let (goal, goal_placeholder) = match arena.goal_id().filter(|&g| g < size) {
        Some(g) => (g, false),
        None => (b.state(unique(&mut taken, "goal".to_string())), true),
    };

    let mut redirects = Vec::new();
    for i in 0..size {
        for c in arena.choices(i) {
            let mut row = Vec::with_capacity(arena.entries(c).len());
            let mut out: Option<Probability> = None;
            for e in arena.entries(c) {
                let t = arena.succ(e);
                let p = arena.exact_prob(e);
                if t < size {
                    row.push((t, p.clone()));
                } else {
                    out = Some(match out {
                        Some(acc) => acc.add(p),
                        None => p.clone(),
                    });
                }
            }
            let name = arena.label(c).name.clone();
            if let Some(mass) = out {
                if row.is_empty() {
                    row.push((s_bot, Probability::one()));
                } else {
                    row.push((s_bot, mass.clone()));
                }
                redirects.push(Redirect {
                    state: i,
                    action: name.clone(),
                    mass,
                });
            }
            b.action(i, name, row);
        }
    }
    let mdp = b.build(0, goal)?;
    Ok(SlicedMdp {
        mdp,
        depth: n,
        in_slice: size,
        s_bot,
        goal_placeholder,
        redirects,
    })
}
