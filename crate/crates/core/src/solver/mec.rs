//! Maximal end components and the finite sup-decisiveness check.

use serde::Serialize;

use crate::model::{FiniteMdp, OptCriterion};
use crate::sparse::{mecs, Sparse};
use crate::transform::avoid_flags;

/// A maximal end component: member states with, for each, the indices of
/// the actions that stay inside. States without actions form trivial
/// components with empty action lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mec {
    pub states: Vec<usize>,
    pub actions: Vec<Vec<usize>>,
}

impl Mec {
    pub fn is_trivial(&self) -> bool {
        self.actions.iter().all(Vec::is_empty)
    }

    /// `{a, b}` using state names.
    pub fn describe(&self, m: &FiniteMdp) -> String {
        let names: Vec<&str> = self.states.iter().map(|&s| m.name(s)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

fn to_mecs(sp: &Sparse, raw: Vec<crate::sparse::RawMec>) -> Vec<Mec> {
    raw.into_iter()
        .map(|r| {
            let states: Vec<usize> = r.states.iter().map(|&s| s as usize).collect();
            let actions = states
                .iter()
                .map(|&s| {
                    let first = sp.choices(s).start;
                    r.choices
                        .iter()
                        .filter(|&&c| sp.owner[c as usize] as usize == s)
                        .map(|&c| c as usize - first)
                        .collect()
                })
                .collect();
            Mec { states, actions }
        })
        .collect()
}

/// All maximal end components, by iterated SCC refinement. Absorbing states
/// are reported as trivial components.
pub fn mec_decomposition(m: &FiniteMdp) -> Vec<Mec> {
    let sp = Sparse::from_finite(m);
    let n = sp.n;
    let mut out = to_mecs(&sp, mecs(&sp, &vec![true; n], &vec![false; n]));
    for s in 0..n {
        if sp.choices(s).is_empty() {
            out.push(Mec {
                states: vec![s],
                actions: vec![Vec::new()],
            });
        }
    }
    out.sort_by_key(|c| c.states[0]);
    out
}

/// Outcome of [`check_sup_decisive_finite`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecisivenessReport {
    pub decisive: bool,
    pub diagnosis: String,
}

/// Checks that every end component is terminal.
///
/// The check runs on the part reachable from the initial state, with the
/// goal and the sup-avoid states made absorbing: once play enters them the
/// decisiveness event has happened, so end components beyond them are
/// irrelevant. Each maximal end component must then be closed under all
/// its actions and contain no proper end component.
pub fn check_sup_decisive_finite(m: &FiniteMdp) -> DecisivenessReport {
    let sp = Sparse::from_finite(m);
    let n = sp.n;
    let avoid = avoid_flags(m, OptCriterion::Sup);
    let stop: Vec<bool> = (0..n).map(|s| avoid[s] || s == m.goal()).collect();
    let mut live = vec![false; n];
    let mut stack = vec![m.initial_state()];
    live[m.initial_state()] = true;
    while let Some(s) = stack.pop() {
        if stop[s] {
            continue;
        }
        for c in sp.choices(s) {
            for &t in sp.support(c) {
                if !live[t as usize] {
                    live[t as usize] = true;
                    stack.push(t as usize);
                }
            }
        }
    }
    let in_set: Vec<bool> = (0..n).map(|s| live[s] && !stop[s]).collect();
    let components = to_mecs(&sp, mecs(&sp, &in_set, &stop));
    for mec in &components {
        for (k, &s) in mec.states.iter().enumerate() {
            let first = sp.choices(s).start;
            for c in sp.choices(s) {
                if !mec.actions[k].contains(&(c - first)) {
                    return DecisivenessReport {
                        decisive: false,
                        diagnosis: format!(
                            "not sup-decisive: MEC {} exits via {}",
                            mec.describe(m),
                            m.actions(s)[c - first].name
                        ),
                    };
                }
            }
        }
        for &x in &mec.states {
            let rest: Vec<bool> = (0..n).map(|s| s != x && mec.states.contains(&s)).collect();
            if !mecs(&sp, &rest, &stop).is_empty() {
                return DecisivenessReport {
                    decisive: false,
                    diagnosis: format!(
                        "not sup-decisive: MEC {} has a proper end component avoiding {}",
                        mec.describe(m),
                        m.name(x)
                    ),
                };
            }
        }
    }
    DecisivenessReport {
        decisive: true,
        diagnosis: "sup-decisive: every end component is terminal".into(),
    }
}
