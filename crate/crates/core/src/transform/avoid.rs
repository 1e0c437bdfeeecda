//! Avoid sets of explicit finite MDPs.

use std::collections::BTreeSet;

use crate::model::{FiniteMdp, OptCriterion};
use crate::sparse::{can_reach, sure_avoid, Sparse};

/// `Avoid^sup`: states with no path to the goal. `Avoid^inf`: states from
/// which some scheduler surely avoids the goal (the greatest fixpoint of
/// "dead end, or some action whose support stays in the set").
pub fn compute_avoid_finite(m: &FiniteMdp, opt: OptCriterion) -> BTreeSet<usize> {
    avoid_flags(m, opt)
        .into_iter()
        .enumerate()
        .filter_map(|(s, a)| a.then_some(s))
        .collect()
}

/// As [`compute_avoid_finite`], as a membership mask indexed by state.
pub fn avoid_flags(m: &FiniteMdp, opt: OptCriterion) -> Vec<bool> {
    let sp = Sparse::from_finite(m);
    let rev = sp.reverse();
    let mut targets = vec![false; sp.n];
    targets[m.goal()] = true;
    match opt {
        OptCriterion::Sup => can_reach(&sp, &rev, &targets).into_iter().map(|r| !r).collect(),
        OptCriterion::Inf => sure_avoid(&sp, &rev, &targets),
    }
}
