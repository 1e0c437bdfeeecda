//! Numerics on finite arenas: Bellman backups and step-bounded induction,
//! unbounded reachability by interval iteration, exact rational values, and
//! end-component analysis.

mod bounded;
mod exact;
mod mec;
mod reach;

pub use bounded::{bellman_backup, bounded_reach, bounded_reach_with, BoundedObjective, BoundedOutcome, ValueVector};
pub use exact::{
    exact_certified, exact_chain_value, exact_oracle, exact_oracle_targets, rational, ExactValue,
    DEFAULT_ENUMERATION_CAP,
};
pub use mec::{check_sup_decisive_finite, mec_decomposition, DecisivenessReport, Mec};
pub use reach::{
    qualitative_states, solve_reach_finite, solve_reach_targets, Bracket, ReachOptions, ReachSolution,
    DEFAULT_BACKUP_BUDGET,
};

use crate::model::FiniteMdp;

/// Membership mask of the goal alone.
pub fn goal_targets(m: &FiniteMdp) -> Vec<bool> {
    reach::goal_mask(m)
}
