use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Mdp, OptCriterion};
use crate::solver::{bounded_reach, solve_reach_targets, BoundedObjective, ReachOptions};
use crate::transform::{collapse, slice, state_cap_from_env, LayeredArena};

/// All four bounds at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub n: usize,
    pub p_minus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub p_plus: f64,
    /// `p_minus <= q_minus` and `q_plus <= p_plus`, up to the slack.
    pub holds: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub rows: Vec<RefinementRow>,
}

impl RefinementReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Slack allowed in the two inequalities.
const SLACK: f64 = 1e-9;
/// Inner tolerance of the slice solves.
const INNER_TOL: f64 = 1e-11;

/// Computes `p_n^-, q_n^-, q_n^+, p_n^+` for `n = 1..=n_max` and checks that
/// the slice bounds refine the unfolding bounds.
pub fn refinement_check<M: Mdp>(model: &M, opt: OptCriterion, n_max: usize) -> Result<RefinementReport> {
    let view = match collapse(model, opt) {
        Err(Error::TrivialZero) => {
            let rows = (1..=n_max)
                .map(|n| RefinementRow {
                    n,
                    p_minus: 0.0,
                    q_minus: 0.0,
                    q_plus: 0.0,
                    p_plus: 0.0,
                    holds: true,
                })
                .collect();
            return Ok(RefinementReport { rows });
        }
        other => other?,
    };
    let ropts = ReachOptions {
        tol: INNER_TOL,
        ..Default::default()
    };
    let mut arena = LayeredArena::new(&view, opt, state_cap_from_env());
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let sl = slice(&mut arena, n)?;
        let p_minus = bounded_reach(&arena, n, opt, BoundedObjective::ReachWithin)?;
        let p_plus = bounded_reach(&arena, n, opt, BoundedObjective::ReachOrSurvive)?;
        let q_minus = solve_reach_targets(&sl.mdp, &sl.goal_only(), opt, &ropts)?.lower[0];
        let q_plus = solve_reach_targets(&sl.mdp, &sl.goal_or_bot(), opt, &ropts)?.upper[0];
        rows.push(RefinementRow {
            n,
            p_minus,
            q_minus,
            q_plus,
            p_plus,
            holds: p_minus <= q_minus + SLACK && q_plus <= p_plus + SLACK,
        });
    }
    Ok(RefinementReport { rows })
}
