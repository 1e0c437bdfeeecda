//! The infinite random-walk MDP: from every `s_i`, `alpha` steps up with
//! probability `p` and down with `1 - p` (from `s_0`, down means the goal),
//! while `beta` gambles for the goal with probability `q` and falls into
//! `bad` otherwise.

use super::check_open_unit;
use crate::error::Result;
use crate::model::{check_enabled, ActionLabel, AvoidStatus, Distribution, Mdp, ModelFlags, OptCriterion, Probability};

#[derive(Debug, Clone, PartialEq)]
pub struct WalkParams {
    /// Up-step probability of `alpha`.
    pub p: Probability,
    /// Success probability of `beta`.
    pub q: Probability,
}

impl WalkParams {
    pub fn new(p: Probability, q: Probability) -> Result<Self> {
        check_open_unit("p", &p)?;
        check_open_unit("q", &q)?;
        Ok(WalkParams { p, q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WalkState {
    S(u64),
    Goal,
    Bad,
}

#[derive(Debug, Clone)]
pub struct RandomWalk {
    params: WalkParams,
}

pub fn make_random_walk(params: WalkParams) -> RandomWalk {
    RandomWalk { params }
}

impl RandomWalk {
    pub fn params(&self) -> &WalkParams {
        &self.params
    }
}

impl Mdp for RandomWalk {
    type State = WalkState;

    fn initial(&self) -> WalkState {
        WalkState::S(0)
    }

    fn enabled(&self, s: &WalkState) -> Vec<ActionLabel> {
        match s {
            WalkState::S(_) => ActionLabel::list(["alpha", "beta"]),
            _ => Vec::new(),
        }
    }

    fn successors(&self, s: &WalkState, a: &ActionLabel) -> Result<Distribution<WalkState>> {
        check_enabled(&self.enabled(s), a, || self.state_name(s))?;
        let WalkState::S(i) = *s else { unreachable!("absorbing states have no actions") };
        let WalkParams { p, q } = &self.params;
        Ok(match a.index {
            0 if i == 0 => Distribution::new(vec![(WalkState::Goal, p.complement()), (WalkState::S(1), p.clone())]),
            0 => Distribution::new(vec![(WalkState::S(i + 1), p.clone()), (WalkState::S(i - 1), p.complement())]),
            _ => Distribution::new(vec![(WalkState::Goal, q.clone()), (WalkState::Bad, q.complement())]),
        })
    }

    fn is_goal(&self, s: &WalkState) -> bool {
        *s == WalkState::Goal
    }

    fn avoid_status(&self, s: &WalkState, _opt: OptCriterion) -> AvoidStatus {
        // every scheduler keeps a positive chance of the goal from any s_i
        match s {
            WalkState::Bad => AvoidStatus::Yes,
            _ => AvoidStatus::No,
        }
    }

    fn flags(&self) -> ModelFlags {
        ModelFlags {
            finitely_action_branching: true,
            finite: false,
        }
    }

    fn state_name(&self, s: &WalkState) -> String {
        match s {
            WalkState::S(i) => format!("s{i}"),
            WalkState::Goal => "goal".into(),
            WalkState::Bad => "bad".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_distribution;

    fn walk(p: (i64, i64), q: (i64, i64)) -> RandomWalk {
        make_random_walk(WalkParams::new(Probability::ratio(p.0, p.1), Probability::ratio(q.0, q.1)).unwrap())
    }

    #[test]
    fn s0_alpha_goes_to_goal_or_up() {
        let m = walk((1, 3), (1, 2));
        let d = m.successors(&WalkState::S(0), &ActionLabel::new("alpha", 0)).unwrap();
        assert_eq!(d.prob_of(&WalkState::Goal), Probability::ratio(2, 3));
        assert_eq!(d.prob_of(&WalkState::S(1)), Probability::ratio(1, 3));
    }

    #[test]
    fn beta_gambles() {
        let m = walk((1, 3), (1, 2));
        let d = m.successors(&WalkState::S(7), &ActionLabel::new("beta", 1)).unwrap();
        assert_eq!(d.prob_of(&WalkState::Goal), Probability::ratio(1, 2));
        assert_eq!(d.prob_of(&WalkState::Bad), Probability::ratio(1, 2));
    }

    #[test]
    fn enabled_sets() {
        let m = walk((1, 3), (1, 2));
        let names: Vec<_> = m.enabled(&WalkState::S(3)).into_iter().map(|a| a.name).collect();
        assert_eq!(names, ["alpha", "beta"]);
        assert!(m.enabled(&WalkState::Goal).is_empty());
        assert!(m.enabled(&WalkState::Bad).is_empty());
    }

    #[test]
    fn avoid_oracle() {
        let m = walk((1, 3), (1, 2));
        for opt in OptCriterion::BOTH {
            assert_eq!(m.avoid_status(&WalkState::Bad, opt), AvoidStatus::Yes);
            assert_eq!(m.avoid_status(&WalkState::S(5), opt), AvoidStatus::No);
            assert_eq!(m.avoid_status(&WalkState::Goal, opt), AvoidStatus::No);
        }
    }

    #[test]
    fn distributions_validate() {
        let m = walk((2, 3), (1, 4));
        for i in 0..20 {
            for a in m.enabled(&WalkState::S(i)) {
                assert!(validate_distribution(&m.successors(&WalkState::S(i), &a).unwrap()));
            }
        }
    }

    #[test]
    fn params_must_be_open_unit() {
        assert!(WalkParams::new(Probability::one(), Probability::ratio(1, 2)).is_err());
        assert!(WalkParams::new(Probability::ratio(1, 2), Probability::zero()).is_err());
    }
}
