//! The two infinite "ladder" MDPs used to contrast the two decisiveness
//! notions.
//!
//! In the left ladder, `alpha` climbs with probability 1/2 or falls back to
//! a reset state `r` (which returns to `s_0`), and `beta` gambles 1/2 for the
//! goal. Its inf-avoid set is everything except the goal, its sup-avoid set
//! is `{bad}`.
//!
//! In the right ladder, `alpha` climbs with probability `1 - eps_i` and hits
//! the goal with `eps_i`. Both avoid sets are `{bad}`; since the product of
//! the `1 - eps_i` is positive, always climbing escapes both goal and bad
//! with positive probability.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::model::{check_enabled, ActionLabel, AvoidStatus, Distribution, Mdp, ModelFlags, OptCriterion, Probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LadderState {
    S(u64),
    /// Reset state of the left ladder.
    R,
    Goal,
    Bad,
}

fn ladder_name(s: &LadderState) -> String {
    match s {
        LadderState::S(i) => format!("s{i}"),
        LadderState::R => "r".into(),
        LadderState::Goal => "goal".into(),
        LadderState::Bad => "bad".into(),
    }
}

fn gamble() -> Distribution<LadderState> {
    Distribution::new(vec![
        (LadderState::Goal, Probability::ratio(1, 2)),
        (LadderState::Bad, Probability::ratio(1, 2)),
    ])
}

const INFINITE: ModelFlags = ModelFlags {
    finitely_action_branching: true,
    finite: false,
};

/// The left ladder.
#[derive(Debug, Clone, Default)]
pub struct LeftLadder;

pub fn make_ml() -> LeftLadder {
    LeftLadder
}

impl Mdp for LeftLadder {
    type State = LadderState;

    fn initial(&self) -> LadderState {
        LadderState::S(0)
    }

    fn enabled(&self, s: &LadderState) -> Vec<ActionLabel> {
        match s {
            LadderState::S(_) => ActionLabel::list(["alpha", "beta"]),
            LadderState::R => ActionLabel::list(["alpha"]),
            _ => Vec::new(),
        }
    }

    fn successors(&self, s: &LadderState, a: &ActionLabel) -> Result<Distribution<LadderState>> {
        check_enabled(&self.enabled(s), a, || ladder_name(s))?;
        Ok(match (*s, a.index) {
            (LadderState::S(i), 0) => Distribution::new(vec![
                (LadderState::S(i + 1), Probability::ratio(1, 2)),
                (LadderState::R, Probability::ratio(1, 2)),
            ]),
            (LadderState::S(_), _) => gamble(),
            (LadderState::R, _) => Distribution::dirac(LadderState::S(0)),
            _ => unreachable!("absorbing states have no actions"),
        })
    }

    fn is_goal(&self, s: &LadderState) -> bool {
        *s == LadderState::Goal
    }

    fn avoid_status(&self, s: &LadderState, opt: OptCriterion) -> AvoidStatus {
        match (s, opt) {
            (LadderState::Goal, _) => AvoidStatus::No,
            (LadderState::Bad, _) => AvoidStatus::Yes,
            // always-alpha never reaches the goal
            (_, OptCriterion::Inf) => AvoidStatus::Yes,
            (_, OptCriterion::Sup) => AvoidStatus::No,
        }
    }

    fn flags(&self) -> ModelFlags {
        INFINITE
    }

    fn state_name(&self, s: &LadderState) -> String {
        ladder_name(s)
    }
}

/// Rule producing `eps_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsSchedule {
    /// `eps_i = 1 / (i + 2)^2`.
    InverseSquare,
    /// `eps_i = ratio^(i + 1)`, for `0 < ratio < 1`.
    Geometric(BigRational),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrParams {
    pub eps: EpsSchedule,
}

impl Default for MrParams {
    fn default() -> Self {
        MrParams {
            eps: EpsSchedule::InverseSquare,
        }
    }
}

impl MrParams {
    pub fn new(eps: EpsSchedule) -> Result<Self> {
        if let EpsSchedule::Geometric(r) = &eps {
            let p = Probability::Exact(r.clone());
            super::check_open_unit("eps ratio", &p)?;
        }
        Ok(MrParams { eps })
    }

    /// Parses `inverse-square` or `geometric:<ratio>`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.split_once(':') {
            None if spec == "inverse-square" || spec == "inv-square" => Ok(MrParams::default()),
            Some(("geometric", r)) => match Probability::parse_exact(r)? {
                Probability::Exact(r) => MrParams::new(EpsSchedule::Geometric(r)),
                Probability::Float(_) => unreachable!(),
            },
            _ => Err(Error::InvalidParameter(format!("unknown eps schedule `{spec}`"))),
        }
    }

    pub fn eps(&self, i: u64) -> BigRational {
        match &self.eps {
            EpsSchedule::InverseSquare => {
                let d = BigInt::from(i + 2);
                BigRational::new(BigInt::one(), &d * &d)
            }
            EpsSchedule::Geometric(r) => {
                let mut acc = r.clone();
                for _ in 0..i {
                    acc *= r;
                }
                acc
            }
        }
    }

    /// Float value of `prod_{i < terms} (1 - eps_i)`.
    pub fn survival_product(&self, terms: u64) -> f64 {
        (0..terms).fold(1.0, |acc, i| {
            acc * (1.0 - crate::model::ratio_to_f64(&self.eps(i)))
        })
    }
}

/// The right ladder.
#[derive(Debug, Clone)]
pub struct RightLadder {
    params: MrParams,
}

pub fn make_mr(params: MrParams) -> RightLadder {
    RightLadder { params }
}

impl RightLadder {
    pub fn params(&self) -> &MrParams {
        &self.params
    }
}

impl Mdp for RightLadder {
    type State = LadderState;

    fn initial(&self) -> LadderState {
        LadderState::S(0)
    }

    fn enabled(&self, s: &LadderState) -> Vec<ActionLabel> {
        match s {
            LadderState::S(_) => ActionLabel::list(["alpha", "beta"]),
            _ => Vec::new(),
        }
    }

    fn successors(&self, s: &LadderState, a: &ActionLabel) -> Result<Distribution<LadderState>> {
        check_enabled(&self.enabled(s), a, || ladder_name(s))?;
        let LadderState::S(i) = *s else { unreachable!("only s_i has actions") };
        Ok(match a.index {
            0 => {
                let eps = self.params.eps(i);
                Distribution::new(vec![
                    (LadderState::S(i + 1), Probability::Exact(BigRational::one() - &eps)),
                    (LadderState::Goal, Probability::Exact(eps)),
                ])
            }
            _ => gamble(),
        })
    }

    fn is_goal(&self, s: &LadderState) -> bool {
        *s == LadderState::Goal
    }

    fn avoid_status(&self, s: &LadderState, _opt: OptCriterion) -> AvoidStatus {
        match s {
            LadderState::Bad => AvoidStatus::Yes,
            _ => AvoidStatus::No,
        }
    }

    fn flags(&self) -> ModelFlags {
        INFINITE
    }

    fn state_name(&self, s: &LadderState) -> String {
        ladder_name(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ml_avoid_sets() {
        let m = make_ml();
        assert_eq!(m.avoid_status(&LadderState::S(0), OptCriterion::Inf), AvoidStatus::Yes);
        assert_eq!(m.avoid_status(&LadderState::S(4), OptCriterion::Sup), AvoidStatus::No);
        assert_eq!(m.avoid_status(&LadderState::R, OptCriterion::Inf), AvoidStatus::Yes);
        assert_eq!(m.avoid_status(&LadderState::Bad, OptCriterion::Sup), AvoidStatus::Yes);
        assert_eq!(m.avoid_status(&LadderState::Goal, OptCriterion::Inf), AvoidStatus::No);
    }

    #[test]
    fn ml_reset_returns_to_start() {
        let m = make_ml();
        let d = m.successors(&LadderState::R, &ActionLabel::new("alpha", 0)).unwrap();
        assert_eq!(d, Distribution::dirac(LadderState::S(0)));
    }

    #[test]
    fn mr_alpha_uses_eps() {
        let m = make_mr(MrParams::default());
        let d = m.successors(&LadderState::S(3), &ActionLabel::new("alpha", 0)).unwrap();
        assert_eq!(d.prob_of(&LadderState::Goal), Probability::ratio(1, 25));
        assert_eq!(d.prob_of(&LadderState::S(4)), Probability::ratio(24, 25));
    }

    #[test]
    fn default_survival_product_is_positive() {
        // prod_{i>=0} (1 - 1/(i+2)^2) telescopes to 1/2
        let p = MrParams::default().survival_product(100_000);
        assert!((p - 0.5).abs() < 1e-4, "{p}");
    }

    #[test]
    fn parse_schedules() {
        assert_eq!(MrParams::parse("inverse-square").unwrap(), MrParams::default());
        let g = MrParams::parse("geometric:1/2").unwrap();
        assert_eq!(Probability::Exact(g.eps(2)), Probability::ratio(1, 8));
        assert!(MrParams::parse("geometric:3/2").is_err());
        assert!(MrParams::parse("bogus").is_err());
    }
}
