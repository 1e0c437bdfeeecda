//! The smallest example on which layered backward induction never closes
//! its gap: `alpha` loops on `s0` forever, `beta` gambles 1/2 for the goal.

use crate::model::{FiniteMdp, Probability};

pub fn make_three_state() -> FiniteMdp {
    let mut b = FiniteMdp::builder();
    let s0 = b.state("s0");
    let goal = b.state("goal");
    let bad = b.state("bad");
    b.mark_bad(bad);
    b.action(s0, "alpha", vec![(s0, Probability::one())]);
    b.action(s0, "beta", vec![(goal, Probability::ratio(1, 2)), (bad, Probability::ratio(1, 2))]);
    b.build(s0, goal).expect("three-state model is well formed")
}
