//! Built-in model families: the random walk, the two ladders, the
//! three-state example, and the lossy channel embedding.

mod ladder;
mod lcs;
mod three_state;
mod walk;

pub use ladder::{make_ml, make_mr, EpsSchedule, LadderState, LeftLadder, MrParams, RightLadder};
pub use lcs::{
    embed_lcs, lcs_step, ChannelOp, Config, LcsEmbedding, LcsRule, LcsState, LcsSystem, LoseAllFn, LossModel,
};
pub use three_state::make_three_state;
pub use walk::{make_random_walk, RandomWalk, WalkParams, WalkState};

use crate::error::{Error, Result};
use crate::model::Probability;

/// Rejects parameters outside the open unit interval.
pub(crate) fn check_open_unit(name: &str, p: &Probability) -> Result<()> {
    let x = p.to_f64();
    let ok = match p {
        Probability::Exact(r) => {
            use num_traits::{One, Zero};
            *r > num_rational::BigRational::zero() && *r < num_rational::BigRational::one()
        }
        Probability::Float(_) => x > 0.0 && x < 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie strictly between 0 and 1, got {p}")))
    }
}
