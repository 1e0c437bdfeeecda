//! Model constructions: avoid sets of finite MDPs, the collapsed view that
//! merges certified-avoid states into `bad^opt`, breadth-first layered
//! exploration, and slicing to a finite MDP with a sink `s_bot`.

mod arena;
mod avoid;
mod collapse;
mod slice;

pub use arena::{explore, state_cap_from_env, LayeredArena, StateKind, DEFAULT_STATE_CAP, STATE_CAP_ENV};
pub use avoid::{avoid_flags, compute_avoid_finite};
pub use collapse::{collapse, collapse_finite, Collapsed, CollapsedView};
pub use slice::{slice, Redirect, SlicedMdp};
