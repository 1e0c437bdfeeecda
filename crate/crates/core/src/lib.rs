//! Certified lower and upper bounds on optimal reachability probabilities
//! in denumerable Markov decision processes.
//!
//! Models are queried lazily through [`model::Mdp`]. The [`schemes`] turn
//! a model into a sequence of finite problems (bounded unfoldings or slices
//! with a sink) whose values sandwich the optimum, and stop once the gap is
//! below the requested precision. Termination is guaranteed on decisive
//! models; elsewhere the run ends with its budget exhausted and the last
//! certified interval.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod schemes;
pub mod solver;
mod sparse;
pub mod transform;
pub mod zoo;

pub use error::{Error, Result};
