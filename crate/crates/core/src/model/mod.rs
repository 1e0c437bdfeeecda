//! Core domain types and the lazily queried model abstraction.
//!
//! A model is anything implementing [`Mdp`]: it exposes an initial state,
//! the actions enabled at each state, one finite successor distribution per
//! enabled action, a goal test and an avoid oracle. Infinite models are
//! never materialized; the transformations and schemes only query the
//! states they discover.

mod finite;
mod prob;
mod session;
mod sim;

use std::fmt::{self, Debug};
use std::hash::Hash;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use finite::{load_finite_model, load_finite_model_with, FiniteAction, FiniteMdp, FiniteMdpBuilder};
pub use prob::{ratio_to_f64, NumericMode, Probability, FLOAT_SUM_TOLERANCE};
pub use session::{Session, StateRef};
pub use sim::{simulate, simulate_with, PurePositionalScheduler, SamplePath, SimulationTable, TerminalReason};

use crate::error::{Error, Result};

/// Optimization criterion over schedulers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptCriterion {
    Inf,
    Sup,
}

impl OptCriterion {
    pub const BOTH: [OptCriterion; 2] = [OptCriterion::Inf, OptCriterion::Sup];

    /// Picks the better of two values under this criterion.
    #[inline]
    pub fn pick(self, a: f64, b: f64) -> f64 {
        match self {
            OptCriterion::Inf => a.min(b),
            OptCriterion::Sup => a.max(b),
        }
    }

    /// Whether `candidate` strictly improves on `incumbent`.
    #[inline]
    pub fn improves<T: PartialOrd>(self, candidate: &T, incumbent: &T) -> bool {
        match self {
            OptCriterion::Inf => candidate < incumbent,
            OptCriterion::Sup => candidate > incumbent,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OptCriterion::Inf => "inf",
            OptCriterion::Sup => "sup",
        }
    }
}

impl fmt::Display for OptCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for OptCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "min" => Ok(OptCriterion::Inf),
            "sup" | "max" => Ok(OptCriterion::Sup),
            other => Err(Error::Parse(format!("unknown criterion `{other}`"))),
        }
    }
}

/// Membership of a state in the avoid set for a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AvoidStatus {
    /// Certified member: the optimal probability of reaching the goal is 0.
    Yes,
    /// Certified non-member.
    No,
    /// No oracle answer; only legal for infinite models.
    Unknown,
}

/// An action enabled at a particular state. `index` is the position in the
/// state's enabled list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionLabel {
    pub name: String,
    pub index: usize,
}

impl ActionLabel {
    pub fn new(name: impl Into<String>, index: usize) -> Self {
        ActionLabel {
            name: name.into(),
            index,
        }
    }

    /// Labels `names` with consecutive indices.
    pub fn list<I, N>(names: I) -> Vec<ActionLabel>
    where
        I: IntoIterator<Item = N>,
        N: Into<String>,
    {
        names
            .into_iter()
            .enumerate()
            .map(|(i, n)| ActionLabel::new(n, i))
            .collect()
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A finite-support successor distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<S> {
    pub support: Vec<(S, Probability)>,
}

impl<S> Distribution<S> {
    pub fn new(support: Vec<(S, Probability)>) -> Self {
        Distribution { support }
    }

    pub fn dirac(s: S) -> Self {
        Distribution {
            support: vec![(s, Probability::one())],
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(S, Probability)> {
        self.support.iter()
    }

    pub fn states(&self) -> impl Iterator<Item = &S> {
        self.support.iter().map(|(s, _)| s)
    }

    /// Whether every entry is exact.
    pub fn is_exact(&self) -> bool {
        self.support.iter().all(|(_, p)| p.is_exact())
    }

    /// Exact sum if all entries are exact.
    pub fn exact_sum(&self) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (_, p) in &self.support {
            acc += p.as_exact()?;
        }
        Some(acc)
    }

    pub fn float_sum(&self) -> f64 {
        self.support.iter().map(|(_, p)| p.to_f64()).sum()
    }

    pub fn map<T>(self, mut f: impl FnMut(S) -> T) -> Distribution<T> {
        Distribution {
            support: self.support.into_iter().map(|(s, p)| (f(s), p)).collect(),
        }
    }
}

impl<S: PartialEq> Distribution<S> {
    /// Probability of `s`, zero if absent.
    pub fn prob_of(&self, s: &S) -> Probability {
        self.support
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Probability::zero)
    }

    /// Merges duplicate support entries, preserving first-occurrence order.
    pub fn merged(self) -> Self {
        let mut out: Vec<(S, Probability)> = Vec::with_capacity(self.support.len());
        for (s, p) in self.support {
            if let Some(slot) = out.iter_mut().find(|(t, _)| *t == s) {
                slot.1 = slot.1.add(&p);
            } else {
                out.push((s, p));
            }
        }
        Distribution { support: out }
    }
}

/// Checks the distribution invariants: strictly positive entries, pairwise
/// distinct support, and a sum of exactly one (exact) or within
/// [`FLOAT_SUM_TOLERANCE`] of one (float).
pub fn validate_distribution<S: PartialEq>(d: &Distribution<S>) -> bool {
    if d.support.is_empty() {
        return false;
    }
    for (i, (s, p)) in d.support.iter().enumerate() {
        if p.is_zero() || !p.in_unit_interval() {
            return false;
        }
        if d.support[..i].iter().any(|(t, _)| t == s) {
            return false;
        }
    }
    match d.exact_sum() {
        Some(sum) => sum == BigRational::one(),
        None => (d.float_sum() - 1.0).abs() <= FLOAT_SUM_TOLERANCE,
    }
}

/// Declared structural flags of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFlags {
    pub finitely_action_branching: bool,
    pub finite: bool,
}

/// A lazily queried, possibly infinite Markov decision process with a single
/// absorbing goal state.
///
/// Implementations must answer identical queries identically, must give the
/// goal no enabled actions, and must never report the goal as avoiding
/// itself.
pub trait Mdp: Send + Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;

    fn initial(&self) -> Self::State;

    fn enabled(&self, s: &Self::State) -> Vec<ActionLabel>;

    /// Successor distribution of an enabled action; `DisabledAction` otherwise.
    fn successors(&self, s: &Self::State, a: &ActionLabel) -> Result<Distribution<Self::State>>;

    fn is_goal(&self, s: &Self::State) -> bool;

    fn avoid_status(&self, s: &Self::State, opt: OptCriterion) -> AvoidStatus;

    fn flags(&self) -> ModelFlags;

    /// Human-readable state name, unique per state.
    fn state_name(&self, s: &Self::State) -> String;
}

/// Shared check used by model implementations: `a` must be the action at
/// position `a.index` of `enabled`, with a matching name.
pub(crate) fn check_enabled(enabled: &[ActionLabel], a: &ActionLabel, state: impl FnOnce() -> String) -> Result<()> {
    match enabled.get(a.index) {
        Some(e) if e.name == a.name => Ok(()),
        _ => Err(Error::DisabledAction {
            state: state(),
            action: a.name.clone(),
        }),
    }
}
