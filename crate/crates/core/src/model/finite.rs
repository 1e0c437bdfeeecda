//! Explicit finite MDPs and their JSON file format.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    check_enabled, validate_distribution, ActionLabel, AvoidStatus, Distribution, Mdp, ModelFlags,
    NumericMode, OptCriterion, Probability,
};
use crate::error::{Error, Result};

/// One enabled action of a finite MDP state.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAction {
    pub name: String,
    pub dist: Distribution<usize>,
}

/// An explicit finite MDP. States are dense indices into the name table.
#[derive(Debug, Clone)]
pub struct FiniteMdp {
    names: Vec<String>,
    index: HashMap<String, usize>,
    actions: Vec<Vec<FiniteAction>>,
    initial: usize,
    goal: usize,
    bad: Vec<usize>,
    mode: NumericMode,
    avoid_cache: [OnceLock<Vec<bool>>; 2],
}

impl PartialEq for FiniteMdp {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.actions == other.actions
            && self.initial == other.initial
            && self.goal == other.goal
            && self.bad == other.bad
    }
}

impl FiniteMdp {
    pub fn builder() -> FiniteMdpBuilder {
        FiniteMdpBuilder::default()
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn goal(&self) -> usize {
        self.goal
    }

    /// States declared as bad (informational markers; they are absorbing).
    pub fn bad_states(&self) -> &[usize] {
        &self.bad
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn actions(&self, s: usize) -> &[FiniteAction] {
        &self.actions[s]
    }

    /// Number of enabled actions, summed over states.
    pub fn num_choices(&self) -> usize {
        self.actions.iter().map(Vec::len).sum()
    }

    /// Copy of this model with a different initial state.
    pub fn with_initial(&self, initial: usize) -> FiniteMdp {
        assert!(initial < self.names.len());
        let mut m = self.clone();
        m.initial = initial;
        m
    }

    /// Serializes to the JSON interchange format. Exact probabilities are
    /// written as `"n/d"` strings, floats as JSON numbers.
    pub fn to_json(&self) -> String {
        let transitions: Vec<Value> = self
            .actions
            .iter()
            .enumerate()
            .flat_map(|(s, acts)| {
                acts.iter().map(move |a| {
                    let to: Vec<Value> = a
                        .dist
                        .iter()
                        .map(|(t, p)| {
                            let pv = match p {
                                Probability::Exact(r) => Value::String(r.to_string()),
                                Probability::Float(x) => serde_json::json!(x),
                            };
                            Value::Array(vec![Value::String(self.names[*t].clone()), pv])
                        })
                        .collect();
                    serde_json::json!({"from": self.names[s], "action": a.name, "to": to})
                })
            })
            .collect();
        let mut doc = serde_json::json!({
            "states": self.names,
            "initial": self.names[self.initial],
            "goal": self.names[self.goal],
            "transitions": transitions,
        });
        if !self.bad.is_empty() {
            let bad: Vec<&str> = self.bad.iter().map(|&b| self.names[b].as_str()).collect();
            doc["bad"] = serde_json::json!(bad);
        }
        serde_json::to_string_pretty(&doc).expect("json serialization")
    }

    pub(crate) fn avoid_set(&self, opt: OptCriterion) -> &[bool] {
        let slot = match opt {
            OptCriterion::Inf => &self.avoid_cache[0],
            OptCriterion::Sup => &self.avoid_cache[1],
        };
        slot.get_or_init(|| crate::transform::avoid_flags(self, opt))
    }
}

impl Mdp for FiniteMdp {
    type State = usize;

    fn initial(&self) -> usize {
        self.initial
    }

    fn enabled(&self, s: &usize) -> Vec<ActionLabel> {
        self.actions
            .get(*s)
            .map(|acts| ActionLabel::list(acts.iter().map(|a| a.name.clone())))
            .unwrap_or_default()
    }

    fn successors(&self, s: &usize, a: &ActionLabel) -> Result<Distribution<usize>> {
        let acts = self.actions.get(*s).ok_or(Error::UnknownState(*s as u32))?;
        let enabled = ActionLabel::list(acts.iter().map(|a| a.name.clone()));
        check_enabled(&enabled, a, || self.names[*s].clone())?;
        Ok(acts[a.index].dist.clone())
    }

    fn is_goal(&self, s: &usize) -> bool {
        *s == self.goal
    }

    fn avoid_status(&self, s: &usize, opt: OptCriterion) -> AvoidStatus {
        if self.avoid_set(opt)[*s] {
            AvoidStatus::Yes
        } else {
            AvoidStatus::No
        }
    }

    fn flags(&self) -> ModelFlags {
        ModelFlags {
            finitely_action_branching: true,
            finite: true,
        }
    }

    fn state_name(&self, s: &usize) -> String {
        self.names[*s].clone()
    }
}

/// Incremental constructor for [`FiniteMdp`].
#[derive(Debug, Default)]
pub struct FiniteMdpBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    actions: Vec<Vec<FiniteAction>>,
    bad: Vec<usize>,
}

impl FiniteMdpBuilder {
    /// Adds a state, or returns the existing index of a state with that name.
    pub fn state(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        self.actions.push(Vec::new());
        i
    }

    pub fn mark_bad(&mut self, s: usize) -> &mut Self {
        if !self.bad.contains(&s) {
            self.bad.push(s);
        }
        self
    }

    /// Adds an action; the distribution is validated at build time.
    pub fn action(&mut self, from: usize, name: impl Into<String>, to: Vec<(usize, Probability)>) -> &mut Self {
        self.actions[from].push(FiniteAction {
            name: name.into(),
            dist: Distribution::new(to),
        });
        self
    }

    pub fn build(mut self, initial: usize, goal: usize) -> Result<FiniteMdp> {
        let n = self.names.len();
        if initial >= n || goal >= n {
            return Err(Error::Schema("initial or goal state is not declared".into()));
        }
        if !self.actions[goal].is_empty() {
            return Err(Error::Schema(format!(
                "goal state `{}` must be absorbing",
                self.names[goal]
            )));
        }
        let mut exact = true;
        for (s, acts) in self.actions.iter().enumerate() {
            let mut seen = HashSet::new();
            for a in acts {
                if !seen.insert(a.name.as_str()) {
                    return Err(Error::Schema(format!(
                        "duplicate action `{}` at state `{}`",
                        a.name, self.names[s]
                    )));
                }
                if a.dist.iter().any(|(t, _)| *t >= n) {
                    return Err(Error::Schema(format!(
                        "action `{}` at `{}` targets an undeclared state",
                        a.name, self.names[s]
                    )));
                }
                if !validate_distribution(&a.dist) {
                    return Err(Error::Probability(format!(
                        "action `{}` at state `{}` is not a valid distribution (sum {})",
                        a.name,
                        self.names[s],
                        a.dist.exact_sum().map(|r| r.to_string()).unwrap_or_else(|| a.dist.float_sum().to_string())
                    )));
                }
                exact &= a.dist.is_exact();
            }
        }
        self.bad.sort_unstable();
        Ok(FiniteMdp {
            names: self.names,
            index: self.index,
            actions: self.actions,
            initial,
            goal,
            bad: self.bad,
            mode: if exact { NumericMode::Exact } else { NumericMode::Float },
            avoid_cache: Default::default(),
        })
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    states: Vec<String>,
    initial: String,
    goal: String,
    #[serde(default)]
    bad: Vec<String>,
    #[serde(default)]
    transitions: Vec<TransitionDoc>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    from: String,
    action: String,
    to: Vec<(String, Value)>,
}

/// Loads a model, inferring the numeric mode: exact if every probability is
/// an `"n/d"` (or integer) string, float otherwise.
pub fn load_finite_model(text: &str) -> Result<FiniteMdp> {
    load_finite_model_with(text, None)
}

/// Loads a model in the given numeric mode (`None` infers it). In exact mode
/// decimal probabilities are rejected.
pub fn load_finite_model_with(text: &str, mode: Option<NumericMode>) -> Result<FiniteMdp> {
    let raw: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let doc: ModelDoc = serde_json::from_value(raw).map_err(|e| Error::Schema(e.to_string()))?;

    let mut builder = FiniteMdp::builder();
    for name in &doc.states {
        if builder.index.contains_key(name) {
            return Err(Error::Schema(format!("duplicate state `{name}`")));
        }
        builder.state(name.clone());
    }
    let resolve = |b: &FiniteMdpBuilder, name: &str| {
        b.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Schema(format!("unknown state `{name}`")))
    };

    let mut parsed = Vec::with_capacity(doc.transitions.len());
    let mut all_exact = true;
    for t in &doc.transitions {
        let from = resolve(&builder, &t.from)?;
        let mut to = Vec::with_capacity(t.to.len());
        for (name, p) in &t.to {
            let target = resolve(&builder, name)?;
            let prob = parse_prob_value(p, mode)?;
            all_exact &= prob.is_exact();
            to.push((target, prob));
        }
        parsed.push((from, t.action.clone(), to));
    }
    let force_float = mode == Some(NumericMode::Float) || (mode.is_none() && !all_exact);
    for (from, action, mut to) in parsed {
        if force_float {
            for entry in &mut to {
                entry.1 = Probability::Float(entry.1.to_f64());
            }
        }
        builder.action(from, action, to);
    }
    for b in &doc.bad {
        let i = resolve(&builder, b)?;
        builder.mark_bad(i);
    }
    let initial = resolve(&builder, &doc.initial)?;
    let goal = resolve(&builder, &doc.goal)?;
    builder.build(initial, goal)
}

fn parse_prob_value(v: &Value, mode: Option<NumericMode>) -> Result<Probability> {
    let p = match (v, mode) {
        (Value::String(s), Some(NumericMode::Exact)) => Probability::parse_exact(s)?,
        (Value::String(s), _) => Probability::parse(s)?,
        (Value::Number(_), Some(NumericMode::Exact)) => {
            return Err(Error::Probability(format!(
                "decimal probability {v} is rejected in exact mode; write it as \"n/d\""
            )))
        }
        (Value::Number(n), _) => Probability::Float(
            n.as_f64()
                .ok_or_else(|| Error::Parse(format!("bad number {n}")))?,
        ),
        _ => return Err(Error::Schema(format!("probability must be a string or number, got {v}"))),
    };
    if !p.in_unit_interval() || p.is_zero() {
        return Err(Error::Probability(format!("probability {p} must lie in (0, 1]")));
    }
    Ok(p)
}
