//! Lossy channel systems and their try/restart embedding.
//!
//! A configuration is a control state plus the content of a single FIFO
//! channel. Applying a rule yields an intermediate word, then the loss model
//! produces a finite distribution over resulting words.
//!
//! The embedding adds two actions to every configuration: `try` moves to the
//! goal with probability `1 - 2^-|w|` and to `bad` otherwise, and `restart`
//! returns to the initial configuration. Bounded systems keep the supremum
//! value below `1 - 2^-L` (L the longest reachable channel); unbounded ones
//! push it to 1.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::check_open_unit;
use crate::error::{Error, Result};
use crate::model::{check_enabled, ActionLabel, AvoidStatus, Distribution, Mdp, ModelFlags, OptCriterion, Probability};

/// Channel operation of a rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChannelOp {
    Send(u8),
    Receive(u8),
    Nop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsRule {
    pub from: usize,
    pub op: ChannelOp,
    pub to: usize,
}

/// A single-channel lossy channel system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcsSystem {
    pub control_states: Vec<String>,
    pub channel_alphabet: Vec<String>,
    pub rules: Vec<LcsRule>,
    pub initial_control: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LcsDoc {
    control_states: Vec<String>,
    channel_alphabet: Vec<String>,
    rules: Vec<RuleDoc>,
    initial_control: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    from: String,
    /// `send(x)`, `receive(x)` or `nop`.
    op: String,
    to: String,
}

impl LcsSystem {
    /// Builds a system from names; `ops` are `send(x)`, `receive(x)` or `nop`.
    pub fn new(control_states: &[&str], alphabet: &[&str], rules: &[(&str, &str, &str)], initial: &str) -> Result<Self> {
        let doc = LcsDoc {
            control_states: control_states.iter().map(|s| s.to_string()).collect(),
            channel_alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            rules: rules
                .iter()
                .map(|(f, o, t)| RuleDoc {
                    from: f.to_string(),
                    op: o.to_string(),
                    to: t.to_string(),
                })
                .collect(),
            initial_control: initial.to_string(),
        };
        Self::from_doc(doc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let doc: LcsDoc = serde_json::from_value(raw).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn to_json(&self) -> String {
        let doc = LcsDoc {
            control_states: self.control_states.clone(),
            channel_alphabet: self.channel_alphabet.clone(),
            rules: self
                .rules
                .iter()
                .map(|r| RuleDoc {
                    from: self.control_states[r.from].clone(),
                    op: self.op_name(&r.op),
                    to: self.control_states[r.to].clone(),
                })
                .collect(),
            initial_control: self.control_states[self.initial_control].clone(),
        };
        serde_json::to_string_pretty(&doc).expect("json serialization")
    }

    fn from_doc(doc: LcsDoc) -> Result<Self> {
        if doc.channel_alphabet.len() > u8::MAX as usize {
            return Err(Error::Schema("channel alphabet is limited to 255 letters".into()));
        }
        let state = |name: &str| {
            doc.control_states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::Schema(format!("unknown control state `{name}`")))
        };
        let letter = |name: &str| {
            doc.channel_alphabet
                .iter()
                .position(|s| s == name)
                .map(|i| i as u8)
                .ok_or_else(|| Error::Schema(format!("unknown channel letter `{name}`")))
        };
        let mut rules = Vec::with_capacity(doc.rules.len());
        for r in &doc.rules {
            let op_text = r.op.trim();
            let op = if op_text == "nop" {
                ChannelOp::Nop
            } else if let Some(x) = op_text.strip_prefix("send(").and_then(|s| s.strip_suffix(')')) {
                ChannelOp::Send(letter(x.trim())?)
            } else if let Some(x) = op_text.strip_prefix("receive(").and_then(|s| s.strip_suffix(')')) {
                ChannelOp::Receive(letter(x.trim())?)
            } else {
                return Err(Error::Schema(format!("unknown channel operation `{op_text}`")));
            };
            rules.push(LcsRule {
                from: state(&r.from)?,
                op,
                to: state(&r.to)?,
            });
        }
        Ok(LcsSystem {
            initial_control: state(&doc.initial_control)?,
            control_states: doc.control_states,
            channel_alphabet: doc.channel_alphabet,
            rules,
        })
    }

    fn op_name(&self, op: &ChannelOp) -> String {
        match op {
            ChannelOp::Send(x) => format!("send({})", self.channel_alphabet[*x as usize]),
            ChannelOp::Receive(x) => format!("receive({})", self.channel_alphabet[*x as usize]),
            ChannelOp::Nop => "nop".into(),
        }
    }

    /// Action label of rule `i`.
    pub fn rule_name(&self, i: usize) -> String {
        let r = &self.rules[i];
        format!(
            "r{i}:{}:{}->{}",
            self.op_name(&r.op),
            self.control_states[r.from],
            self.control_states[r.to]
        )
    }

    pub fn initial_config(&self) -> Config {
        Config {
            control: self.initial_control,
            word: Vec::new(),
        }
    }

    pub fn is_applicable(&self, config: &Config, rule: usize) -> bool {
        let r = &self.rules[rule];
        r.from == config.control
            && match r.op {
                ChannelOp::Receive(x) => config.word.first() == Some(&x),
                _ => true,
            }
    }

    pub fn config_name(&self, c: &Config) -> String {
        let word: String = c
            .word
            .iter()
            .map(|&x| self.channel_alphabet[x as usize].as_str())
            .collect::<Vec<_>>()
            .join("");
        let word = if word.is_empty() { "eps".to_string() } else { word };
        format!("({},{})", self.control_states[c.control], word)
    }

    /// Bounded demo: a straight line of four sends, then a `nop` self-loop.
    /// The longest reachable channel content is `abab` (L = 4).
    pub fn bounded_demo() -> Self {
        LcsSystem::new(
            &["q0", "q1", "q2", "q3", "q4"],
            &["a", "b"],
            &[
                ("q0", "send(a)", "q1"),
                ("q1", "send(b)", "q2"),
                ("q2", "send(a)", "q3"),
                ("q3", "send(b)", "q4"),
                ("q4", "nop", "q4"),
            ],
            "q0",
        )
        .expect("demo system is well formed")
    }

    /// Longest reachable channel content of [`LcsSystem::bounded_demo`].
    pub const BOUNDED_DEMO_MAX_LEN: usize = 4;

    /// Unbounded demo: a send self-loop lets the channel grow without bound.
    pub fn unbounded_demo() -> Self {
        LcsSystem::new(
            &["q0", "q1"],
            &["a"],
            &[("q0", "send(a)", "q0"), ("q0", "receive(a)", "q1"), ("q1", "nop", "q0")],
            "q0",
        )
        .expect("demo system is well formed")
    }

    /// Control states reachable from the initial one using only `nop` and
    /// `send` rules. Both are applicable with any channel content, and the
    /// loss models can always empty the channel, so each such state is
    /// reachable with positive probability from every configuration via
    /// `restart`.
    fn send_closure(&self) -> Vec<bool> {
        let mut seen = vec![false; self.control_states.len()];
        seen[self.initial_control] = true;
        let mut stack = vec![self.initial_control];
        while let Some(q) = stack.pop() {
            for r in &self.rules {
                if r.from == q && !matches!(r.op, ChannelOp::Receive(_)) && !seen[r.to] {
                    seen[r.to] = true;
                    stack.push(r.to);
                }
            }
        }
        seen
    }
}

/// A configuration `(control, word)`; letters are alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub control: usize,
    pub word: Vec<u8>,
}

/// Rule for losing "all messages at once".
#[derive(Debug, Clone, PartialEq)]
pub enum LoseAllFn {
    /// `f(n) = ratio^n`.
    Geometric(Probability),
}

impl LoseAllFn {
    pub fn at(&self, len: usize) -> Probability {
        match self {
            LoseAllFn::Geometric(r) => (0..len).fold(Probability::one(), |acc, _| acc.mul(r)),
        }
    }
}

/// Message-loss semantics applied after every rule.
#[derive(Debug, Clone, PartialEq)]
pub enum LossModel {
    /// Each letter is lost independently with probability `lambda`.
    PerMessageIid(Probability),
    /// The whole channel is emptied with probability `f(|w|)`, else kept.
    LoseAllWithProb(LoseAllFn),
}

impl LossModel {
    pub fn per_message(lambda: Probability) -> Result<Self> {
        check_open_unit("lambda", &lambda)?;
        Ok(LossModel::PerMessageIid(lambda))
    }

    pub fn lose_all_geometric(ratio: Probability) -> Result<Self> {
        check_open_unit("lose-all ratio", &ratio)?;
        Ok(LossModel::LoseAllWithProb(LoseAllFn::Geometric(ratio)))
    }

    /// Distribution over words after losses are applied to `word`.
    pub fn apply(&self, word: &[u8]) -> Distribution<Vec<u8>> {
        match self {
            LossModel::PerMessageIid(lambda) => {
                let keep = lambda.complement();
                let mut cur: Vec<(Vec<u8>, Probability)> = vec![(Vec::new(), Probability::one())];
                for &x in word {
                    let mut next: Vec<(Vec<u8>, Probability)> = Vec::with_capacity(cur.len() * 2);
                    let mut index: HashMap<Vec<u8>, usize> = HashMap::with_capacity(cur.len() * 2);
                    let mut push = |w: Vec<u8>, p: Probability| match index.get(&w) {
                        Some(&i) => next[i].1 = next[i].1.add(&p),
                        None => {
                            index.insert(w.clone(), next.len());
                            next.push((w, p));
                        }
                    };
                    for (w, p) in &cur {
                        let mut kept = w.clone();
                        kept.push(x);
                        push(kept, p.mul(&keep));
                        push(w.clone(), p.mul(lambda));
                    }
                    cur = next;
                }
                Distribution::new(cur)
            }
            LossModel::LoseAllWithProb(f) => {
                if word.is_empty() {
                    return Distribution::dirac(Vec::new());
                }
                let lose = f.at(word.len());
                Distribution::new(vec![(word.to_vec(), lose.complement()), (Vec::new(), lose)])
            }
        }
    }
}

/// Applies rule `rule` at `config`, then the loss model.
pub fn lcs_step(sys: &LcsSystem, loss: &LossModel, config: &Config, rule: usize) -> Result<Distribution<Config>> {
    if rule >= sys.rules.len() || !sys.is_applicable(config, rule) {
        return Err(Error::InapplicableRule {
            rule: if rule < sys.rules.len() { sys.rule_name(rule) } else { format!("#{rule}") },
            config: sys.config_name(config),
        });
    }
    let r = &sys.rules[rule];
    let mut word = config.word.clone();
    match r.op {
        ChannelOp::Send(x) => word.push(x),
        ChannelOp::Receive(_) => {
            word.remove(0);
        }
        ChannelOp::Nop => {}
    }
    Ok(loss.apply(&word).map(|w| Config { control: r.to, word: w }))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LcsState {
    Config(Config),
    Goal,
    Bad,
}

/// The try/restart embedding of an LCS.
#[derive(Debug, Clone)]
pub struct LcsEmbedding {
    sys: LcsSystem,
    loss: LossModel,
    sup_config_status: AvoidStatus,
}

pub fn embed_lcs(sys: LcsSystem, loss: LossModel) -> LcsEmbedding {
    let has_send = sys.rules.iter().any(|r| matches!(r.op, ChannelOp::Send(_)));
    let closure = sys.send_closure();
    let grows_from_restart = sys
        .rules
        .iter()
        .any(|r| closure[r.from] && matches!(r.op, ChannelOp::Send(_)));
    let sup_config_status = if grows_from_restart {
        AvoidStatus::No
    } else if !has_send {
        // channel stays empty, so `try` always lands in bad
        AvoidStatus::Yes
    } else {
        AvoidStatus::Unknown
    };
    LcsEmbedding {
        sys,
        loss,
        sup_config_status,
    }
}

impl LcsEmbedding {
    pub fn system(&self) -> &LcsSystem {
        &self.sys
    }

    pub fn loss(&self) -> &LossModel {
        &self.loss
    }

    fn rule_actions(&self, c: &Config) -> Vec<usize> {
        (0..self.sys.rules.len()).filter(|&i| self.sys.is_applicable(c, i)).collect()
    }
}

fn half_pow(n: usize) -> BigRational {
    BigRational::new(One::one(), num_bigint::BigInt::one() << n)
}

impl Mdp for LcsEmbedding {
    type State = LcsState;

    fn initial(&self) -> LcsState {
        LcsState::Config(self.sys.initial_config())
    }

    fn enabled(&self, s: &LcsState) -> Vec<ActionLabel> {
        match s {
            LcsState::Config(c) => {
                let mut names: Vec<String> = self.rule_actions(c).into_iter().map(|i| self.sys.rule_name(i)).collect();
                names.push("try".into());
                names.push("restart".into());
                ActionLabel::list(names)
            }
            _ => Vec::new(),
        }
    }

    fn successors(&self, s: &LcsState, a: &ActionLabel) -> Result<Distribution<LcsState>> {
        let enabled = self.enabled(s);
        check_enabled(&enabled, a, || self.state_name(s))?;
        let LcsState::Config(c) = s else { unreachable!("absorbing states have no actions") };
        let rules = self.rule_actions(c);
        if a.index < rules.len() {
            return Ok(lcs_step(&self.sys, &self.loss, c, rules[a.index])?.map(LcsState::Config));
        }
        if a.name == "try" {
            if c.word.is_empty() {
                return Ok(Distribution::dirac(LcsState::Bad));
            }
            let fail = half_pow(c.word.len());
            return Ok(Distribution::new(vec![
                (LcsState::Goal, Probability::Exact(BigRational::one() - &fail)),
                (LcsState::Bad, Probability::Exact(fail)),
            ]));
        }
        Ok(Distribution::dirac(LcsState::Config(self.sys.initial_config())))
    }

    fn is_goal(&self, s: &LcsState) -> bool {
        *s == LcsState::Goal
    }

    fn avoid_status(&self, s: &LcsState, opt: OptCriterion) -> AvoidStatus {
        match (s, opt) {
            (LcsState::Goal, _) => AvoidStatus::No,
            (LcsState::Bad, _) => AvoidStatus::Yes,
            // restarting forever never reaches the goal
            (LcsState::Config(_), OptCriterion::Inf) => AvoidStatus::Yes,
            (LcsState::Config(_), OptCriterion::Sup) => self.sup_config_status,
        }
    }

    fn flags(&self) -> ModelFlags {
        ModelFlags {
            finitely_action_branching: true,
            finite: false,
        }
    }

    fn state_name(&self, s: &LcsState) -> String {
        match s {
            LcsState::Config(c) => self.sys.config_name(c),
            LcsState::Goal => "goal".into(),
            LcsState::Bad => "bad".into(),
        }
    }
}

impl fmt::Display for LcsSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rules.len() {
            writeln!(f, "{}", self.rule_name(i))?;
        }
        Ok(())
    }
}
