//! Unbounded reachability on finite MDPs: qualitative precomputation, then
//! interval iteration from below and above.
//!
//! For `sup`, the maximal end components of the undecided region are
//! quotiented before iterating so that the from-above sequence converges to
//! the value rather than to a larger fixpoint. For `inf`, clamping the
//! sure-avoid set to 0 already leaves a unique fixpoint.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{FiniteMdp, OptCriterion};
use crate::sparse::{almost_sure_max, almost_sure_min, can_reach, mecs, sure_avoid, Reverse, Sparse};

/// Default backup budget of the interval iteration.
pub const DEFAULT_BACKUP_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachOptions {
    /// Stop once `upper - lower < tol` (at the initial state, or at every
    /// state when `all_states` is set).
    pub tol: f64,
    pub budget: u64,
    pub all_states: bool,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            tol: 1e-9,
            budget: DEFAULT_BACKUP_BUDGET,
            all_states: false,
        }
    }
}

impl ReachOptions {
    pub fn with_tol(tol: f64) -> Self {
        ReachOptions {
            tol,
            ..Default::default()
        }
    }
}

/// A certified enclosure `lower <= value <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lower - slack <= x && x <= self.upper + slack
    }
}

/// Per-state brackets of a reachability solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachSolution {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// States with value 0.
    pub zero: Vec<bool>,
    /// States with value 1.
    pub one: Vec<bool>,
    pub backups: u64,
}

impl ReachSolution {
    pub fn at(&self, s: usize) -> Bracket {
        Bracket {
            lower: self.lower[s],
            upper: self.upper[s],
        }
    }
}

pub(crate) fn qualitative_masks(sp: &Sparse, rev: &Reverse, targets: &[bool], opt: OptCriterion) -> (Vec<bool>, Vec<bool>) {
    match opt {
        OptCriterion::Sup => {
            let zero = can_reach(sp, rev, targets).into_iter().map(|r| !r).collect();
            (zero, almost_sure_max(sp, rev, targets))
        }
        OptCriterion::Inf => {
            let zero = sure_avoid(sp, rev, targets);
            let one = almost_sure_min(sp, rev, targets, &zero);
            (zero, one)
        }
    }
}

/// States with optimal value exactly 0 and exactly 1.
pub fn qualitative_states(m: &FiniteMdp, opt: OptCriterion) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let sp = Sparse::from_finite(m);
    let rev = sp.reverse();
    let (zero, one) = qualitative_masks(&sp, &rev, &goal_mask(m), opt);
    let set = |v: Vec<bool>| v.into_iter().enumerate().filter_map(|(s, b)| b.then_some(s)).collect();
    (set(zero), set(one))
}

pub(crate) fn goal_mask(m: &FiniteMdp) -> Vec<bool> {
    let mut t = vec![false; m.num_states()];
    t[m.goal()] = true;
    t
}

/// Brackets the optimal probability of reaching the goal from the initial
/// state, to within `tol`.
pub fn solve_reach_finite(m: &FiniteMdp, opt: OptCriterion, tol: f64) -> Result<Bracket> {
    let sol = solve_reach_targets(m, &goal_mask(m), opt, &ReachOptions::with_tol(tol))?;
    Ok(sol.at(m.initial_state()))
}

struct Choice {
    constant: f64,
    start: u32,
    end: u32,
}

/// Interval iteration for reaching the `targets` set.
pub fn solve_reach_targets(m: &FiniteMdp, targets: &[bool], opt: OptCriterion, opts: &ReachOptions) -> Result<ReachSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let sp = Sparse::from_finite(m);
    let rev = sp.reverse();
    let n = sp.n;
    let (zero, one) = qualitative_masks(&sp, &rev, targets, opt);
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut unknown = vec![false; n];
    for s in 0..n {
        if one[s] {
            lower[s] = 1.0;
            upper[s] = 1.0;
        } else if !zero[s] {
            unknown[s] = true;
            upper[s] = 1.0;
        }
    }

    // region to iterate on, in breadth-first order from the initial state
    let init = m.initial_state();
    let mut order: Vec<usize> = Vec::new();
    let mut in_region = vec![false; n];
    let visit = |s: usize, order: &mut Vec<usize>, in_region: &mut Vec<bool>| {
        if unknown[s] && !in_region[s] {
            in_region[s] = true;
            order.push(s);
        }
    };
    visit(init, &mut order, &mut in_region);
    let mut head = 0;
    loop {
        while head < order.len() {
            let s = order[head];
            head += 1;
            for c in sp.choices(s) {
                for &t in sp.support(c) {
                    visit(t as usize, &mut order, &mut in_region);
                }
            }
        }
        if !opts.all_states {
            break;
        }
        match (0..n).find(|&s| unknown[s] && !in_region[s]) {
            Some(s) => visit(s, &mut order, &mut in_region),
            None => break,
        }
    }
    if order.is_empty() {
        return Ok(ReachSolution {
            lower,
            upper,
            zero,
            one,
            backups: 0,
        });
    }

    // node per region state, or per maximal end component for sup
    const NONE: u32 = u32::MAX;
    let mut node_of = vec![NONE; n];
    let mut mec_of = vec![NONE; n];
    if opt == OptCriterion::Sup {
        for (k, mec) in mecs(&sp, &in_region, targets).iter().enumerate() {
            for &s in &mec.states {
                mec_of[s as usize] = k as u32;
            }
        }
    }
    let mut node_count = 0u32;
    let mut mec_node: Vec<u32> = Vec::new();
    for &s in &order {
        let k = mec_of[s];
        if k == NONE {
            node_of[s] = node_count;
            node_count += 1;
        } else {
            if mec_node.len() <= k as usize {
                mec_node.resize(k as usize + 1, NONE);
            }
            if mec_node[k as usize] == NONE {
                mec_node[k as usize] = node_count;
                node_count += 1;
            }
            node_of[s] = mec_node[k as usize];
        }
    }
    let nodes = node_count as usize;
    let mut node_choices: Vec<Vec<Choice>> = (0..nodes).map(|_| Vec::new()).collect();
    let mut ent_node: Vec<u32> = Vec::new();
    let mut ent_prob: Vec<f64> = Vec::new();
    for &s in &order {
        let k = mec_of[s];
        for c in sp.choices(s) {
            if k != NONE && sp.support(c).iter().all(|&t| mec_of[t as usize] == k) {
                continue;
            }
            let start = ent_node.len() as u32;
            let mut constant = 0.0;
            for e in sp.entries(c) {
                let t = sp.succ[e] as usize;
                if in_region[t] {
                    ent_node.push(node_of[t]);
                    ent_prob.push(sp.prob[e]);
                } else {
                    constant += sp.prob[e] * lower[t];
                }
            }
            node_choices[node_of[s] as usize].push(Choice {
                constant,
                start,
                end: ent_node.len() as u32,
            });
        }
    }

    let mut lo = vec![0.0f64; nodes];
    let mut hi = vec![1.0f64; nodes];
    let init_node = node_of[init];
    let mut backups = 0u64;
    let worst = match opt {
        OptCriterion::Sup => f64::NEG_INFINITY,
        OptCriterion::Inf => f64::INFINITY,
    };
    let mut forward = false;
    loop {
        forward = !forward;
        for i in 0..nodes {
            let v = if forward { i } else { nodes - 1 - i };
            let choices = &node_choices[v];
            if choices.is_empty() {
                lo[v] = 0.0;
                hi[v] = 0.0;
                continue;
            }
            let (mut best_lo, mut best_hi) = (worst, worst);
            for ch in choices {
                let (mut a, mut b) = (ch.constant, ch.constant);
                for e in ch.start as usize..ch.end as usize {
                    let t = ent_node[e] as usize;
                    a += ent_prob[e] * lo[t];
                    b += ent_prob[e] * hi[t];
                }
                best_lo = opt.pick(best_lo, a);
                best_hi = opt.pick(best_hi, b);
            }
            // monotone iterates: never undo progress through rounding
            lo[v] = lo[v].max(best_lo.min(1.0));
            hi[v] = hi[v].min(best_hi.max(0.0));
        }
        backups += nodes as u64;
        let done = if opts.all_states {
            (0..nodes).all(|v| hi[v] - lo[v] < opts.tol)
        } else {
            init_node == NONE || hi[init_node as usize] - lo[init_node as usize] < opts.tol
        };
        if done {
            break;
        }
        if backups > opts.budget {
            return Err(Error::IterationBudgetExceeded(opts.budget));
        }
    }
    for &s in &order {
        let v = node_of[s] as usize;
        lower[s] = lo[v];
        upper[s] = hi[v];
    }
    Ok(ReachSolution {
        lower,
        upper,
        zero,
        one,
        backups,
    })
}
