use std::time::Instant;

use super::{BoundsTrace, SchemeOptions, SolveResult, Status, TraceRow};
use crate::error::{Error, Result};
use crate::model::{Mdp, OptCriterion};
use crate::solver::{bounded_reach, solve_reach_targets, BoundedObjective, ReachOptions};
use crate::transform::{collapse, slice, CollapsedView, LayeredArena};

struct Tracker {
    start: Instant,
    trace: BoundsTrace,
    lower: f64,
    upper: f64,
}

impl Tracker {
    fn new() -> Self {
        Tracker {
            start: Instant::now(),
            trace: BoundsTrace::default(),
            lower: 0.0,
            upper: 1.0,
        }
    }

    /// Records a row; the running max/min keeps the trace monotone.
    fn push(&mut self, n: usize, lower: f64, upper: f64, states: usize) {
        self.lower = self.lower.max(lower);
        self.upper = self.upper.min(upper).max(self.lower);
        self.trace.rows.push(TraceRow {
            n,
            lower: self.lower,
            upper: self.upper,
            states_explored: states,
            elapsed_millis: self.start.elapsed().as_millis() as u64,
        });
    }

    fn finish<M: Mdp>(self, view: &CollapsedView<'_, M>, converged: bool, scheme: u8, opts: &SchemeOptions) -> SolveResult {
        let certified = !view.saw_unknown();
        let status = match (converged, certified) {
            (true, true) => Status::Converged,
            (true, false) => Status::UpperNotCertified,
            (false, _) => Status::BudgetExhausted,
        };
        SolveResult {
            value: self.lower,
            value_interval: (self.lower, self.upper),
            status,
            upper_certified: certified,
            scheme,
            opt: view.opt(),
            epsilon: opts.eps,
            final_n: self.trace.rows.last().map_or(0, |r| r.n),
            trace: self.trace,
        }
    }
}

/// Scheme 1 with default options.
pub fn approx_scheme1<M: Mdp>(model: &M, opt: OptCriterion, eps: f64, max_n: usize) -> Result<SolveResult> {
    approx_scheme1_with(model, opt, &SchemeOptions::new(eps, max_n))
}

/// Layered backward induction on growing unfoldings of the collapsed model.
pub fn approx_scheme1_with<M: Mdp>(model: &M, opt: OptCriterion, opts: &SchemeOptions) -> Result<SolveResult> {
    opts.validate(model)?;
    let view = match collapse(model, opt) {
        Err(Error::TrivialZero) => return Ok(SolveResult::trivial_zero(1, opt, opts.eps)),
        other => other?,
    };
    let mut arena = LayeredArena::new(&view, opt, opts.state_cap);
    let mut t = Tracker::new();
    for n in opts.horizons() {
        arena.extend(n)?;
        let (lo, hi) = rayon::join(
            || bounded_reach(&arena, n, opt, BoundedObjective::ReachWithin),
            || bounded_reach(&arena, n, opt, BoundedObjective::ReachOrSurvive),
        );
        t.push(n, lo?, hi?, arena.num_states());
        if t.upper - t.lower <= opts.eps {
            return Ok(t.finish(&view, true, 1, opts));
        }
    }
    Ok(t.finish(&view, false, 1, opts))
}

/// Scheme 2 with default options (`inner_tol = eps / 10`).
pub fn approx_scheme2<M: Mdp>(model: &M, opt: OptCriterion, eps: f64, max_n: usize) -> Result<SolveResult> {
    approx_scheme2_with(model, opt, &SchemeOptions::new(eps, max_n))
}

/// Unbounded reachability on growing slices of the collapsed model. Both
/// inner brackets are widened outwards by the inner tolerance.
pub fn approx_scheme2_with<M: Mdp>(model: &M, opt: OptCriterion, opts: &SchemeOptions) -> Result<SolveResult> {
    opts.validate(model)?;
    let view = match collapse(model, opt) {
        Err(Error::TrivialZero) => return Ok(SolveResult::trivial_zero(2, opt, opts.eps)),
        other => other?,
    };
    let tol = opts.inner_tol();
    let ropts = ReachOptions {
        tol,
        budget: opts.inner_budget,
        all_states: false,
    };
    let mut arena = LayeredArena::new(&view, opt, opts.state_cap);
    let mut t = Tracker::new();
    for n in opts.horizons() {
        let sl = slice(&mut arena, n)?;
        let (lo, hi) = rayon::join(
            || solve_reach_targets(&sl.mdp, &sl.goal_only(), opt, &ropts),
            || solve_reach_targets(&sl.mdp, &sl.goal_or_bot(), opt, &ropts),
        );
        let q_minus = lo?.lower[0];
        let q_plus = hi?.upper[0];
        t.push(n, (q_minus - tol).max(0.0), (q_plus + tol).min(1.0), arena.num_states());
        if (q_plus + tol) - (q_minus - tol) <= opts.eps {
            return Ok(t.finish(&view, true, 2, opts));
        }
    }
    Ok(t.finish(&view, false, 2, opts))
}
