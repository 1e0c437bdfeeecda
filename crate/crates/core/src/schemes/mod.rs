//! The two approximation loops and the Monte-Carlo decisiveness estimator.
//!
//! Scheme 1 evaluates bounded unfoldings: `p_n^-` is the optimal
//! probability of reaching the goal within `n` steps, `p_n^+` adds the
//! probability of surviving `n` steps without hitting `bad^opt`. Scheme 2
//! solves the sliced finite MDP twice per `n`: towards the goal alone
//! (`q_n^-`) and towards the goal or the sink (`q_n^+`). Both stop once the
//! gap is below `eps`.

mod approx;
mod montecarlo;
mod refinement;

use serde::{Deserialize, Serialize};

pub use approx::{approx_scheme1, approx_scheme1_with, approx_scheme2, approx_scheme2_with};
pub use montecarlo::{estimate_decisiveness, wilson_interval, DecisivenessEstimate, WILSON_Z95};
pub use refinement::{refinement_check, RefinementReport, RefinementRow};

use crate::error::{Error, Result};
use crate::model::{Mdp, OptCriterion};
use crate::solver::DEFAULT_BACKUP_BUDGET;
use crate::transform::state_cap_from_env;

/// One row of a bounds trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub states_explored: usize,
    pub elapsed_millis: u64,
}

/// The sequence of bounds produced by a scheme. Lower bounds never
/// decrease and upper bounds never increase from row to row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundsTrace {
    pub rows: Vec<TraceRow>,
}

impl BoundsTrace {
    pub fn is_monotone(&self) -> bool {
        self.rows.iter().all(|r| r.lower <= r.upper)
            && self
                .rows
                .windows(2)
                .all(|w| w[0].lower <= w[1].lower && w[1].upper <= w[0].upper)
    }

    /// CSV rendering with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lower,upper,states_explored,elapsed_millis\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                sig12(r.lower),
                sig12(r.upper),
                r.states_explored,
                r.elapsed_millis
            ));
        }
        out
    }
}

/// Formats with 12 significant digits, trimming trailing zeros.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Converged,
    BudgetExhausted,
    TrivialZero,
    /// Gap closed, but some avoid statuses were unknown.
    UpperNotCertified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// The lower end of the interval.
    pub value: f64,
    pub value_interval: (f64, f64),
    pub status: Status,
    /// False when unknown avoid statuses were met on the way.
    pub upper_certified: bool,
    pub scheme: u8,
    pub opt: OptCriterion,
    pub epsilon: f64,
    pub final_n: usize,
    pub trace: BoundsTrace,
}

impl SolveResult {
    fn trivial_zero(scheme: u8, opt: OptCriterion, eps: f64) -> Self {
        SolveResult {
            value: 0.0,
            value_interval: (0.0, 0.0),
            status: Status::TrivialZero,
            upper_certified: true,
            scheme,
            opt,
            epsilon: eps,
            final_n: 0,
            trace: BoundsTrace::default(),
        }
    }

    pub fn gap(&self) -> f64 {
        self.value_interval.1 - self.value_interval.0
    }
}

/// Loop parameters shared by both schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOptions {
    pub eps: f64,
    pub max_n: usize,
    /// Inner solve tolerance of scheme 2; `eps / 10` when unset.
    pub inner_tol: Option<f64>,
    /// Double `n` instead of incrementing it.
    pub geometric: bool,
    pub state_cap: usize,
    pub inner_budget: u64,
}

impl SchemeOptions {
    pub fn new(eps: f64, max_n: usize) -> Self {
        SchemeOptions {
            eps,
            max_n,
            inner_tol: None,
            geometric: false,
            state_cap: state_cap_from_env(),
            inner_budget: DEFAULT_BACKUP_BUDGET,
        }
    }

    pub fn inner_tol(&self) -> f64 {
        self.inner_tol.unwrap_or(self.eps / 10.0)
    }

    fn validate<M: Mdp>(&self, model: &M) -> Result<()> {
        if !model.flags().finitely_action_branching {
            return Err(Error::NotFinitelyBranching);
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0,1), got {}", self.eps)));
        }
        if self.max_n == 0 {
            return Err(Error::InvalidParameter("max horizon must be positive".into()));
        }
        if !(self.inner_tol() > 0.0) {
            return Err(Error::InvalidParameter("inner tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Horizons visited by the loop: `1, 2, 3, ...` or `1, 2, 4, ...`,
    /// ending at `max_n`.
    pub fn horizons(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut n = 1;
        loop {
            out.push(n);
            if n >= self.max_n {
                return out;
            }
            n = if self.geometric { (2 * n).min(self.max_n) } else { n + 1 };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizons() {
        let mut o = SchemeOptions::new(0.1, 5);
        assert_eq!(o.horizons(), [1, 2, 3, 4, 5]);
        o.geometric = true;
        assert_eq!(o.horizons(), [1, 2, 4, 5]);
        o.max_n = 1;
        assert_eq!(o.horizons(), [1]);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0 * 1e-5), "0.00000666666666667");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn csv_header() {
        let t = BoundsTrace {
            rows: vec![TraceRow {
                n: 1,
                lower: 0.5,
                upper: 1.0,
                states_explored: 3,
                elapsed_millis: 0,
            }],
        };
        assert_eq!(t.to_csv(), "n,lower,upper,states_explored,elapsed_millis\n1,0.5,1,3,0\n");
    }
}
