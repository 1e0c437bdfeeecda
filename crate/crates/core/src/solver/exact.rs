//! Exact rational values: chain solving by Gaussian elimination, the
//! enumerating oracle over pure positional schedulers, and a certified
//! route for models too large to enumerate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::reach::{goal_mask, solve_reach_targets, ReachOptions};
use crate::error::{Error, Result};
use crate::model::{ratio_to_f64, FiniteMdp, OptCriterion, PurePositionalScheduler};
use crate::sparse::{can_reach, sure_avoid, Sparse};

/// Default cap on the number of enumerated schedulers.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// An exact optimal value with a pure positional witness.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactValue {
    pub value: BigRational,
    /// Chosen action index per state (`None` at targets and dead ends).
    pub choice: Vec<Option<usize>>,
    pub witness: PurePositionalScheduler<usize>,
}

impl ExactValue {
    fn new(m: &FiniteMdp, value: BigRational, choice: Vec<Option<usize>>) -> Self {
        let mut witness = PurePositionalScheduler::new();
        for (s, c) in choice.iter().enumerate() {
            if let Some(a) = c {
                witness.set(s, m.actions(s)[*a].name.clone());
            }
        }
        ExactValue { value, choice, witness }
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.value)
    }
}

/// Per state, per action: the exact successor row.
type Rows = Vec<Vec<Vec<(usize, BigRational)>>>;

fn exact_rows(m: &FiniteMdp) -> Result<Rows> {
    (0..m.num_states())
        .map(|s| {
            m.actions(s)
                .iter()
                .map(|a| {
                    a.dist
                        .iter()
                        .map(|(t, p)| p.as_exact().map(|r| (*t, r.clone())).ok_or(Error::InexactModel))
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn bits(r: &BigRational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Solves `x = A x + b` restricted to `vars`, where `A`/`b` come from the
/// chosen rows. `vars` must be exactly the non-target states that reach a
/// target in the chain, so the system is nonsingular.
fn solve_linear(rows: &[Vec<(usize, BigRational)>], vars: &[usize], index: &[usize], targets: &[bool]) -> Vec<BigRational> {
    let k = vars.len();
    // augmented matrix of (I - A) | b
    let mut mat: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); k + 1]; k];
    for (i, &s) in vars.iter().enumerate() {
        mat[i][i] = BigRational::one();
        for (t, p) in &rows[s] {
            if targets[*t] {
                mat[i][k] += p;
            } else if index[*t] != usize::MAX {
                mat[i][index[*t]] -= p;
            }
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .filter(|&r| !mat[r][col].is_zero())
            .min_by_key(|&r| bits(&mat[r][col]))
            .expect("chain system is nonsingular");
        mat.swap(col, pivot);
        let inv = mat[col][col].recip();
        for j in col..=k {
            let v = &mat[col][j] * &inv;
            mat[col][j] = v;
        }
        for r in 0..k {
            if r == col || mat[r][col].is_zero() {
                continue;
            }
            let f = mat[r][col].clone();
            for j in col..=k {
                if mat[col][j].is_zero() {
                    continue;
                }
                let d = &f * &mat[col][j];
                mat[r][j] -= d;
            }
        }
    }
    mat.into_iter().map(|mut row| row.pop().expect("augmented column")).collect()
}

/// Exact reach probabilities of `targets` in the chain induced by `choice`.
/// With `from = Some(s)` only the part reachable from `s` is solved (other
/// entries are left at 0); with `None` every state is solved.
pub fn exact_chain_value(m: &FiniteMdp, targets: &[bool], choice: &[Option<usize>], from: Option<usize>) -> Result<Vec<BigRational>> {
    let rows = exact_rows(m)?;
    chain_value(&rows, targets, choice, from)
}

fn chain_value(
    rows: &Rows,
    targets: &[bool],
    choice: &[Option<usize>],
    from: Option<usize>,
) -> Result<Vec<BigRational>> {
    let n = rows.len();
    let row_of = |s: usize| -> &[(usize, BigRational)] {
        match choice[s] {
            Some(a) if !targets[s] => &rows[s][a],
            _ => &[],
        }
    };
    let mut live = vec![from.is_none(); n];
    if let Some(s0) = from {
        let mut stack = vec![s0];
        live[s0] = true;
        while let Some(s) = stack.pop() {
            for (t, _) in row_of(s) {
                if !live[*t] {
                    live[*t] = true;
                    stack.push(*t);
                }
            }
        }
    }
    // backward reachability of the targets inside the chain
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        if live[s] {
            for (t, _) in row_of(s) {
                preds[*t].push(s);
            }
        }
    }
    let mut reach = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&s| live[s] && targets[s]).collect();
    for &s in &stack {
        reach[s] = true;
    }
    while let Some(t) = stack.pop() {
        for &s in &preds[t] {
            if !reach[s] {
                reach[s] = true;
                stack.push(s);
            }
        }
    }
    let vars: Vec<usize> = (0..n).filter(|&s| live[s] && reach[s] && !targets[s]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &s) in vars.iter().enumerate() {
        index[s] = i;
    }
    let chosen: Vec<Vec<(usize, BigRational)>> = (0..n).map(|s| row_of(s).to_vec()).collect();
    let sol = solve_linear(&chosen, &vars, &index, targets);
    let mut out = vec![BigRational::zero(); n];
    for s in 0..n {
        if targets[s] && live[s] {
            out[s] = BigRational::one();
        }
    }
    for (i, &s) in vars.iter().enumerate() {
        out[s] = sol[i].clone();
    }
    Ok(out)
}

/// Optimal probability of reaching the goal, by enumerating every pure
/// positional scheduler and solving each induced chain exactly.
pub fn exact_oracle(m: &FiniteMdp, opt: OptCriterion) -> Result<ExactValue> {
    exact_oracle_targets(m, &goal_mask(m), opt, DEFAULT_ENUMERATION_CAP)
}

/// As [`exact_oracle`] for an arbitrary target set and enumeration cap.
///
/// Only states that matter are enumerated: reachable, non-target, able to
/// reach a target, with more than one action. Ties keep the
/// lexicographically smallest assignment (first state most significant).
pub fn exact_oracle_targets(m: &FiniteMdp, targets: &[bool], opt: OptCriterion, cap: u128) -> Result<ExactValue> {
    let rows = exact_rows(m)?;
    let sp = Sparse::from_finite(m);
    let rev = sp.reverse();
    let reaches = can_reach(&sp, &rev, targets);
    let n = m.num_states();
    let init = m.initial_state();

    let mut seen = vec![false; n];
    seen[init] = true;
    let mut stack = vec![init];
    while let Some(s) = stack.pop() {
        if targets[s] {
            continue;
        }
        for c in sp.choices(s) {
            for &t in sp.support(c) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t as usize);
                }
            }
        }
    }
    let base: Vec<Option<usize>> = (0..n)
        .map(|s| (!targets[s] && !rows[s].is_empty()).then_some(0))
        .collect();
    let relevant: Vec<usize> = (0..n)
        .filter(|&s| seen[s] && !targets[s] && reaches[s] && rows[s].len() > 1)
        .collect();
    let radix: Vec<u128> = relevant.iter().map(|&s| rows[s].len() as u128).collect();
    let mut count: u128 = 1;
    for r in &radix {
        count = count.saturating_mul(*r);
        if count > cap {
            return Err(Error::EnumerationTooLarge { count, cap });
        }
    }

    let decode = |mut idx: u128| {
        let mut choice = base.clone();
        for (k, &s) in relevant.iter().enumerate().rev() {
            choice[s] = Some((idx % radix[k]) as usize);
            idx /= radix[k];
        }
        choice
    };
    let evaluate = |idx: u128| -> Result<(BigRational, u128)> {
        let v = chain_value(&rows, targets, &decode(idx), Some(init))?;
        Ok((v[init].clone(), idx))
    };
    let better = |a: (BigRational, u128), b: (BigRational, u128)| {
        if opt.improves(&b.0, &a.0) || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let best = (0..count as u64)
        .into_par_iter()
        .map(|i| evaluate(i as u128))
        .try_reduce_with(|a, b| Ok(better(a, b)))
        .expect("at least one scheduler")?;
    Ok(ExactValue::new(m, best.0, decode(best.1)))
}

/// Exact optimal value without enumeration.
///
/// A float solve yields a near-optimal pure positional scheduler (for `sup`,
/// ties are broken towards the targets so that no end component traps the
/// play). Its exact value is then checked to be a fixpoint of the Bellman
/// operator. For `sup` any fixpoint dominates the least one, which is the
/// value, while no scheduler beats the value. For `inf` the fixpoint that
/// vanishes on the sure-avoid set is unique. Either way a passing check
/// proves optimality. Fails with `CertificateFailed` if no tried threshold
/// yields a certified scheduler.
pub fn exact_certified(m: &FiniteMdp, targets: &[bool], opt: OptCriterion) -> Result<ExactValue> {
    let rows = exact_rows(m)?;
    let sp = Sparse::from_finite(m);
    let rev = sp.reverse();
    let n = m.num_states();
    let opts = ReachOptions {
        tol: 1e-13,
        all_states: true,
        ..Default::default()
    };
    let sol = solve_reach_targets(m, targets, opt, &opts)?;
    let mid: Vec<f64> = (0..n).map(|s| 0.5 * (sol.lower[s] + sol.upper[s])).collect();
    let q = |c: usize| -> f64 { sp.entries(c).map(|e| sp.prob[e] * mid[sp.succ[e] as usize]).sum() };
    let safe = match opt {
        OptCriterion::Inf => sure_avoid(&sp, &rev, targets),
        OptCriterion::Sup => vec![false; n],
    };

    for delta in [1e-7, 1e-9, 1e-11, 0.0] {
        let mut choice: Vec<Option<usize>> = vec![None; n];
        match opt {
            OptCriterion::Inf => {
                for s in 0..n {
                    if targets[s] || sp.choices(s).is_empty() {
                        continue;
                    }
                    let first = sp.choices(s).start;
                    let pick = if safe[s] {
                        sp.choices(s).find(|&c| sp.support(c).iter().all(|&t| safe[t as usize]))
                    } else {
                        sp.choices(s).min_by(|&a, &b| q(a).total_cmp(&q(b)))
                    };
                    choice[s] = pick.map(|c| c - first);
                }
            }
            OptCriterion::Sup => {
                // candidates: near-optimal actions, or the value-1 ones
                let candidate = |s: usize, c: usize| -> bool {
                    if sol.one[s] {
                        sp.support(c).iter().all(|&t| sol.one[t as usize])
                    } else {
                        let best = sp.choices(s).map(q).fold(f64::NEG_INFINITY, f64::max);
                        q(c) >= best - delta
                    }
                };
                let mut ranked = targets.to_vec();
                let mut frontier: Vec<usize> = (0..n).filter(|&s| targets[s]).collect();
                while !frontier.is_empty() {
                    let mut next = Vec::new();
                    for &t in &frontier {
                        for &c in rev.preds(t) {
                            let c = c as usize;
                            let s = sp.owner[c] as usize;
                            if ranked[s] || sol.zero[s] || !candidate(s, c) {
                                continue;
                            }
                            ranked[s] = true;
                            choice[s] = Some(c - sp.choices(s).start);
                            next.push(s);
                        }
                    }
                    frontier = next;
                }
                for s in 0..n {
                    if choice[s].is_none() && !targets[s] && !sp.choices(s).is_empty() {
                        let first = sp.choices(s).start;
                        let c = sp.choices(s).max_by(|&a, &b| q(a).total_cmp(&q(b))).expect("nonempty");
                        choice[s] = Some(c - first);
                    }
                }
            }
        }
        let v = chain_value(&rows, targets, &choice, None)?;
        if is_fixpoint(&rows, targets, &v, opt) && (opt == OptCriterion::Sup || (0..n).all(|s| !safe[s] || v[s].is_zero())) {
            let value = v[m.initial_state()].clone();
            return Ok(ExactValue::new(m, value, choice));
        }
    }
    Err(Error::CertificateFailed(format!(
        "no near-optimal scheduler passed the exact {opt} fixpoint check"
    )))
}

fn is_fixpoint(rows: &Rows, targets: &[bool], v: &[BigRational], opt: OptCriterion) -> bool {
    (0..rows.len()).all(|s| {
        if targets[s] {
            return v[s].is_one();
        }
        let mut best: Option<BigRational> = None;
        for row in &rows[s] {
            let mut acc = BigRational::zero();
            for (t, p) in row {
                acc += p * &v[*t];
            }
            best = Some(match best {
                Some(b) if !opt.improves(&acc, &b) => b,
                _ => acc,
            });
        }
        best.unwrap_or_else(BigRational::zero) == v[s]
    })
}

/// Exact rational from a ratio of machine integers.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
