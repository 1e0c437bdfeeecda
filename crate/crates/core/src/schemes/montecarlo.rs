use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Mdp, OptCriterion, PurePositionalScheduler, SimulationTable, TerminalReason};

/// Two-sided 95% normal quantile.
pub const WILSON_Z95: f64 = 1.959963984540054;

/// Trials per independently seeded stream. Fixed so that results do not
/// depend on the number of worker threads.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisivenessEstimate {
    pub estimate: f64,
    pub interval: (f64, f64),
    pub successes: u64,
    pub trials: u64,
}

/// Wilson score interval at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Fraction of sampled paths under `sched` that reach the goal or a
/// certified `opt`-avoid state within `horizon` steps, with a Wilson 95%
/// interval. Deterministic given `seed`.
pub fn estimate_decisiveness<M: Mdp>(
    model: &M,
    sched: &PurePositionalScheduler<M::State>,
    opt: OptCriterion,
    trials: u64,
    horizon: u64,
    seed: u64,
) -> Result<DecisivenessEstimate> {
    if trials == 0 || horizon == 0 {
        return Err(Error::InvalidParameter("trials and horizon must be positive".into()));
    }
    let chunks = trials.div_ceil(CHUNK);
    let successes = (0..chunks)
        .into_par_iter()
        .map(|k| -> Result<u64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut table = SimulationTable::new(model, sched, opt);
            let runs = CHUNK.min(trials - k * CHUNK);
            let mut hits = 0;
            for _ in 0..runs {
                if table.run(&mut rng, horizon, None)? != TerminalReason::HorizonExhausted {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(DecisivenessEstimate {
        estimate: successes as f64 / trials as f64,
        interval: wilson_interval(successes, trials, WILSON_Z95),
        successes,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::make_three_state;

    #[test]
    fn always_beta_resolves() {
        let m = make_three_state();
        let s = PurePositionalScheduler::always("beta");
        let e = estimate_decisiveness(&m, &s, OptCriterion::Sup, 1000, 5, 7).unwrap();
        assert_eq!(e.estimate, 1.0);
    }

    #[test]
    fn always_alpha_never_resolves() {
        let m = make_three_state();
        let s = PurePositionalScheduler::always("alpha");
        let e = estimate_decisiveness(&m, &s, OptCriterion::Sup, 100, 50, 7).unwrap();
        assert_eq!(e.estimate, 0.0);
    }

    #[test]
    fn gap_is_reported() {
        let m = make_three_state();
        let s: PurePositionalScheduler<usize> = PurePositionalScheduler::new();
        assert!(matches!(
            estimate_decisiveness(&m, &s, OptCriterion::Sup, 10, 5, 1),
            Err(Error::SchedulerGap(_))
        ));
    }

    #[test]
    fn wilson_known_value() {
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z95);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4, "{lo} {hi}");
    }

    #[test]
    fn reproducible() {
        let m = make_three_state();
        let s = PurePositionalScheduler::always("beta");
        let a = estimate_decisiveness(&m, &s, OptCriterion::Sup, 5000, 5, 3).unwrap();
        let b = estimate_decisiveness(&m, &s, OptCriterion::Sup, 5000, 5, 3).unwrap();
        assert_eq!(a, b);
    }
}
