//! Command implementations. Each returns the text to print and the exit
//! code; nothing here writes to stdout directly.

use std::collections::BTreeMap;
use std::path::Path;

use mdpdec::model::{simulate_with, FiniteMdp, Mdp, OptCriterion, PurePositionalScheduler};
use mdpdec::schemes::{approx_scheme1_with, approx_scheme2_with, estimate_decisiveness, SchemeOptions, SolveResult, Status};
use mdpdec::solver::{
    check_sup_decisive_finite, exact_certified, exact_oracle, goal_targets, mec_decomposition, solve_reach_finite,
    ExactValue,
};
use mdpdec::transform::{compute_avoid_finite, state_cap_from_env};
use mdpdec::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, ModelSource, RunConfig};
use crate::error::{CliError, EXIT_NOT_CONVERGED};
use crate::with_model;

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub fn exit_code(status: Status) -> u8 {
    match status {
        Status::BudgetExhausted => EXIT_NOT_CONVERGED,
        Status::Converged | Status::TrivialZero | Status::UpperNotCertified => 0,
    }
}

/// Runs one of the two schemes.
pub fn solve_result(cfg: &RunConfig) -> Result<SolveResult, CliError> {
    cfg.validate()?;
    let model = cfg.source.load(cfg.numeric)?;
    let mut opts = SchemeOptions::new(cfg.epsilon, cfg.max_horizon);
    opts.inner_tol = cfg.inner_tol;
    opts.geometric = cfg.geometric;
    opts.state_cap = state_cap_from_env();
    let res = with_model!(model, m => match cfg.scheme {
        1 => approx_scheme1_with(&m, cfg.opt, &opts),
        _ => approx_scheme2_with(&m, cfg.opt, &opts),
    })?;
    Ok(res)
}

pub fn solve(cfg: &RunConfig) -> Result<Output, CliError> {
    let res = solve_result(cfg)?;
    if let Some(path) = &cfg.trace {
        write_file(path, &res.trace.to_csv())?;
    }
    let text = match cfg.format {
        Format::Json => pretty(&json!({
            "model": cfg.source.describe(),
            "seed": cfg.seed,
            "inner_tol": if cfg.scheme == 2 { Some(cfg.inner_tol.unwrap_or(cfg.epsilon / 10.0)) } else { None },
            "max_horizon": cfg.max_horizon,
            "geometric": cfg.geometric,
            "result": res,
        })),
        Format::Text => solve_text(cfg, &res),
    };
    Ok(Output {
        text,
        code: exit_code(res.status),
    })
}

fn solve_text(cfg: &RunConfig, r: &SolveResult) -> String {
    let mut s = format!(
        "model: {}\nscheme {} ({}), epsilon {}\nstatus: {:?}\nvalue: {}\ninterval: [{}, {}]\nfinal n: {}\n",
        cfg.source.describe(),
        r.scheme,
        r.opt,
        r.epsilon,
        r.status,
        r.value,
        r.value_interval.0,
        r.value_interval.1,
        r.final_n
    );
    if !r.upper_certified {
        s.push_str("warning: some avoid statuses were unknown; the upper bound is not certified\n");
    }
    s
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn load_finite(path: &Path) -> Result<FiniteMdp, CliError> {
    ModelSource::File(path.to_path_buf()).load(None)?.into_finite()
}

fn witness_json(m: &FiniteMdp, v: &ExactValue) -> Value {
    let map: BTreeMap<&str, &str> = v
        .choice
        .iter()
        .enumerate()
        .filter_map(|(s, c)| c.map(|a| (m.name(s), m.actions(s)[a].name.as_str())))
        .collect();
    json!(map)
}

pub fn solve_finite(path: &Path, opt: OptCriterion, tol: f64, exact: bool) -> Result<Output, CliError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let m = load_finite(path)?;
    if !exact {
        let b = solve_reach_finite(&m, opt, tol)?;
        return Ok(Output::ok(pretty(&json!({"opt": opt, "lower": b.lower, "upper": b.upper}))));
    }
    let (v, method) = match exact_oracle(&m, opt) {
        Ok(v) => (v, "enumeration"),
        Err(Error::EnumerationTooLarge { .. }) => (exact_certified(&m, &goal_targets(&m), opt)?, "certified"),
        Err(e) => return Err(e.into()),
    };
    Ok(Output::ok(pretty(&json!({
        "opt": opt,
        "value": v.value.to_string(),
        "value_float": v.to_f64(),
        "method": method,
        "witness": witness_json(&m, &v),
    }))))
}

pub fn avoid(path: &Path, opt: OptCriterion) -> Result<Output, CliError> {
    let m = load_finite(path)?;
    let names: Vec<&str> = compute_avoid_finite(&m, opt).into_iter().map(|s| m.name(s)).collect();
    Ok(Output::ok(pretty(&names)))
}

pub fn check(path: &Path, format: Format) -> Result<Output, CliError> {
    let m = load_finite(path)?;
    let r = check_sup_decisive_finite(&m);
    Ok(Output::ok(match format {
        Format::Json => pretty(&r),
        Format::Text => r.diagnosis,
    }))
}

pub fn mec(path: &Path) -> Result<Output, CliError> {
    let m = load_finite(path)?;
    let list: Vec<Value> = mec_decomposition(&m)
        .iter()
        .map(|c| {
            let actions: BTreeMap<&str, Vec<&str>> = c
                .states
                .iter()
                .zip(&c.actions)
                .map(|(&s, acts)| (m.name(s), acts.iter().map(|&a| m.actions(s)[a].name.as_str()).collect()))
                .collect();
            json!({
                "states": c.states.iter().map(|&s| m.name(s)).collect::<Vec<_>>(),
                "actions": actions,
            })
        })
        .collect();
    Ok(Output::ok(pretty(&list)))
}

/// Options of the `simulate` command.
#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub source: ModelSource,
    pub opt: OptCriterion,
    pub always: Option<String>,
    pub scheduler: Option<std::path::PathBuf>,
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
    pub show_path: bool,
}

fn finite_scheduler(m: &FiniteMdp, always: Option<&str>, file: Option<&Path>) -> Result<PurePositionalScheduler<usize>, CliError> {
    let mut sched = match always {
        Some(a) => PurePositionalScheduler::always(a),
        None => PurePositionalScheduler::new(),
    };
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let map: BTreeMap<String, String> =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("scheduler file: {e}")))?;
        for (state, action) in map {
            let s = m
                .state_index(&state)
                .ok_or_else(|| CliError::Usage(format!("scheduler names unknown state `{state}`")))?;
            sched.set(s, action);
        }
    }
    Ok(sched)
}

fn simulate_on<M: Mdp>(m: &M, sched: &PurePositionalScheduler<M::State>, cfg: &SimulateConfig) -> Result<Value, CliError> {
    let est = estimate_decisiveness(m, sched, cfg.opt, cfg.trials, cfg.horizon, cfg.seed)?;
    let mut out = json!({
        "model": cfg.source.describe(),
        "opt": cfg.opt,
        "trials": cfg.trials,
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "estimate": est,
    });
    if cfg.show_path {
        let path = simulate_with(m, sched, cfg.horizon, cfg.seed, cfg.opt)?;
        out["path"] = json!({
            "states": path.states.iter().map(|s| m.state_name(s)).collect::<Vec<_>>(),
            "terminal_reason": path.terminal_reason,
        });
    }
    Ok(out)
}

pub fn simulate_value(cfg: &SimulateConfig) -> Result<Value, CliError> {
    let model = cfg.source.load(None)?;
    match model {
        crate::config::AnyModel::Finite(m) => {
            let sched = finite_scheduler(&m, cfg.always.as_deref(), cfg.scheduler.as_deref())?;
            simulate_on(&m, &sched, cfg)
        }
        other => {
            if cfg.scheduler.is_some() {
                return Err(CliError::Usage("--scheduler files apply to finite models only; use --always".into()));
            }
            let action = cfg
                .always
                .clone()
                .ok_or_else(|| CliError::Usage("infinite models need --always ACTION".into()))?;
            with_model!(other, m => simulate_on(&m, &PurePositionalScheduler::always(action), cfg))
        }
    }
}

pub fn simulate(cfg: &SimulateConfig) -> Result<Output, CliError> {
    Ok(Output::ok(pretty(&simulate_value(cfg)?)))
}
