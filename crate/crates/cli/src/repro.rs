//! Reproduction scenarios. The manifest ships inside the binary; each entry
//! pairs one or more runs with the outcome they must show.

use std::path::Path;

use mdpdec::model::OptCriterion;
use mdpdec::schemes::{SolveResult, Status};
use rayon::prelude::*;
use serde::Deserialize;

use crate::config::{ModelSource, RunConfig};
use crate::error::CliError;
use crate::run::{simulate_value, solve_result, write_file, SimulateConfig};

const MANIFEST: &str = include_str!("../repro/manifest.json");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// The example the scenario exercises.
    pub anchor: String,
    #[serde(default)]
    solves: Vec<RunConfig>,
    #[serde(default)]
    simulate: Option<SimulateSpec>,
    expect: Vec<Expect>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateSpec {
    source: ModelSource,
    opt: OptCriterion,
    always: String,
    trials: u64,
    horizon: u64,
    seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Near {
    value: f64,
    tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Interval {
    lower: f64,
    upper: f64,
    tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Range {
    low: f64,
    high: f64,
}

/// Expected outcome descriptors. Solve checks apply to every run.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Expect {
    Status(Status),
    Rows(usize),
    FinalInterval(Interval),
    ValueNear(Near),
    /// Values of all runs pairwise within the tolerance.
    Agree(f64),
    GapAtLeast(f64),
    UpperAll(Near),
    LowerAtMost(f64),
    LowerExceeds(f64),
    EstimateWithin(Range),
}

pub fn scenarios() -> Vec<Scenario> {
    let m: Manifest = serde_json::from_str(MANIFEST).expect("shipped manifest parses");
    m.scenarios
}

pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check_solves(expect: &[Expect], runs: &[SolveResult]) -> Vec<String> {
    let mut failures = Vec::new();
    for e in expect {
        for (k, r) in runs.iter().enumerate() {
            let rows = &r.trace.rows;
            let bad = match e {
                Expect::Status(s) => (r.status != *s).then(|| format!("status {:?}", r.status)),
                Expect::Rows(n) => (rows.len() != *n).then(|| format!("{} rows", rows.len())),
                Expect::FinalInterval(i) => {
                    let (lo, hi) = r.value_interval;
                    ((lo - i.lower).abs() > i.tol || (hi - i.upper).abs() > i.tol).then(|| format!("interval [{lo}, {hi}]"))
                }
                Expect::ValueNear(n) => ((r.value - n.value).abs() > n.tol).then(|| format!("value {}", r.value)),
                Expect::GapAtLeast(g) => (r.gap() < *g).then(|| format!("gap {}", r.gap())),
                Expect::UpperAll(n) => rows
                    .iter()
                    .find(|row| (row.upper - n.value).abs() > n.tol)
                    .map(|row| format!("upper {} at n={}", row.upper, row.n)),
                Expect::LowerAtMost(v) => rows
                    .iter()
                    .find(|row| row.lower > *v)
                    .map(|row| format!("lower {} at n={}", row.lower, row.n)),
                Expect::LowerExceeds(v) => (!rows.iter().any(|row| row.lower > *v))
                    .then(|| format!("best lower {}", r.value_interval.0)),
                Expect::Agree(_) | Expect::EstimateWithin(_) => None,
            };
            if let Some(msg) = bad {
                failures.push(format!("run {}: {msg}", k + 1));
            }
        }
        if let Expect::Agree(tol) = e {
            for a in runs {
                for b in runs {
                    if (a.value - b.value).abs() > *tol {
                        failures.push(format!("values {} and {} differ", a.value, b.value));
                    }
                }
            }
        }
    }
    failures
}

fn run_scenario(sc: &Scenario, out_dir: Option<&Path>) -> Result<Verdict, CliError> {
    let mut runs = Vec::new();
    for (k, cfg) in sc.solves.iter().enumerate() {
        let res = solve_result(cfg)?;
        if let Some(dir) = out_dir {
            write_file(&dir.join(format!("{}-{}.csv", sc.name, k + 1)), &res.trace.to_csv())?;
            let json = serde_json::to_string_pretty(&res).expect("serializable");
            write_file(&dir.join(format!("{}-{}.json", sc.name, k + 1)), &json)?;
        }
        runs.push(res);
    }
    let mut failures = check_solves(&sc.expect, &runs);
    let mut summary: Vec<String> = runs
        .iter()
        .map(|r| format!("scheme {} {:?} [{:.6}, {:.6}] n={}", r.scheme, r.status, r.value_interval.0, r.value_interval.1, r.final_n))
        .collect();
    if let Some(sim) = &sc.simulate {
        let cfg = SimulateConfig {
            source: sim.source.clone(),
            opt: sim.opt,
            always: Some(sim.always.clone()),
            scheduler: None,
            trials: sim.trials,
            horizon: sim.horizon,
            seed: sim.seed,
            show_path: false,
        };
        let v = simulate_value(&cfg)?;
        let est = v["estimate"]["estimate"].as_f64().expect("estimate field");
        summary.push(format!("estimate {est}"));
        if let Some(dir) = out_dir {
            write_file(&dir.join(format!("{}.json", sc.name)), &serde_json::to_string_pretty(&v).expect("json"))?;
        }
        for e in &sc.expect {
            if let Expect::EstimateWithin(r) = e {
                if !(r.low..=r.high).contains(&est) {
                    failures.push(format!("estimate {est} outside [{}, {}]", r.low, r.high));
                }
            }
        }
    }
    let pass = failures.is_empty();
    let detail = if pass { summary.join("; ") } else { failures.join("; ") };
    Ok(Verdict {
        name: sc.name.clone(),
        pass,
        detail,
    })
}

/// Runs the named scenarios in parallel, reporting in manifest order.
pub fn repro(names: &[String], all: bool, out_dir: Option<&Path>) -> Result<(String, bool), CliError> {
    let available = scenarios();
    let chosen: Vec<Scenario> = if all {
        available
    } else {
        if names.is_empty() {
            return Err(CliError::Usage("name a scenario or pass --all (see --list)".into()));
        }
        names
            .iter()
            .map(|n| {
                available
                    .iter()
                    .find(|s| &s.name == n)
                    .cloned()
                    .ok_or_else(|| CliError::ScenarioUnknown(n.clone()))
            })
            .collect::<Result<_, _>>()?
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    let verdicts: Vec<Result<Verdict, CliError>> = chosen.par_iter().map(|sc| run_scenario(sc, out_dir)).collect();
    let mut text = String::new();
    let mut all_pass = true;
    for v in verdicts {
        let v = v?;
        all_pass &= v.pass;
        text.push_str(&format!("{} {}: {}\n", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail));
    }
    Ok((text, all_pass))
}

pub fn list() -> String {
    scenarios()
        .iter()
        .map(|s| format!("{}\t{}\n", s.name, s.anchor))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_is_well_formed() {
        let all = scenarios();
        assert!(all.len() >= 8);
        for s in &all {
            assert!(!s.anchor.is_empty());
            assert!(!s.solves.is_empty() || s.simulate.is_some(), "{}", s.name);
            for c in &s.solves {
                c.validate().unwrap();
            }
        }
        let mut names: Vec<&str> = all.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), all.len());
    }

    #[test]
    fn unknown_scenario() {
        assert!(matches!(
            repro(&["nope".into()], false, None),
            Err(CliError::ScenarioUnknown(_))
        ));
    }

    #[test]
    fn stuck_scenario_passes() {
        let (text, ok) = repro(&["three-state-scheme1-stuck".into()], false, None).unwrap();
        assert!(ok, "{text}");
        assert!(text.starts_with("PASS three-state-scheme1-stuck"));
    }
}
