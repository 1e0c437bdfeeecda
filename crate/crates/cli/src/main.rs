//! `mdpdec`: certified reachability bounds from the command line.
//!
//! Exit codes: 0 on success (including informational commands and
//! converged solves), 3 when a scheme ran out of horizon without closing
//! the gap, 1 on errors and failed reproductions, 2 on usage errors.

mod config;
mod error;
mod repro;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mdpdec::model::{NumericMode, OptCriterion};

use config::{Format, ModelSource, RunConfig};
use error::CliError;
use run::{Output, SimulateConfig};

#[derive(Parser, Debug)]
#[command(name = "mdpdec", version, about = "Certified reachability bounds for denumerable MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Finite model in the JSON format
    #[arg(long)]
    model: Option<PathBuf>,
    /// Built-in model: walk, ml, mr, three-state, lcs-embed
    #[arg(long)]
    builtin: Option<String>,
    /// Builtin parameter as key=value (repeatable)
    #[arg(long = "param")]
    params: Vec<String>,
}

impl ModelArgs {
    fn source(&self) -> Result<ModelSource, CliError> {
        ModelSource::from_flags(self.model.clone(), self.builtin.as_deref(), &self.params)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Approximate the optimal reachability probability with scheme 1 or 2
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_opt)]
        opt: OptCriterion,
        #[arg(long, default_value_t = 2)]
        scheme: u8,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 100_000)]
        max_horizon: usize,
        /// Double the horizon instead of incrementing it
        #[arg(long)]
        geometric: bool,
        /// Inner solve tolerance of scheme 2 (default epsilon/10)
        #[arg(long)]
        inner_tol: Option<f64>,
        /// Numeric mode for --model files: exact or float (inferred if absent)
        #[arg(long, value_parser = parse_numeric)]
        numeric: Option<NumericMode>,
        /// Write the bounds trace as CSV
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Recorded in the output; solves are deterministic
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve a finite model by interval iteration, or exactly
    SolveFinite {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = parse_opt)]
        opt: OptCriterion,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Exact rational value with a witness scheduler
        #[arg(long)]
        exact: bool,
    },
    /// Print the avoid set of a finite model as a JSON array of state names
    Avoid {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = parse_opt)]
        opt: OptCriterion,
    },
    /// Diagnose sup-decisiveness of a finite model
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the maximal end components of a finite model as JSON
    Mec {
        #[arg(long)]
        model: PathBuf,
    },
    /// Estimate decisiveness of a pure positional scheduler by sampling
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_opt, default_value = "sup")]
        opt: OptCriterion,
        /// Action played wherever no explicit choice is given
        #[arg(long)]
        always: Option<String>,
        /// JSON object mapping state names to actions (finite models)
        #[arg(long)]
        scheduler: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also print one sampled path
        #[arg(long)]
        path: bool,
    },
    /// Run reproduction scenarios and check their expected outcomes
    Repro {
        names: Vec<String>,
        #[arg(long)]
        all: bool,
        /// List the scenarios
        #[arg(long)]
        list: bool,
        /// Directory for per-scenario traces and results
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn parse_opt(s: &str) -> Result<OptCriterion, String> {
    s.parse().map_err(|e: mdpdec::Error| e.to_string())
}

fn parse_numeric(s: &str) -> Result<NumericMode, String> {
    match s {
        "exact" => Ok(NumericMode::Exact),
        "float" => Ok(NumericMode::Float),
        other => Err(format!("unknown numeric mode `{other}` (exact or float)")),
    }
}

fn dispatch(cmd: Command) -> Result<Output, CliError> {
    match cmd {
        Command::Solve {
            model,
            opt,
            scheme,
            epsilon,
            max_horizon,
            geometric,
            inner_tol,
            numeric,
            trace,
            format,
            seed,
        } => {
            let cfg = RunConfig {
                source: model.source()?,
                opt,
                scheme,
                epsilon,
                max_horizon,
                inner_tol,
                geometric,
                numeric,
                trace,
                format,
                seed,
            };
            cfg.validate()?;
            run::solve(&cfg)
        }
        Command::SolveFinite { model, opt, tol, exact } => run::solve_finite(&model, opt, tol, exact),
        Command::Avoid { model, opt } => run::avoid(&model, opt),
        Command::Check { model, format } => run::check(&model, format),
        Command::Mec { model } => run::mec(&model),
        Command::Simulate {
            model,
            opt,
            always,
            scheduler,
            trials,
            horizon,
            seed,
            path,
        } => run::simulate(&SimulateConfig {
            source: model.source()?,
            opt,
            always,
            scheduler,
            trials,
            horizon,
            seed,
            show_path: path,
        }),
        Command::Repro {
            names,
            all,
            list,
            out_dir,
        } => {
            if list {
                return Ok(Output { text: repro::list(), code: 0 });
            }
            let (text, ok) = repro::repro(&names, all, out_dir.as_deref())?;
            Ok(Output {
                text,
                code: if ok { 0 } else { 1 },
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = write!(stdout, "{}", out.text);
            if !out.text.ends_with('\n') {
                let _ = writeln!(stdout);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("mdpdec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
