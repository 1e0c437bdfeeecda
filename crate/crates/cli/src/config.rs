//! Run configuration and model construction.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use mdpdec::model::{load_finite_model_with, FiniteMdp, NumericMode, OptCriterion, Probability};
use mdpdec::zoo::{
    embed_lcs, make_ml, make_mr, make_random_walk, make_three_state, LcsEmbedding, LcsSystem, LeftLadder, LossModel,
    MrParams, RandomWalk, RightLadder, WalkParams,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Default per-letter loss probability of the LCS embedding.
pub const DEFAULT_LAMBDA: (i64, i64) = (1, 10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Walk,
    Ml,
    Mr,
    ThreeState,
    LcsEmbed,
}

impl Builtin {
    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            Builtin::Walk => &["p", "q"],
            Builtin::Ml | Builtin::ThreeState => &[],
            Builtin::Mr => &["eps-schedule"],
            Builtin::LcsEmbed => &["lcs", "lcs-file", "lambda", "lose-all"],
        }
    }
}

impl FromStr for Builtin {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "walk" => Ok(Builtin::Walk),
            "ml" => Ok(Builtin::Ml),
            "mr" => Ok(Builtin::Mr),
            "three-state" => Ok(Builtin::ThreeState),
            "lcs-embed" => Ok(Builtin::LcsEmbed),
            other => Err(CliError::Usage(format!(
                "unknown builtin `{other}` (expected walk, ml, mr, three-state or lcs-embed)"
            ))),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Builtin::Walk => "walk",
            Builtin::Ml => "ml",
            Builtin::Mr => "mr",
            Builtin::ThreeState => "three-state",
            Builtin::LcsEmbed => "lcs-embed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    File(PathBuf),
    Builtin {
        name: Builtin,
        #[serde(default)]
        params: BTreeMap<String, String>,
    },
}

impl ModelSource {
    /// Builds a source from the mutually exclusive `--model` / `--builtin`
    /// flags and the `--param key=value` list.
    pub fn from_flags(model: Option<PathBuf>, builtin: Option<&str>, params: &[String]) -> Result<Self, CliError> {
        match (model, builtin) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either --model or --builtin, not both".into())),
            (None, None) => Err(CliError::Usage("a model is required: --model FILE or --builtin NAME".into())),
            (Some(path), None) => {
                if !params.is_empty() {
                    return Err(CliError::Usage("--param only applies to --builtin models".into()));
                }
                Ok(ModelSource::File(path))
            }
            (None, Some(name)) => {
                let name: Builtin = name.parse()?;
                let mut map = BTreeMap::new();
                for p in params {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| CliError::Usage(format!("parameter `{p}` is not of the form key=value")))?;
                    if !name.allowed_params().contains(&k) {
                        return Err(CliError::Usage(format!("builtin {name} has no parameter `{k}`")));
                    }
                    if map.insert(k.to_string(), v.to_string()).is_some() {
                        return Err(CliError::Usage(format!("parameter `{k}` given twice")));
                    }
                }
                let src = ModelSource::Builtin { name, params: map };
                // parse eagerly so that bad values surface before any work
                src.load(None)?;
                Ok(src)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ModelSource::File(p) => p.display().to_string(),
            ModelSource::Builtin { name, params } => {
                let mut s = name.to_string();
                for (k, v) in params {
                    s.push_str(&format!(" {k}={v}"));
                }
                s
            }
        }
    }

    /// Loads or constructs the model.
    pub fn load(&self, numeric: Option<NumericMode>) -> Result<AnyModel, CliError> {
        match self {
            ModelSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                Ok(AnyModel::Finite(load_finite_model_with(&text, numeric)?))
            }
            ModelSource::Builtin { name, params } => build(*name, params),
        }
    }
}

fn prob_param(params: &BTreeMap<String, String>, key: &str, default: (i64, i64)) -> Result<Probability, CliError> {
    match params.get(key) {
        None => Ok(Probability::ratio(default.0, default.1)),
        Some(v) => Probability::parse(v).map_err(|e| CliError::Usage(format!("parameter {key}: {e}"))),
    }
}

fn usage(e: mdpdec::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn build(name: Builtin, params: &BTreeMap<String, String>) -> Result<AnyModel, CliError> {
    Ok(match name {
        Builtin::Walk => {
            let p = prob_param(params, "p", (1, 3))?;
            let q = prob_param(params, "q", (1, 2))?;
            AnyModel::Walk(make_random_walk(WalkParams::new(p, q).map_err(usage)?))
        }
        Builtin::Ml => AnyModel::Ml(make_ml()),
        Builtin::Mr => {
            let params = match params.get("eps-schedule") {
                None => MrParams::default(),
                Some(s) => MrParams::parse(s).map_err(usage)?,
            };
            AnyModel::Mr(make_mr(params))
        }
        Builtin::ThreeState => AnyModel::Finite(make_three_state()),
        Builtin::LcsEmbed => {
            let sys = match (params.get("lcs"), params.get("lcs-file")) {
                (Some(_), Some(_)) => return Err(CliError::Usage("give either lcs or lcs-file, not both".into())),
                (Some(v), None) if v == "bounded" => LcsSystem::bounded_demo(),
                (Some(v), None) if v == "unbounded" => LcsSystem::unbounded_demo(),
                (Some(v), None) => {
                    return Err(CliError::Usage(format!("unknown demo system `{v}` (bounded or unbounded)")))
                }
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?;
                    LcsSystem::from_json(&text)?
                }
                (None, None) => LcsSystem::bounded_demo(),
            };
            let loss = match (params.get("lambda"), params.get("lose-all")) {
                (Some(_), Some(_)) => return Err(CliError::Usage("give either lambda or lose-all, not both".into())),
                (_, Some(r)) => {
                    let r = Probability::parse(r).map_err(usage)?;
                    LossModel::lose_all_geometric(r).map_err(usage)?
                }
                _ => LossModel::per_message(prob_param(params, "lambda", DEFAULT_LAMBDA)?).map_err(usage)?,
            };
            AnyModel::Lcs(embed_lcs(sys, loss))
        }
    })
}

/// Any model the command line can construct.
pub enum AnyModel {
    Finite(FiniteMdp),
    Walk(RandomWalk),
    Ml(LeftLadder),
    Mr(RightLadder),
    Lcs(LcsEmbedding),
}

impl AnyModel {
    pub fn into_finite(self) -> Result<FiniteMdp, CliError> {
        match self {
            AnyModel::Finite(m) => Ok(m),
            _ => Err(CliError::Usage("this command needs a finite model".into())),
        }
    }
}

/// Evaluates `$body` with `$m` bound to the concrete model.
#[macro_export]
macro_rules! with_model {
    ($model:expr, $m:ident => $body:expr) => {
        match $model {
            $crate::config::AnyModel::Finite($m) => $body,
            $crate::config::AnyModel::Walk($m) => $body,
            $crate::config::AnyModel::Ml($m) => $body,
            $crate::config::AnyModel::Mr($m) => $body,
            $crate::config::AnyModel::Lcs($m) => $body,
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// A validated `solve` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: ModelSource,
    pub opt: OptCriterion,
    pub scheme: u8,
    pub epsilon: f64,
    pub max_horizon: usize,
    #[serde(default)]
    pub inner_tol: Option<f64>,
    #[serde(default)]
    pub geometric: bool,
    #[serde(default)]
    pub numeric: Option<NumericMode>,
    #[serde(default)]
    pub trace: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default)]
    pub seed: u64,
}

fn default_format() -> Format {
    Format::Json
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::Usage(format!("--epsilon must lie in (0,1), got {}", self.epsilon)));
        }
        if self.scheme != 1 && self.scheme != 2 {
            return Err(CliError::Usage(format!("--scheme must be 1 or 2, got {}", self.scheme)));
        }
        if self.max_horizon == 0 {
            return Err(CliError::Usage("--max-horizon must be positive".into()));
        }
        if let Some(t) = self.inner_tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Usage(format!("--inner-tol must lie in (0,1), got {t}")));
            }
        }
        Ok(())
    }
}
