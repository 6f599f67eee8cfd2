//! Run configuration: command-line flags, an optional `key = value` file and
//! the `SIMPLEXFACTOR_SEED` variable, merged in that order of precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use crate::CliError;

pub const SEED_VAR: &str = "SIMPLEXFACTOR_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Nmf,
    Lba,
    Ema,
    Plsa,
    Lca,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Frobenius,
    Minvol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Em,
    Cwls,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Identify {
    None,
    Inner,
    Outer,
}

/// Flags of `fit`. Every field is optional here so that a config file can
/// fill the gaps.
#[derive(Args, Debug, Default)]
pub struct FitArgs {
    /// Bundled dataset name or path to a CSV file.
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long)]
    pub k: Option<usize>,
    /// NMF objective.
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    /// Volume weight for the minimum volume objective.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Tempering exponent for PLSA / LCA.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Latent budget estimator.
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    #[arg(long, value_enum)]
    pub identify: Option<Identify>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub data: String,
    pub model: Model,
    pub k: usize,
    pub objective: Option<ObjectiveArg>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub estimator: Option<EstimatorArg>,
    pub identify: Identify,
    pub restarts: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

const KEYS: [&str; 11] = [
    "data", "model", "k", "objective", "lambda", "beta", "estimator", "identify", "restarts", "seed", "out",
];

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(format!("line {}: expected `key = value`", n + 1)));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::config(format!("line {}: unknown key `{key}`", n + 1)));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(CliError::config(format!("line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::config(format!("`{v}` is not a valid value for `{key}`")))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, CliError> {
    T::from_str(v, true).map_err(|_| CliError::config(format!("`{v}` is not a valid value for `{key}`")))
}

fn pick<T>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
    parse: impl Fn(&str, &str) -> Result<T, CliError>,
) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key).map(|v| parse(key, v)).transpose(),
    }
}

/// Merges flags over the config file over the environment. `env_seed` is
/// the raw value of [`SEED_VAR`], if set.
pub fn resolve(args: &FitArgs, file: &BTreeMap<String, String>, env_seed: Option<&str>) -> Result<RunConfig, CliError> {
    let data = pick(args.data.clone(), file, "data", |_, v| Ok(v.to_string()))?
        .ok_or_else(|| CliError::config("no dataset given (--data)"))?;
    let model = pick(args.model, file, "model", parse_enum)?.ok_or_else(|| CliError::config("no model given (--model)"))?;
    let k = pick(args.k, file, "k", parse_value)?.ok_or_else(|| CliError::config("no rank given (--k)"))?;
    let out = pick(args.out.clone(), file, "out", |_, v| Ok(PathBuf::from(v)))?
        .ok_or_else(|| CliError::config("no output directory given (--out)"))?;
    let seed = match pick(args.seed, file, "seed", parse_value)? {
        Some(s) => s,
        None => match env_seed {
            Some(v) => parse_value(SEED_VAR, v.trim())?,
            None => 0,
        },
    };
    let cfg = RunConfig {
        data,
        model,
        k,
        objective: pick(args.objective, file, "objective", parse_enum)?,
        lambda: pick(args.lambda, file, "lambda", parse_value)?,
        beta: pick(args.beta, file, "beta", parse_value)?,
        estimator: pick(args.estimator, file, "estimator", parse_enum)?,
        identify: pick(args.identify, file, "identify", parse_enum)?.unwrap_or(Identify::None),
        restarts: pick(args.restarts, file, "restarts", parse_value)?,
        seed,
        out,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load(args: &FitArgs) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(p) => parse_config_file(&read(p)?)?,
        None => BTreeMap::new(),
    };
    let env = std::env::var(SEED_VAR).ok();
    resolve(args, &file, env.as_deref())
}

fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))
}

impl RunConfig {
    /// Rejects option combinations the chosen model does not use.
    pub fn validate(&self) -> Result<(), CliError> {
        let name = self.model.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        let reject = |opt: &str| Err(CliError::config(format!("--{opt} does not apply to model `{name}`")));
        if self.k == 0 {
            return Err(CliError::config("k must be at least 1"));
        }
        if self.objective.is_some() && self.model != Model::Nmf {
            return reject("objective");
        }
        if self.lambda.is_some() && !(self.model == Model::Nmf && self.objective == Some(ObjectiveArg::Minvol)) {
            return Err(CliError::config("--lambda needs --model nmf --objective minvol"));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(CliError::config("lambda must be a finite value >= 0"));
            }
        }
        if self.beta.is_some() && !matches!(self.model, Model::Plsa | Model::Lca) {
            return reject("beta");
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b <= 1.0) {
                return Err(CliError::config("beta must lie in (0, 1]"));
            }
        }
        if self.estimator.is_some() && self.model != Model::Lba {
            return reject("estimator");
        }
        if self.identify != Identify::None && self.model == Model::Lca {
            return reject("identify");
        }
        if self.restarts == Some(0) {
            return Err(CliError::config("restarts must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> FitArgs {
        FitArgs {
            data: Some("time-budget".into()),
            model: Some(Model::Nmf),
            k: Some(3),
            out: Some("out".into()),
            ..FitArgs::default()
        }
    }

    #[test]
    fn precedence_flag_file_env() {
        let file = parse_config_file("seed = 7\n# comment\nrestarts = 3\n").unwrap();
        let mut args = base();
        assert_eq!(resolve(&args, &BTreeMap::new(), Some("5")).unwrap().seed, 5);
        assert_eq!(resolve(&args, &BTreeMap::new(), None).unwrap().seed, 0);
        let cfg = resolve(&args, &file, Some("5")).unwrap();
        assert_eq!((cfg.seed, cfg.restarts), (7, Some(3)));
        args.seed = Some(9);
        assert_eq!(resolve(&args, &file, Some("5")).unwrap().seed, 9);
    }

    #[test]
    fn file_supplies_everything() {
        let file = parse_config_file("data = health-gender\nmodel = lba\nk = 2\nout = x\nestimator = em\n").unwrap();
        let cfg = resolve(&FitArgs::default(), &file, None).unwrap();
        assert_eq!(cfg.model, Model::Lba);
        assert_eq!(cfg.estimator, Some(EstimatorArg::Em));
    }

    #[test]
    fn incompatible_options() {
        let mut args = base();
        args.beta = Some(0.5);
        assert!(resolve(&args, &BTreeMap::new(), None).is_err());
        let mut args = base();
        args.lambda = Some(0.1);
        assert!(resolve(&args, &BTreeMap::new(), None).is_err());
        args.objective = Some(ObjectiveArg::Minvol);
        assert!(resolve(&args, &BTreeMap::new(), None).is_ok());
        let mut args = base();
        args.model = Some(Model::Lca);
        args.identify = Some(Identify::Inner);
        assert!(resolve(&args, &BTreeMap::new(), None).is_err());
    }

    #[test]
    fn bad_file_lines() {
        assert!(parse_config_file("seed 7").is_err());
        assert!(parse_config_file("colour = red").is_err());
        assert!(parse_config_file("k = 2\nk = 3").is_err());
        let file = parse_config_file("k = two").unwrap();
        let mut args = base();
        args.k = None;
        assert!(resolve(&args, &file, None).is_err());
    }
}
