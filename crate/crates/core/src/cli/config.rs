//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! model = uniform_saving        # no_saving | uniform_saving | distributed_saving | bidirectional
//! lambda = 0.5                  # uniform_saving; or a fixed propensity for distributed_saving
//! lambda_lo = 0.0               # distributed_saving, uniform law on [lo, hi)
//! lambda_hi = 0.9999
//! n_agents = 1000
//! total_wealth = 1000           # default: n_agents (unit mean)
//! init = uniform_equal          # uniform_equal | random_uniform
//! seed = 42
//! realizations = 100
//! sample_steps = 100
//! sample_interval = 1
//! burn_in_exchanges = 0
//! equilibration.checkpoint_interval = 100
//! equilibration.ks_tolerance = 0.01
//! equilibration.consecutive_passes = 3
//! equilibration.max_steps = 100000
//! output.dir = out
//! output.format = both          # csv | json | both
//! ```
//!
//! Unknown keys, repeated keys, and keys that do not apply to the chosen
//! model are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{EquilibrationPolicy, InitialWealth, SimulationConfig};
use crate::error::{Error, Result};
use crate::kernels::{LambdaLaw, ModelSpec};

const KNOWN_KEYS: &[&str] = &[
    "model",
    "lambda",
    "lambda_lo",
    "lambda_hi",
    "n_agents",
    "total_wealth",
    "init",
    "seed",
    "realizations",
    "sample_steps",
    "sample_interval",
    "burn_in_exchanges",
    "equilibration.checkpoint_interval",
    "equilibration.ks_tolerance",
    "equilibration.consecutive_passes",
    "equilibration.max_steps",
    "output.dir",
    "output.format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFormats {
    pub csv: bool,
    pub json: bool,
}

impl OutputFormats {
    pub const BOTH: OutputFormats = OutputFormats {
        csv: true,
        json: true,
    };
}

impl FromStr for OutputFormats {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormats {
                csv: true,
                json: false,
            }),
            "json" => Ok(OutputFormats {
                csv: false,
                json: true,
            }),
            "both" => Ok(OutputFormats::BOTH),
            other => Err(Error::config(
                "output.format",
                format!("expected one of csv, json, both; got `{other}`"),
            )),
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: SimulationConfig,
    pub model: ModelSpec,
    pub output_dir: PathBuf,
    pub formats: OutputFormats,
    pub artifact_version: String,
}

impl RunManifest {
    pub fn new(config: SimulationConfig, model: ModelSpec) -> Self {
        RunManifest {
            config,
            model,
            output_dir: PathBuf::from("out"),
            formats: OutputFormats::BOTH,
            artifact_version: crate::ARTIFACT_VERSION.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        self.model
            .validate()
            .map_err(|e| Error::config(lambda_key(&self.model), e.to_string()))?;
        if !self.formats.csv && !self.formats.json {
            return Err(Error::config("output.format", "select at least one format"));
        }
        Ok(())
    }
}

fn lambda_key(model: &ModelSpec) -> &'static str {
    match model {
        ModelSpec::DistributedSaving {
            lambda_law: LambdaLaw::Uniform { .. },
        } => "lambda_hi",
        _ => "lambda",
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str, expected: &str) -> Result<T> {
    raw.parse::<T>()
        .map_err(|_| Error::config(key, format!("expected {expected}, got `{raw}`")))
}

/// Parses configuration text.
pub fn parse_config_str(text: &str) -> Result<RunManifest> {
    let mut entries: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                line,
                format!("line {}: expected `key = value`", lineno + 1),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if entries.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::config(key, "given more than once"));
        }
    }

    let get = |k: &str| entries.get(k).map(String::as_str);

    let model_name = get("model").ok_or_else(|| Error::config("model", "missing required key"))?;
    let lambda = get("lambda")
        .map(|v| parse_value::<f64>("lambda", v, "a real in [0, 1]"))
        .transpose()?;
    let lo = get("lambda_lo")
        .map(|v| parse_value::<f64>("lambda_lo", v, "a real in [0, 1)"))
        .transpose()?;
    let hi = get("lambda_hi")
        .map(|v| parse_value::<f64>("lambda_hi", v, "a real in [0, 1)"))
        .transpose()?;

    let reject = |key: &str, model: &str| -> Result<()> {
        if entries.contains_key(key) {
            return Err(Error::config(key, format!("not used by model `{model}`")));
        }
        Ok(())
    };

    let model = match model_name {
        "no_saving" | "bidirectional" => {
            for k in ["lambda", "lambda_lo", "lambda_hi"] {
                reject(k, model_name)?;
            }
            if model_name == "no_saving" {
                ModelSpec::NoSaving
            } else {
                ModelSpec::BiDirectional
            }
        }
        "uniform_saving" => {
            reject("lambda_lo", model_name)?;
            reject("lambda_hi", model_name)?;
            let lambda =
                lambda.ok_or_else(|| Error::config("lambda", "required by uniform_saving"))?;
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::config(
                    "lambda",
                    format!("must lie in [0, 1], got {lambda}"),
                ));
            }
            ModelSpec::UniformSaving { lambda }
        }
        "distributed_saving" => {
            let law = match (lambda, lo, hi) {
                (Some(l), None, None) => {
                    if !(0.0..1.0).contains(&l) {
                        return Err(Error::config(
                            "lambda",
                            format!("must lie in [0, 1) for distributed_saving, got {l}"),
                        ));
                    }
                    LambdaLaw::Delta { lambda: l }
                }
                (None, lo, Some(hi)) => {
                    let lo = lo.unwrap_or(0.0);
                    if !(0.0..1.0).contains(&lo) {
                        return Err(Error::config(
                            "lambda_lo",
                            format!("must lie in [0, 1), got {lo}"),
                        ));
                    }
                    if !(hi >= lo && hi < 1.0) {
                        return Err(Error::config(
                            "lambda_hi",
                            format!("must lie in [lambda_lo, 1), got {hi}"),
                        ));
                    }
                    LambdaLaw::Uniform { lo, hi }
                }
                (Some(_), _, _) => {
                    return Err(Error::config(
                        "lambda",
                        "give either lambda or lambda_lo/lambda_hi, not both",
                    ))
                }
                (None, _, None) => {
                    return Err(Error::config(
                        "lambda_hi",
                        "distributed_saving needs lambda_hi (or a fixed lambda)",
                    ))
                }
            };
            ModelSpec::DistributedSaving { lambda_law: law }
        }
        other => {
            return Err(Error::config(
                "model",
                format!(
                    "expected one of no_saving, uniform_saving, distributed_saving, \
                     bidirectional; got `{other}`"
                ),
            ))
        }
    };

    let defaults = SimulationConfig::default();
    let n_agents = match get("n_agents") {
        Some(v) => parse_value::<usize>("n_agents", v, "an integer >= 2")?,
        None => return Err(Error::config("n_agents", "missing required key")),
    };
    let total_wealth = match get("total_wealth") {
        Some(v) => parse_value::<f64>("total_wealth", v, "a positive real")?,
        None => n_agents as f64,
    };
    let init = match get("init") {
        None | Some("uniform_equal") => InitialWealth::UniformEqual,
        Some("random_uniform") => InitialWealth::RandomUniform,
        Some(other) => {
            return Err(Error::config(
                "init",
                format!("expected uniform_equal or random_uniform, got `{other}`"),
            ))
        }
    };

    macro_rules! int_or {
        ($key:literal, $ty:ty, $default:expr) => {
            match get($key) {
                Some(v) => parse_value::<$ty>($key, v, "a non-negative integer")?,
                None => $default,
            }
        };
    }

    let eq_defaults = EquilibrationPolicy::default();
    let equilibration = EquilibrationPolicy {
        checkpoint_interval: int_or!(
            "equilibration.checkpoint_interval",
            u64,
            eq_defaults.checkpoint_interval
        ),
        ks_tolerance: match get("equilibration.ks_tolerance") {
            Some(v) => parse_value::<f64>("equilibration.ks_tolerance", v, "a real in (0, 1)")?,
            None => eq_defaults.ks_tolerance,
        },
        consecutive_passes: int_or!(
            "equilibration.consecutive_passes",
            u32,
            eq_defaults.consecutive_passes
        ),
        max_steps: int_or!("equilibration.max_steps", u64, eq_defaults.max_steps),
    };

    let config = SimulationConfig {
        n_agents,
        total_wealth,
        init,
        equilibration,
        burn_in_exchanges: int_or!("burn_in_exchanges", u64, defaults.burn_in_exchanges),
        sample_steps: int_or!("sample_steps", u64, defaults.sample_steps),
        sample_interval: int_or!("sample_interval", u64, defaults.sample_interval),
        realizations: int_or!("realizations", u32, defaults.realizations),
        master_seed: int_or!("seed", u64, defaults.master_seed),
    };

    let mut manifest = RunManifest::new(config, model);
    if let Some(dir) = get("output.dir") {
        if dir.is_empty() {
            return Err(Error::config("output.dir", "must not be empty"));
        }
        manifest.output_dir = PathBuf::from(dir);
    }
    if let Some(f) = get("output.format") {
        manifest.formats = f.parse()?;
    }
    manifest.validate()?;
    Ok(manifest)
}

/// Reads and parses a configuration file.
pub fn parse_config(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::Config { key, .. } => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let m = parse_config_str("model = no_saving\nn_agents = 200\nseed = 1\n").unwrap();
        assert_eq!(m.model, ModelSpec::NoSaving);
        assert_eq!(m.config.n_agents, 200);
        assert_eq!(m.config.master_seed, 1);
        assert_eq!(m.config.total_wealth, 200.0);
        assert_eq!(
            m.config.realizations,
            SimulationConfig::default().realizations
        );
        assert_eq!(m.config.equilibration, EquilibrationPolicy::default());
        assert_eq!(m.formats, OutputFormats::BOTH);
    }

    #[test]
    fn lambda_out_of_range_names_key() {
        let err =
            parse_config_str("model = uniform_saving\nlambda = 1.2\nn_agents = 10\n").unwrap_err();
        assert_eq!(key_of(err), "lambda");
    }

    #[test]
    fn unknown_key_names_key() {
        let err = parse_config_str("model = no_saving\nn_agents = 10\nfoo = 3\n").unwrap_err();
        assert_eq!(key_of(err), "foo");
    }

    #[test]
    fn distributed_laws() {
        let m = parse_config_str(
            "model = distributed_saving\nlambda_lo = 0\nlambda_hi = 0.9999\nn_agents = 1000\n",
        )
        .unwrap();
        assert_eq!(
            m.model,
            ModelSpec::DistributedSaving {
                lambda_law: LambdaLaw::Uniform {
                    lo: 0.0,
                    hi: 0.9999
                }
            }
        );
        let err = parse_config_str("model = distributed_saving\nlambda_hi = 1.0\nn_agents = 10\n")
            .unwrap_err();
        assert_eq!(key_of(err), "lambda_hi");
        let m =
            parse_config_str("model = distributed_saving\nlambda = 0.3\nn_agents = 10\n").unwrap();
        assert_eq!(
            m.model,
            ModelSpec::DistributedSaving {
                lambda_law: LambdaLaw::Delta { lambda: 0.3 }
            }
        );
    }

    #[test]
    fn misc_errors() {
        let cases = [
            ("n_agents = 10\n", "model"),
            ("model = no_saving\n", "n_agents"),
            ("model = no_saving\nn_agents = 1\n", "n_agents"),
            ("model = no_saving\nn_agents = ten\n", "n_agents"),
            ("model = no_saving\nlambda = 0.2\nn_agents = 10\n", "lambda"),
            ("model = magic\nn_agents = 10\n", "model"),
            (
                "model = no_saving\nn_agents = 10\nn_agents = 11\n",
                "n_agents",
            ),
            (
                "model = no_saving\nn_agents = 10\noutput.format = xml\n",
                "output.format",
            ),
            (
                "model = no_saving\nn_agents = 10\nequilibration.ks_tolerance = 0\n",
                "equilibration.ks_tolerance",
            ),
            ("model = no_saving\nn_agents = 10\ninit = random\n", "init"),
        ];
        for (text, key) in cases {
            assert_eq!(key_of(parse_config_str(text).unwrap_err()), key, "{text}");
        }
    }

    #[test]
    fn comments_and_output_keys() {
        let m = parse_config_str(
            "# run\nmodel = bidirectional # trailing\n\nn_agents = 50\noutput.dir = runs/a\n\
             output.format = csv\nequilibration.max_steps = 500\n",
        )
        .unwrap();
        assert_eq!(m.output_dir, PathBuf::from("runs/a"));
        assert_eq!(
            m.formats,
            OutputFormats {
                csv: true,
                json: false
            }
        );
        assert_eq!(m.config.equilibration.max_steps, 500);
    }
}
