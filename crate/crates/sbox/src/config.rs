//! Run configuration: TOML file, command-line overrides and defaults.
//!
//! Precedence is flag, then file, then default. Every field of the file
//! has a flag of the same name except the case-study tables.

use std::path::{Path, PathBuf};

use sbox_core::bench::{BenchmarkConfig, DEFAULT_REPETITIONS};
use sbox_core::casestudies::{cstr_problem, wo_problem, CstrConfig, WoConfig};
use sbox_core::optimizers::Algorithm;
use sbox_core::problems::registry::{self, Suite, DEFAULT_DIMS};
use sbox_core::problems::VIOLATION_THRESHOLD;
use sbox_core::Problem;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Directory name of runs given as an explicit problem list.
pub const CUSTOM_SUITE: &str = "custom";
/// Dimensions offered in key suggestions.
const SUGGESTION_DIMS: [usize; 4] = [2, 5, 7, 10];

/// Partial configuration as read from a file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    /// `unconstrained`, `constrained` or `casestudies`.
    pub suite: Option<String>,
    /// Explicit problem keys; replaces the suite's problem list.
    pub problems: Option<Vec<String>>,
    /// Algorithm tags.
    pub algorithms: Option<Vec<String>>,
    /// Dimensions of the unconstrained suite.
    pub dims: Option<Vec<usize>>,
    /// Repetitions per cell.
    pub repetitions: Option<usize>,
    /// Base seed.
    pub seed: Option<u64>,
    /// Feasibility threshold on constraint values.
    pub violation_threshold: Option<f64>,
    /// Budget for every problem.
    pub budget: Option<usize>,
    /// Warm-up for every problem.
    pub warmup: Option<usize>,
    /// Worker threads.
    pub jobs: Option<usize>,
    /// Output root.
    pub out: Option<PathBuf>,
    /// CSTR settings.
    pub cstr: Option<CstrConfig>,
    /// Williams-Otto settings.
    pub williams_otto: Option<WoConfig>,
}

impl PartialConfig {
    /// Read a TOML file.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        toml::from_str(&text).map_err(|source| CliError::Toml {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            suite: self.suite.or(base.suite),
            problems: self.problems.or(base.problems),
            algorithms: self.algorithms.or(base.algorithms),
            dims: self.dims.or(base.dims),
            repetitions: self.repetitions.or(base.repetitions),
            seed: self.seed.or(base.seed),
            violation_threshold: self.violation_threshold.or(base.violation_threshold),
            budget: self.budget.or(base.budget),
            warmup: self.warmup.or(base.warmup),
            jobs: self.jobs.or(base.jobs),
            out: self.out.or(base.out),
            cstr: self.cstr.or(base.cstr),
            williams_otto: self.williams_otto.or(base.williams_otto),
        }
    }
}

/// Fully resolved settings that determine the results of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Suite tag, or `custom` for an explicit problem list.
    pub suite: String,
    /// Problem keys.
    pub problems: Vec<String>,
    /// Algorithm tags.
    pub algorithms: Vec<String>,
    /// Dimensions of the unconstrained suite.
    pub dims: Vec<usize>,
    /// Repetitions per cell.
    pub repetitions: usize,
    /// Base seed.
    pub seed: u64,
    /// Feasibility threshold.
    pub violation_threshold: f64,
    /// Budget override.
    pub budget: Option<usize>,
    /// Warm-up override.
    pub warmup: Option<usize>,
    /// CSTR settings.
    pub cstr: CstrConfig,
    /// Williams-Otto settings.
    pub williams_otto: WoConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        resolve(PartialConfig::default()).expect("defaults are valid")
    }
}

/// Nearest candidate by edit distance.
pub fn suggest<'a>(key: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .into_iter()
        .min_by_key(|c| strsim::levenshtein(key, c))
}

fn unknown<'a>(
    kind: &'static str,
    key: &str,
    valid: impl IntoIterator<Item = &'a str> + Clone,
) -> CliError {
    CliError::UnknownKey {
        kind,
        key: key.to_string(),
        suggestion: suggest(key, valid.clone()).unwrap_or_default().to_string(),
        valid: valid.into_iter().collect::<Vec<_>>().join(", "),
    }
}

/// Parse a suite tag with a suggestion on failure.
pub fn parse_suite(tag: &str) -> Result<Suite, CliError> {
    Suite::from_tag(tag).map_err(|_| unknown("suite", tag, Suite::ALL.map(|s| s.tag())))
}

/// Parse an algorithm tag with a suggestion on failure.
pub fn parse_algorithm(tag: &str) -> Result<Algorithm, CliError> {
    Algorithm::from_tag(tag).map_err(|_| unknown("algorithm", tag, Algorithm::ALL.map(|a| a.tag())))
}

/// Check a problem key with a suggestion on failure.
pub fn check_problem(key: &str) -> Result<(), CliError> {
    match registry::lookup(key) {
        Ok(_) => Ok(()),
        Err(_) => {
            let keys = registry::list_keys(&SUGGESTION_DIMS);
            Err(unknown("problem", key, keys.iter().map(String::as_str)))
        }
    }
}

/// Fill defaults and validate.
pub fn resolve(p: PartialConfig) -> Result<RunConfig, CliError> {
    let dims = p.dims.unwrap_or_else(|| DEFAULT_DIMS.to_vec());
    if dims.is_empty() || dims.contains(&0) {
        return Err(sbox_core::ConfigError::Invalid("dims must be positive".into()).into());
    }
    let (suite, problems) = match (p.problems, p.suite) {
        (Some(problems), suite) => (suite.unwrap_or_else(|| CUSTOM_SUITE.into()), problems),
        (None, suite) => {
            let s = parse_suite(suite.as_deref().unwrap_or(Suite::Unconstrained.tag()))?;
            (s.tag().to_string(), s.keys(&dims))
        }
    };
    if suite != CUSTOM_SUITE {
        parse_suite(&suite)?;
    }
    for key in &problems {
        check_problem(key)?;
    }
    let algorithms = p
        .algorithms
        .unwrap_or_else(|| Algorithm::ALL.iter().map(|a| a.tag().to_string()).collect());
    for a in &algorithms {
        parse_algorithm(a)?;
    }
    let cfg = RunConfig {
        suite,
        problems,
        algorithms,
        dims,
        repetitions: p.repetitions.unwrap_or(DEFAULT_REPETITIONS),
        seed: p.seed.unwrap_or(0),
        violation_threshold: p.violation_threshold.unwrap_or(VIOLATION_THRESHOLD),
        budget: p.budget,
        warmup: p.warmup,
        cstr: p.cstr.unwrap_or_default(),
        williams_otto: p.williams_otto.unwrap_or_default(),
    };
    cfg.cstr.validate()?;
    cfg.williams_otto.validate()?;
    cfg.benchmark()?.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// The benchmark grid.
    pub fn benchmark(&self) -> Result<BenchmarkConfig, CliError> {
        Ok(BenchmarkConfig {
            algorithms: self
                .algorithms
                .iter()
                .map(|a| parse_algorithm(a))
                .collect::<Result<_, _>>()?,
            problems: self.problems.clone(),
            repetitions: self.repetitions,
            seed: self.seed,
            violation_threshold: self.violation_threshold,
            budget: self.budget,
            warmup: self.warmup,
        })
    }

    /// Problem of a key, case studies with this configuration's settings.
    pub fn problem(&self, key: &str) -> Result<Problem, CliError> {
        let p = match key {
            "cstr-pid" => cstr_problem(&self.cstr)?,
            "williams-otto" => wo_problem(&self.williams_otto)?,
            _ => {
                check_problem(key)?;
                registry::lookup(key)?
            }
        };
        Ok(p)
    }
}
