//! String-keyed problem registry and default evaluation budgets.
//!
//! Keys: `ackley-dN`, `levy-dN`, `rosenbrock-dN`, `quadratic-dN` for any
//! `N >= 1`, the constrained problems `rosenbrock-c`, `quadratic-c`,
//! `matyas-c`, and the case studies `cstr-pid`, `williams-otto`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::constrained::{constrained_suite, CONSTRAINED_NAMES};
use super::functions::{ackley, levy, quadratic_ill, rosenbrock};
use crate::casestudies::{cstr, williams_otto};
use crate::error::ConfigError;
use crate::problem::{Bounds, KnownOptimum, Problem};

/// Unconstrained function families.
pub const UNCONSTRAINED_FAMILIES: [&str; 4] = ["ackley", "levy", "rosenbrock", "quadratic"];
/// Case-study keys.
pub const CASE_STUDY_KEYS: [&str; 2] = ["cstr-pid", "williams-otto"];
/// Default benchmark dimensions.
pub const DEFAULT_DIMS: [usize; 3] = [2, 5, 7];

/// Group of problems run together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// The four unconstrained test functions.
    Unconstrained,
    /// The three 2-D constrained problems.
    Constrained,
    /// The chemical-engineering case studies.
    CaseStudies,
}

impl Suite {
    /// All suites.
    pub const ALL: [Suite; 3] = [Suite::Unconstrained, Suite::Constrained, Suite::CaseStudies];

    /// Command-line tag.
    pub fn tag(self) -> &'static str {
        match self {
            Suite::Unconstrained => "unconstrained",
            Suite::Constrained => "constrained",
            Suite::CaseStudies => "casestudies",
        }
    }

    /// Parse a tag.
    pub fn from_tag(tag: &str) -> Result<Self, ConfigError> {
        Suite::ALL
            .into_iter()
            .find(|s| s.tag() == tag)
            .ok_or_else(|| ConfigError::UnknownKey {
                kind: "suite",
                key: tag.into(),
            })
    }

    /// Registry keys of this suite. `dims` only affects the unconstrained suite.
    pub fn keys(self, dims: &[usize]) -> Vec<String> {
        match self {
            Suite::Unconstrained => UNCONSTRAINED_FAMILIES
                .iter()
                .flat_map(|f| dims.iter().map(move |d| format!("{f}-d{d}")))
                .collect(),
            Suite::Constrained => CONSTRAINED_NAMES.iter().map(|n| format!("{n}-c")).collect(),
            Suite::CaseStudies => CASE_STUDY_KEYS.iter().map(|k| String::from(*k)).collect(),
        }
    }
}

/// Split `family-dN` into `(family, N)`.
pub fn parse_unconstrained_key(key: &str) -> Option<(&str, usize)> {
    let (family, d) = key.rsplit_once("-d")?;
    if !UNCONSTRAINED_FAMILIES.contains(&family)
        || d.is_empty()
        || !d.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let dim: usize = d.parse().ok()?;
    (dim >= 1).then_some((family, dim))
}

fn unknown(key: &str) -> ConfigError {
    ConfigError::UnknownKey {
        kind: "problem",
        key: key.into(),
    }
}

/// Unconstrained test function of the given family and dimension on `[-5, 5]^dim`.
pub fn unconstrained(family: &str, dim: usize) -> Result<Problem, ConfigError> {
    let (f, opt): (fn(&[f64]) -> f64, f64) = match family {
        "ackley" => (ackley, 0.0),
        "levy" => (levy, 1.0),
        "rosenbrock" => (rosenbrock, 1.0),
        "quadratic" => (quadratic_ill, 0.0),
        _ => return Err(unknown(family)),
    };
    if dim == 0 {
        return Err(ConfigError::Invalid("dimension must be at least 1".into()));
    }
    Problem::from_fn(
        format!("{family}-d{dim}"),
        Bounds::uniform(dim, -5.0, 5.0)?,
        f,
    )
    .with_known_optimum(KnownOptimum {
        x: vec![opt; dim],
        value: 0.0,
    })
}

/// Problem for a registry key, case studies with their default settings.
pub fn lookup(key: &str) -> Result<Problem, ConfigError> {
    if let Some((family, dim)) = parse_unconstrained_key(key) {
        return unconstrained(family, dim);
    }
    if let Some(name) = key.strip_suffix("-c") {
        if CONSTRAINED_NAMES.contains(&name) {
            return Ok(constrained_suite(name)?.to_problem());
        }
    }
    match key {
        "cstr-pid" => cstr::cstr_problem(&cstr::CstrConfig::default()),
        "williams-otto" => williams_otto::wo_problem(&williams_otto::WoConfig::default()),
        _ => Err(unknown(key)),
    }
}

/// Every fixed key plus the unconstrained families at `dims`.
pub fn list_keys(dims: &[usize]) -> Vec<String> {
    Suite::ALL.iter().flat_map(|s| s.keys(dims)).collect()
}

/// Evaluation budget `n_e` and warm-up length `n_c` of a benchmark cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    /// Evaluations per run.
    pub budget: usize,
    /// Leading evaluations excluded from scoring.
    pub warmup: usize,
}

/// Default preset for an unconstrained problem of dimension `dim`:
/// 20/5 at d=2, 50/10 at d=5, 80/13 at d=7, 100/15 at d=10, otherwise
/// `10 d` evaluations with `d + 5` warm-up.
pub fn dim_preset(dim: usize) -> Preset {
    let (budget, warmup) = match dim {
        2 => (20, 5),
        5 => (50, 10),
        7 => (80, 13),
        10 => (100, 15),
        d => (10 * d, d + 5),
    };
    Preset { budget, warmup }
}

/// Default preset for a registry key.
pub fn preset(key: &str) -> Result<Preset, ConfigError> {
    if let Some((_, dim)) = parse_unconstrained_key(key) {
        return Ok(dim_preset(dim));
    }
    match key {
        "rosenbrock-c" | "quadratic-c" | "matyas-c" | "williams-otto" => Ok(Preset {
            budget: 20,
            warmup: 5,
        }),
        "cstr-pid" => Ok(Preset {
            budget: 150,
            warmup: 64,
        }),
        _ => Err(unknown(key)),
    }
}
