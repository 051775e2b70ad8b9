//! Result files.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which parses
//! back to the identical `f64`.

use std::fs;
use std::path::{Path, PathBuf};

use sbox_core::bench::{scoring_curve, CellRecord, ConvergenceRow};
use sbox_core::optimizers::Algorithm;
use sbox_core::{Evaluation, RunStatus, Trajectory};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

/// Manifest file name inside a suite directory.
pub const MANIFEST: &str = "manifest.json";
/// Per-cell status file name.
pub const STATUS: &str = "status.json";
/// Score file name.
pub const SCORES: &str = "scores.json";
/// Convergence band file name.
pub const CONVERGENCE: &str = "convergence.csv";

/// Format a float for result files.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, path: &Path) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Results(format!("{}: bad number `{s}`", path.display())))
}

fn create_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    Ok(())
}

/// Write `iteration, x1.., y, g1.., best_so_far` rows of a trajectory.
/// `best_so_far` is the scoring curve (feasible values only when constrained).
pub fn write_trajectory(
    path: &Path,
    t: &Trajectory,
    dim: usize,
    n_constraints: usize,
    threshold: f64,
) -> Result<(), CliError> {
    create_parent(path)?;
    let file = fs::File::create(path).map_err(CliError::io(path))?;
    write_trajectory_to(file, t, dim, n_constraints, threshold).map_err(CliError::csv(path))
}

/// [`write_trajectory`] to any writer.
pub fn write_trajectory_to<W: std::io::Write>(
    out: W,
    t: &Trajectory,
    dim: usize,
    n_constraints: usize,
    threshold: f64,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iteration".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.push("y".into());
    header.extend((1..=n_constraints).map(|i| format!("g{i}")));
    header.push("best_so_far".into());
    w.write_record(&header)?;
    let best = scoring_curve(t, n_constraints > 0, threshold);
    for (e, b) in t.evaluations.iter().zip(best) {
        let mut row = vec![e.index.to_string()];
        row.extend(e.x.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(e.y));
        row.extend(e.g.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(b));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read the evaluations of a trajectory file.
pub fn read_evaluations(path: &Path) -> Result<Vec<Evaluation>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(CliError::csv(path))?;
    let header = r.headers().map_err(CliError::csv(path))?.clone();
    let dim = header.iter().filter(|h| h.starts_with('x')).count();
    let ng = header.iter().filter(|h| h.starts_with('g')).count();
    if header.len() != dim + ng + 3 {
        return Err(CliError::Results(format!(
            "{}: unexpected header",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(CliError::csv(path))?;
        let index = row[0].parse().map_err(|_| {
            CliError::Results(format!("{}: bad iteration `{}`", path.display(), &row[0]))
        })?;
        let x = (1..=dim)
            .map(|i| parse_f64(&row[i], path))
            .collect::<Result<_, _>>()?;
        let y = parse_f64(&row[dim + 1], path)?;
        let g = (dim + 2..dim + 2 + ng)
            .map(|i| parse_f64(&row[i], path))
            .collect::<Result<_, _>>()?;
        out.push(Evaluation { index, x, y, g });
    }
    Ok(out)
}

/// Pretty JSON text with a trailing newline, as written to result files.
pub fn json_text<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Write [`json_text`] to a file.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    create_parent(path)?;
    let s = json_text(value).map_err(CliError::json(path))?;
    fs::write(path, s).map_err(CliError::io(path))
}

/// Parse a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let s = fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&s).map_err(CliError::json(path))
}

/// Write the convergence bands.
pub fn write_convergence(path: &Path, rows: &[ConvergenceRow]) -> Result<(), CliError> {
    create_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(CliError::csv(path))?;
    w.write_record(["problem", "algorithm", "iteration", "mean", "p10", "p90"])
        .map_err(CliError::csv(path))?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.algorithm.tag().to_string(),
            r.iteration.to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.p10),
            fmt_f64(r.p90),
        ])
        .map_err(CliError::csv(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

/// One cell as listed in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestCell {
    /// Problem key.
    pub problem: String,
    /// Optimizer.
    pub algorithm: Algorithm,
    /// Repetition index.
    pub repetition: usize,
    /// Run seed.
    pub seed: u64,
    /// Evaluation budget.
    pub budget: usize,
    /// Warm-up length.
    pub warmup: usize,
    /// Whether the problem has constraints.
    pub constrained: bool,
    /// Input dimension.
    pub dim: usize,
    /// Number of constraints.
    pub n_constraints: usize,
    /// Trajectory file relative to the suite directory.
    pub file: PathBuf,
}

/// Snapshot of a run, written before the first cell starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Program name.
    pub tool: String,
    /// Program version.
    pub version: String,
    /// Creation time, seconds since the Unix epoch.
    pub created_unix: u64,
    /// Base seed.
    pub seed: u64,
    /// Resolved configuration.
    pub config: RunConfig,
    /// Every cell of the grid.
    pub cells: Vec<ManifestCell>,
}

/// Outcome of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStatus {
    /// Trajectory file relative to the suite directory.
    pub file: PathBuf,
    /// `complete`, `failed` or `not-started`.
    pub status: String,
    /// Cause of a failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Steps replaced by random points.
    pub fallbacks: usize,
}

impl CellStatus {
    /// Status of a finished cell.
    pub fn of(file: PathBuf, record: &CellRecord) -> Self {
        match &record.trajectory {
            None => Self {
                file,
                status: "not-started".into(),
                reason: Some("run could not start".into()),
                fallbacks: 0,
            },
            Some(t) => {
                let (status, reason) = match &t.status {
                    RunStatus::Complete => ("complete", None),
                    RunStatus::Failed { reason } => ("failed", Some(reason.clone())),
                };
                Self {
                    file,
                    status: status.into(),
                    reason,
                    fallbacks: t.fallbacks.len(),
                }
            }
        }
    }
}

/// Rebuild the cell records of a suite directory from its files.
pub fn load_records(dir: &Path, manifest: &Manifest) -> Result<Vec<CellRecord>, CliError> {
    let status_path = dir.join(STATUS);
    let statuses: Vec<CellStatus> = if status_path.exists() {
        read_json(&status_path)?
    } else {
        Vec::new()
    };
    manifest
        .cells
        .iter()
        .map(|c| {
            let st = statuses.iter().find(|s| s.file == c.file);
            let path = dir.join(&c.file);
            let trajectory = if st.is_some_and(|s| s.status == "not-started") || !path.exists() {
                None
            } else {
                let mut t = Trajectory::new(c.budget, c.seed);
                t.evaluations = read_evaluations(&path)?;
                if let Some(CellStatus {
                    status, reason: r, ..
                }) = st
                {
                    if status == "failed" {
                        t.status = RunStatus::Failed {
                            reason: r.clone().unwrap_or_default(),
                        };
                    }
                }
                Some(t)
            };
            Ok(CellRecord {
                problem: c.problem.clone(),
                algorithm: c.algorithm,
                repetition: c.repetition,
                budget: c.budget,
                warmup: c.warmup,
                constrained: c.constrained,
                trajectory,
            })
        })
        .collect()
}
