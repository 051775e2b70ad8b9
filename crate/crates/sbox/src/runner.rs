//! Parallel benchmark execution and rescoring of stored results.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sbox_core::bench::{convergence, run_cell_on, score_cells, CellRecord, ScoreTable};
use sbox_core::optimizers::OptimizerConfig;
use sbox_core::Problem;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{self, CellStatus, Manifest, ManifestCell};

/// Result of [`run_suite`].
#[derive(Debug)]
pub struct RunOutcome {
    /// Directory holding the results.
    pub dir: PathBuf,
    /// Every cell, in manifest order.
    pub records: Vec<CellRecord>,
    /// Scores written to `scores.json`.
    pub table: ScoreTable,
}

impl RunOutcome {
    /// Cells that did not evaluate their whole budget.
    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| !r.is_complete()).count()
    }
}

/// Trajectory file of a cell relative to the suite directory.
pub fn cell_file(problem: &str, algorithm: &str, repetition: usize) -> PathBuf {
    Path::new(problem)
        .join(algorithm)
        .join(format!("rep{repetition}.csv"))
}

/// Run every cell of `cfg` on `jobs` threads (all cores when `None`) and
/// write the results under `out/<suite>/`.
pub fn run_suite(cfg: &RunConfig, out: &Path, jobs: Option<usize>) -> Result<RunOutcome, CliError> {
    let bench = cfg.benchmark()?;
    let cells = bench.cells()?;
    let mut problems: HashMap<&str, Problem> = HashMap::new();
    for key in &cfg.problems {
        problems.insert(key.as_str(), cfg.problem(key)?);
    }
    let dir = out.join(&cfg.suite);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        seed: cfg.seed,
        config: cfg.clone(),
        cells: cells
            .iter()
            .map(|c| {
                let p = &problems[c.problem.as_str()];
                ManifestCell {
                    problem: c.problem.clone(),
                    algorithm: c.algorithm,
                    repetition: c.repetition,
                    seed: c.seed,
                    budget: c.preset.budget,
                    warmup: c.preset.warmup,
                    constrained: c.constrained,
                    dim: p.dim(),
                    n_constraints: p.n_constraints(),
                    file: cell_file(&c.problem, c.algorithm.tag(), c.repetition),
                }
            })
            .collect(),
    };
    io::write_json(&dir.join(io::MANIFEST), &manifest)?;
    log::info!("{} cells -> {}", cells.len(), dir.display());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Results(format!("thread pool: {e}")))?;
    let threshold = cfg.violation_threshold;
    let opt = OptimizerConfig::default();
    let records: Vec<CellRecord> = pool.install(|| {
        cells
            .par_iter()
            .zip(&manifest.cells)
            .map(|(cell, m)| {
                let rec = run_cell_on(cell, &problems[cell.problem.as_str()], &opt);
                if let Some(t) = &rec.trajectory {
                    io::write_trajectory(&dir.join(&m.file), t, m.dim, m.n_constraints, threshold)?;
                }
                log::debug!(
                    "{} / {} / rep {} done",
                    cell.problem,
                    cell.algorithm,
                    cell.repetition
                );
                Ok(rec)
            })
            .collect::<Result<_, CliError>>()
    })?;

    let status: Vec<CellStatus> = records
        .iter()
        .zip(&manifest.cells)
        .map(|(r, m)| CellStatus::of(m.file.clone(), r))
        .collect();
    io::write_json(&dir.join(io::STATUS), &status)?;
    let table = score_cells(&records, threshold);
    io::write_json(&dir.join(io::SCORES), &table)?;
    io::write_convergence(
        &dir.join(io::CONVERGENCE),
        &convergence(&records, threshold),
    )?;
    Ok(RunOutcome {
        dir,
        records,
        table,
    })
}

/// Recompute the scores of a suite directory from its trajectory files.
pub fn rescore(dir: &Path) -> Result<ScoreTable, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Results(format!(
            "{}: no such results directory",
            dir.display()
        )));
    }
    let manifest: Manifest = io::read_json(&dir.join(io::MANIFEST))?;
    let records = io::load_records(dir, &manifest)?;
    Ok(score_cells(&records, manifest.config.violation_threshold))
}

/// Rescore a directory and compare with its stored `scores.json` byte
/// for byte. Returns the fresh table and whether it matches.
pub fn verify(dir: &Path) -> Result<(ScoreTable, bool), CliError> {
    let fresh = rescore(dir)?;
    let path = dir.join(io::SCORES);
    let stored = std::fs::read(&path).map_err(CliError::io(&path))?;
    let text = io::json_text(&fresh).map_err(CliError::json(&path))?;
    Ok((fresh, text.as_bytes() == stored.as_slice()))
}
