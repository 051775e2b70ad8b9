//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Every tolerance is a named constant.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use sbox::config::{resolve, PartialConfig, RunConfig};
use sbox::io::{read_evaluations, read_json, Manifest, CONVERGENCE, MANIFEST, SCORES, STATUS};
use sbox::runner::{run_suite, verify};
use sbox_core::bench::{feasibility_row, score_cells, CellRecord};
use sbox_core::casestudies::cstr::{self, Controls, CstrConfig, CstrParams, CstrState, PidGains};
use sbox_core::casestudies::newton::residual_norm;
use sbox_core::casestudies::ode;
use sbox_core::casestudies::williams_otto::{
    wo_objective, wo_residuals, wo_steady_state, WoConfig,
};
use sbox_core::optimizers::search::random_point;
use sbox_core::optimizers::{run_optimizer, Algorithm};
use sbox_core::problems::constrained_suite;
use sbox_core::problems::registry::{self, Suite};
use sbox_core::rng;
use sbox_core::surrogates::{fit_gp_with, fit_quadratic, fit_rbf, GpHyper, QuadFit};
use sbox_core::{latin_hypercube, Dataset, Evaluation, NoiseSpec, Trajectory};

const OPTIMUM_TOL: f64 = 1e-9;
const GP_INTERP_TOL: f64 = 1e-6;
const GP_PRIOR_TOL: f64 = 1e-3;
const QUAD_COEF_TOL: f64 = 1e-6;
const RBF_INTERP_TOL: f64 = 1e-8;
const RBF_LAMBDA_TOL: f64 = 1e-8;
const SCORE_TOL: f64 = 1e-12;
const SMOKE_TARGET: f64 = 1e-2;
const FEAS_THRESHOLD: f64 = 1e-3;
const RK4_RATIO: (f64, f64) = (8.0, 32.0);
const DILUTION_TOL: f64 = 1e-6;
const WO_SUM_TOL: f64 = 1e-10;
const WO_RESIDUAL_TOL: f64 = 1e-8;
const WO_GAP: f64 = 0.02;
const SEEDS: u64 = 5;
const MIN_SUCCESSES: usize = 4;

/// Algorithm tag and `(y, g)` rows of each repetition.
type AlgoRuns<'a> = (&'a str, Vec<Vec<(f64, f64)>>);
type Criterion<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let dt = start.elapsed();
    o.detail = format!(
        "{}; {:.2} s (limit {} s)",
        o.detail,
        dt.as_secs_f64(),
        limit.as_secs()
    );
    o.pass &= dt <= limit;
    o
}

// 1 ------------------------------------------------------------------------

fn optima() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 5, 7, 10] {
        for key in Suite::Unconstrained.keys(&[d]) {
            let p = registry::lookup(&key).unwrap();
            let opt = p.known_optimum().unwrap();
            worst = worst.max(p.evaluate_exact(&opt.x).0.abs());
        }
    }
    let matyas = constrained_suite("matyas").unwrap().evaluate(&[0.0, 0.0]).1[0];
    let quad = constrained_suite("quadratic")
        .unwrap()
        .evaluate(&[0.0, 0.6])
        .1[0];
    outcome(
        worst <= OPTIMUM_TOL && matyas == 3.60 && quad == 0.0,
        format!(
            "max |f(x*)| = {worst:.1e}, matyas g(0,0) = {matyas}, quadratic-c g(0,0.6) = {quad}"
        ),
    )
}

// 2 ------------------------------------------------------------------------

fn surrogates() -> Outcome {
    // GP with fixed hyperparameters and no noise
    let b = sbox_core::Bounds::uniform(2, -1.0, 1.0).unwrap();
    let xs = latin_hypercube(&b, 10, 4).unwrap();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| (3.0 * x[0]).sin() + x[1] * x[1])
        .collect();
    let data = Dataset::from_rows(xs.clone(), ys.clone());
    let ls = 0.4;
    let gp = fit_gp_with(
        &data,
        GpHyper {
            lengthscales: vec![ls; 2],
            signal_variance: 1.0,
            noise_variance: 0.0,
        },
    )
    .unwrap();
    let gp_err = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (gp.posterior(x).0 - y).abs())
        .fold(0.0, f64::max);
    let far = [1.0 + 10.0 * ls, 1.0 + 10.0 * ls];
    let (mu, var) = gp.posterior(&far);
    let mean_err = (mu - gp.y_mean()).abs();
    let var_err = (var - gp.prior_variance()).abs();

    // quadratic x1^2 + 0.95 x1 x2 + 5.9 x2^2 from 8 samples
    let qb = sbox_core::Bounds::uniform(2, -2.0, 2.0).unwrap();
    let qx = latin_hypercube(&qb, 8, 11).unwrap();
    let qy: Vec<f64> = qx
        .iter()
        .map(|x| x[0] * x[0] + 0.95 * x[0] * x[1] + 5.9 * x[1] * x[1])
        .collect();
    let q = fit_quadratic(
        &Dataset::from_rows(qx, qy),
        QuadFit {
            ridge: 0.0,
            psd_project: false,
        },
    )
    .unwrap();
    let expected = [[1.0, 0.475], [0.475, 5.9]];
    let mut q_err = q.c().amax().max(q.b().abs());
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            q_err = q_err.max((q.q()[(i, j)] - e).abs());
        }
    }

    // cubic RBF
    let rb = sbox_core::Bounds::uniform(3, -5.0, 5.0).unwrap();
    let rx = latin_hypercube(&rb, 15, 5).unwrap();
    let ry: Vec<f64> = rx.iter().map(|x| x[0].sin() + x[1] * x[2]).collect();
    let rbf = fit_rbf(&Dataset::from_rows(rx.clone(), ry.clone())).unwrap();
    let rbf_err = rx
        .iter()
        .zip(&ry)
        .map(|(x, y)| (rbf.predict(x) - y).abs())
        .fold(0.0, f64::max);
    let ay: Vec<f64> = rx
        .iter()
        .map(|x| 2.0 * x[0] - x[1] + 0.5 * x[2] + 3.0)
        .collect();
    let affine = fit_rbf(&Dataset::from_rows(rx, ay)).unwrap();
    let lam = affine.lambda().amax();

    outcome(
        gp_err <= GP_INTERP_TOL
            && mean_err <= GP_PRIOR_TOL
            && var_err <= GP_PRIOR_TOL
            && q_err <= QUAD_COEF_TOL
            && rbf_err <= RBF_INTERP_TOL
            && lam <= RBF_LAMBDA_TOL,
        format!(
            "GP interp {gp_err:.1e}, prior mean/var {mean_err:.1e}/{var_err:.1e}, quadratic coef {q_err:.1e}, \
             RBF interp {rbf_err:.1e}, affine max|lambda| {lam:.1e}"
        ),
    )
}

// 3 ------------------------------------------------------------------------

/// Straightforward scorer: best-so-far (feasible only when constrained),
/// unreached values set to the worst finite value of the problem, warm-up
/// dropped, mean over repetitions, `r = (worst - mean) / (worst - best)`
/// with `r = 1` on ties, `p = mean(r)`.
fn reference_scores(sets: &[AlgoRuns], warmup: usize, constrained: bool) -> Vec<f64> {
    let curves: Vec<Vec<Vec<f64>>> = sets
        .iter()
        .map(|(_, reps)| {
            reps.iter()
                .map(|rep| {
                    let mut best = f64::INFINITY;
                    rep.iter()
                        .map(|&(y, g)| {
                            if (!constrained || g <= FEAS_THRESHOLD) && y < best {
                                best = y;
                            }
                            best
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut fill = f64::NEG_INFINITY;
    for c in curves.iter().flatten().flatten() {
        if c.is_finite() && *c > fill {
            fill = *c;
        }
    }
    if !fill.is_finite() {
        fill = 0.0;
    }
    let n = curves[0][0].len();
    let means: Vec<Vec<f64>> = curves
        .iter()
        .map(|reps| {
            (warmup..n)
                .map(|k| {
                    let s: f64 = reps
                        .iter()
                        .map(|c| if c[k].is_finite() { c[k] } else { fill })
                        .sum();
                    s / reps.len() as f64
                })
                .collect()
        })
        .collect();
    let len = n - warmup;
    let mut p = vec![0.0; means.len()];
    for k in 0..len {
        let best = means.iter().map(|m| m[k]).fold(f64::INFINITY, f64::min);
        let worst = means.iter().map(|m| m[k]).fold(f64::NEG_INFINITY, f64::max);
        for (a, m) in means.iter().enumerate() {
            let r = if worst == best {
                1.0
            } else {
                (worst - m[k]) / (worst - best)
            };
            p[a] += r / len as f64;
        }
    }
    p
}

fn records_of(sets: &[AlgoRuns], warmup: usize, constrained: bool) -> Vec<CellRecord> {
    let mut out = Vec::new();
    for (tag, reps) in sets {
        for (rep, rows) in reps.iter().enumerate() {
            let mut t = Trajectory::new(rows.len(), 0);
            t.evaluations = rows
                .iter()
                .enumerate()
                .map(|(i, &(y, g))| Evaluation {
                    index: i + 1,
                    x: vec![0.0],
                    y,
                    g: if constrained { vec![g] } else { vec![] },
                })
                .collect();
            out.push(CellRecord {
                problem: "synthetic".into(),
                algorithm: Algorithm::from_tag(tag).unwrap(),
                repetition: rep,
                budget: rows.len(),
                warmup,
                constrained,
                trajectory: Some(t),
            });
        }
    }
    out
}

fn synthetic(seed: u64, n: usize, gscale: f64) -> Vec<(f64, f64)> {
    let mut r = rng::stream(seed, rng::Stream::Sampler);
    let b = sbox_core::Bounds::uniform(2, -1.0, 1.0).unwrap();
    (0..n)
        .map(|_| {
            let p = random_point(&b, &mut r);
            ((p[0] + 1.0) * 10.0, p[1] * gscale)
        })
        .collect()
}

fn scoring() -> Outcome {
    let budget = registry::dim_preset(2).budget;
    let warmup = registry::dim_preset(2).warmup;
    let flat = vec![(3.0, 0.0); budget];
    let sets: Vec<(Vec<AlgoRuns>, bool)> = vec![
        // random curves, three algorithms
        (
            vec![
                (
                    "bo",
                    vec![synthetic(1, budget, 0.0), synthetic(2, budget, 0.0)],
                ),
                (
                    "lsqm",
                    vec![synthetic(3, budget, 0.0), synthetic(4, budget, 0.0)],
                ),
                (
                    "dycors",
                    vec![synthetic(5, budget, 0.0), synthetic(6, budget, 0.0)],
                ),
            ],
            false,
        ),
        // ties: identical curves and a universally flat stretch
        (
            vec![
                ("cobyla", vec![flat.clone(), flat.clone()]),
                ("cobyqa", vec![flat.clone(), flat.clone()]),
                (
                    "cuatro",
                    vec![flat.clone(), {
                        let mut c = flat.clone();
                        c[budget - 1].0 = 1.0;
                        c
                    }],
                ),
            ],
            false,
        ),
        // constrained with infeasible prefixes
        (
            vec![
                (
                    "cbo",
                    vec![synthetic(7, budget, 0.01), synthetic(8, budget, 0.01)],
                ),
                (
                    "cobyla",
                    vec![synthetic(9, budget, 0.01), vec![(1.0, 1.0); budget]],
                ),
            ],
            true,
        ),
    ];
    let mut worst = 0.0f64;
    let mut lens_ok = true;
    for (set, constrained) in &sets {
        let table = score_cells(&records_of(set, warmup, *constrained), FEAS_THRESHOLD);
        let expected = reference_scores(set, warmup, *constrained);
        for (a, e) in table.problems[0].algorithms.iter().zip(&expected) {
            lens_ok &= a.r.len() == budget - warmup;
            worst = worst.max((a.p.unwrap() - e).abs());
        }
    }
    outcome(
        worst <= SCORE_TOL && lens_ok,
        format!(
            "3 sets, max |p - reference| = {worst:.1e}, {} scored iterations each",
            budget - warmup
        ),
    )
}

// 4 ------------------------------------------------------------------------

fn d2_config() -> RunConfig {
    resolve(PartialConfig {
        suite: Some("unconstrained".into()),
        dims: Some(vec![2]),
        repetitions: Some(5),
        seed: Some(42),
        ..Default::default()
    })
    .unwrap()
}

fn trajectory_files(dir: &Path) -> Vec<PathBuf> {
    let manifest: Manifest = read_json(&dir.join(MANIFEST)).unwrap();
    manifest.cells.iter().map(|c| dir.join(&c.file)).collect()
}

fn protocol(out: &Path) -> Outcome {
    let cfg = d2_config();
    let run = run_suite(&cfg, out, None).unwrap();
    let files = trajectory_files(&run.dir);
    let mut bad = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f).unwrap();
        let mut prev = f64::INFINITY;
        let mut rows = 0;
        for (i, line) in text.lines().skip(1).enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            let best: f64 = cols.last().unwrap().parse().unwrap();
            if cols[0] != (i + 1).to_string() || best > prev {
                bad.push(f.display().to_string());
            }
            prev = best;
            rows += 1;
        }
        if rows != 20 || read_evaluations(f).unwrap().len() != 20 {
            bad.push(f.display().to_string());
        }
    }
    let scored_ok = run.table.problems.iter().all(|p| {
        p.budget == 20
            && p.warmup == 5
            && p.algorithms
                .iter()
                .all(|a| a.r.len() == 15 && a.completed == 5)
    });
    let expected_cells = 4 * 6 * 5;
    outcome(
        bad.is_empty() && scored_ok && files.len() == expected_cells && run.failed() == 0,
        format!(
            "{} trajectory files (expected {expected_cells}), 20 rows each, 15 scored iterations, {} bad files",
            files.len(),
            bad.len()
        ),
    )
}

// 5 ------------------------------------------------------------------------

fn smoke() -> Outcome {
    let p = registry::lookup("quadratic-d2").unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for a in [Algorithm::Lsqm, Algorithm::Cobyqa, Algorithm::Bo] {
        let hits = (0..SEEDS)
            .filter(|&s| {
                let t = run_optimizer(a, &p, 20, s).unwrap();
                t.values().iter().copied().fold(f64::INFINITY, f64::min) <= SMOKE_TARGET
            })
            .count();
        pass &= hits >= MIN_SUCCESSES;
        parts.push(format!("{a} {hits}/{SEEDS}"));
    }
    outcome(
        pass,
        format!(
            "f <= {SMOKE_TARGET:e} within 20 evaluations: {}",
            parts.join(", ")
        ),
    )
}

// 6 ------------------------------------------------------------------------

fn levy_direction() -> Outcome {
    let p = registry::lookup("levy-d2").unwrap();
    let final_best = |a, s| {
        run_optimizer(a, &p, 20, s)
            .unwrap()
            .values()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    };
    let wins = (0..SEEDS)
        .filter(|&s| final_best(Algorithm::Dycors, s) <= final_best(Algorithm::Lsqm, s))
        .count();
    outcome(
        wins >= MIN_SUCCESSES,
        format!("DYCORS <= LSQM in {wins}/{SEEDS} paired seeds"),
    )
}

// 7 ------------------------------------------------------------------------

fn constrained() -> Outcome {
    let p = registry::lookup("quadratic-c").unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut records = Vec::new();
    for a in [Algorithm::Cobyla, Algorithm::Cobyqa] {
        let mut hits = 0;
        for s in 0..SEEDS {
            let t = run_optimizer(a, &p, 20, s).unwrap();
            if t.best_feasible(FEAS_THRESHOLD)
                .is_some_and(|e| e.max_violation() <= FEAS_THRESHOLD)
            {
                hits += 1;
            }
            records.push(CellRecord {
                problem: "quadratic-c".into(),
                algorithm: a,
                repetition: s as usize,
                budget: 20,
                warmup: 5,
                constrained: true,
                trajectory: Some(t),
            });
        }
        pass &= hits >= MIN_SUCCESSES;
        parts.push(format!("{a} {hits}/{SEEDS}"));
    }
    let table = score_cells(&records, FEAS_THRESHOLD);
    for s in &table.problems[0].algorithms {
        println!("    {:<7} {}", s.algorithm.tag(), feasibility_row(s));
    }
    outcome(
        pass,
        format!(
            "feasible incumbent (max g <= {FEAS_THRESHOLD}): {}",
            parts.join(", ")
        ),
    )
}

// 8 ------------------------------------------------------------------------

fn cstr_case() -> Outcome {
    // RK4 on y' = y over [0, 1]
    let err = |dt: f64| {
        let y = ode::integrate(&|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], dt, 1.0, &|_| true).unwrap();
        (y[0] - std::f64::consts::E).abs()
    };
    let ratio = err(0.1) / err(0.05);

    // no reaction, no jacket: the reactor washes out to the feed
    let params = CstrParams {
        k0_ab: 0.0,
        k0_bc: 0.0,
        ua: 0.0,
        ..CstrParams::default()
    };
    let start = CstrState {
        ca: 0.0,
        cb: 500.0,
        t: 300.0,
    };
    let u = Controls {
        f_in: 1e-3,
        tc: 300.0,
    };
    let end = cstr::integrate(&start, &u, &params, 1.0, 5000.0).unwrap();
    let wash = (end.ca - params.caf).abs() / params.caf
        + end.cb.abs() / 500.0
        + (end.t - params.tf).abs() / params.tf;

    // objective is finite and repeatable
    let cfg = CstrConfig::default();
    let noise = NoiseSpec::gaussian(cfg.noise_sigma);
    let bounds = PidGains::bounds();
    let mut r = rng::stream(99, rng::Stream::Sampler);
    let mut repeatable = true;
    for s in 0..3 {
        let th = random_point(&bounds, &mut r);
        let a = cstr::cstr_objective(&th, &cfg, noise, s);
        repeatable &=
            a.is_finite() && a.to_bits() == cstr::cstr_objective(&th, &cfg, noise, s).to_bits();
    }

    // 200-sample random search against zero gains on 5 seeds
    let zero = vec![0.0; cstr::N_GAINS];
    let mut wins = 0;
    for s in 0..SEEDS {
        let mut rs = rng::stream(s, rng::Stream::Sampler);
        let best = (0..200)
            .map(|_| random_point(&bounds, &mut rs))
            .min_by(|a, b| cstr::cstr_cost(a, &cfg).total_cmp(&cstr::cstr_cost(b, &cfg)))
            .unwrap();
        if cstr::cstr_objective(&best, &cfg, noise, s) < cstr::cstr_objective(&zero, &cfg, noise, s)
        {
            wins += 1;
        }
    }
    outcome(
        (RK4_RATIO.0..=RK4_RATIO.1).contains(&ratio) && wash <= DILUTION_TOL && repeatable && wins == SEEDS,
        format!("RK4 error ratio {ratio:.2}, washout error {wash:.1e}, repeatable {repeatable}, oracle beats zero gains {wins}/{SEEDS}"),
    )
}

// 9 ------------------------------------------------------------------------

fn williams_otto() -> Outcome {
    let cfg = WoConfig::default();
    let n = 50;
    let grid = |i: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut sum_err = 0.0f64;
    let mut res_err = 0.0f64;
    let mut grid_best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            let (t, fb) = (
                grid(i, cfg.t_r.0, cfg.t_r.1),
                grid(j, cfg.feed_b.0, cfg.feed_b.1),
            );
            let s = wo_steady_state(t, fb, &cfg.params).unwrap();
            sum_err = sum_err.max((s.w.iter().sum::<f64>() - 1.0).abs());
            res_err = res_err.max(residual_norm(&wo_residuals(&s, &cfg.params)));
            let (f, g) = wo_objective(t, fb, &cfg);
            if g.iter().all(|v| *v <= FEAS_THRESHOLD) {
                grid_best = grid_best.max(-f);
            }
        }
    }
    let p = registry::lookup("williams-otto").unwrap();
    let found: Vec<f64> = (0..SEEDS)
        .map(|s| {
            run_optimizer(Algorithm::Cobyqa, &p, 20, s)
                .unwrap()
                .best_feasible(FEAS_THRESHOLD)
                .map_or(f64::NEG_INFINITY, |e| -e.y)
        })
        .collect();
    let within = found
        .iter()
        .filter(|v| **v >= (1.0 - WO_GAP) * grid_best)
        .count();
    outcome(
        sum_err <= WO_SUM_TOL && res_err <= WO_RESIDUAL_TOL && within == SEEDS as usize,
        format!(
            "max |sum w - 1| {sum_err:.1e}, max residual {res_err:.1e}, grid best {grid_best:.4}, \
             COBYQA {} ({within}/{SEEDS} within {}%)",
            found
                .iter()
                .map(|v| format!("{v:.2}"))
                .collect::<Vec<_>>()
                .join(" "),
            WO_GAP * 100.0
        ),
    )
}

// 10 -----------------------------------------------------------------------

fn reproducibility(first: &Path, second: &Path) -> Outcome {
    // re-run the d=2 suite from its stored manifest
    let dir_a = first.join("unconstrained");
    let manifest: Manifest = read_json(&dir_a.join(MANIFEST)).unwrap();
    let run_b = run_suite(&manifest.config, second, Some(3)).unwrap();
    let mut differing = 0;
    let mut compared = 0;
    let files_a = trajectory_files(&dir_a);
    let files_b = trajectory_files(&run_b.dir);
    for (a, b) in files_a.iter().zip(&files_b) {
        compared += 1;
        differing += usize::from(fs::read(a).unwrap() != fs::read(b).unwrap());
    }
    for f in [SCORES, STATUS, CONVERGENCE] {
        compared += 1;
        differing +=
            usize::from(fs::read(dir_a.join(f)).unwrap() != fs::read(run_b.dir.join(f)).unwrap());
    }
    let (_, rescored) = verify(&dir_a).unwrap();
    outcome(
        differing == 0 && rescored && files_a.len() == files_b.len(),
        format!("{compared} files compared, {differing} differ; rescoring from CSVs reproduces scores.json: {rescored}"),
    )
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let first = tmp.path().join("a");
    let second = tmp.path().join("b");
    let minute = Duration::from_secs(60);
    let criteria: Vec<(&str, &str, Criterion)> = vec![
        (
            "1",
            "test-function optima",
            Box::new(|| timed(Duration::from_secs(1), optima)),
        ),
        (
            "2",
            "surrogate exactness",
            Box::new(|| timed(Duration::from_secs(5), surrogates)),
        ),
        (
            "3",
            "scoring oracle equivalence",
            Box::new(|| timed(Duration::from_secs(1), scoring)),
        ),
        (
            "4",
            "protocol fidelity",
            Box::new(|| timed(2 * minute, || protocol(&first))),
        ),
        ("5", "convergence smoke", Box::new(|| timed(minute, smoke))),
        (
            "6",
            "Levy d=2 direction",
            Box::new(|| timed(2 * minute, levy_direction)),
        ),
        (
            "7",
            "constrained behaviour",
            Box::new(|| timed(2 * minute, constrained)),
        ),
        (
            "8",
            "CSTR simulator",
            Box::new(|| timed(3 * minute, cstr_case)),
        ),
        (
            "9",
            "Williams-Otto",
            Box::new(|| timed(3 * minute, williams_otto)),
        ),
        (
            "10",
            "reproducibility",
            Box::new(|| timed(2 * minute, || reproducibility(&first, &second))),
        ),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "{} {id:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
