use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ratiodca_prox, SolveResult, SolverConfig, Termination, TraceEntry};
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::objective::{Constraint, RatioObjective};
use crate::spectral::second_eigenvector;

const RESAMPLE_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Spectral,
    Random,
}

/// Initial vectors shared by every solve of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct InitPool {
    pub vectors: Vec<Vec<f64>>,
    pub kinds: Vec<InitKind>,
}

impl InitPool {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Uniform `[-1, 1]` entries, mean-centered, resampled while `S(f) = 0`,
/// normalized to `G(f) = 1`.
pub fn random_init<R: Rng>(
    obj: &RatioObjective,
    constraint: Constraint,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = obj.n();
    for _ in 0..RESAMPLE_LIMIT {
        let mut f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mean = f.iter().sum::<f64>() / n as f64;
        f.iter_mut().for_each(|x| *x -= mean);
        if f.iter().all(|x| *x == 0.0) || obj.is_degenerate(&f)? {
            continue;
        }
        return constraint.normalize(&f);
    }
    Err(Error::Degenerate(format!(
        "no random vector with S(f) != 0 in {RESAMPLE_LIMIT} draws"
    )))
}

/// Random stream for run `index` of an experiment seeded with `seed`.
pub(crate) fn run_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// The spectral vector (if requested) followed by `n_random` random
/// vectors. Random vector `i` only depends on `(seed, i)`.
pub fn initial_pool(
    obj: &RatioObjective,
    constraint: Constraint,
    n_random: usize,
    use_spectral: bool,
    seed: u64,
) -> Result<InitPool> {
    let mut vectors = Vec::with_capacity(n_random + 1);
    let mut kinds = Vec::with_capacity(n_random + 1);
    if use_spectral {
        let v = second_eigenvector(obj.graph(), 1e-6, 1_000_000)?;
        vectors.push(constraint.normalize(&v)?);
        kinds.push(InitKind::Spectral);
    }
    for i in 0..n_random {
        vectors.push(random_init(obj, constraint, &mut run_rng(seed, i))?);
        kinds.push(InitKind::Random);
    }
    Ok(InitPool { vectors, kinds })
}

/// Thread cap from `BCK_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("BCK_THREADS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&t| t > 0)
}

/// Per-run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub init: InitKind,
    pub best_ratio: f64,
    pub best_set_size: usize,
    pub lambda_star: f64,
    pub outer_iterations: usize,
    pub termination: Termination,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub runs: Vec<RunRecord>,
    pub avg: f64,
    /// Mean of the (up to) ten smallest run ratios.
    pub top10_avg: f64,
    pub best: f64,
    pub best_run: usize,
    pub best_set: VertexSet,
}

impl RunReport {
    pub fn from_results(kinds: &[InitKind], results: Vec<SolveResult>) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::InvalidArgument("no runs to report".into()));
        }
        let mut best_run = 0;
        for (i, r) in results.iter().enumerate() {
            if r.best_set_ratio < results[best_run].best_set_ratio {
                best_run = i;
            }
        }
        let mut ratios: Vec<f64> = results.iter().map(|r| r.best_set_ratio).collect();
        let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
        ratios.sort_by(f64::total_cmp);
        let top = &ratios[..ratios.len().min(10)];
        let top10_avg = top.iter().sum::<f64>() / top.len() as f64;
        let best_set = results[best_run].best_set.clone();
        let runs = results
            .into_iter()
            .enumerate()
            .map(|(index, r)| RunRecord {
                index,
                init: kinds.get(index).copied().unwrap_or(InitKind::Random),
                best_ratio: r.best_set_ratio,
                best_set_size: r.best_set.len(),
                lambda_star: r.lambda_star,
                outer_iterations: r.accepted_steps(),
                termination: r.termination,
                trace: r.trace,
            })
            .collect();
        Ok(Self {
            runs,
            avg,
            top10_avg,
            best: ratios[0],
            best_run,
            best_set,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Solves from every vector of the pool, in parallel, and assembles the
/// report in pool order.
pub fn run_pool(obj: &RatioObjective, cfg: &SolverConfig, pool: &InitPool) -> Result<RunReport> {
    let results = solve_all(obj, cfg, &pool.vectors)?;
    RunReport::from_results(&pool.kinds, results)
}

pub(crate) fn solve_all(
    obj: &RatioObjective,
    cfg: &SolverConfig,
    vectors: &[Vec<f64>],
) -> Result<Vec<SolveResult>> {
    let work = || {
        vectors
            .par_iter()
            .map(|f0| ratiodca_prox(obj, cfg, f0))
            .collect::<Vec<_>>()
    };
    let results = match threads_from_env() {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("BCK_THREADS: {e}")))?
            .install(work),
        None => work(),
    };
    results.into_iter().collect()
}

/// `n_random` seeded random starts (plus the spectral start) with
/// `cfg.seed`.
pub fn multi_init_run(
    obj: &RatioObjective,
    cfg: &SolverConfig,
    n_random: usize,
    use_spectral: bool,
) -> Result<RunReport> {
    if n_random == 0 {
        return Err(Error::InvalidArgument("n_random must be at least 1".into()));
    }
    let pool = initial_pool(obj, cfg.constraint, n_random, use_spectral, cfg.seed)?;
    run_pool(obj, cfg, &pool)
}
