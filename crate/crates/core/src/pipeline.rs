//! The recursive clustering pipeline.
//!
//! One level = build weights (optionally zero-padded), solve the relaxation,
//! round with best-of-N, account the dissimilarity split, and project the
//! solved vectors to 2D. The projection rows become the next level's
//! dataset, so clusters tighten level by level.

use std::time::{Duration, Instant};

use crate::dataset::{build_weights, pad_weights, Dataset, WeightKind};
use crate::error::{Error, Result};
use crate::metrics::{cluster_metrics, ClusterMetrics};
use crate::pca::{pca_2d, Embedding2D};
use crate::rounding::{best_of_rounds, Partition};
use crate::sdp::{solve_relaxation, SolverConfig, SolverResiduals};

/// Settings for [`run_recursive`].
#[derive(Debug, Clone)]
pub struct RecursionConfig {
    pub k: usize,
    /// Rounding rounds per level.
    pub rounds: usize,
    /// Number of recursion levels.
    pub recursions: usize,
    /// Target padded size for the first level; the pad amount (m - n) is
    /// re-applied relative to each level's point count.
    pub padded_size: Option<usize>,
    pub weight_kind: WeightKind,
    pub master_seed: u64,
    pub solver: SolverConfig,
}

impl Default for RecursionConfig {
    fn default() -> Self {
        Self {
            k: 3,
            rounds: 200,
            recursions: 5,
            padded_size: None,
            weight_kind: WeightKind::Euclidean,
            master_seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

/// Wall-clock spent in each stage of one level.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub solve: Duration,
    pub rounding: Duration,
    pub embed: Duration,
}

/// Everything produced by one recursion level. Padding phantoms are dropped:
/// the partition, metrics, and embedding cover only real points.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    /// 1-based recursion level.
    pub index: usize,
    pub partition: Partition,
    pub metrics: ClusterMetrics,
    pub embedding: Embedding2D,
    /// Relaxation objective of the (possibly padded) solve at this level.
    pub sdp_objective: f64,
    pub solver_iterations: usize,
    pub solver_residuals: SolverResiduals,
    pub solver_converged: bool,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    /// One record per level, in order.
    pub records: Vec<IterationRecord>,
    pub config: RecursionConfig,
    pub total_time: Duration,
}

/// Run the full recursive algorithm on a dataset.
///
/// Levels are seeded as `master_seed + level`, so any single level can be
/// reproduced in isolation. Errors from inner stages carry the level index.
pub fn run_recursive(ds: &Dataset, cfg: &RecursionConfig) -> Result<RunResult> {
    if cfg.recursions < 1 {
        return Err(Error::Config("at least one recursion level is required".into()));
    }
    if cfg.rounds < 1 {
        return Err(Error::Config("at least one rounding round is required".into()));
    }
    let pad_extra = match cfg.padded_size {
        Some(m) if m < ds.len() => {
            return Err(Error::Config(format!(
                "padded size {m} is smaller than the dataset size {}",
                ds.len()
            )));
        }
        Some(m) => Some(m - ds.len()),
        None => None,
    };

    let start = Instant::now();
    let mut records = Vec::with_capacity(cfg.recursions);
    let mut current = ds.clone();

    for level in 1..=cfg.recursions {
        let record = run_level(&current, cfg, level, pad_extra)
            .map_err(|e| e.at_iteration(level))?;
        current = Dataset::from_matrix(record.embedding.coords().clone())
            .map_err(|e| e.at_iteration(level))?;
        records.push(record);
    }

    Ok(RunResult {
        records,
        config: cfg.clone(),
        total_time: start.elapsed(),
    })
}

fn run_level(
    ds: &Dataset,
    cfg: &RecursionConfig,
    level: usize,
    pad_extra: Option<usize>,
) -> Result<IterationRecord> {
    let n = ds.len();
    let w_real = build_weights(ds, cfg.weight_kind);
    let w = match pad_extra {
        Some(extra) => pad_weights(&w_real, n + extra)?,
        None => w_real.clone(),
    };

    let level_seed = cfg.master_seed.wrapping_add(level as u64);
    let solver_cfg = SolverConfig {
        seed: level_seed,
        ..cfg.solver.clone()
    };

    let t0 = Instant::now();
    let solution = solve_relaxation(&w, cfg.k, &solver_cfg)?;
    let solve_time = t0.elapsed();

    let t1 = Instant::now();
    let outcome = best_of_rounds(&w, &solution.vectors, cfg.k, cfg.rounds, level_seed)?;
    let rounding_time = t1.elapsed();

    // Phantom indices carry zero weight and no identity; report only the
    // real points.
    let partition = outcome.best.truncated(n);
    let metrics = cluster_metrics(&w_real, &partition)?;

    let t2 = Instant::now();
    let embedding = pca_2d(&solution.vectors.take_leading(n))?;
    let embed_time = t2.elapsed();

    Ok(IterationRecord {
        index: level,
        partition,
        metrics,
        embedding,
        sdp_objective: solution.objective,
        solver_iterations: solution.iterations,
        solver_residuals: solution.residuals,
        solver_converged: solution.converged,
        timings: StageTimings {
            solve: solve_time,
            rounding: rounding_time,
            embed: embed_time,
        },
    })
}
