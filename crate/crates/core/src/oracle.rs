//! Exhaustive Max k-Cut solver for small instances.
//!
//! Test-support ground truth: enumerates every assignment, so it is
//! exponential and refuses instances above 12 points.

use crate::dataset::WeightMatrix;
use crate::error::{Error, Result};
use crate::rounding::Partition;

/// Hard bound on instance size for the exhaustive search.
pub const MAX_BRUTE_FORCE_SIZE: usize = 12;

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Maximum between-cluster dissimilarity over all assignments.
    pub optimum: f64,
    /// First assignment (in lexicographic order) attaining the optimum.
    pub argmax: Partition,
    /// Number of assignments examined.
    pub enumerated: u64,
}

/// Enumerate all k^n assignments (or k^(n-1) with `prune_symmetry`, which
/// pins index 0 to cluster 0 — valid because cluster ids are interchangeable)
/// and return the maximum cut.
pub fn brute_force_max_kcut(
    w: &WeightMatrix,
    k: usize,
    prune_symmetry: bool,
) -> Result<OracleResult> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "cluster count must be at least 2, got {k}"
        )));
    }
    let n = w.size();
    if n > MAX_BRUTE_FORCE_SIZE {
        return Err(Error::TooLarge(format!(
            "{n} points exceed the brute-force bound of {MAX_BRUTE_FORCE_SIZE}"
        )));
    }

    let mut assignment = vec![0usize; n];
    let mut best_value = f64::NEG_INFINITY;
    let mut best_assignment = assignment.clone();
    let mut enumerated = 0u64;
    // Digits after the first (possibly pinned) index run through a plain
    // odometer in lexicographic order.
    let free_start = if prune_symmetry { 1 } else { 0 };

    loop {
        enumerated += 1;
        let mut between = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                if assignment[i] != assignment[j] {
                    between += w.get(i, j);
                }
            }
        }
        if between > best_value {
            best_value = between;
            best_assignment.copy_from_slice(&assignment);
        }

        // Advance the odometer (last index varies fastest).
        let mut pos = n;
        loop {
            if pos == free_start {
                return Ok(OracleResult {
                    optimum: best_value,
                    argmax: Partition::new(best_assignment, k)?,
                    enumerated,
                });
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < k {
                break;
            }
            assignment[pos] = 0;
        }
    }
}
