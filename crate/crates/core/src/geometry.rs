//! Equilateral simplex frames and the exact / relaxed cut objectives.
//!
//! For k clusters, the frame holds k unit vectors in R^(k-1) whose pairwise
//! inner products are all -1/(k-1). Assigning each point to a frame vector
//! makes the weighted objective count exactly the dissimilarity between
//! points in different clusters; replacing frame vectors with free unit
//! vectors gives the relaxed objective the semidefinite solver maximizes.

use ndarray::{Array2, ArrayView1};

use crate::dataset::WeightMatrix;
use crate::error::{Error, Result};
use crate::rounding::Partition;
use crate::sdp::UnitVectorSet;

/// The k normalized centroid-to-vertex directions of an equilateral simplex.
#[derive(Debug, Clone)]
pub struct SimplexFrame {
    directions: Array2<f64>, // row i = a_i, shape (k, k-1)
    gram: Array2<f64>,       // cached pairwise inner products
}

impl SimplexFrame {
    pub fn k(&self) -> usize {
        self.directions.nrows()
    }

    pub fn dim(&self) -> usize {
        self.directions.ncols()
    }

    pub fn direction(&self, i: usize) -> ArrayView1<'_, f64> {
        self.directions.row(i)
    }

    pub fn directions(&self) -> &Array2<f64> {
        &self.directions
    }

    /// Inner product of directions i and j.
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.gram[[i, j]]
    }
}

/// Construct the canonical simplex frame for k clusters.
///
/// The construction is a Cholesky-style factorization of the target Gram
/// matrix (ones on the diagonal, -1/(k-1) off it), which fixes a single
/// orientation: the first direction is e_1 and each later direction adds one
/// coordinate. Deterministic across runs.
pub fn simplex_frame(k: usize) -> Result<SimplexFrame> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "a simplex frame needs at least 2 directions, got {k}"
        )));
    }
    let dim = k - 1;
    let off = -1.0 / dim as f64;
    let mut a = Array2::zeros((k, dim));
    for i in 0..k {
        for d in 0..i.min(dim) {
            let mut s = off;
            for t in 0..d {
                s -= a[[i, t]] * a[[d, t]];
            }
            a[[i, d]] = s / a[[d, d]];
        }
        if i < dim {
            let mut s = 1.0f64;
            for t in 0..i {
                s -= a[[i, t]] * a[[i, t]];
            }
            a[[i, i]] = s.max(0.0).sqrt();
        }
    }
    let gram = a.dot(&a.t());
    Ok(SimplexFrame { directions: a, gram })
}

/// Cut objective of a concrete partition, evaluated through the frame:
/// (k-1)/k * sum_{i<j} w_ij (1 - <a_{p(i)}, a_{p(j)}>).
///
/// Same-cluster pairs contribute nothing and cross-cluster pairs contribute
/// w_ij, so the value equals the between-cluster dissimilarity.
pub fn exact_objective(w: &WeightMatrix, frame: &SimplexFrame, p: &Partition) -> Result<f64> {
    let m = w.size();
    if p.len() != m {
        return Err(Error::Dimension(format!(
            "partition covers {} indices but the weight matrix has {m}",
            p.len()
        )));
    }
    if p.k() != frame.k() {
        return Err(Error::Dimension(format!(
            "partition uses k={} but the frame has k={}",
            p.k(),
            frame.k()
        )));
    }
    let factor = (frame.k() - 1) as f64 / frame.k() as f64;
    let mut sum = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let wij = w.get(i, j);
            if wij != 0.0 {
                sum += wij * (1.0 - frame.inner(p.cluster_of(i), p.cluster_of(j)));
            }
        }
    }
    Ok(factor * sum)
}

/// Relaxed objective over free unit vectors:
/// (k-1)/k * sum_{i<j} w_ij (1 - <v_i, v_j>).
pub fn relaxed_objective(w: &WeightMatrix, k: usize, v: &UnitVectorSet) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("cluster count must be at least 2, got {k}")));
    }
    let m = w.size();
    if v.count() != m {
        return Err(Error::Dimension(format!(
            "{} vectors for a {m}x{m} weight matrix",
            v.count()
        )));
    }
    let factor = (k - 1) as f64 / k as f64;
    let mut sum = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let wij = w.get(i, j);
            if wij != 0.0 {
                sum += wij * (1.0 - v.inner(i, j));
            }
        }
    }
    Ok(factor * sum)
}
