//! Between/within dissimilarity accounting and a 2D silhouette score.

use ndarray::ArrayView2;

use crate::dataset::WeightMatrix;
use crate::error::{Error, Result};
use crate::rounding::Partition;

/// Split of the total pairwise dissimilarity into cross-cluster (`between`)
/// and same-cluster (`within`) parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterMetrics {
    pub between: f64,
    pub within: f64,
    pub total: f64,
}

/// Sum w_ij over same-cluster pairs (within) and cross-cluster pairs
/// (between). `total` is summed independently over all pairs, so the
/// conservation identity between + within = total is a real check, not a
/// definition.
pub fn cluster_metrics(w: &WeightMatrix, p: &Partition) -> Result<ClusterMetrics> {
    let m = w.size();
    if p.len() != m {
        return Err(Error::Dimension(format!(
            "partition covers {} indices but the weight matrix has {m}",
            p.len()
        )));
    }
    let mut between = 0.0;
    let mut within = 0.0;
    let mut total = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let wij = w.get(i, j);
            total += wij;
            if p.cluster_of(i) == p.cluster_of(j) {
                within += wij;
            } else {
                between += wij;
            }
        }
    }
    Ok(ClusterMetrics {
        between,
        within,
        total,
    })
}

/// Mean silhouette coefficient of a 2D embedding under a partition.
///
/// Uses Euclidean distance. Singleton clusters score 0 for their point, and
/// a point whose cohesion and separation are both zero (coincident
/// geometry) also scores 0.
pub fn silhouette_2d(coords: ArrayView2<'_, f64>, p: &Partition) -> Result<f64> {
    let n = coords.nrows();
    if coords.ncols() != 2 {
        return Err(Error::Dimension(format!(
            "expected 2 coordinate columns, got {}",
            coords.ncols()
        )));
    }
    if n < 3 {
        return Err(Error::Size(format!(
            "silhouette needs at least 3 points, got {n}"
        )));
    }
    if p.len() != n {
        return Err(Error::Dimension(format!(
            "partition covers {} indices but there are {n} points",
            p.len()
        )));
    }
    let sizes = p.cluster_sizes();
    let non_empty = sizes.iter().filter(|&&s| s > 0).count();
    if non_empty < 2 {
        return Err(Error::UndefinedMetric(
            "silhouette requires at least 2 non-empty clusters".into(),
        ));
    }

    let dist = |i: usize, j: usize| -> f64 {
        let dx = coords[[i, 0]] - coords[[j, 0]];
        let dy = coords[[i, 1]] - coords[[j, 1]];
        (dx * dx + dy * dy).sqrt()
    };

    let k = p.k();
    let mut acc = 0.0;
    for i in 0..n {
        let own = p.cluster_of(i);
        if sizes[own] == 1 {
            continue; // singleton contributes 0
        }
        let mut sums = vec![0.0f64; k];
        for j in 0..n {
            if j != i {
                sums[p.cluster_of(j)] += dist(i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c != own && sizes[c] > 0 {
                b = b.min(sums[c] / sizes[c] as f64);
            }
        }
        let denom = a.max(b);
        if denom > 0.0 {
            acc += (b - a) / denom;
        }
    }
    Ok(acc / n as f64)
}
