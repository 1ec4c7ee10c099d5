//! Two-dimensional principal component projection of the solved vectors.
//!
//! Each v_i is treated as a sample; the samples are mean-centered and
//! projected onto the top two eigendirections of their covariance. The
//! resulting rows feed the next recursion level and the scatter plots.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::sdp::UnitVectorSet;

/// Centered 2D projection with per-axis explained-variance fractions.
#[derive(Debug, Clone)]
pub struct Embedding2D {
    coords: Array2<f64>, // n x 2
    explained_variance: [f64; 2],
}

impl Embedding2D {
    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.nrows() == 0
    }

    pub fn coords(&self) -> &Array2<f64> {
        &self.coords
    }

    pub fn explained_variance(&self) -> [f64; 2] {
        self.explained_variance
    }

    pub fn row(&self, i: usize) -> [f64; 2] {
        [self.coords[[i, 0]], self.coords[[i, 1]]]
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in descending order with matching eigenvector
/// columns. Rotations stop when the largest off-diagonal entry falls below
/// 1e-12 of the Frobenius norm, which keeps eigenpair residuals under 1e-10.
fn symmetric_eigen(input: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = input.nrows();
    let mut a = input.clone();
    let mut q = Array2::eye(n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-12 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off = off.max(a[[p, r]].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for r in (p + 1)..n {
                let apr = a[[p, r]];
                if apr.abs() <= tol * 1e-3 {
                    continue;
                }
                let tau = (a[[r, r]] - a[[p, p]]) / (2.0 * apr);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[[i, p]];
                    let air = a[[i, r]];
                    a[[i, p]] = c * aip - s * air;
                    a[[i, r]] = s * aip + c * air;
                }
                for j in 0..n {
                    let apj = a[[p, j]];
                    let arj = a[[r, j]];
                    a[[p, j]] = c * apj - s * arj;
                    a[[r, j]] = s * apj + c * arj;
                }
                for i in 0..n {
                    let qip = q[[i, p]];
                    let qir = q[[i, r]];
                    q[[i, p]] = c * qip - s * qir;
                    q[[i, r]] = s * qip + c * qir;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[[j, j]]
            .partial_cmp(&a[[i, i]])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&q.column(src));
    }
    (values, vectors)
}

/// Flip each column so its entry of largest magnitude is positive; ties are
/// broken by the lowest row index. Eigenvector signs are arbitrary, so this
/// pins one orientation for reproducible output files.
fn apply_sign_convention(coords: &mut Array2<f64>) {
    for c in 0..coords.ncols() {
        let col = coords.column(c);
        let mut idx = 0usize;
        let mut best = 0.0f64;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                idx = i;
            }
        }
        if best > 0.0 && coords[[idx, c]] < 0.0 {
            coords.column_mut(c).mapv_inplace(|x| -x);
        }
    }
}

/// Project the vectors of `v` onto their top two principal directions.
///
/// Rank-deficient inputs are handled by zero-filling: identical samples give
/// all-zero coordinates and (0, 0) explained variance.
pub fn pca_2d(v: &UnitVectorSet) -> Result<Embedding2D> {
    let n = v.count();
    if n < 3 {
        return Err(Error::Size(format!(
            "PCA needs at least 3 samples, got {n}"
        )));
    }
    let d = v.dim();
    let x = v.columns().t().to_owned(); // samples as rows, n x d
    let mean = x.mean_axis(Axis(0)).expect("n >= 3");
    let xc = &x - &mean.broadcast((n, d)).expect("broadcast mean");

    let total_var: f64 = xc.iter().map(|e| e * e).sum();
    let mut coords = Array2::zeros((n, 2));
    let mut explained = [0.0f64; 2];
    if total_var <= 1e-18 {
        return Ok(Embedding2D {
            coords,
            explained_variance: explained,
        });
    }

    // Eigen-decompose whichever of the covariance (d x d) or Gram (n x n)
    // matrices is smaller; both share the nonzero spectrum.
    if d <= n {
        let cov = xc.t().dot(&xc);
        let (values, vectors) = symmetric_eigen(&cov);
        for c in 0..2.min(d) {
            let lam = values[c].max(0.0);
            if lam <= total_var * 1e-14 {
                continue;
            }
            let proj = xc.dot(&vectors.column(c));
            coords.column_mut(c).assign(&proj);
            explained[c] = lam / total_var;
        }
    } else {
        let gram = xc.dot(&xc.t());
        let (values, vectors) = symmetric_eigen(&gram);
        for c in 0..2.min(n) {
            let lam = values[c].max(0.0);
            if lam <= total_var * 1e-14 {
                continue;
            }
            let scaled: Array1<f64> = vectors.column(c).mapv(|q| q * lam.sqrt());
            coords.column_mut(c).assign(&scaled);
            explained[c] = lam / total_var;
        }
    }

    apply_sign_convention(&mut coords);
    Ok(Embedding2D {
        coords,
        explained_variance: explained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::simplex_frame;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn unit_set(cols: Array2<f64>) -> UnitVectorSet {
        let mut c = cols;
        for mut col in c.columns_mut() {
            let norm = col.dot(&col).sqrt();
            col.mapv_inplace(|x| x / norm);
        }
        UnitVectorSet::new(c).unwrap()
    }

    fn random_unit_set(dim: usize, count: usize, seed: u64) -> UnitVectorSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols = Array2::zeros((dim, count));
        for j in 0..count {
            for d in 0..dim {
                cols[[d, j]] = rng.sample::<f64, _>(StandardNormal);
            }
        }
        unit_set(cols)
    }

    fn pairwise_dists(rows: &Array2<f64>) -> Vec<f64> {
        let n = rows.nrows();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = &rows.row(i) - &rows.row(j);
                out.push(diff.dot(&diff).sqrt());
            }
        }
        out
    }

    #[test]
    fn identical_vectors_collapse_to_zero() {
        let cols = Array2::from_shape_vec(
            (2, 4),
            vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let e = pca_2d(&UnitVectorSet::new(cols).unwrap()).unwrap();
        assert!(e.coords().iter().all(|&x| x == 0.0));
        assert_eq!(e.explained_variance(), [0.0, 0.0]);
    }

    #[test]
    fn centered_2d_input_is_projected_isometrically() {
        let cols = Array2::from_shape_vec(
            (2, 4),
            vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0],
        )
        .unwrap();
        let v = UnitVectorSet::new(cols).unwrap();
        let e = pca_2d(&v).unwrap();
        let before = pairwise_dists(&v.columns().t().to_owned());
        let after = pairwise_dists(e.coords());
        for (b, a) in before.iter().zip(after.iter()) {
            assert_abs_diff_eq!(b, a, epsilon = 1e-9);
        }
    }

    #[test]
    fn repeated_simplex_vertices_stay_equidistant() {
        let f = simplex_frame(3).unwrap();
        let mut cols = Array2::zeros((2, 9));
        for i in 0..9 {
            cols.column_mut(i).assign(&f.direction(i % 3));
        }
        let e = pca_2d(&UnitVectorSet::new(cols).unwrap()).unwrap();
        let mut rows: Vec<[f64; 2]> = (0..3).map(|i| e.row(i)).collect();
        rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rows.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        assert_eq!(rows.len(), 3, "expected 3 distinct coordinate rows");
        let d01 = ((e.row(0)[0] - e.row(1)[0]).powi(2) + (e.row(0)[1] - e.row(1)[1]).powi(2)).sqrt();
        let d02 = ((e.row(0)[0] - e.row(2)[0]).powi(2) + (e.row(0)[1] - e.row(2)[1]).powi(2)).sqrt();
        let d12 = ((e.row(1)[0] - e.row(2)[0]).powi(2) + (e.row(1)[1] - e.row(2)[1]).powi(2)).sqrt();
        assert_abs_diff_eq!(d01, d02, epsilon = 1e-9);
        assert_abs_diff_eq!(d01, d12, epsilon = 1e-9);
    }

    #[test]
    fn coords_are_centered_and_variance_ordered() {
        let v = random_unit_set(5, 12, 3);
        let e = pca_2d(&v).unwrap();
        for c in 0..2 {
            let mean: f64 = e.coords().column(c).iter().sum::<f64>() / 12.0;
            assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-9);
        }
        let [e1, e2] = e.explained_variance();
        assert!(e1 >= e2);
        assert!((0.0..=1.0).contains(&e1));
        assert!((0.0..=1.0).contains(&e2));
    }

    #[test]
    fn needs_three_samples() {
        let cols = Array2::from_shape_vec((2, 2), vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            pca_2d(&UnitVectorSet::new(cols).unwrap()),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn reordering_inputs_reorders_rows() {
        let v = random_unit_set(4, 6, 9);
        let e = pca_2d(&v).unwrap();
        let mut swapped = v.columns().clone();
        let c0 = v.columns().column(0).to_owned();
        let c3 = v.columns().column(3).to_owned();
        swapped.column_mut(0).assign(&c3);
        swapped.column_mut(3).assign(&c0);
        let e2 = pca_2d(&UnitVectorSet::new(swapped).unwrap()).unwrap();
        // Distance structure is what must move with the reorder; axes may
        // legitimately flip under the sign convention.
        let d = |emb: &Embedding2D, i: usize, j: usize| {
            let a = emb.row(i);
            let b = emb.row(j);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        };
        assert_abs_diff_eq!(d(&e, 0, 1), d(&e2, 3, 1), epsilon = 1e-9);
        assert_abs_diff_eq!(d(&e, 3, 5), d(&e2, 0, 5), epsilon = 1e-9);
    }

    #[test]
    fn tall_inputs_use_the_gram_path() {
        // dim > count triggers the n x n route; distances must still match
        // a direct check against the input.
        let v = random_unit_set(9, 4, 17);
        let e = pca_2d(&v).unwrap();
        assert_eq!(e.len(), 4);
        let before = pairwise_dists(&v.columns().t().to_owned());
        let after = pairwise_dists(e.coords());
        for (b, a) in before.iter().zip(after.iter()) {
            assert!(*a <= *b + 1e-9);
        }
    }

    #[test]
    fn eigen_residuals_are_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = 6;
            let mut s = Array2::zeros((n, n));
            for i in 0..n {
                for j in i..n {
                    let x: f64 = rng.sample(StandardNormal);
                    s[[i, j]] = x;
                    s[[j, i]] = x;
                }
            }
            let (vals, vecs) = symmetric_eigen(&s);
            for (c, &val) in vals.iter().enumerate() {
                let v = vecs.column(c);
                let residual = &s.dot(&v) - &v.mapv(|x| x * val);
                let norm = residual.dot(&residual).sqrt();
                assert!(norm <= 1e-10, "eigenpair residual {norm}");
            }
            for c in 1..n {
                assert!(vals[c - 1] >= vals[c]);
            }
        }
    }

    proptest! {
        // An orthogonal projection of centered data never stretches
        // distances.
        #[test]
        fn projection_is_non_expansive(seed in 0u64..200, dim in 3usize..8, count in 4usize..10) {
            let v = random_unit_set(dim, count, seed);
            let e = pca_2d(&v).unwrap();
            let before = pairwise_dists(&v.columns().t().to_owned());
            let after = pairwise_dists(e.coords());
            for (b, a) in before.iter().zip(after.iter()) {
                prop_assert!(*a <= *b + 1e-9);
            }
        }

        // Rotating every input vector by the same orthogonal map leaves the
        // projected distance structure unchanged.
        #[test]
        fn orthogonal_invariance_of_distances(seed in 0u64..100, angle in 0.1f64..3.0) {
            let dim = 4usize;
            let v = random_unit_set(dim, 7, seed);
            let mut rot = Array2::eye(dim);
            // A product of two Givens rotations in planes (0,1) and (2,3).
            let (s1, c1) = angle.sin_cos();
            let (s2, c2) = (angle * 0.7).sin_cos();
            rot[[0, 0]] = c1; rot[[0, 1]] = -s1;
            rot[[1, 0]] = s1; rot[[1, 1]] = c1;
            rot[[2, 2]] = c2; rot[[2, 3]] = -s2;
            rot[[3, 2]] = s2; rot[[3, 3]] = c2;
            let rotated = UnitVectorSet::new(rot.dot(v.columns())).unwrap();
            let a = pca_2d(&v).unwrap();
            let b = pca_2d(&rotated).unwrap();
            let da = pairwise_dists(a.coords());
            let db = pairwise_dists(b.coords());
            for (x, y) in da.iter().zip(db.iter()) {
                prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x.abs()));
            }
        }
    }
}
