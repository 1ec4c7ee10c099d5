//! Semidefinite relaxation solver.
//!
//! The relaxation replaces cluster assignments with unit vectors v_i and
//! maximizes (k-1)/k * sum_{i<j} w_ij (1 - <v_i, v_j>) subject to
//! <v_i, v_j> >= -1/(k-1) for i != j. Instead of optimizing the full Gram
//! matrix we factor it through a low-rank matrix V (one column per point)
//! and optimize over the product of unit spheres with limited-memory BFGS,
//! handling the pairwise inequality constraints through an
//! augmented-Lagrangian hinge term with a decreasing inner-tolerance
//! schedule. Fixed seeds give bit-identical solves.

use ndarray::{s, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::WeightMatrix;
use crate::error::{Error, Result};
use crate::geometry::relaxed_objective;

/// Columns of the matrix V: one unit vector per point.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVectorSet {
    columns: Array2<f64>, // shape (dim, count)
}

const NORM_TOL: f64 = 1e-6;
const LBFGS_MEMORY: usize = 8;

impl UnitVectorSet {
    /// Wrap a (dim x count) matrix whose columns are unit vectors.
    pub fn new(columns: Array2<f64>) -> Result<Self> {
        if columns.ncols() == 0 || columns.nrows() == 0 {
            return Err(Error::Size("a vector set needs at least one vector".into()));
        }
        for (j, col) in columns.columns().into_iter().enumerate() {
            let norm = col.dot(&col).sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::Domain(format!(
                    "column {j} has norm {norm}, expected 1 within {NORM_TOL}"
                )));
            }
        }
        Ok(Self { columns })
    }

    pub fn count(&self) -> usize {
        self.columns.ncols()
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn column(&self, i: usize) -> ArrayView1<'_, f64> {
        self.columns.column(i)
    }

    pub fn columns(&self) -> &Array2<f64> {
        &self.columns
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.columns.column(i).dot(&self.columns.column(j))
    }

    /// Smallest pairwise inner product (feasibility margin check).
    pub fn min_pairwise_inner(&self) -> f64 {
        let m = self.count();
        let mut min = f64::INFINITY;
        for i in 0..m {
            for j in (i + 1)..m {
                min = min.min(self.inner(i, j));
            }
        }
        min
    }

    /// Largest deviation of a column norm from 1.
    pub fn max_norm_violation(&self) -> f64 {
        self.columns
            .columns()
            .into_iter()
            .map(|c| (c.dot(&c).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// First `n` columns (drops padding phantoms).
    pub fn take_leading(&self, n: usize) -> UnitVectorSet {
        UnitVectorSet {
            columns: self.columns.slice(s![.., ..n.min(self.count())]).to_owned(),
        }
    }
}

/// Settings for [`solve_relaxation`].
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Outer augmented-Lagrangian rounds (multiplier updates).
    pub max_outer: usize,
    /// Descent iterations per outer round.
    pub max_inner: usize,
    /// Stationarity target: max column norm of the projected gradient.
    pub tolerance: f64,
    /// Permitted violation of the pairwise inner-product bound.
    pub constraint_tol: f64,
    /// Seed for the random initialization.
    pub seed: u64,
    /// Factor rank override; default is min(m, ceil(sqrt(2m)) + 1).
    pub rank: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_outer: 24,
            max_inner: 2000,
            tolerance: 1e-6,
            constraint_tol: 1e-6,
            seed: 0,
            rank: None,
        }
    }
}

/// Residual magnitudes of a finished solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverResiduals {
    pub norm_violation: f64,
    pub constraint_violation: f64,
    pub stationarity: f64,
}

/// Result of a relaxation solve.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub vectors: UnitVectorSet,
    /// Relaxed objective of `vectors` on the original weights.
    pub objective: f64,
    /// Total inner iterations across all outer rounds.
    pub iterations: usize,
    pub residuals: SolverResiduals,
    /// Whether both the stationarity and constraint tolerances were met.
    pub converged: bool,
}

pub fn default_rank(m: usize) -> usize {
    let r = ((2 * m) as f64).sqrt().ceil() as usize + 1;
    r.min(m).max(1)
}

/// Augmented-Lagrangian value (constant terms dropped): the part of the
/// negated objective that varies, plus the hinge penalty for violated
/// pairwise bounds.
fn al_value(y: &[f64], cw: &[f64], lambda: &[f64], rho: f64, bound: f64, m: usize) -> f64 {
    let mut val = 0.0;
    for i in 0..m {
        let row = i * m;
        for j in (i + 1)..m {
            let yij = y[row + j];
            val += cw[row + j] * yij;
            let lam = lambda[row + j];
            let active = (lam + rho * (bound - yij)).max(0.0);
            val += (active * active - lam * lam) / (2.0 * rho);
        }
    }
    val
}

fn normalize_columns(v: &mut Array2<f64>) {
    for mut col in v.columns_mut() {
        let norm = col.dot(&col).sqrt();
        if norm > 0.0 {
            col.mapv_inplace(|x| x / norm);
        } else {
            col.fill(0.0);
            col[0] = 1.0;
        }
    }
}

/// Solve the relaxation for `w` with `k` clusters.
///
/// The returned vectors are feasible to within `constraint_tol` and the
/// objective is evaluated on the original (unnormalized) weights. A solve
/// that exhausts its iteration budget is returned with `converged = false`
/// rather than as an error.
pub fn solve_relaxation(w: &WeightMatrix, k: usize, cfg: &SolverConfig) -> Result<SdpSolution> {
    if k < 2 {
        return Err(Error::Domain(format!(
            "cluster count must be at least 2, got {k}"
        )));
    }
    let m = w.size();
    let rank = cfg.rank.unwrap_or_else(|| default_rank(m)).clamp(1, m.max(2));
    let bound = -1.0 / (k - 1) as f64;
    let factor = (k - 1) as f64 / k as f64;

    // Seeded initialization: standard-normal columns, normalized.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v = Array2::zeros((rank, m));
    for j in 0..m {
        for d in 0..rank {
            v[[d, j]] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    normalize_columns(&mut v);

    // Work on weights scaled to max 1 so tolerances and the penalty are
    // scale-free; the reported objective uses the original weights.
    let wmax = w.max_weight();
    let cw_arr = if wmax > 0.0 {
        w.entries().mapv(|e| factor * e / wmax)
    } else {
        Array2::zeros((m, m))
    };
    let cw = cw_arr.as_slice().expect("standard layout").to_vec();

    let mut lambda = vec![0.0f64; m * m];
    let mut rho = 10.0f64;
    let mut y_arr = v.t().dot(&v);
    let mut f_cur = al_value(y_arr.as_slice().unwrap(), &cw, &lambda, rho, bound, m);
    let mut alpha = 1.0f64;
    let mut total_iters = 0usize;
    let mut stat = f64::INFINITY;
    let mut converged = false;

    // Multiplier error shows up as a complementarity residual; it bounds how
    // far a feasible stationary point of the Lagrangian can still be from
    // the constrained optimum, so it gates outer convergence too.
    let cw_total: f64 = {
        let mut acc = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                acc += cw[i * m + j];
            }
        }
        acc
    };
    let comp_tol = 0.1 * cfg.tolerance * (1.0 + cw_total);

    let max_violation = |y: &[f64]| -> f64 {
        let mut viol = 0.0f64;
        for i in 0..m {
            for j in (i + 1)..m {
                viol = viol.max(bound - y[i * m + j]);
            }
        }
        viol.max(0.0)
    };

    // Forcing sequence: early subproblems are solved loosely (their
    // multipliers are still wrong anyway), later ones tighter as the
    // infeasibility shrinks. Scaled by the initial gradient magnitude so
    // instance size does not change the schedule's meaning.
    let g_scale = {
        let a0 = Array2::from_shape_vec((m, m), cw.clone()).expect("square");
        let g0 = v.dot(&a0);
        g0.columns()
            .into_iter()
            .map(|c| c.dot(&c).sqrt())
            .fold(0.0, f64::max)
            .max(1.0)
    };
    let mut inner_tol = (1e-3 * g_scale).max(cfg.tolerance);
    let mut prev_viol = f64::INFINITY;
    let mut prev_stat = f64::INFINITY;

    'outer: for round in 0..cfg.max_outer.max(1) {
        // Limited-memory BFGS on the product of unit spheres (projection as
        // the transport), safeguarded by a non-monotone Armijo backtrack.
        // Curvature pairs use projected gradients; the history is cleared on
        // every multiplier update because the subproblem changes under it.
        let mut prev_pair: Option<(Array2<f64>, Array2<f64>)> = None; // (V, RG) at last eval
        let mut history: std::collections::VecDeque<(Array2<f64>, Array2<f64>, f64)> =
            std::collections::VecDeque::with_capacity(LBFGS_MEMORY);
        let mut gamma = alpha;
        let mut recent_f = std::collections::VecDeque::with_capacity(8);
        recent_f.push_back(f_cur);
        let mut a_arr = Array2::zeros((m, m));
        for _ in 0..cfg.max_inner {
            // Euclidean gradient G = V (cw - mu), mu the active multipliers.
            {
                let a = a_arr.as_slice_mut().unwrap();
                let y = y_arr.as_slice().unwrap();
                for i in 0..m {
                    for j in (i + 1)..m {
                        let idx = i * m + j;
                        let mu = (lambda[idx] + rho * (bound - y[idx])).max(0.0);
                        let entry = cw[idx] - mu;
                        a[idx] = entry;
                        a[j * m + i] = entry;
                    }
                }
            }
            let g = v.dot(&a_arr);

            // Project onto the tangent spaces of the unit spheres.
            let mut rg = g;
            let mut max_col = 0.0f64;
            for j in 0..m {
                let vj = v.column(j);
                let dot = rg.column(j).dot(&vj);
                let mut col = rg.column_mut(j);
                col.zip_mut_with(&vj, |r, &u| *r -= dot * u);
                max_col = max_col.max(col.dot(&col).sqrt());
            }
            stat = max_col;
            if stat <= inner_tol {
                break;
            }
            total_iters += 1;

            // Record the curvature pair from the last accepted move.
            if let Some((pv, prg)) = prev_pair.take() {
                let s = &v - &pv;
                let yv = &rg - &prg;
                let sy: f64 = s.iter().zip(yv.iter()).map(|(a, b)| a * b).sum();
                let ss: f64 = s.iter().map(|x| x * x).sum();
                let yy: f64 = yv.iter().map(|x| x * x).sum();
                if sy > 1e-12 * ss.sqrt() * yy.sqrt() && yy > 0.0 {
                    gamma = (sy / yy).clamp(1e-10, 1e6);
                    if history.len() == LBFGS_MEMORY {
                        history.pop_front();
                    }
                    history.push_back((s, yv, 1.0 / sy));
                }
            }
            prev_pair = Some((v.clone(), rg.clone()));

            // Two-loop recursion for the quasi-Newton direction.
            let mut dir = rg.clone();
            let mut coeffs = Vec::with_capacity(history.len());
            for (s, yv, inv_sy) in history.iter().rev() {
                let a_i = inv_sy * s.iter().zip(dir.iter()).map(|(a, b)| a * b).sum::<f64>();
                dir.zip_mut_with(yv, |d, &yk| *d -= a_i * yk);
                coeffs.push(a_i);
            }
            dir.mapv_inplace(|x| x * gamma);
            for ((s, yv, inv_sy), a_i) in history.iter().zip(coeffs.into_iter().rev()) {
                let b = inv_sy * yv.iter().zip(dir.iter()).map(|(a, b)| a * b).sum::<f64>();
                dir.zip_mut_with(s, |d, &sk| *d += (a_i - b) * sk);
            }
            // Directional derivative along -dir; fall back to the plain
            // gradient when the model loses descent.
            let mut slope: f64 = rg.iter().zip(dir.iter()).map(|(a, b)| a * b).sum();
            if !slope.is_finite() || slope <= 0.0 {
                history.clear();
                dir = rg.clone();
                dir.mapv_inplace(|x| x * gamma);
                slope = gamma * rg.iter().map(|x| x * x).sum::<f64>();
            }

            let f_ref = recent_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut trial = 1.0f64;
            let mut accepted = false;
            let mut best_fallback: Option<(Array2<f64>, Array2<f64>, f64)> = None;
            for _ in 0..60 {
                let mut v_try = &v - &(&dir * trial);
                normalize_columns(&mut v_try);
                let y_try = v_try.t().dot(&v_try);
                let f_try = al_value(y_try.as_slice().unwrap(), &cw, &lambda, rho, bound, m);
                if f_try <= f_ref - 1e-4 * trial * slope {
                    v = v_try;
                    y_arr = y_try;
                    f_cur = f_try;
                    accepted = true;
                    break;
                }
                if f_try < f_cur
                    && best_fallback.as_ref().is_none_or(|(_, _, bf)| f_try < *bf)
                {
                    best_fallback = Some((v_try, y_try, f_try));
                }
                trial *= 0.5;
                if trial < 1e-16 {
                    break;
                }
            }
            if !accepted {
                // Take any strict decrease if the sufficient-decrease test
                // cannot be certified at this floating-point scale.
                if let Some((v_b, y_b, f_b)) = best_fallback {
                    v = v_b;
                    y_arr = y_b;
                    f_cur = f_b;
                    history.clear();
                } else {
                    break; // no descent available: numerically stationary
                }
            }

            recent_f.push_back(f_cur);
            if recent_f.len() > 8 {
                recent_f.pop_front();
            }
        }

        alpha = gamma; // carry the curvature scale into the next round

        let viol = max_violation(y_arr.as_slice().unwrap());
        // Multiplier update for the inequality constraints.
        let mut comp = 0.0f64;
        {
            let y = y_arr.as_slice().unwrap();
            for i in 0..m {
                for j in (i + 1)..m {
                    let idx = i * m + j;
                    let next = (lambda[idx] + rho * (bound - y[idx])).max(0.0);
                    lambda[idx] = next;
                    lambda[j * m + i] = next;
                    comp += next * (y[idx] - bound).max(0.0);
                }
            }
        }
        if stat <= cfg.tolerance && viol <= cfg.constraint_tol && comp <= comp_tol {
            converged = true;
            break 'outer;
        }
        // Feasibility is driven by the multiplier updates at a fixed
        // penalty; grow the penalty only when the infeasibility stalls,
        // since larger penalties stiffen the subproblems.
        if viol > cfg.constraint_tol && viol > 0.25 * prev_viol {
            rho = (rho * 10.0).min(1e8);
        }
        // Stop early once feasible, complementary, and the stationarity has
        // essentially stopped improving between rounds: further rounds would
        // only churn.
        if round >= 7
            && viol <= cfg.constraint_tol
            && comp <= comp_tol
            && stat > 0.9 * prev_stat
        {
            break 'outer;
        }
        prev_viol = viol;
        prev_stat = stat;
        inner_tol = cfg.tolerance.max(inner_tol.min(0.3 * g_scale * viol.max(stat * 0.1)));
        f_cur = al_value(y_arr.as_slice().unwrap(), &cw, &lambda, rho, bound, m);
    }

    let constraint_violation = max_violation(y_arr.as_slice().unwrap());
    let vectors = UnitVectorSet::new(v)?;
    let norm_violation = vectors.max_norm_violation();
    let objective = relaxed_objective(w, k, &vectors)?;
    Ok(SdpSolution {
        vectors,
        objective,
        iterations: total_iters,
        residuals: SolverResiduals {
            norm_violation,
            constraint_violation,
            stationarity: stat,
        },
        converged: converged || (stat <= cfg.tolerance && constraint_violation <= cfg.constraint_tol),
    })
}
