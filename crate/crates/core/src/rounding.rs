//! Randomized rounding of relaxed vectors into a partition.
//!
//! A single round draws one standard-normal vector per cluster and assigns
//! each point to the cluster whose random vector it aligns with best.
//! Repeating and keeping the best candidate under the between/within update
//! rule turns the stochastic step into a usable clustering.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::WeightMatrix;
use crate::error::{Error, Result};
use crate::metrics::{cluster_metrics, ClusterMetrics};
use crate::sdp::UnitVectorSet;

/// Assignment of each index to one of k clusters (ids 0..k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("cluster count must be positive".into()));
        }
        if let Some(&bad) = assignment.iter().find(|&&c| c >= k) {
            return Err(Error::Domain(format!(
                "cluster id {bad} out of range for k={k}"
            )));
        }
        Ok(Self { assignment, k })
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cluster_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Number of points in each cluster.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Keep only the leading `n` indices (drops padding phantoms).
    pub fn truncated(&self, n: usize) -> Partition {
        Partition {
            assignment: self.assignment[..n.min(self.assignment.len())].to_vec(),
            k: self.k,
        }
    }
}

/// Best partition found over repeated rounding, with its dissimilarity split.
#[derive(Debug, Clone)]
pub struct RoundingOutcome {
    pub best: Partition,
    pub best_between: f64,
    pub best_within: f64,
    pub rounds_run: usize,
    /// Accepted replacements of the incumbent after the first round.
    pub improvements: usize,
}

fn mix_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer; decorrelates adjacent stream indices
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for one rounding round, derived from the master seed and round index.
///
/// Rounds are independent streams, so they can run in any order (or in
/// parallel) and still reproduce bit-identically.
pub fn round_rng(master_seed: u64, round: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(master_seed, round as u64))
}

/// One rounding round: draw k standard-normal vectors z_1..z_k and assign
/// each point i to argmax_l <v_i, z_l>. Ties go to the lowest cluster id.
pub fn round_once<R: Rng + ?Sized>(v: &UnitVectorSet, k: usize, rng: &mut R) -> Partition {
    debug_assert!(k >= 1);
    let dim = v.dim();
    let m = v.count();
    let mut z = Array2::zeros((k, dim));
    for l in 0..k {
        for d in 0..dim {
            z[[l, d]] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let mut assignment = Vec::with_capacity(m);
    for i in 0..m {
        let vi = v.column(i);
        let mut best_l = 0usize;
        let mut best = f64::NEG_INFINITY;
        for l in 0..k {
            let score = z.row(l).dot(&vi);
            if score > best {
                best = score;
                best_l = l;
            }
        }
        assignment.push(best_l);
    }
    Partition { assignment, k }
}

/// Run `rounds` rounding rounds and keep the best candidate.
///
/// The first round initializes the incumbent; a later candidate replaces it
/// only when its between-cluster dissimilarity is strictly larger and its
/// within-cluster dissimilarity strictly smaller. Candidates are evaluated
/// in parallel but reduced in round order, so a fixed master seed gives the
/// same outcome at any thread count.
pub fn best_of_rounds(
    w: &WeightMatrix,
    v: &UnitVectorSet,
    k: usize,
    rounds: usize,
    master_seed: u64,
) -> Result<RoundingOutcome> {
    if k < 2 {
        return Err(Error::Domain(format!("cluster count must be at least 2, got {k}")));
    }
    if rounds < 1 {
        return Err(Error::Config("at least one rounding round is required".into()));
    }
    if v.count() != w.size() {
        return Err(Error::Dimension(format!(
            "{} vectors for a {}x{} weight matrix",
            v.count(),
            w.size(),
            w.size()
        )));
    }

    let candidates: Vec<(Partition, ClusterMetrics)> = (0..rounds)
        .into_par_iter()
        .map(|round| {
            let mut rng = round_rng(master_seed, round);
            let p = round_once(v, k, &mut rng);
            let m = cluster_metrics(w, &p).expect("partition length matches weight matrix");
            (p, m)
        })
        .collect();

    let mut it = candidates.into_iter();
    let (mut best, mut best_metrics) = it.next().expect("rounds >= 1");
    let mut improvements = 0usize;
    for (p, m) in it {
        if m.between > best_metrics.between && m.within < best_metrics.within {
            best = p;
            best_metrics = m;
            improvements += 1;
        }
    }

    Ok(RoundingOutcome {
        best,
        best_between: best_metrics.between,
        best_within: best_metrics.within,
        rounds_run: rounds,
        improvements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::WeightMatrix;
    use crate::geometry::simplex_frame;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use proptest::prelude::*;

    fn triangle_weights() -> WeightMatrix {
        let entries = Array2::from_shape_vec(
            (3, 3),
            vec![0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0],
        )
        .unwrap();
        WeightMatrix::from_entries(entries, 3).unwrap()
    }

    fn simplex_vertex_vectors(k: usize, copies: &[usize]) -> UnitVectorSet {
        let f = simplex_frame(k).unwrap();
        let mut cols = Array2::zeros((f.dim(), copies.len()));
        for (i, &c) in copies.iter().enumerate() {
            cols.column_mut(i).assign(&f.direction(c));
        }
        UnitVectorSet::new(cols).unwrap()
    }

    #[test]
    fn identical_vectors_share_one_cluster() {
        let cols = Array2::from_shape_vec(
            (2, 4),
            vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let v = UnitVectorSet::new(cols).unwrap();
        let mut rng = round_rng(7, 0);
        let p = round_once(&v, 3, &mut rng);
        let first = p.cluster_of(0);
        assert!(p.assignment().iter().all(|&c| c == first));
    }

    #[test]
    fn equal_vectors_always_land_together() {
        let v = simplex_vertex_vectors(3, &[0, 0, 1, 2, 1]);
        for round in 0..200 {
            let mut rng = round_rng(99, round);
            let p = round_once(&v, 3, &mut rng);
            assert_eq!(p.cluster_of(0), p.cluster_of(1));
            assert_eq!(p.cluster_of(2), p.cluster_of(4));
        }
    }

    #[test]
    fn separation_tendency_on_simplex_vertices() {
        // Two copies of vertex 0 plus one copy of vertex 1: same-vertex pairs
        // always land together; different-vertex pairs must do so less often.
        let v = simplex_vertex_vectors(3, &[0, 0, 1]);
        let rounds = 10_000usize;
        let mut same = 0usize;
        let mut diff = 0usize;
        for round in 0..rounds {
            let mut rng = round_rng(123, round);
            let p = round_once(&v, 3, &mut rng);
            if p.cluster_of(0) == p.cluster_of(1) {
                same += 1;
            }
            if p.cluster_of(0) == p.cluster_of(2) {
                diff += 1;
            }
        }
        assert_eq!(same, rounds);
        assert!(diff < same);
    }

    #[test]
    fn single_round_returns_sole_candidate() {
        let w = triangle_weights();
        let v = simplex_vertex_vectors(3, &[0, 1, 2]);
        let outcome = best_of_rounds(&w, &v, 3, 1, 5).unwrap();
        let mut rng = round_rng(5, 0);
        let sole = round_once(&v, 3, &mut rng);
        assert_eq!(outcome.best, sole);
        assert_eq!(outcome.rounds_run, 1);
        assert_eq!(outcome.improvements, 0);
    }

    #[test]
    fn reaches_optimum_on_exact_simplex_vectors() {
        let w = triangle_weights();
        let v = simplex_vertex_vectors(3, &[0, 1, 2]);
        let outcome = best_of_rounds(&w, &v, 3, 200, 13).unwrap();
        assert_abs_diff_eq!(outcome.best_between, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(outcome.best_within, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            outcome.best_between + outcome.best_within,
            w.total_weight(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn best_between_is_monotone_in_rounds() {
        let w = triangle_weights();
        let v = simplex_vertex_vectors(3, &[0, 1, 2]);
        let mut prev = f64::NEG_INFINITY;
        for rounds in [1usize, 5, 30, 90] {
            let outcome = best_of_rounds(&w, &v, 3, rounds, 21).unwrap();
            assert!(outcome.best_between >= prev);
            prev = outcome.best_between;
        }
    }

    #[test]
    fn outcome_is_identical_across_thread_counts() {
        let w = triangle_weights();
        let v = simplex_vertex_vectors(3, &[0, 1, 2]);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| best_of_rounds(&w, &v, 3, 64, 17).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.best, b.best);
        assert_eq!(a.best_between.to_bits(), b.best_between.to_bits());
        assert_eq!(a.best_within.to_bits(), b.best_within.to_bits());
        assert_eq!(a.improvements, b.improvements);
    }

    #[test]
    fn argument_validation() {
        let w = triangle_weights();
        let v = simplex_vertex_vectors(3, &[0, 1]);
        assert!(matches!(
            best_of_rounds(&w, &v, 3, 10, 0),
            Err(Error::Dimension(_))
        ));
        let v3 = simplex_vertex_vectors(3, &[0, 1, 2]);
        assert!(matches!(
            best_of_rounds(&w, &v3, 1, 10, 0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            best_of_rounds(&w, &v3, 3, 0, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn partition_validates_ids() {
        assert!(Partition::new(vec![0, 2], 2).is_err());
        assert!(Partition::new(vec![0, 1], 0).is_err());
        let p = Partition::new(vec![0, 1, 1], 3).unwrap();
        assert_eq!(p.cluster_sizes(), vec![1, 2, 0]);
        assert_eq!(p.truncated(2).assignment(), &[0, 1]);
    }

    proptest! {
        // best_between + best_within accounts for every pair exactly once.
        #[test]
        fn outcome_conserves_total_weight(
            weights in proptest::collection::vec(0.0f64..4.0, 10),
            seed in 0u64..500,
        ) {
            let n = 5;
            let mut entries = Array2::zeros((n, n));
            let mut it = weights.into_iter();
            for i in 0..n {
                for j in (i + 1)..n {
                    let w = it.next().unwrap();
                    entries[[i, j]] = w;
                    entries[[j, i]] = w;
                }
            }
            let w = WeightMatrix::from_entries(entries, n).unwrap();
            let v = simplex_vertex_vectors(3, &[0, 1, 2, 0, 1]);
            let outcome = best_of_rounds(&w, &v, 3, 25, seed).unwrap();
            let total = w.total_weight();
            let sum = outcome.best_between + outcome.best_within;
            prop_assert!((sum - total).abs() <= 1e-9 * total.max(1.0));
        }
    }
}
