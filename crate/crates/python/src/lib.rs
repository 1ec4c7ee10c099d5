//! Python bindings for the recursive Max k-Cut clustering engine.
//!
//! The module mirrors the core library surface: dataset loading, weight
//! matrices, the relaxation solver, randomized rounding, metrics, the 2D
//! projection, the recursive pipeline, the brute-force oracle, and the text
//! vectorizer.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use kcut_core as core;

fn to_py_err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_weight_kind(kind: &str) -> PyResult<core::WeightKind> {
    kind.parse().map_err(to_py_err)
}

fn parse_targets(targets: Option<Vec<String>>) -> PyResult<core::TargetList> {
    match targets {
        None => Ok(core::TargetList::default()),
        Some(words) => {
            let anchor = words
                .first()
                .cloned()
                .ok_or_else(|| PyValueError::new_err("targets must name at least one word"))?;
            core::TargetList::new(words, &anchor).map_err(to_py_err)
        }
    }
}

fn parse_lexicon(
    side_effects: Option<String>,
    human_terms: Option<String>,
) -> PyResult<core::SubstitutionLexicon> {
    match (side_effects, human_terms) {
        (None, None) => Ok(core::SubstitutionLexicon::default()),
        (se, ht) => {
            let se_text = se.unwrap_or_else(|| {
                include_str!("../../core/assets/side_effect_terms.txt").to_string()
            });
            let ht_text = ht
                .unwrap_or_else(|| include_str!("../../core/assets/human_terms.txt").to_string());
            core::SubstitutionLexicon::from_texts(&se_text, &ht_text).map_err(to_py_err)
        }
    }
}

/// A set of points with optional evaluation labels.
#[pyclass(name = "Dataset")]
struct PyDataset {
    inner: core::Dataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (points, labels=None))]
    fn new(points: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        Ok(Self {
            inner: core::Dataset::new(points, labels).map_err(to_py_err)?,
        })
    }

    /// Parse delimiter-separated numeric text.
    #[staticmethod]
    #[pyo3(signature = (text, has_labels=false))]
    fn from_csv(text: &str, has_labels: bool) -> PyResult<Self> {
        Ok(Self {
            inner: core::load_dataset(text, has_labels).map_err(to_py_err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points().rows().into_iter().map(|r| r.to_vec()).collect()
    }

    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(|l| l.to_vec())
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, dim={})", self.inner.len(), self.inner.dim())
    }
}

/// Symmetric nonnegative dissimilarity matrix with zero diagonal.
#[pyclass(name = "WeightMatrix")]
struct PyWeightMatrix {
    inner: core::WeightMatrix,
}

#[pymethods]
impl PyWeightMatrix {
    /// Build pairwise dissimilarities from a dataset
    /// (`kind` is "euclidean" or "squared").
    #[staticmethod]
    #[pyo3(signature = (dataset, kind="euclidean"))]
    fn build(dataset: &PyDataset, kind: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::build_weights(&dataset.inner, parse_weight_kind(kind)?),
        })
    }

    /// Validate and wrap an explicit matrix of entries.
    #[staticmethod]
    #[pyo3(signature = (entries, original_count=None))]
    fn from_entries(entries: Vec<Vec<f64>>, original_count: Option<usize>) -> PyResult<Self> {
        let m = entries.len();
        let flat: Vec<f64> = entries.into_iter().flatten().collect();
        let arr = ndarray::Array2::from_shape_vec((m, m), flat)
            .map_err(|e| PyValueError::new_err(format!("expected a square matrix: {e}")))?;
        Ok(Self {
            inner: core::WeightMatrix::from_entries(arr, original_count.unwrap_or(m))
                .map_err(to_py_err)?,
        })
    }

    /// Zero-pad to an `m x m` matrix.
    fn pad(&self, m: usize) -> PyResult<Self> {
        Ok(Self {
            inner: core::pad_weights(&self.inner, m).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn original_count(&self) -> usize {
        self.inner.original_count()
    }

    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    fn __repr__(&self) -> String {
        format!(
            "WeightMatrix(size={}, original_count={})",
            self.inner.size(),
            self.inner.original_count()
        )
    }
}

/// Unit vectors produced by the relaxation solver (columns of V).
#[pyclass(name = "UnitVectors")]
struct PyUnitVectors {
    inner: core::UnitVectorSet,
}

#[pymethods]
impl PyUnitVectors {
    #[getter]
    fn count(&self) -> usize {
        self.inner.count()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// The vectors, one list per point.
    fn vectors(&self) -> Vec<Vec<f64>> {
        (0..self.inner.count())
            .map(|i| self.inner.column(i).to_vec())
            .collect()
    }

    fn inner_product(&self, i: usize, j: usize) -> f64 {
        self.inner.inner(i, j)
    }

    fn min_pairwise_inner(&self) -> f64 {
        self.inner.min_pairwise_inner()
    }

    fn __repr__(&self) -> String {
        format!("UnitVectors(count={}, dim={})", self.inner.count(), self.inner.dim())
    }
}

/// Outcome of a relaxation solve.
#[pyclass(name = "SdpSolution")]
struct PySdpSolution {
    #[pyo3(get)]
    objective: f64,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    converged: bool,
    #[pyo3(get)]
    constraint_violation: f64,
    #[pyo3(get)]
    stationarity: f64,
    vectors: core::UnitVectorSet,
}

#[pymethods]
impl PySdpSolution {
    #[getter]
    fn vectors(&self) -> PyUnitVectors {
        PyUnitVectors {
            inner: self.vectors.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "SdpSolution(objective={}, converged={})",
            self.objective, self.converged
        )
    }
}

/// Best partition found by repeated rounding.
#[pyclass(name = "RoundingOutcome")]
struct PyRoundingOutcome {
    #[pyo3(get)]
    assignment: Vec<usize>,
    #[pyo3(get)]
    between: f64,
    #[pyo3(get)]
    within: f64,
    #[pyo3(get)]
    rounds_run: usize,
    #[pyo3(get)]
    improvements: usize,
}

/// One recursion level of the pipeline.
#[pyclass(name = "IterationRecord")]
struct PyIterationRecord {
    #[pyo3(get)]
    index: usize,
    #[pyo3(get)]
    assignment: Vec<usize>,
    #[pyo3(get)]
    between: f64,
    #[pyo3(get)]
    within: f64,
    #[pyo3(get)]
    total: f64,
    #[pyo3(get)]
    sdp_objective: f64,
    #[pyo3(get)]
    solver_converged: bool,
    #[pyo3(get)]
    coords: Vec<(f64, f64)>,
    #[pyo3(get)]
    explained_variance: (f64, f64),
}

#[pyfunction]
#[pyo3(signature = (text, has_labels=false))]
fn load_dataset(text: &str, has_labels: bool) -> PyResult<PyDataset> {
    PyDataset::from_csv(text, has_labels)
}

#[pyfunction]
#[pyo3(signature = (dataset, kind="euclidean"))]
fn build_weights(dataset: &PyDataset, kind: &str) -> PyResult<PyWeightMatrix> {
    PyWeightMatrix::build(dataset, kind)
}

/// The k simplex directions in (k-1)-space, pairwise inner product -1/(k-1).
#[pyfunction]
fn simplex_frame(k: usize) -> PyResult<Vec<Vec<f64>>> {
    let frame = core::simplex_frame(k).map_err(to_py_err)?;
    Ok((0..k).map(|i| frame.direction(i).to_vec()).collect())
}

#[pyfunction]
fn exact_objective(w: &PyWeightMatrix, assignment: Vec<usize>, k: usize) -> PyResult<f64> {
    let frame = core::simplex_frame(k).map_err(to_py_err)?;
    let p = core::Partition::new(assignment, k).map_err(to_py_err)?;
    core::exact_objective(&w.inner, &frame, &p).map_err(to_py_err)
}

#[pyfunction]
fn relaxed_objective(w: &PyWeightMatrix, k: usize, v: &PyUnitVectors) -> PyResult<f64> {
    core::relaxed_objective(&w.inner, k, &v.inner).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (w, k, seed=0, tolerance=1e-6, constraint_tol=1e-6, max_outer=24, max_inner=2000, rank=None))]
#[allow(clippy::too_many_arguments)]
fn solve_relaxation(
    w: &PyWeightMatrix,
    k: usize,
    seed: u64,
    tolerance: f64,
    constraint_tol: f64,
    max_outer: usize,
    max_inner: usize,
    rank: Option<usize>,
) -> PyResult<PySdpSolution> {
    let cfg = core::SolverConfig {
        max_outer,
        max_inner,
        tolerance,
        constraint_tol,
        seed,
        rank,
    };
    let sol = core::solve_relaxation(&w.inner, k, &cfg).map_err(to_py_err)?;
    Ok(PySdpSolution {
        objective: sol.objective,
        iterations: sol.iterations,
        converged: sol.converged,
        constraint_violation: sol.residuals.constraint_violation,
        stationarity: sol.residuals.stationarity,
        vectors: sol.vectors,
    })
}

#[pyfunction]
#[pyo3(signature = (w, v, k, rounds=200, seed=0))]
fn best_of_rounds(
    w: &PyWeightMatrix,
    v: &PyUnitVectors,
    k: usize,
    rounds: usize,
    seed: u64,
) -> PyResult<PyRoundingOutcome> {
    let outcome = core::best_of_rounds(&w.inner, &v.inner, k, rounds, seed).map_err(to_py_err)?;
    Ok(PyRoundingOutcome {
        assignment: outcome.best.assignment().to_vec(),
        between: outcome.best_between,
        within: outcome.best_within,
        rounds_run: outcome.rounds_run,
        improvements: outcome.improvements,
    })
}

/// (between, within, total) dissimilarity of a partition.
#[pyfunction]
fn cluster_metrics(w: &PyWeightMatrix, assignment: Vec<usize>, k: usize) -> PyResult<(f64, f64, f64)> {
    let p = core::Partition::new(assignment, k).map_err(to_py_err)?;
    let m = core::cluster_metrics(&w.inner, &p).map_err(to_py_err)?;
    Ok((m.between, m.within, m.total))
}

#[pyfunction]
fn silhouette_2d(coords: Vec<(f64, f64)>, assignment: Vec<usize>, k: usize) -> PyResult<f64> {
    let n = coords.len();
    let mut arr = ndarray::Array2::zeros((n, 2));
    for (i, (x, y)) in coords.into_iter().enumerate() {
        arr[[i, 0]] = x;
        arr[[i, 1]] = y;
    }
    let p = core::Partition::new(assignment, k).map_err(to_py_err)?;
    core::silhouette_2d(arr.view(), &p).map_err(to_py_err)
}

type PcaOutput = (Vec<(f64, f64)>, (f64, f64));

/// Project the solved vectors to 2D; returns (coords, explained_variance).
#[pyfunction]
fn pca_2d(v: &PyUnitVectors) -> PyResult<PcaOutput> {
    let e = core::pca_2d(&v.inner).map_err(to_py_err)?;
    let coords = (0..e.len())
        .map(|i| {
            let [x, y] = e.row(i);
            (x, y)
        })
        .collect();
    let [e1, e2] = e.explained_variance();
    Ok((coords, (e1, e2)))
}

/// Exhaustive optimum for small instances; returns
/// (optimum, assignment, enumerated).
#[pyfunction]
#[pyo3(signature = (w, k, prune_symmetry=true))]
fn brute_force_max_kcut(
    w: &PyWeightMatrix,
    k: usize,
    prune_symmetry: bool,
) -> PyResult<(f64, Vec<usize>, u64)> {
    let r = core::brute_force_max_kcut(&w.inner, k, prune_symmetry).map_err(to_py_err)?;
    Ok((r.optimum, r.argmax.assignment().to_vec(), r.enumerated))
}

#[pyfunction]
#[pyo3(signature = (dataset, k=3, rounds=200, recursions=5, seed=0, padded_size=None, weights="euclidean"))]
#[allow(clippy::too_many_arguments)]
fn run_recursive(
    dataset: &PyDataset,
    k: usize,
    rounds: usize,
    recursions: usize,
    seed: u64,
    padded_size: Option<usize>,
    weights: &str,
) -> PyResult<Vec<PyIterationRecord>> {
    let cfg = core::RecursionConfig {
        k,
        rounds,
        recursions,
        padded_size,
        weight_kind: parse_weight_kind(weights)?,
        master_seed: seed,
        solver: core::SolverConfig::default(),
    };
    let run = core::run_recursive(&dataset.inner, &cfg).map_err(to_py_err)?;
    Ok(run
        .records
        .into_iter()
        .map(|rec| PyIterationRecord {
            index: rec.index,
            assignment: rec.partition.assignment().to_vec(),
            between: rec.metrics.between,
            within: rec.metrics.within,
            total: rec.metrics.total,
            sdp_objective: rec.sdp_objective,
            solver_converged: rec.solver_converged,
            coords: (0..rec.embedding.len())
                .map(|i| {
                    let [x, y] = rec.embedding.row(i);
                    (x, y)
                })
                .collect(),
            explained_variance: {
                let [e1, e2] = rec.embedding.explained_variance();
                (e1, e2)
            },
        })
        .collect())
}

#[pyfunction]
fn split_paragraphs(document: &str) -> Vec<String> {
    core::split_paragraphs(document)
}

#[pyfunction]
#[pyo3(signature = (paragraph, side_effects=None, human_terms=None))]
fn normalize_tokens(
    paragraph: &str,
    side_effects: Option<String>,
    human_terms: Option<String>,
) -> PyResult<Vec<String>> {
    let lex = parse_lexicon(side_effects, human_terms)?;
    Ok(core::normalize_tokens(paragraph, &lex))
}

/// Windowed conditional probabilities of one token stream; returns
/// (probabilities, anchor_occurrences).
#[pyfunction]
#[pyo3(signature = (tokens, window=10, targets=None))]
fn vectorize_paragraph(
    tokens: Vec<String>,
    window: usize,
    targets: Option<Vec<String>>,
) -> PyResult<(Vec<f64>, usize)> {
    let t = parse_targets(targets)?;
    let v = core::vectorize_paragraph(0, &tokens, &t, window).map_err(to_py_err)?;
    Ok((v.probabilities, v.anchor_occurrences))
}

/// Vectorize documents into a dataset; returns
/// (Dataset, [(document, paragraph), ...]).
#[pyfunction]
#[pyo3(signature = (documents, window=10, targets=None, side_effects=None, human_terms=None))]
fn vectorize_corpus(
    documents: Vec<String>,
    window: usize,
    targets: Option<Vec<String>>,
    side_effects: Option<String>,
    human_terms: Option<String>,
) -> PyResult<(PyDataset, Vec<(usize, usize)>)> {
    let t = parse_targets(targets)?;
    let lex = parse_lexicon(side_effects, human_terms)?;
    let cv = core::vectorize_corpus(&documents, &t, &lex, window).map_err(to_py_err)?;
    Ok((
        PyDataset { inner: cv.dataset },
        cv.provenance
            .into_iter()
            .map(|p| (p.document, p.paragraph))
            .collect(),
    ))
}

#[pymodule]
fn kcut_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDataset>()?;
    m.add_class::<PyWeightMatrix>()?;
    m.add_class::<PyUnitVectors>()?;
    m.add_class::<PySdpSolution>()?;
    m.add_class::<PyRoundingOutcome>()?;
    m.add_class::<PyIterationRecord>()?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(build_weights, m)?)?;
    m.add_function(wrap_pyfunction!(simplex_frame, m)?)?;
    m.add_function(wrap_pyfunction!(exact_objective, m)?)?;
    m.add_function(wrap_pyfunction!(relaxed_objective, m)?)?;
    m.add_function(wrap_pyfunction!(solve_relaxation, m)?)?;
    m.add_function(wrap_pyfunction!(best_of_rounds, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(silhouette_2d, m)?)?;
    m.add_function(wrap_pyfunction!(pca_2d, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_max_kcut, m)?)?;
    m.add_function(wrap_pyfunction!(run_recursive, m)?)?;
    m.add_function(wrap_pyfunction!(split_paragraphs, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_tokens, m)?)?;
    m.add_function(wrap_pyfunction!(vectorize_paragraph, m)?)?;
    m.add_function(wrap_pyfunction!(vectorize_corpus, m)?)?;
    Ok(())
}
