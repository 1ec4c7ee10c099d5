//! Recursive Max k-Cut clustering engine.
//!
//! The pipeline solves a semidefinite relaxation of Max k-Cut over a
//! dissimilarity weight matrix, rounds the solved unit vectors into a
//! partition with repeated Gaussian sampling, projects the vectors to 2D
//! with PCA, and feeds the projection back in as the next dataset. A
//! zero-padding step optionally relaxes the ambient dimension of the weight
//! matrix, and a window-based vectorizer turns text corpora into the
//! probability vectors the pipeline clusters.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod oracle;
pub mod pca;
pub mod pipeline;
pub mod rounding;
pub mod sdp;
pub mod textvec;

pub use dataset::{build_weights, load_dataset, pad_weights, Dataset, WeightKind, WeightMatrix};
pub use error::{Error, Result};
pub use geometry::{exact_objective, relaxed_objective, simplex_frame, SimplexFrame};
pub use metrics::{cluster_metrics, silhouette_2d, ClusterMetrics};
pub use oracle::{brute_force_max_kcut, OracleResult};
pub use pca::{pca_2d, Embedding2D};
pub use pipeline::{run_recursive, IterationRecord, RecursionConfig, RunResult};
pub use rounding::{best_of_rounds, round_once, round_rng, Partition, RoundingOutcome};
pub use sdp::{solve_relaxation, SdpSolution, SolverConfig, SolverResiduals, UnitVectorSet};
pub use textvec::{
    normalize_tokens, split_paragraphs, vectorize_corpus, vectorize_paragraph, CorpusVectors,
    ParagraphVector, SubstitutionLexicon, TargetList,
};
