//! Shared helpers for the integration suites.
#![allow(dead_code)] // each suite uses a subset

use kcut_core::{Dataset, WeightMatrix};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Complete graph with uniform weights in (0, 1].
pub fn random_complete(n: usize, seed: u64) -> WeightMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let w = 1.0 - rng.random_range(0.0..1.0);
            entries[[i, j]] = w;
            entries[[j, i]] = w;
        }
    }
    WeightMatrix::from_entries(entries, n).unwrap()
}

/// Synthetic three-arc "moons" set: 100 noisy points on three interleaved
/// half-circles.
pub fn three_arc_moons(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(100);
    let arcs = [
        (0.0, 0.0, 0.0, 34usize),
        (1.0, 0.45, std::f64::consts::PI, 33usize),
        (2.0, 0.0, 0.0, 33usize),
    ];
    for &(cx, cy, phase, count) in &arcs {
        for i in 0..count {
            let t = phase + std::f64::consts::PI * (i as f64 / (count - 1) as f64);
            let nx: f64 = rng.random_range(-0.08..0.08);
            let ny: f64 = rng.random_range(-0.08..0.08);
            pts.push(vec![cx + t.cos() + nx, cy + t.sin() + ny]);
        }
    }
    Dataset::new(pts, None).unwrap()
}

/// Write a dataset as a comma-separated file body.
pub fn dataset_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    for row in ds.points().rows() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
