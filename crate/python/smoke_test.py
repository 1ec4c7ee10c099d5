#!/usr/bin/env python3
"""Smoke test for the kcut_py extension module.

Build the extension first:

    cargo build --release -p kcut-python

The script locates the compiled cdylib under target/, loads it directly,
and exercises the main types and operations end to end.
"""

import importlib.machinery
import importlib.util
import math
import os
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = []
    override = os.environ.get("KCUT_PY_LIB")
    if override:
        candidates.append(Path(override))
    for profile in ("release", "debug"):
        for stem in ("libkcut_py.so", "kcut_py.so", "libkcut_py.dylib", "kcut_py.pyd"):
            candidates.append(REPO_ROOT / "target" / profile / stem)
    for path in candidates:
        if path.is_file():
            loader = importlib.machinery.ExtensionFileLoader("kcut_py", str(path))
            spec = importlib.util.spec_from_loader("kcut_py", loader, origin=str(path))
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            print(f"loaded {path}")
            return module
    sys.exit(
        "could not find the kcut_py cdylib; run "
        "`cargo build --release -p kcut-python` first"
    )


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    kcut = load_module()

    # Simplex frame: pairwise inner products -1/(k-1).
    frame = kcut.simplex_frame(3)
    assert len(frame) == 3 and len(frame[0]) == 2
    for i in range(3):
        norm = math.hypot(*frame[i])
        approx(norm, 1.0, 1e-12)
        for j in range(i + 1, 3):
            ip = frame[i][0] * frame[j][0] + frame[i][1] * frame[j][1]
            approx(ip, -0.5, 1e-12)

    # Three collinear points with pairwise distances 1, 3, 2.
    ds = kcut.Dataset([[0.0], [1.0], [3.0]])
    w = kcut.WeightMatrix.build(ds)
    approx(w.total_weight(), 6.0)

    optimum, assignment, enumerated = kcut.brute_force_max_kcut(w, 3)
    approx(optimum, 6.0)
    assert len(set(assignment)) == 3
    assert enumerated == 9

    sol = kcut.solve_relaxation(w, 3, seed=0)
    assert sol.objective >= 6.0 * (1.0 - 1e-6), sol.objective
    assert sol.vectors.min_pairwise_inner() >= -0.5 - 1e-6

    rounded = kcut.best_of_rounds(w, sol.vectors, 3, rounds=200, seed=0)
    approx(rounded.between, 6.0, 1e-6)
    approx(rounded.between + rounded.within, w.total_weight(), 1e-9)
    between, within, total = kcut.cluster_metrics(w, rounded.assignment, 3)
    approx(between, rounded.between)
    approx(kcut.exact_objective(w, rounded.assignment, 3), between, 1e-9)

    # Padding adds no weight and leaves the objective in place.
    padded = w.pad(8)
    assert padded.size == 8 and padded.original_count == 3
    approx(padded.total_weight(), 6.0)
    psol = kcut.solve_relaxation(padded, 3, seed=0)
    assert abs(psol.objective - sol.objective) <= 1e-4 * sol.objective

    # Recursive pipeline on three tight 2D blobs.
    points = []
    for cx, cy in [(0.0, 0.0), (6.0, 0.0), (3.0, 5.0)]:
        for i in range(5):
            points.append([cx + 0.1 * math.cos(i), cy + 0.1 * math.sin(i)])
    blobs = kcut.Dataset(points)
    records = kcut.run_recursive(blobs, k=3, rounds=100, recursions=2, seed=1)
    assert len(records) == 2
    for rec in records:
        approx(rec.between + rec.within, rec.total, 1e-9 * max(rec.total, 1.0))
        assert len(rec.assignment) == len(points)
        assert len(rec.coords) == len(points)
    s = kcut.silhouette_2d(records[0].coords, records[0].assignment, 3)
    assert -1.0 <= s <= 1.0

    # Text vectorization.
    paragraphs = kcut.split_paragraphs("A\n\nB\n\n\n\nC")
    assert paragraphs == ["A", "B", "C"]
    tokens = kcut.normalize_tokens("Amodiaquine causes headache in patients.")
    assert tokens == ["amodiaquine", "causes", "side-effect", "in", "human"]
    probs, anchors = kcut.vectorize_paragraph(tokens)
    assert anchors == 1
    assert probs == [1.0, 1.0]
    dataset, provenance = kcut.vectorize_corpus(
        ["amodiaquine helps\n\nno anchor here", "amodiaquine causes nausea in children"]
    )
    assert len(dataset) == 3 and dataset.dim == 2
    assert provenance == [(0, 0), (0, 1), (1, 0)]

    print("smoke test passed")


if __name__ == "__main__":
    main()
