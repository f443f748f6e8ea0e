"""Per-iteration Lloyd timings: full-dimension VQ on G(n^2, r) vs product codebooks on G(n, r)."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .clustering import _assign, _repair_empty, lloyd_step
from .manifold import random_point

__all__ = ["BenchRow", "BenchResult", "fit_exponent", "time_lloyd_iteration", "run_bench"]


@dataclass
class BenchRow:
    n: int
    method: str  # "product" or "vq"
    median_s: float
    normalized: float = float("nan")


@dataclass
class BenchResult:
    rows: list = field(default_factory=list)
    exponent_product: float = float("nan")
    exponent_vq: float = float("nan")
    baseline_s: float = float("nan")


def fit_exponent(ns, times) -> float:
    """Slope of the least-squares line through (log n, log t)."""
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(times, float)), 1)
    return float(slope)


def _random_set(N, n, r, rng):
    return np.stack([random_point(n, r, rng) for _ in range(N)])


def time_lloyd_iteration(X, K: int, repeats: int, rng) -> float:
    """Median wall time of one Lloyd iteration (centroids + reassignment) on X."""
    C = X[np.sort(rng.choice(X.shape[0], size=K, replace=False))].copy()
    labels, dists = _assign(X, C)
    _repair_empty(X, C, labels, dists, K)
    # untimed warm-up so the first sample does not pay for cache and allocator setup
    _, labels, dists = lloyd_step(X, C, labels)
    _repair_empty(X, C, labels, dists, K)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        _, labels, dists = lloyd_step(X, C, labels)
        times.append(time.perf_counter() - t0)
        _repair_empty(X, C, labels, dists, K)
    return float(np.median(times))


def run_bench(
    ns=(3, 4, 5, 6),
    r: int = 2,
    N: int = 2000,
    K: int = 16,
    K_prod: int = 16,
    repeats: int = 20,
    seed: int = 0,
) -> BenchResult:
    """Time VQ (one clustering on G(n^2, r), K words) against product training
    (two clusterings on G(n, r), K_prod words each) for each n.

    Times are normalised by the product run at the smallest n, so that row
    is exactly 1.0.
    """
    ns = [int(n) for n in ns]
    rng = np.random.default_rng(seed)
    res = BenchResult()
    prod, vq = [], []
    for n in ns:
        Xv = _random_set(N, n, r, rng)
        Xh = _random_set(N, n, r, rng)
        prod.append(
            time_lloyd_iteration(Xv, K_prod, repeats, rng) + time_lloyd_iteration(Xh, K_prod, repeats, rng)
        )
        vq.append(time_lloyd_iteration(_random_set(N, n * n, r, rng), K, repeats, rng))
    base = prod[0]
    res.baseline_s = base
    for n, tp, tv in zip(ns, prod, vq):
        res.rows.append(BenchRow(n, "product", tp, tp / base))
        res.rows.append(BenchRow(n, "vq", tv, tv / base))
    if len(ns) >= 2:
        res.exponent_product = fit_exponent(ns, prod)
        res.exponent_vq = fit_exponent(ns, vq)
    return res
