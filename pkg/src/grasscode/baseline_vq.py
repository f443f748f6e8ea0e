"""Full-dimension VQ baseline: k-means on G(Mt, r) over the dominant right singular subspaces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import GrassmannCodebook, kmeans, quantize_many
from .errors import DimensionMismatch, EmptyDataset, RankTooLarge
from .manifold import canonical_phase
from .precoding import mutual_information

__all__ = ["right_subspaces", "vq_train", "vq_evaluate", "vq_test", "VQResult"]


def _channels(samples) -> np.ndarray:
    samples = list(samples)
    if not samples:
        raise EmptyDataset("no channel samples")
    return np.stack([s.H for s in samples])


def right_subspaces(H: np.ndarray, r: int) -> np.ndarray:
    """Stack of dominant rank-r right singular matrices V-bar, shape (N, Mt, r)."""
    H = np.asarray(H)
    if H.ndim == 2:
        H = H[None]
    mr, mt = H.shape[1:]
    if not 1 <= r <= min(mr, mt):
        raise RankTooLarge(f"r = {r} must lie in [1, min(Mr, Mt) = {min(mr, mt)}]")
    Vh = np.linalg.svd(H, full_matrices=False)[2]
    return canonical_phase(Vh[:, :r].conj().transpose(0, 2, 1))


def vq_train(
    train,
    r: int,
    B: int,
    max_iter: int = 200,
    tol: float = 1e-6,
    seed: int = 0,
    restarts: int = 1,
) -> GrassmannCodebook:
    V = right_subspaces(_channels(train), r)
    cb, rep = kmeans(V, 2**B, max_iter=max_iter, tol=tol, seed=seed, restarts=restarts)
    cb.report = rep
    return cb


@dataclass
class VQResult:
    r_av: float
    r_av_fullsvd: float
    rate: np.ndarray
    rate_fullsvd: np.ndarray
    idx: np.ndarray
    rho_t: float


def vq_evaluate(test, C: GrassmannCodebook, rho_t: float, select: str = "chordal") -> VQResult:
    """Average rate of the VQ codebook.

    select="chordal" picks the codeword nearest to V-bar (the usual
    distortion); select="rate" picks the codeword with the highest rate.
    """
    H = _channels(test)
    r = C.k
    if C.n != H.shape[2]:
        raise DimensionMismatch(f"codebook is on G({C.n}, {r}), channels have Mt = {H.shape[2]}")
    V = right_subspaces(H, r)
    n = H.shape[0]
    full = np.array([mutual_information(H[i], V[i], rho_t) for i in range(n)])
    if select == "chordal":
        idx, _ = quantize_many(V, C)
        rate = np.array([mutual_information(H[i], C.codewords[idx[i]], rho_t) for i in range(n)])
    elif select == "rate":
        idx = np.empty(n, dtype=np.int64)
        rate = np.empty(n)
        for i in range(n):
            rates = [mutual_information(H[i], W, rho_t) for W in C.codewords]
            idx[i] = int(np.argmax(rates))
            rate[i] = rates[idx[i]]
    else:
        raise ValueError(f"unknown selection rule {select!r}")
    return VQResult(float(rate.mean()), float(full.mean()), rate, full, idx, float(rho_t))


def vq_test(test, C: GrassmannCodebook, rho_t: float, select: str = "chordal") -> float:
    return vq_evaluate(test, C, rho_t, select).r_av
