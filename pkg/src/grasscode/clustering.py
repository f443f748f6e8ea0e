"""Grassmannian K-means (generalised Lloyd / LBG) with chordal distortion."""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import MONOTONE_TOL
from .errors import (
    CorruptFile,
    DimensionMismatch,
    EmptyDataset,
    FormatError,
    InsufficientData,
)
from .manifold import _centroid_from_stack, _stack, canonical_phase

__all__ = [
    "GrassmannCodebook",
    "ClusteringReport",
    "pairwise_distance_sq",
    "quantize",
    "quantize_many",
    "average_distortion",
    "kmeans",
    "lloyd_step",
    "ProductCodebook",
]

CODEBOOK_MAGIC = b"GCBK"
CODEBOOK_VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass(eq=False)
class GrassmannCodebook:
    """K codewords on G(n, k), stored as a ``(K, n, k)`` complex array."""

    codewords: np.ndarray

    def __post_init__(self):
        cw = _stack(self.codewords)
        if cw.shape[0] == 0:
            raise EmptyDataset("a codebook needs at least one codeword")
        self.codewords = cw

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    @property
    def n(self) -> int:
        return self.codewords.shape[1]

    @property
    def k(self) -> int:
        return self.codewords.shape[2]

    @property
    def bits(self) -> int:
        b = int(round(np.log2(self.size)))
        if 2**b != self.size:
            raise ValueError(f"codebook size {self.size} is not a power of two")
        return b

    def __len__(self):
        return self.size

    def __getitem__(self, i) -> np.ndarray:
        return self.codewords[i]

    def conj(self) -> "GrassmannCodebook":
        return GrassmannCodebook(canonical_phase(self.codewords.conj()))

    # -- serialisation -------------------------------------------------
    def to_bytes(self) -> bytes:
        head = _HEADER.pack(CODEBOOK_MAGIC, CODEBOOK_VERSION, self.n, self.k, self.bits)
        body = np.ascontiguousarray(self.codewords, dtype="<c16").tobytes()
        return head + body

    @classmethod
    def from_bytes(cls, buf: bytes, offset: int = 0) -> tuple["GrassmannCodebook", int]:
        """Parse one container starting at ``offset``; returns (codebook, end offset)."""
        if len(buf) - offset < _HEADER.size:
            raise CorruptFile("codebook header is truncated")
        magic, version, n, k, bits = _HEADER.unpack_from(buf, offset)
        if magic != CODEBOOK_MAGIC:
            raise FormatError(f"bad codebook magic {magic!r}")
        if version != CODEBOOK_VERSION:
            raise FormatError(f"unsupported codebook version {version}")
        count = (2**bits) * n * k
        start = offset + _HEADER.size
        end = start + 16 * count
        if len(buf) < end:
            raise CorruptFile("codebook body is truncated")
        cw = np.frombuffer(buf, dtype="<c16", count=count, offset=start)
        return cls(cw.reshape(2**bits, n, k).astype(complex)), end

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "GrassmannCodebook":
        buf = Path(path).read_bytes()
        cb, end = cls.from_bytes(buf)
        if end != len(buf):
            raise CorruptFile(f"{len(buf) - end} trailing bytes after codebook")
        return cb

    def to_json(self) -> str:
        """Human-readable dump (rounded; not meant for round-tripping)."""
        words = [
            [[[round(float(z.real), 8), round(float(z.imag), 8)] for z in row] for row in cw]
            for cw in self.codewords
        ]
        return json.dumps({"n": self.n, "k": self.k, "size": self.size, "codewords": words})


@dataclass
class ClusteringReport:
    """Diagnostics of one K-means run.

    ``distortion_history`` holds the average distortion of the quantizer at
    the start and after every iteration; ``step_history`` additionally
    interleaves the value reached right after each centroid update.
    """

    distortion_history: list = field(default_factory=list)
    step_history: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    cluster_sizes: np.ndarray | None = None
    empty_repairs: int = 0
    restart: int = 0

    @property
    def distortion(self) -> float:
        return self.distortion_history[-1]


def pairwise_distance_sq(X, C) -> np.ndarray:
    """Matrix of squared chordal distances between data (N) and codewords (K)."""
    X = _stack(X)
    C = _stack(C)
    if X.shape[1:] != C.shape[1:]:
        raise DimensionMismatch(f"data on G{X.shape[1:]} vs codebook on G{C.shape[1:]}")
    N, n, k = X.shape
    K = C.shape[0]
    Xh = X.conj().transpose(0, 2, 1).reshape(N * k, n)
    Cm = C.transpose(1, 0, 2).reshape(n, K * k)
    P = (Xh @ Cm).view(float)
    P = P * P
    d = k - P.reshape(N, k, K, 2 * k).sum(axis=3).sum(axis=1)
    return np.clip(d, 0.0, k)


def quantize_many(X, C: GrassmannCodebook) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-codeword indices (lowest index wins ties) and their distortions."""
    D = pairwise_distance_sq(X, C.codewords)
    idx = np.argmin(D, axis=1)
    return idx, D[np.arange(D.shape[0]), idx]


def quantize(X, C: GrassmannCodebook) -> tuple[int, float]:
    """0-based index of the codeword closest to X, and d_c^2 to it."""
    idx, d = quantize_many(_stack([X]), C)
    return int(idx[0]), float(d[0])


def average_distortion(data, C: GrassmannCodebook) -> float:
    X = _stack(data)
    if X.shape[0] == 0:
        raise EmptyDataset("average distortion of an empty data set")
    return float(np.mean(quantize_many(X, C)[1]))


def _canonical_order(X: np.ndarray) -> np.ndarray:
    # order by the projector X X^H, which does not depend on the representative
    P = np.einsum("nik,njk->nij", X, X.conj()).reshape(X.shape[0], -1)
    keys = np.round(np.concatenate([P.real, P.imag], axis=1), 10)
    return np.lexsort(keys.T[::-1])


def _assign(X, C):
    D = pairwise_distance_sq(X, C)
    labels = np.argmin(D, axis=1)
    return labels, D[np.arange(X.shape[0]), labels]


def _repair_empty(X, C, labels, dists, K) -> int:
    """Reseed empty clusters with the worst-served point; returns repair count."""
    repairs = 0
    while True:
        sizes = np.bincount(labels, minlength=K)
        empty = np.flatnonzero(sizes == 0)
        if empty.size == 0:
            return repairs
        movable = sizes[labels] > 1
        if not movable.any():
            raise InsufficientData("not enough points to populate every cluster")
        cand = np.where(movable, dists, -np.inf)
        i = int(np.argmax(cand))
        j = int(empty[0])
        C[j] = X[i]
        labels[i] = j
        dists[i] = 0.0
        repairs += 1


def lloyd_step(X, C, labels):
    """One Lloyd iteration in place on C: centroid update, then reassignment.

    Returns the distortion after the centroid update and the new labels
    and distances.
    """
    k = X.shape[2]
    for j in range(C.shape[0]):
        C[j] = _centroid_from_stack(X[labels == j], k)
    G = X.conj().transpose(0, 2, 1) @ C[labels]
    cd = k - (G.real**2 + G.imag**2).sum(axis=(1, 2))
    mid = float(np.mean(np.clip(cd, 0.0, k)))
    labels, dists = _assign(X, C)
    return mid, labels, dists


def _lloyd(X, K, rng, max_iter, tol):
    N, n, k = X.shape
    init = np.sort(rng.choice(N, size=K, replace=False))
    C = X[init].copy()
    labels, dists = _assign(X, C)
    report = ClusteringReport()
    report.empty_repairs += _repair_empty(X, C, labels, dists, K)
    D = float(np.mean(dists))
    report.distortion_history.append(D)
    report.step_history.append(D)
    for it in range(1, max_iter + 1):
        mid, labels, dists = lloyd_step(X, C, labels)
        report.step_history.append(mid)
        report.empty_repairs += _repair_empty(X, C, labels, dists, K)
        D_new = float(np.mean(dists))
        report.distortion_history.append(D_new)
        report.step_history.append(D_new)
        report.iterations = it
        if D_new <= MONOTONE_TOL or (D - D_new) <= tol * D:
            report.converged = True
            break
        D = D_new
    report.cluster_sizes = np.bincount(labels, minlength=K)
    return C, labels, report


def kmeans(
    data,
    K: int,
    max_iter: int = 200,
    tol: float = 1e-6,
    seed: int | None = 0,
    restarts: int = 1,
) -> tuple[GrassmannCodebook, ClusteringReport]:
    """Learn a K-word codebook on G(n, k) minimising mean chordal distortion.

    Initial codewords are K distinct data points drawn with ``seed``; then
    centroid updates (dominant eigenvectors of the cluster scatter) and
    nearest-codeword reassignment alternate until the relative drop in
    average distortion falls below ``tol``. A cluster that empties is
    reseeded with the point farthest from its codeword, so the codebook
    always has exactly K words. With ``restarts`` > 1 the run with the lowest
    final distortion is kept.

    The data are processed in a canonical order (sorted by projector), so
    the result does not depend on how the input list is ordered.
    """
    X = _stack(data)
    N = X.shape[0]
    if K < 1:
        raise ValueError("K must be at least 1")
    if N < K:
        raise InsufficientData(f"{N} data points cannot support {K} codewords")
    X = X[_canonical_order(X)]
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = ss.spawn(max(1, restarts))
    best = None
    for r, ss in enumerate(seeds):
        C, _, report = _lloyd(X, K, np.random.default_rng(ss), max_iter, tol)
        report.restart = r
        if best is None or report.distortion < best[1].distortion:
            best = (C, report)
    C, report = best
    return GrassmannCodebook(canonical_phase(C)), report


@dataclass(eq=False)
class ProductCodebook:
    """Vertical codebook on G(Mv, k) and horizontal codebook on G(Mh, k).

    The implied product codebook holds every pairing of one vertical and
    one horizontal word; only the two factor codebooks are stored.
    """

    vertical: GrassmannCodebook
    horizontal: GrassmannCodebook
    reports: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.vertical.k != self.horizontal.k:
            raise DimensionMismatch(
                f"factor codebooks disagree on k ({self.vertical.k} vs {self.horizontal.k})"
            )

    @property
    def k(self) -> int:
        return self.vertical.k

    @property
    def bits(self) -> tuple[int, int]:
        """(Bv, Bh)."""
        return self.vertical.bits, self.horizontal.bits

    def conj(self) -> "ProductCodebook":
        return ProductCodebook(self.vertical.conj(), self.horizontal.conj())

    def to_bytes(self) -> bytes:
        return self.vertical.to_bytes() + self.horizontal.to_bytes()

    @classmethod
    def from_bytes(cls, buf: bytes) -> "ProductCodebook":
        v, off = GrassmannCodebook.from_bytes(buf)
        h, end = GrassmannCodebook.from_bytes(buf, off)
        if end != len(buf):
            raise CorruptFile(f"{len(buf) - end} trailing bytes after product codebook")
        return cls(v, h)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "ProductCodebook":
        return cls.from_bytes(Path(path).read_bytes())

    def to_json(self) -> str:
        return json.dumps(
            {"vertical": json.loads(self.vertical.to_json()),
             "horizontal": json.loads(self.horizontal.to_json())}
        )
