"""Grassmann and product-Grassmann geometry on complex orthonormal bases.

A point of G(n, k) is stored as an n x k matrix with orthonormal columns.
Every function here also accepts plain complex arrays, so hot loops can
work on stacked ``(N, n, k)`` arrays without wrapping each point.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import EIGENGAP_TOL, ORTHO_TOL, PHASE_RTOL, RANK_RTOL
from .errors import (
    DegenerateCentroidWarning,
    DimensionMismatch,
    EmptyCluster,
    RankDeficient,
)

__all__ = [
    "StiefelPoint",
    "CpmPoint",
    "canonical_phase",
    "orthonormalize",
    "chordal_distance_sq",
    "projector_distance_sq",
    "principal_angles",
    "grassmann_centroid",
    "cpm_distance_sq",
    "tpm_distance_sq",
    "random_point",
]


def _as_matrix(F) -> np.ndarray:
    if isinstance(F, StiefelPoint):
        return F.data
    a = np.asarray(F)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    return a


def canonical_phase(Q: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive.

    Works on a single ``(n, k)`` matrix or a stack ``(..., n, k)``.
    """
    Q = np.array(Q, dtype=complex, copy=True)
    mag = np.abs(Q)
    thresh = PHASE_RTOL * mag.max(axis=-2, keepdims=True)
    first = np.argmax(mag > thresh, axis=-2)[..., None, :]
    pivot = np.take_along_axis(Q, first, axis=-2)
    pmag = np.abs(pivot)
    phase = np.where(pmag > 0, pivot / np.where(pmag > 0, pmag, 1.0), 1.0)
    Q = Q * phase.conj()
    # pin the pivot to exactly real so a second pass is a no-op
    np.put_along_axis(Q, first, pmag.astype(complex), axis=-2)
    return Q


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    """Orthonormal n x k representative of a point on G(n, k)."""

    data: np.ndarray

    def __post_init__(self):
        a = np.array(self.data, dtype=complex)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2:
            raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
        n, k = a.shape
        if k > n or k < 1:
            raise DimensionMismatch(f"need 1 <= k <= n, got n={n}, k={k}")
        dev = np.linalg.norm(a.conj().T @ a - np.eye(k))
        if dev > ORTHO_TOL:
            raise RankDeficient(
                f"columns are not orthonormal (||Q^H Q - I||_F = {dev:.2e}); "
                "use orthonormalize()"
            )
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def k(self) -> int:
        return self.data.shape[1]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        return f"StiefelPoint(n={self.n}, k={self.k})"


@dataclass(frozen=True, eq=False)
class CpmPoint:
    """Point on a Cartesian product G(n1, k1) x ... x G(nm, km)."""

    factors: tuple

    def __post_init__(self):
        facs = tuple(
            f if isinstance(f, StiefelPoint) else StiefelPoint(f) for f in self.factors
        )
        if not facs:
            raise DimensionMismatch("a product point needs at least one factor")
        object.__setattr__(self, "factors", facs)

    @property
    def shape(self) -> tuple:
        return tuple((f.n, f.k) for f in self.factors)

    def kron(self) -> np.ndarray:
        """Image on the tensor-product manifold: F1 kron F2 kron ... kron Fm."""
        out = self.factors[0].data
        for f in self.factors[1:]:
            out = np.kron(out, f.data)
        return out


def orthonormalize(M) -> StiefelPoint:
    """Orthonormal basis of span(M) with the canonical column phases.

    Raises RankDeficient when the smallest singular value of M is below
    ``RANK_RTOL`` times the largest.
    """
    M = _as_matrix(M).astype(complex)
    n, k = M.shape
    if k > n:
        raise DimensionMismatch(f"cannot have {k} orthonormal columns in C^{n}")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0 or s[-1] < RANK_RTOL * s[0]:
        raise RankDeficient(f"matrix is rank deficient (singular values {s})")
    Q, _ = np.linalg.qr(M)
    return StiefelPoint(canonical_phase(Q))


def _check_pair(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape[-2:] != B.shape[-2:]:
        raise DimensionMismatch(f"points live on different manifolds: {A.shape} vs {B.shape}")


def chordal_distance_sq(F1, F2) -> float:
    """Squared chordal distance k - ||F1^H F2||_F^2, clipped to [0, k].

    Evaluated as ||(I - F1 F1^H) F2||_F^2, which is the same quantity but
    keeps full relative precision when the subspaces nearly coincide.
    """
    A, B = _as_matrix(F1), _as_matrix(F2)
    _check_pair(A, B)
    k = A.shape[1]
    val = np.linalg.norm(B - A @ (A.conj().T @ B)) ** 2
    return float(min(max(val, 0.0), k))


def projector_distance_sq(F1, F2) -> float:
    """Same distance written as 0.5 * ||F1 F1^H - F2 F2^H||_F^2."""
    A, B = _as_matrix(F1), _as_matrix(F2)
    _check_pair(A, B)
    return float(0.5 * np.linalg.norm(A @ A.conj().T - B @ B.conj().T) ** 2)


def principal_angles(F1, F2) -> np.ndarray:
    """Principal angles in nondecreasing order, from the SVD of F1^H F2."""
    A, B = _as_matrix(F1), _as_matrix(F2)
    _check_pair(A, B)
    cosines = np.linalg.svd(A.conj().T @ B, compute_uv=False)
    return np.arccos(np.clip(cosines, 0.0, 1.0))


def grassmann_centroid(points, k: int | None = None) -> StiefelPoint:
    """Chordal-distance centroid of a cluster of subspaces.

    The minimiser of sum_j d_c^2(X_j, F) over G(n, k) is spanned by the k
    dominant eigenvectors of sum_j X_j X_j^H. A tie between the k-th and
    (k+1)-th eigenvalues emits DegenerateCentroidWarning; the solver's
    ordering is returned in that case.
    """
    X = _stack(points)
    if X.shape[0] == 0:
        raise EmptyCluster("cannot take the centroid of an empty set")
    n, kk = X.shape[1:]
    k = kk if k is None else k
    if not 1 <= k <= n:
        raise DimensionMismatch(f"centroid dimension k={k} invalid for n={n}")
    return StiefelPoint(_centroid_from_stack(X, k))


def _stack(points) -> np.ndarray:
    if isinstance(points, np.ndarray) and points.ndim == 3:
        return points.astype(complex, copy=False)
    mats = [_as_matrix(p) for p in points]
    if not mats:
        return np.zeros((0, 1, 1), dtype=complex)
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise DimensionMismatch("points do not share one manifold")
    return np.stack(mats).astype(complex, copy=False)


def _scatter(X: np.ndarray) -> np.ndarray:
    # explicit sum of the p outer products X_j X_j^H, accumulated in data order
    Y = np.einsum("pik,pjk->ij", X, X.conj())
    return 0.5 * (Y + Y.conj().T)


def _centroid_from_stack(X: np.ndarray, k: int) -> np.ndarray:
    Y = _scatter(X)
    w, V = np.linalg.eigh(Y)
    n = Y.shape[0]
    if k < n and w[n - k] - w[n - k - 1] < EIGENGAP_TOL * max(1.0, abs(w[-1])):
        warnings.warn(
            f"eigengap {w[n - k] - w[n - k - 1]:.2e} at the centroid; the dominant "
            "subspace is not unique",
            DegenerateCentroidWarning,
            stacklevel=3,
        )
    return canonical_phase(V[:, ::-1][:, :k])


def cpm_distance_sq(P1: CpmPoint, P2: CpmPoint) -> float:
    """Product-manifold distance: the sum of per-factor squared distances."""
    if len(P1.factors) != len(P2.factors):
        raise DimensionMismatch("product points have different numbers of factors")
    return float(sum(chordal_distance_sq(a, b) for a, b in zip(P1.factors, P2.factors)))


def tpm_distance_sq(P1: CpmPoint, P2: CpmPoint) -> float:
    """Chordal distance between the Kronecker images of two product points."""
    if P1.shape != P2.shape:
        raise DimensionMismatch("product points have different factor shapes")
    return chordal_distance_sq(P1.kron(), P2.kron())


def random_point(n: int, k: int, rng: np.random.Generator) -> StiefelPoint:
    """Haar-distributed point on G(n, k)."""
    Z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    return orthonormalize(Z)
