"""Third-order tensor algebra and Tucker decomposition (HOSVD / HOOI).

Modes are 1-based in the public API, matching the usual tensor notation.
The mode-n unfolding places entry (i1, i2, i3) at row i_n and column

    j = 1 + sum_{k != n} (i_k - 1) * J_k,   J_k = prod_{m < k, m != n} I_m

i.e. the remaining indices are enumerated with the lowest mode varying
fastest (Fortran order). With this layout a channel H (Mr x Mh*Mv, antenna
column index = j_h + Mh * k_v, 0-based) is exactly the mode-1 unfolding of
its Mr x Mh x Mv tensor, and the Tucker model unfolds as

    H_(1) = B G_(1) (A2 kron A1)^T.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, GeometryMismatch, InvalidMode, RankTooLarge
from .manifold import canonical_phase

__all__ = [
    "TuckerFactors",
    "tensor_from_channel",
    "unfold",
    "fold",
    "mode_product",
    "multi_mode_product",
    "hosvd",
    "hooi",
]


def _axis(mode: int, ndim: int) -> int:
    if not isinstance(mode, (int, np.integer)) or not 1 <= mode <= ndim:
        raise InvalidMode(f"mode must be in 1..{ndim}, got {mode!r}")
    return int(mode) - 1


def unfold(T: np.ndarray, mode: int) -> np.ndarray:
    """Mode-n unfolding (I_n x prod of the other dims)."""
    T = np.asarray(T)
    ax = _axis(mode, T.ndim)
    return np.moveaxis(T, ax, 0).reshape(T.shape[ax], -1, order="F")


def fold(M: np.ndarray, mode: int, dims) -> np.ndarray:
    """Inverse of :func:`unfold` for a tensor of shape ``dims``."""
    M = np.asarray(M)
    dims = tuple(int(d) for d in dims)
    ax = _axis(mode, len(dims))
    rest = dims[:ax] + dims[ax + 1:]
    if M.shape != (dims[ax], int(np.prod(rest))):
        raise DimensionMismatch(
            f"matrix of shape {M.shape} cannot be folded along mode {mode} into {dims}"
        )
    return np.moveaxis(M.reshape((dims[ax],) + rest, order="F"), 0, ax)


def tensor_from_channel(H: np.ndarray, mh: int, mv: int) -> np.ndarray:
    """Mr x Mh x Mv channel tensor whose mode-1 unfolding is H."""
    H = np.atleast_2d(np.asarray(H))
    if H.ndim != 2 or H.shape[1] != mh * mv:
        raise GeometryMismatch(f"channel of shape {H.shape} does not match Mh*Mv = {mh}*{mv}")
    return fold(H, 1, (H.shape[0], mh, mv))


def mode_product(T: np.ndarray, U: np.ndarray, mode: int) -> np.ndarray:
    """n-mode product T x_n U, defined by Y_(n) = U X_(n)."""
    T = np.asarray(T)
    U = np.asarray(U)
    ax = _axis(mode, T.ndim)
    if U.ndim != 2 or U.shape[1] != T.shape[ax]:
        raise DimensionMismatch(
            f"U of shape {U.shape} cannot multiply mode {mode} of size {T.shape[ax]}"
        )
    # tensordot over the mode axis, then put the new axis back in place
    return np.moveaxis(np.tensordot(U, T, axes=(1, ax)), 0, ax)


def multi_mode_product(T: np.ndarray, mats, transpose: bool = False) -> np.ndarray:
    """T x_1 U1 x_2 U2 x_3 U3; with ``transpose`` the U_n^H are applied."""
    for n, U in enumerate(mats, start=1):
        if U is None:
            continue
        T = mode_product(T, U.conj().T if transpose else U, n)
    return T


@dataclass
class TuckerFactors:
    """Rank-(r1, r2, r3) Tucker model  T ~ core x_1 B x_2 A1 x_3 A2."""

    core: np.ndarray
    B: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    error: float = float("nan")
    iterations: int = 0
    converged: bool = True
    error_history: list = field(default_factory=list)

    @property
    def ranks(self) -> tuple:
        return self.core.shape

    def reconstruct(self) -> np.ndarray:
        return multi_mode_product(self.core, (self.B, self.A1, self.A2))

    def kron_factor(self) -> np.ndarray:
        """(A2 kron A1)^*, whose columns are the candidate precoder columns."""
        return np.kron(self.A2, self.A1).conj()


def _check_ranks(shape, ranks) -> tuple:
    if len(shape) != 3:
        raise DimensionMismatch(f"expected a third-order tensor, got shape {shape}")
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != 3:
        raise DimensionMismatch("need one rank per mode")
    for n, (r, d) in enumerate(zip(ranks, shape), start=1):
        if not 1 <= r <= d:
            raise RankTooLarge(f"rank {r} invalid for mode {n} of size {d}")
    return ranks


def _leading_left(M: np.ndarray, r: int) -> np.ndarray:
    # full U only when the unfolding is tall, so r may exceed its width
    U = np.linalg.svd(M, full_matrices=M.shape[0] > M.shape[1])[0]
    return canonical_phase(U[:, :r])


def _finish(T, factors, **kw) -> TuckerFactors:
    B, A1, A2 = factors
    core = multi_mode_product(T, factors, transpose=True)
    # ||T||^2 - ||core||^2 loses everything to cancellation near an exact
    # fit, so the residual is formed explicitly
    err = float(np.linalg.norm(T - multi_mode_product(core, factors)))
    return TuckerFactors(core=core, B=B, A1=A1, A2=A2, error=err, **kw)


def hosvd(T: np.ndarray, ranks) -> TuckerFactors:
    """Truncated higher-order SVD: leading left singular vectors per mode."""
    T = np.asarray(T, dtype=complex)
    ranks = _check_ranks(T.shape, ranks)
    factors = [_leading_left(unfold(T, n), r) for n, r in enumerate(ranks, start=1)]
    tf = _finish(T, factors, iterations=0)
    tf.error_history = [tf.error]
    return tf


def hooi(T: np.ndarray, ranks, tol: float = 1e-8, max_iter: int = 100) -> TuckerFactors:
    """Best low multilinear-rank approximation by higher-order orthogonal iteration.

    Starts from :func:`hosvd`. Each sweep replaces every factor by the leading
    left singular vectors of T projected onto the other two factors. Stops
    when the core norm changes by less than ``tol`` relative, or after
    ``max_iter`` sweeps (then ``converged`` is False). The best iterate seen
    is returned; ``error_history`` holds ||T - T_hat||_F after init and after
    every sweep.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    T = np.asarray(T, dtype=complex)
    ranks = _check_ranks(T.shape, ranks)
    init = hosvd(T, ranks)
    factors = [init.B, init.A1, init.A2]
    best = init
    history = [init.error]
    core_norm = np.linalg.norm(init.core)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        for n in range(3):
            others = [None if m == n else factors[m] for m in range(3)]
            Y = multi_mode_product(T, others, transpose=True)
            factors[n] = _leading_left(unfold(Y, n + 1), ranks[n])
        cur = _finish(T, factors)
        history.append(cur.error)
        if cur.error <= best.error:
            best = cur
        new_norm = np.linalg.norm(cur.core)
        change = abs(new_norm - core_norm) / max(core_norm, np.finfo(float).tiny)
        core_norm = new_norm
        if change < tol:
            converged = True
            break
    best.iterations = it
    best.converged = converged
    best.error_history = history
    return best
