"""Rank-r product precoding from the Tucker factors of the channel tensor.

For H (Mr x Mv*Mh) with rank-(Mr, r, r) Tucker model B, G, A1 (Mh x r),
A2 (Mv x r), the r^2 columns of (A2 kron A1)^* are candidate precoder
columns; r of them are picked greedily to maximise log-det mutual
information. Feedback quantises A1 and A2 separately on G(Mh, r) and
G(Mv, r).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from math import comb, log2

import numpy as np

from ._parallel import ordered_map
from .clustering import GrassmannCodebook, ProductCodebook, kmeans, quantize_many
from .constants import LOGDET_JITTER
from .errors import DimensionMismatch, EmptyDataset, NonFiniteInput, RankTooLarge
from .tensor import TuckerFactors, hooi, tensor_from_channel, unfold

__all__ = [
    "PrecoderSelection",
    "PrecodingResult",
    "ProductCodebook",
    "db_to_linear",
    "mutual_information",
    "dom_col",
    "unquantized_precoder",
    "quantized_precoder",
    "loss_ub_approx",
    "decompose",
    "pc_train",
    "pc_evaluate",
    "pc_test",
    "svd_precoder",
]


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def _logdet2_psd(M: np.ndarray) -> float:
    """log2 det of a Hermitian positive definite matrix via Cholesky."""
    M = 0.5 * (M + M.conj().T)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        L = np.linalg.cholesky(M + LOGDET_JITTER * np.eye(M.shape[0]))
    return float(2.0 * np.sum(np.log2(np.abs(np.diag(L)))))


def mutual_information(H, F, rho_t: float) -> float:
    """log2 det(I + rho_t F^H H^H H F) in bits/s/Hz (equal power per stream)."""
    H = np.atleast_2d(np.asarray(H))
    F = np.asarray(F)
    if F.ndim == 1:
        F = F[:, None]
    if H.shape[1] != F.shape[0]:
        raise DimensionMismatch(f"H is {H.shape} but F is {F.shape}")
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(F)) and np.isfinite(rho_t)):
        raise NonFiniteInput("mutual information of non-finite input")
    if rho_t < 0:
        raise ValueError("rho_t must be non-negative")
    E = H @ F
    return _logdet2_psd(np.eye(F.shape[1]) + rho_t * (E.conj().T @ E))


@dataclass
class PrecoderSelection:
    columns: tuple  # 0-based indices into the candidate matrix, in pick order
    precoder: np.ndarray  # Mt x r
    rate: float


def dom_col(X, H, r: int, rho_t: float) -> PrecoderSelection:
    """Greedy pick of r columns of X maximising log2 det(I + rho_t (H X_C)^H (H X_C)).

    The objective is monotone submodular in C, so the greedy set is within
    a factor (1 - 1/e) of the best r-subset. Ties go to the lowest index.
    """
    X = np.asarray(X)
    H = np.atleast_2d(np.asarray(H))
    if X.ndim != 2 or H.shape[1] != X.shape[0]:
        raise DimensionMismatch(f"H is {H.shape} but X is {X.shape}")
    if not 1 <= r <= X.shape[1]:
        raise DimensionMismatch(f"cannot pick {r} of {X.shape[1]} columns")
    E = H @ X
    chosen: list[int] = []
    best_val = 0.0
    for _ in range(r):
        best_c, best_val = -1, -np.inf
        for c in range(X.shape[1]):
            if c in chosen:
                continue
            Ec = E[:, chosen + [c]]
            val = _logdet2_psd(np.eye(len(chosen) + 1) + rho_t * (Ec.conj().T @ Ec))
            if val > best_val:
                best_c, best_val = c, val
        chosen.append(best_c)
    return PrecoderSelection(tuple(chosen), X[:, chosen], float(best_val))


def decompose(H, mh: int, mv: int, r: int, tol: float = 1e-8, max_iter: int = 100) -> TuckerFactors:
    """HOOI of the channel tensor with ranks (Mr, r, r)."""
    T = tensor_from_channel(H, mh, mv)
    if r > min(mh, mv):
        raise RankTooLarge(f"r = {r} exceeds min(Mh, Mv) = {min(mh, mv)}")
    return hooi(T, (T.shape[0], r, r), tol=tol, max_iter=max_iter)


def _select(Abar, H, r, rho_t) -> PrecoderSelection:
    if r == 1:
        # a single candidate column: nothing to choose
        return PrecoderSelection((0,), Abar, mutual_information(H, Abar, rho_t))
    return dom_col(Abar, H, r, rho_t)


def unquantized_precoder(
    T, r: int, rho_t: float, tol: float = 1e-8, max_iter: int = 100
) -> tuple[TuckerFactors, PrecoderSelection]:
    """HOOI factors of T and the best r columns of (A2 kron A1)^* for H = T_(1)."""
    T = np.asarray(T)
    mr, mh, mv = T.shape
    if r > min(mh, mv):
        raise RankTooLarge(f"r = {r} exceeds min(Mh, Mv) = {min(mh, mv)}")
    tf = hooi(T, (mr, r, r), tol=tol, max_iter=max_iter)
    return tf, _select(tf.kron_factor(), unfold(T, 1), r, rho_t)


def quantized_precoder(H, Qa1, Qa2, r: int, rho_t: float) -> PrecoderSelection:
    """Best r columns of (Qa2 kron Qa1)^*, scored on the true channel H."""
    Qa1 = np.asarray(Qa1)
    Qa2 = np.asarray(Qa2)
    if Qa1.ndim == 1:
        Qa1 = Qa1[:, None]
    if Qa2.ndim == 1:
        Qa2 = Qa2[:, None]
    if Qa1.shape[1] != r or Qa2.shape[1] != r:
        raise DimensionMismatch(f"quantised factors must have {r} columns")
    H = np.atleast_2d(np.asarray(H))
    if H.shape[1] != Qa1.shape[0] * Qa2.shape[0]:
        raise DimensionMismatch("quantised factors do not match the channel width")
    return _select(np.kron(Qa2, Qa1).conj(), H, r, rho_t)


def loss_ub_approx(selection: PrecoderSelection, F) -> float:
    """High-SNR, high-resolution rate-loss proxy  r - ||A_Co^H F||_F^2."""
    A = selection.precoder
    F = np.asarray(F)
    if F.ndim == 1:
        F = F[:, None]
    if F.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"F is {F.shape}, selected precoder is {A.shape}")
    return float(A.shape[1] - np.linalg.norm(A.conj().T @ F) ** 2)


def svd_precoder(H, r: int) -> np.ndarray:
    """The r dominant right singular vectors of H (full-CSI optimum)."""
    H = np.atleast_2d(np.asarray(H))
    Vh = np.linalg.svd(H, full_matrices=True)[2]
    return Vh[:r].conj().T


def _factor_sets(samples, r, tol, max_iter, threads):
    samples = list(samples)
    if not samples:
        raise EmptyDataset("no channel samples")
    mr, mv, mh = samples[0].geometry
    if r > min(mh, mv):
        raise RankTooLarge(f"r = {r} exceeds min(Mh, Mv) = {min(mh, mv)}")
    fn = partial(_decompose_sample, mh=mh, mv=mv, r=r, tol=tol, max_iter=max_iter)
    return samples, ordered_map(fn, samples, threads)


def _decompose_sample(s, mh, mv, r, tol, max_iter):
    return decompose(s.H, mh, mv, r, tol, max_iter)


def pc_train(
    train,
    r: int,
    bv: int,
    bh: int,
    max_iter: int = 200,
    tol: float = 1e-6,
    seed: int = 0,
    restarts: int = 1,
    hooi_tol: float = 1e-8,
    hooi_max_iter: int = 100,
    threads: int | None = None,
) -> ProductCodebook:
    """Cluster the HOOI factors A2 (vertical, 2**bv words) and A1 (horizontal, 2**bh)."""
    _, factors = _factor_sets(train, r, hooi_tol, hooi_max_iter, threads)
    A1 = np.stack([f.A1 for f in factors])
    A2 = np.stack([f.A2 for f in factors])
    sv, sh = np.random.SeedSequence(seed).spawn(2)
    cb_v, rep_v = kmeans(A2, 2**bv, max_iter=max_iter, tol=tol, seed=sv, restarts=restarts)
    cb_h, rep_h = kmeans(A1, 2**bh, max_iter=max_iter, tol=tol, seed=sh, restarts=restarts)
    return ProductCodebook(cb_v, cb_h, reports={"vertical": rep_v, "horizontal": rep_h})


@dataclass
class PrecodingResult:
    r_av_quant: float
    r_av_unquant: float
    r_av_fullsvd: float
    rate_quant: np.ndarray
    rate_unquant: np.ndarray
    rate_fullsvd: np.ndarray
    idx_v: np.ndarray
    idx_h: np.ndarray
    columns: list
    rho_t: float
    cq_bits_diag: float  # bits needed to signal the column subset (not charged)

    @property
    def n_violations(self) -> int:
        """Samples where the quantised precoder beats the unquantised one."""
        return int(np.sum(self.rate_quant > self.rate_unquant + 1e-9))


def pc_evaluate(
    test,
    C: ProductCodebook,
    r: int,
    rho_t: float,
    factors: list | None = None,
    hooi_tol: float = 1e-8,
    hooi_max_iter: int = 100,
    threads: int | None = None,
) -> PrecodingResult:
    """Average rates of the quantised, unquantised and SVD precoders over ``test``.

    ``factors`` may carry precomputed :func:`decompose` results (one per
    sample) to avoid repeating HOOI when sweeping ``rho_t``.
    """
    if factors is None:
        samples, factors = _factor_sets(test, r, hooi_tol, hooi_max_iter, threads)
    else:
        samples = list(test)
    if C.k != r:
        raise DimensionMismatch(f"codebook is for rank {C.k}, asked for rank {r}")
    A1 = np.stack([f.A1 for f in factors])
    A2 = np.stack([f.A2 for f in factors])
    iv, _ = quantize_many(A2, C.vertical)
    ih, _ = quantize_many(A1, C.horizontal)
    n = len(samples)
    rq, ru, rf = np.empty(n), np.empty(n), np.empty(n)
    cols = []
    for i, (s, tf) in enumerate(zip(samples, factors)):
        sel_u = _select(tf.kron_factor(), s.H, r, rho_t)
        sel_q = quantized_precoder(
            s.H, C.horizontal.codewords[ih[i]], C.vertical.codewords[iv[i]], r, rho_t
        )
        ru[i] = sel_u.rate
        rq[i] = sel_q.rate
        rf[i] = mutual_information(s.H, svd_precoder(s.H, r), rho_t)
        cols.append(sel_q.columns)
    return PrecodingResult(
        r_av_quant=float(np.mean(rq)),
        r_av_unquant=float(np.mean(ru)),
        r_av_fullsvd=float(np.mean(rf)),
        rate_quant=rq,
        rate_unquant=ru,
        rate_fullsvd=rf,
        idx_v=iv,
        idx_h=ih,
        columns=cols,
        rho_t=float(rho_t),
        cq_bits_diag=log2(comb(r * r, r)),
    )


def pc_test(test, C: ProductCodebook, r: int, rho_t: float, **kw) -> float:
    """Average mutual information of the quantised product precoder."""
    return pc_evaluate(test, C, r, rho_t, **kw).r_av_quant
