"""Rank-1 product beamforming for single-antenna receivers (Mr = 1).

A MISO channel h (1 x Mv*Mh) is reshaped into the UPA matrix
H~ = h.reshape(Mv, Mh), so that h^T = vec(H~^T). With H~ = sum s_i u_i v_i^H,

    h = sum_i s_i (u_i kron v_i^*)^T,

and the best Kronecker beamformer for the dominant term is
u_1^* kron v_1 with gain s_1^2. The vertical codebook quantises u_1^*
on G(Mv, 1); the horizontal one quantises v_1 on G(Mh, 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import GrassmannCodebook, ProductCodebook, kmeans, quantize_many
from .errors import DimensionMismatch, EmptyDataset, GeometryMismatch, WrongPipeline
from .manifold import _as_matrix, canonical_phase, chordal_distance_sq

__all__ = [
    "MisoReshape",
    "reshape_miso",
    "beamforming_gain",
    "normalized_gain",
    "bf_loss_ub",
    "miso_factors",
    "bf_train",
    "bf_evaluate",
    "bf_test",
    "BeamformingResult",
]


@dataclass(frozen=True, eq=False)
class MisoReshape:
    Htilde: np.ndarray  # Mv x Mh
    sigma1: float
    u1: np.ndarray  # Mv
    v1: np.ndarray  # Mh

    @property
    def beamformer(self) -> np.ndarray:
        """Unquantised product beamformer u1^* kron v1."""
        return np.kron(self.u1.conj(), self.v1)


def _dominant_triples(Ht: np.ndarray):
    """Batched dominant SVD triple with u's first nonzero entry made real positive."""
    U, s, Vh = np.linalg.svd(Ht)
    u = U[..., :, 0]
    v = Vh[..., 0, :].conj()
    uc = canonical_phase(u[..., :, None])[..., :, 0]
    # rotate v by the same phase so that u v^H is unchanged
    ratio = np.einsum("...i,...i->...", u.conj(), uc)
    return s[..., 0], uc, v * ratio[..., None]


def reshape_miso(h, mh: int, mv: int) -> MisoReshape:
    """Reshape a 1 x Mt MISO channel into its Mv x Mh UPA matrix and dominant SVD triple."""
    h = np.asarray(h, dtype=complex)
    if h.ndim == 2 and h.shape[0] != 1:
        raise WrongPipeline(f"expected a 1 x Mt channel, got {h.shape}")
    h = h.ravel()
    if h.size != mh * mv:
        raise GeometryMismatch(f"channel of length {h.size} does not match Mh*Mv = {mh}*{mv}")
    Ht = h.reshape(mv, mh)
    s1, u1, v1 = _dominant_triples(Ht)
    return MisoReshape(Ht, float(s1), u1, v1)


def beamforming_gain(H, f) -> float:
    """||H f||^2 for a unit-norm beamformer f."""
    H = np.atleast_2d(np.asarray(H))
    f = np.asarray(f).reshape(-1)
    if H.shape[1] != f.size:
        raise DimensionMismatch(f"channel width {H.shape[1]} vs beamformer length {f.size}")
    return float(np.linalg.norm(H @ f) ** 2)


def normalized_gain(reshape: MisoReshape, fv, fh) -> float:
    """Gain of fv kron fh on the rank-1 part of the channel, divided by sigma1^2."""
    fv = _as_matrix(fv)[:, 0]
    fh = _as_matrix(fh)[:, 0]
    return float(abs(reshape.u1 @ fv) ** 2 * abs(reshape.v1.conj() @ fh) ** 2)


def bf_loss_ub(reshape: MisoReshape, fv, fh) -> float:
    """Upper bound on 1 - normalized_gain: d_c^2(u1^*, fv) + d_c^2(v1, fh)."""
    fv = _as_matrix(fv)
    fh = _as_matrix(fh)
    if fv.shape != (reshape.u1.size, 1) or fh.shape != (reshape.v1.size, 1):
        raise DimensionMismatch("factor beamformers do not match the UPA geometry")
    return chordal_distance_sq(reshape.u1.conj(), fv) + chordal_distance_sq(reshape.v1, fh)


def _miso_stack(samples):
    samples = list(samples)
    if not samples:
        raise EmptyDataset("no channel samples")
    mr, mv, mh = samples[0].geometry
    if mr != 1:
        raise WrongPipeline(f"beamforming codebooks need Mr = 1, got Mr = {mr}")
    H = np.stack([s.H for s in samples])
    return H, mv, mh


def miso_factors(samples):
    """Stacked training points (u1^* on G(Mv,1), v1 on G(Mh,1)) plus sigma1 and H~."""
    H, mv, mh = _miso_stack(samples)
    Ht = H.reshape(-1, mv, mh)
    s1, u1, v1 = _dominant_triples(Ht)
    return u1.conj()[..., None], v1[..., None], s1, Ht


def bf_train(
    train, bv: int, bh: int, max_iter: int = 200, tol: float = 1e-6, seed: int = 0, restarts: int = 1
) -> ProductCodebook:
    """Learn independent codebooks for u1^* (2**bv words) and v1 (2**bh words)."""
    Y, X, _, _ = miso_factors(train)
    sv, sh = np.random.SeedSequence(seed).spawn(2)
    cb_v, rep_v = kmeans(Y, 2**bv, max_iter=max_iter, tol=tol, seed=sv, restarts=restarts)
    cb_h, rep_h = kmeans(X, 2**bh, max_iter=max_iter, tol=tol, seed=sh, restarts=restarts)
    return ProductCodebook(cb_v, cb_h, reports={"vertical": rep_v, "horizontal": rep_h})


@dataclass
class BeamformingResult:
    gamma_av: float
    gamma_av_vs_full: float
    ratio: np.ndarray  # per-sample gain / product-optimal gain
    gain: np.ndarray  # per-sample ||H (fv kron fh)||^2
    gain_full: np.ndarray  # per-sample ||H||^2 (MISO optimum)
    idx_v: np.ndarray
    idx_h: np.ndarray


def bf_evaluate(test, C: ProductCodebook) -> BeamformingResult:
    """Quantise each test channel's (u1^*, v1) by chordal distance and score the gain."""
    Y, X, s1, Ht = miso_factors(test)
    if C.k != 1 or C.vertical.n != Y.shape[1] or C.horizontal.n != X.shape[1]:
        raise DimensionMismatch("codebook does not match the test geometry")
    iv, _ = quantize_many(Y, C.vertical)
    ih, _ = quantize_many(X, C.horizontal)
    fv = C.vertical.codewords[iv, :, 0]
    fh = C.horizontal.codewords[ih, :, 0]
    # h (fv kron fh) = fv^T H~ fh
    gain = np.abs(np.einsum("ni,nij,nj->n", fv, Ht, fh)) ** 2
    ref = s1**2
    full = np.sum(np.abs(Ht) ** 2, axis=(1, 2))
    ratio = np.divide(gain, ref, out=np.ones_like(gain), where=ref > 0)
    vs_full = np.divide(gain, full, out=np.ones_like(gain), where=full > 0)
    return BeamformingResult(
        gamma_av=float(np.mean(ratio)),
        gamma_av_vs_full=float(np.mean(vs_full)),
        ratio=ratio,
        gain=gain,
        gain_full=full,
        idx_v=iv,
        idx_h=ih,
    )


def bf_test(test, C: ProductCodebook) -> float:
    """Average normalised beamforming gain (in [0, 1]) over the test set."""
    return bf_evaluate(test, C).gamma_av
