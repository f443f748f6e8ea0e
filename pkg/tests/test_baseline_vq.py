import numpy as np
import pytest

from grasscode.baseline_vq import right_subspaces, vq_evaluate, vq_test, vq_train
from grasscode.clustering import GrassmannCodebook
from grasscode.datagen import Dataset, gen_ray_channel, split
from grasscode.errors import DimensionMismatch, InsufficientData, RankTooLarge
from grasscode.manifold import grassmann_centroid
from grasscode.precoding import mutual_information

from oracles import bundle, centroid_by_eig, chordal_sq, nearest_codeword_scan, rand_complex, rate


def test_right_subspaces_are_svd(rng):
    H = rand_complex(rng, 5, 2, 6)
    V = right_subspaces(H, 2)
    for h, v in zip(H, V):
        s = np.linalg.svd(h, compute_uv=False)
        assert np.linalg.norm(h @ v) ** 2 == pytest.approx(np.sum(s**2))


def test_rank_checks(rng):
    with pytest.raises(RankTooLarge):
        right_subspaces(rand_complex(rng, 3, 2, 6), 3)


def test_zero_bits_single_centroid(rng):
    D = Dataset.from_array(rand_complex(rng, 20, 2, 4), 2, 2)
    cb = vq_train(D.samples, 2, 0)
    V = right_subspaces(D.stack(), 2)
    assert chordal_sq(cb[0], grassmann_centroid(list(V)).data) < 1e-9


def test_identical_channels(rng):
    h = rand_complex(rng, 2, 4)
    D = Dataset.from_array(np.repeat(h[None], 5, axis=0), 2, 2)
    cb = vq_train(D.samples, 2, 0)
    assert cb.report.distortion < 1e-12
    V = right_subspaces(h, 2)[0]
    assert vq_test(D.samples, cb, 10.0) == pytest.approx(mutual_information(h, cb[0], 10.0))
    assert vq_test(D.samples, cb, 10.0) == pytest.approx(rate(h, V, 10.0), abs=1e-9)


def test_bundle_recovery_g42(rng):
    e = np.eye(4, dtype=complex)
    b1, b2 = bundle(rng, e[:, :2], 8, 0.03), bundle(rng, e[:, 2:], 8, 0.03)
    # channels whose dominant right subspace is the given point
    H = np.stack([np.diag([3.0, 2.0]) @ v.conj().T for v in b1 + b2])
    D = Dataset.from_array(H, 2, 2)
    cb = vq_train(D.samples, 2, 1)
    V = right_subspaces(H, 2)
    oracle = (
        sum(chordal_sq(x, centroid_by_eig(V[:8], 2)) for x in V[:8])
        + sum(chordal_sq(x, centroid_by_eig(V[8:], 2)) for x in V[8:])
    ) / 16
    assert abs(cb.report.distortion - oracle) < 1e-6


def test_insufficient(rng):
    D = Dataset.from_array(rand_complex(rng, 3, 2, 4), 2, 2)
    with pytest.raises(InsufficientData):
        vq_train(D.samples, 1, 2)


def test_exact_codebook_matches_fullsvd(rng):
    D = Dataset.from_array(rand_complex(rng, 8, 2, 9), 3, 3)
    cb = GrassmannCodebook(right_subspaces(D.stack(), 2))
    res = vq_evaluate(D.samples, cb, 10.0)
    assert res.r_av == pytest.approx(res.r_av_fullsvd, abs=1e-8)


def test_matches_scan_oracle(rng):
    D = gen_ray_channel(120, 2, 3, 3, n_paths=3, seed=2)
    tr, te = split(D, 0.5, seed=1)
    cb = vq_train(tr.samples, 2, 3)
    res = vq_evaluate(te.samples, cb, 20.0)
    for s, i, r in zip(te.samples, res.idx, res.rate):
        V = right_subspaces(s.H, 2)[0]
        j, _ = nearest_codeword_scan(V, cb.codewords)
        assert i == j
        assert r == pytest.approx(rate(s.H, cb[j], 20.0), abs=1e-9)
    assert np.all(res.rate <= res.rate_fullsvd + 1e-9)


def test_rate_selection_dominates_chordal():
    D = gen_ray_channel(120, 2, 3, 3, n_paths=3, seed=2)
    tr, te = split(D, 0.5, seed=1)
    cb = vq_train(tr.samples, 2, 3)
    a = vq_evaluate(te.samples, cb, 20.0, select="chordal")
    b = vq_evaluate(te.samples, cb, 20.0, select="rate")
    assert np.all(b.rate >= a.rate - 1e-12)
    with pytest.raises(ValueError):
        vq_evaluate(te.samples, cb, 20.0, select="bogus")


def test_dimension_mismatch(rng):
    D = Dataset.from_array(rand_complex(rng, 4, 2, 4), 2, 2)
    cb = GrassmannCodebook(right_subspaces(rand_complex(rng, 2, 2, 9), 2))
    with pytest.raises(DimensionMismatch):
        vq_test(D.samples, cb, 1.0)
