import numpy as np
import pytest

from grasscode.beamforming import bf_test, bf_train
from grasscode.datagen import (
    ChannelSample,
    Dataset,
    gen_kron_rayleigh,
    gen_ray_channel,
    read_csv_dir,
    read_dataset,
    split,
    write_dataset,
)
from grasscode.errors import CorruptFile, FormatError, GeometryMismatch, NonFiniteInput
from grasscode.tensor import hooi, tensor_from_channel

from oracles import rand_complex


def test_sample_validation():
    with pytest.raises(GeometryMismatch):
        ChannelSample(np.zeros((1, 5), complex), (1, 2, 2), 0)
    H = np.zeros((1, 4), complex)
    H[0, 0] = np.inf
    with pytest.raises(NonFiniteInput):
        ChannelSample(H, (1, 2, 2), 0)


def test_mixed_geometry_rejected():
    a = ChannelSample(np.zeros((1, 4), complex), (1, 2, 2), 0)
    b = ChannelSample(np.zeros((1, 6), complex), (1, 2, 3), 1)
    with pytest.raises(GeometryMismatch):
        Dataset([a, b])


def test_ray_deterministic():
    a = gen_ray_channel(20, 2, 3, 4, n_paths=3, seed=9).stack()
    b = gen_ray_channel(20, 2, 3, 4, n_paths=3, seed=9).stack()
    assert np.array_equal(a, b)
    assert not np.array_equal(a, gen_ray_channel(20, 2, 3, 4, n_paths=3, seed=10).stack())


def test_ray_normalisation():
    D = gen_ray_channel(500, 2, 4, 4, n_paths=3, seed=1)
    H = D.stack()
    assert np.mean(np.sum(np.abs(H) ** 2, axis=(1, 2))) == pytest.approx(2 * 16, rel=0.02)


def test_single_path_is_kronecker_rank1():
    D = gen_ray_channel(50, 1, 4, 3, n_paths=1, angle_spread_deg=0.0, seed=2)
    for s in D:
        Ht = s.H.reshape(4, 3)  # Mv x Mh
        u, sv, vh = np.linalg.svd(Ht)
        assert np.linalg.norm(Ht - sv[0] * np.outer(u[:, 0], vh[0])) < 1e-8


def test_single_path_gamma_one():
    D = gen_ray_channel(256, 1, 4, 4, n_paths=1, angle_spread_deg=0.0, seed=3)
    C = bf_train(D.samples, 8, 8, seed=0)
    # one codeword per sample: every factor is in the codebook
    assert bf_test(D.samples, C) == pytest.approx(1, abs=1e-6)


def test_r_paths_give_exact_multilinear_rank():
    D = gen_ray_channel(20, 2, 4, 4, n_paths=2, angle_spread_deg=0.0, seed=4)
    for s in D:
        assert hooi(tensor_from_channel(s.H, 4, 4), (2, 2, 2)).error < 1e-8


def test_kron_deterministic_and_validation():
    a = gen_kron_rayleigh(10, 2, 2, 3, 0.5, 0.2, seed=1).stack()
    assert np.array_equal(a, gen_kron_rayleigh(10, 2, 2, 3, 0.5, 0.2, seed=1).stack())
    with pytest.raises(ValueError):
        gen_kron_rayleigh(10, 2, 2, 3, 1.0, 0.2)
    with pytest.raises(ValueError):
        gen_kron_rayleigh(10, 2, 2, 3, -0.1, 0.2)


def test_kron_iid_covariance():
    H = gen_kron_rayleigh(10000, 1, 2, 3, 0.0, 0.0, seed=5).stack()[:, 0, :]
    R = H.T @ H.conj() / H.shape[0]
    assert np.max(np.abs(R - np.eye(6))) < 0.05


def test_kron_correlation_helps_small_codebooks():
    lo = gen_kron_rayleigh(600, 1, 4, 4, 0.0, 0.0, seed=6)
    hi = gen_kron_rayleigh(600, 1, 4, 4, 0.99, 0.99, seed=6)
    g = []
    for D in (lo, hi):
        tr, te = split(D, 0.5, seed=0)
        g.append(bf_test(te.samples, bf_train(tr.samples, 1, 1, seed=0)))
    assert g[1] > g[0]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_split_partition(seed):
    D = gen_ray_channel(37, 1, 2, 2, seed=0)
    tr, te = split(D, 0.7, seed=seed)
    a = {s.id for s in tr}
    b = {s.id for s in te}
    assert not a & b and a | b == set(range(37))
    assert len(tr) == 26


def test_split_degenerate():
    D = gen_ray_channel(3, 1, 2, 2, seed=0)
    for frac in (0.0, 1.0, 0.01):
        with pytest.raises(ValueError):
            split(D, frac, seed=0)


@pytest.mark.parametrize("geom", [(1, 2, 2), (2, 4, 4), (3, 2, 5)])
def test_file_round_trip(geom, tmp_path):
    D = gen_ray_channel(7, *geom, seed=3)
    p = tmp_path / "d.fdmc"
    write_dataset(D, p)
    back = read_dataset(p)
    assert np.array_equal(back.stack(), D.stack())
    assert [s.id for s in back] == [s.id for s in D]
    assert back.geometry == geom and back.meta == D.meta


def test_file_errors(tmp_path):
    D = gen_ray_channel(4, 1, 2, 2, seed=3)
    p = tmp_path / "d.fdmc"
    write_dataset(D, p)
    raw = p.read_bytes()
    (tmp_path / "bad").write_bytes(b"NOPE" + raw[4:])
    with pytest.raises(FormatError):
        read_dataset(tmp_path / "bad")
    (tmp_path / "ver").write_bytes(raw[:4] + (99).to_bytes(4, "little") + raw[8:])
    with pytest.raises(FormatError):
        read_dataset(tmp_path / "ver")
    (tmp_path / "short").write_bytes(raw[: len(raw) // 2])
    with pytest.raises(CorruptFile):
        read_dataset(tmp_path / "short")


def test_csv_ingest(tmp_path, rng):
    Hs = rand_complex(rng, 3, 2, 6)
    for i, H in enumerate(Hs):
        np.savetxt(tmp_path / f"ch{i}.csv", H, delimiter=",")
    D = read_csv_dir(tmp_path, 2, 3)
    assert np.allclose(D.stack(), Hs)
