"""Synthetic UPA channel datasets, train/test splitting and dataset files.

Antenna column t of a channel H (Mr x Mt, Mt = Mv * Mh) is the UPA element
in vertical row ``t // Mh`` and horizontal column ``t % Mh``, so the Tx
steering vector is ``a_v(theta) kron a_h(psi)``.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptFile, FormatError, GeometryMismatch, NonFiniteInput

__all__ = [
    "ChannelSample",
    "Dataset",
    "ula_steering",
    "gen_ray_channel",
    "gen_kron_rayleigh",
    "split",
    "write_dataset",
    "read_dataset",
    "read_csv_dir",
]

DATASET_MAGIC = b"FDMC"
DATASET_VERSION = 1
_HEADER = struct.Struct("<4sIIIIQ")
_META_LEN = struct.Struct("<Q")


@dataclass(frozen=True, eq=False)
class ChannelSample:
    H: np.ndarray
    geometry: tuple  # (Mr, Mv, Mh)
    id: int = 0

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=complex))
        mr, mv, mh = (int(g) for g in self.geometry)
        if H.shape != (mr, mv * mh):
            raise GeometryMismatch(f"H of shape {H.shape} does not fit geometry {self.geometry}")
        if not np.all(np.isfinite(H)):
            raise NonFiniteInput("channel has non-finite entries")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "geometry", (mr, mv, mh))

    @property
    def mr(self) -> int:
        return self.geometry[0]

    @property
    def mv(self) -> int:
        return self.geometry[1]

    @property
    def mh(self) -> int:
        return self.geometry[2]


@dataclass(eq=False)
class Dataset:
    samples: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        geoms = {s.geometry for s in self.samples}
        if len(geoms) > 1:
            raise GeometryMismatch(f"mixed geometries in one dataset: {sorted(geoms)}")

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def geometry(self) -> tuple:
        return self.samples[0].geometry if self.samples else tuple(self.meta.get("geometry", ()))

    def stack(self) -> np.ndarray:
        """All channels as one ``(N, Mr, Mt)`` array."""
        return np.stack([s.H for s in self.samples])

    @classmethod
    def from_array(cls, H: np.ndarray, mv: int, mh: int, meta=None, ids=None) -> "Dataset":
        H = np.asarray(H, dtype=complex)
        if H.ndim == 2:
            H = H[:, None, :]
        geom = (H.shape[1], mv, mh)
        ids = range(H.shape[0]) if ids is None else ids
        return cls([ChannelSample(h, geom, int(i)) for h, i in zip(H, ids)], dict(meta or {}))


def _check_geometry(mr, mv, mh):
    if min(mr, mv, mh) < 1:
        raise GeometryMismatch(f"antenna counts must be positive, got Mr={mr}, Mv={mv}, Mh={mh}")


def ula_steering(m: int, angle_rad) -> np.ndarray:
    """Half-wavelength ULA response exp(j*pi*i*sin(angle)), i = 0..m-1 (unit-modulus entries)."""
    return np.exp(1j * np.pi * np.arange(m) * np.sin(angle_rad))


def _sample_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(i)]))


def _normalise(H: np.ndarray) -> np.ndarray:
    # scale the whole set so that mean ||H||_F^2 equals Mr * Mt
    mr, mt = H.shape[1:]
    power = np.mean(np.sum(np.abs(H) ** 2, axis=(1, 2)))
    return H * np.sqrt(mr * mt / power) if power > 0 else H


def gen_ray_channel(
    n: int,
    mr: int,
    mv: int,
    mh: int,
    n_paths: int = 3,
    angle_spread_deg: float = 10.0,
    seed: int = 0,
    azimuth_range_deg: float = 60.0,
    elevation_range_deg: float = 30.0,
) -> Dataset:
    """Geometric multipath channels  H = sum_p alpha_p a_rx(phi_p) a_tx(theta_p, psi_p)^H.

    Each sample draws one cluster direction (azimuth uniform in
    +-``azimuth_range_deg``, elevation in +-``elevation_range_deg``, Rx angle
    in +-90 deg); every path perturbs it by Gaussian offsets of standard
    deviation ``angle_spread_deg``. Path gains are CN(0, 1/n_paths). The set
    is rescaled so that mean ||H||_F^2 = Mr * Mt.
    """
    _check_geometry(mr, mv, mh)
    if n_paths < 1 or n < 1:
        raise ValueError("need n >= 1 and n_paths >= 1")
    spread = np.deg2rad(angle_spread_deg)
    out = np.empty((n, mr, mv * mh), dtype=complex)
    for i in range(n):
        rng = _sample_rng(seed, i)
        az0 = rng.uniform(-1, 1) * np.deg2rad(azimuth_range_deg)
        el0 = rng.uniform(-1, 1) * np.deg2rad(elevation_range_deg)
        rx0 = rng.uniform(-np.pi / 2, np.pi / 2)
        offs = rng.standard_normal((n_paths, 3)) * spread
        gains = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2 * n_paths)
        H = np.zeros((mr, mv * mh), dtype=complex)
        for p in range(n_paths):
            a_tx = np.kron(ula_steering(mv, el0 + offs[p, 0]), ula_steering(mh, az0 + offs[p, 1]))
            a_rx = ula_steering(mr, rx0 + offs[p, 2])
            H += gains[p] * np.outer(a_rx, a_tx.conj())
        out[i] = H
    meta = {
        "scenario": "ray",
        "seed": int(seed),
        "params": {
            "mr": mr, "mv": mv, "mh": mh, "n_paths": n_paths,
            "angle_spread_deg": angle_spread_deg,
            "azimuth_range_deg": azimuth_range_deg,
            "elevation_range_deg": elevation_range_deg,
        },
    }
    return Dataset.from_array(_normalise(out), mv, mh, meta)


def _exp_corr_sqrt(m: int, rho: float) -> np.ndarray:
    idx = np.arange(m)
    R = rho ** np.abs(idx[:, None] - idx[None, :])
    w, V = np.linalg.eigh(R)
    return (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T


def gen_kron_rayleigh(
    n: int, mr: int, mv: int, mh: int, rho_v: float = 0.0, rho_h: float = 0.0, seed: int = 0
) -> Dataset:
    """Kronecker-correlated Rayleigh channels H = H_w (R_v kron R_h)^(1/2).

    R(i, j) = rho^|i-j|; rho_v = rho_h = 0 gives i.i.d. CN(0, 1) entries.
    No power renormalisation is applied (E||H||_F^2 = Mr * Mt already).
    """
    _check_geometry(mr, mv, mh)
    for rho in (rho_v, rho_h):
        if not 0.0 <= rho < 1.0:
            raise ValueError(f"correlation coefficient must be in [0, 1), got {rho}")
    S = np.kron(_exp_corr_sqrt(mv, rho_v), _exp_corr_sqrt(mh, rho_h))
    out = np.empty((n, mr, mv * mh), dtype=complex)
    for i in range(n):
        rng = _sample_rng(seed, i)
        Hw = (rng.standard_normal((mr, mv * mh)) + 1j * rng.standard_normal((mr, mv * mh))) / np.sqrt(2)
        out[i] = Hw @ S
    meta = {
        "scenario": "kron",
        "seed": int(seed),
        "params": {"mr": mr, "mv": mv, "mh": mh, "rho_v": rho_v, "rho_h": rho_h},
    }
    return Dataset.from_array(out, mv, mh, meta)


def split(D: Dataset, frac_train: float, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded shuffle into disjoint train/test sets (both non-empty)."""
    if not 0.0 < frac_train < 1.0:
        raise ValueError("frac_train must lie strictly between 0 and 1")
    n = len(D)
    n_train = int(round(frac_train * n))
    if n_train == 0 or n_train == n:
        raise ValueError(f"split of {n} samples at {frac_train} leaves an empty side")
    perm = np.random.default_rng(seed).permutation(n)
    meta = dict(D.meta, split_seed=int(seed), frac_train=float(frac_train))
    train = Dataset([D.samples[i] for i in np.sort(perm[:n_train])], dict(meta, part="train"))
    test = Dataset([D.samples[i] for i in np.sort(perm[n_train:])], dict(meta, part="test"))
    return train, test


def write_dataset(D: Dataset, path) -> None:
    """Binary container: header, row-major complex128 LE samples, JSON meta."""
    mr, mv, mh = D.geometry
    meta = dict(D.meta, ids=[int(s.id) for s in D.samples])
    blob = json.dumps(meta).encode()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(DATASET_MAGIC, DATASET_VERSION, mr, mv, mh, len(D)))
        if len(D):
            fh.write(np.ascontiguousarray(D.stack(), dtype="<c16").tobytes())
        fh.write(_META_LEN.pack(len(blob)))
        fh.write(blob)


def read_dataset(path) -> Dataset:
    buf = Path(path).read_bytes()
    if len(buf) < _HEADER.size:
        raise CorruptFile("dataset header is truncated")
    magic, version, mr, mv, mh, n = _HEADER.unpack_from(buf)
    if magic != DATASET_MAGIC:
        raise FormatError(f"bad dataset magic {magic!r}")
    if version != DATASET_VERSION:
        raise FormatError(f"unsupported dataset version {version}")
    count = n * mr * mv * mh
    off = _HEADER.size
    end = off + 16 * count
    if len(buf) < end + _META_LEN.size:
        raise CorruptFile("dataset body is truncated")
    H = np.frombuffer(buf, dtype="<c16", count=count, offset=off).reshape(n, mr, mv * mh)
    (mlen,) = _META_LEN.unpack_from(buf, end)
    if len(buf) != end + _META_LEN.size + mlen:
        raise CorruptFile("dataset metadata block is truncated or has trailing bytes")
    try:
        meta = json.loads(buf[end + _META_LEN.size:].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFile(f"metadata is not valid JSON: {exc}") from None
    ids = meta.pop("ids", None)
    if n == 0:
        meta["geometry"] = [mr, mv, mh]
    return Dataset.from_array(H.astype(complex), mv, mh, meta, ids=ids)


def read_csv_dir(path, mv: int, mh: int) -> Dataset:
    """Load every ``*.csv`` in a directory as one Mr x Mt channel.

    Entries use Python complex syntax (``1.5-0.25j``); files are taken in
    sorted name order. Intended for channels exported from other tools.
    """
    files = sorted(Path(path).glob("*.csv"))
    if not files:
        raise FileNotFoundError(f"no .csv files in {path}")
    mats = []
    for f in files:
        H = np.atleast_2d(np.loadtxt(f, delimiter=",", dtype=complex))
        if H.shape[1] != mv * mh:
            raise GeometryMismatch(f"{f.name}: {H.shape[1]} columns, expected Mv*Mh = {mv * mh}")
        mats.append(H)
    meta = {"scenario": "csv", "source": str(path), "files": [f.name for f in files]}
    return Dataset.from_array(np.stack(mats), mv, mh, meta)
