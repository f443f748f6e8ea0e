"""Acceptance criteria 1-9. Each test records one PASS/FAIL line, printed in
the pytest terminal summary, and then asserts the criterion."""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import (
    bundle,
    centroid_by_eig,
    chordal_sq,
    distortion,
    exhaustive_best_subset,
    logdet2,
    mode_product_loops,
    rand_complex,
    rand_orthonormal,
    rand_unitary,
    unfold_by_index_formula,
)

from grasscode.baseline_vq import vq_evaluate, vq_train
from grasscode.beamforming import bf_evaluate, bf_train
from grasscode.bench import run_bench
from grasscode.clustering import kmeans
from grasscode.datagen import gen_ray_channel, split
from grasscode.manifold import chordal_distance_sq, grassmann_centroid, projector_distance_sq
from grasscode.precoding import db_to_linear, decompose, dom_col, pc_evaluate, pc_train, unquantized_precoder
from grasscode.tensor import hooi, mode_product, tensor_from_channel, unfold


def record(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_manifold():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, n + 1))
        A, B, C = (rand_orthonormal(rng, n, k) for _ in range(3))
        dab, dba = chordal_distance_sq(A, B), chordal_distance_sq(B, A)
        d = lambda X, Y: np.sqrt(chordal_distance_sq(X, Y))
        worst = max(
            worst,
            max(0.0, -dab),
            abs(dab - dba),
            chordal_distance_sq(A, A @ rand_unitary(rng, k)),
            max(0.0, d(A, C) - d(A, B) - d(B, C)),
            abs(projector_distance_sq(A, B) - dab),
            abs(chordal_sq(A, B) - dab),
            abs(chordal_distance_sq(A @ rand_unitary(rng, k), B @ rand_unitary(rng, k)) - dab),
        )
    pts = [rand_orthonormal(rng, 4, 2) for _ in range(5)]
    best = distortion(pts, grassmann_centroid(pts).data)
    search = min(distortion(pts, rand_orthonormal(rng, 4, 2)) for _ in range(10_000))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and best <= search + 1e-12 and elapsed < 30
    record(1, ok, f"max axiom residual {worst:.2e}, centroid {best:.6f} <= search {search:.6f}, {elapsed:.1f}s")


def test_criterion_2_tensor():
    t0 = time.perf_counter()
    T = np.zeros((2, 3, 2))
    for i, j, k in np.ndindex(T.shape):
        T[i, j, k] = 100 * (i + 1) + 10 * (j + 1) + (k + 1)
    golden = all(np.array_equal(unfold(T, m), unfold_by_index_formula(T, m)) for m in (1, 2, 3))
    golden &= np.array_equal(unfold(T, 2), [[111, 211, 112, 212], [121, 221, 122, 222], [131, 231, 132, 232]])
    rng = np.random.default_rng(2)
    X = rand_complex(rng, 2, 3, 4)
    U = rand_complex(rng, 3, 3)
    mp = np.linalg.norm(unfold(mode_product(X, U, 2), 2) - U @ unfold(X, 2))
    mp = max(mp, np.linalg.norm(mode_product(X, U, 2) - mode_product_loops(X, U, 2)))
    rise = 0.0
    for _ in range(100):
        h = hooi(rand_complex(rng, 2, 4, 4), (2, 2, 2)).error_history
        rise = max(rise, float(np.max(np.diff(h))) if len(h) > 1 else 0.0)
    rec = 0.0
    for _ in range(20):
        b, a1, a2 = (rand_orthonormal(rng, d, 1)[:, 0] for d in (2, 4, 4))
        R = 2.5 * np.einsum("i,j,k->ijk", b, a1, a2)
        rec = max(rec, np.linalg.norm(R - hooi(R, (1, 1, 1)).reconstruct()))
    elapsed = time.perf_counter() - t0
    ok = golden and mp < 1e-12 and rise <= 1e-10 and rec < 1e-10 and elapsed < 60
    record(2, ok, f"golden={golden}, mode-product {mp:.1e}, max HOOI rise {rise:.1e}, rank-1 err {rec:.1e}, {elapsed:.1f}s")


def test_criterion_3_clustering():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    rise = 0.0
    for seed in range(10):
        X = np.stack([rand_orthonormal(rng, 4, 2) for _ in range(200)])
        _, rep = kmeans(X, 8, seed=seed, tol=1e-12)
        rise = max(rise, float(np.max(np.diff(rep.step_history))))
    a, _ = kmeans(X, 8, seed=4)
    b, _ = kmeans(X, 8, seed=4)
    exact = a.to_bytes() == b.to_bytes()
    e = np.eye(3, dtype=complex)
    b1, b2 = bundle(rng, e[:, :1], 6, 0.03), bundle(rng, e[:, 1:2], 6, 0.03)
    oracle = (sum(chordal_sq(x, centroid_by_eig(b1, 1)) for x in b1) + sum(chordal_sq(x, centroid_by_eig(b2, 1)) for x in b2)) / 12
    _, rep = kmeans(np.stack(b1 + b2), 2, seed=0)
    gap = abs(rep.distortion - oracle)
    elapsed = time.perf_counter() - t0
    ok = rise <= 1e-10 and exact and gap < 1e-6 and elapsed < 60
    record(3, ok, f"max Lloyd step rise {rise:.1e}, bit-exact rerun={exact}, bundle gap {gap:.1e}, {elapsed:.1f}s")


def test_criterion_4_greedy():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    viol, r1_mismatch, worst_ratio = 0, 0, np.inf
    for i in range(500):
        r = 1 + i % 3
        mt = r * r + int(rng.integers(0, 3))
        X, H = rand_complex(rng, mt, r * r), rand_complex(rng, int(rng.integers(1, 4)), mt)
        rho = float(db_to_linear(rng.uniform(0, 30)))
        sel = dom_col(X, H, r, rho)
        best, cols = exhaustive_best_subset(X, H, r, rho)
        if best > 0:
            worst_ratio = min(worst_ratio, sel.rate / best)
        viol += sel.rate < (1 - 1 / np.e) * best
        if r == 1:
            r1_mismatch += sel.columns != cols
    elapsed = time.perf_counter() - t0
    ok = viol == 0 and r1_mismatch == 0 and elapsed < 120
    record(4, ok, f"violations {viol}/500, r=1 mismatches {r1_mismatch}, worst greedy/opt {worst_ratio:.4f}, {elapsed:.1f}s")


def test_criterion_5_core_logdet_identity():
    r, rho = 2, float(db_to_linear(20))
    D = gen_ray_channel(200, 2, 4, 4, n_paths=r, seed=5)
    worst = 0.0
    for s in D:
        tf, sel = unquantized_precoder(tensor_from_channel(s.H, 4, 4), r, rho)
        G = unfold(tf.core, 1)[:, list(sel.columns)]
        rhs = logdet2(np.eye(r) + rho * G.conj().T @ G)
        worst = max(worst, abs(sel.rate - rhs))
    record(5, worst < 1e-8, f"max |R - logdet(I + rho G^H G)| = {worst:.2e} over 200 channels")


def test_criterion_6_beamforming():
    t0 = time.perf_counter()
    D = gen_ray_channel(2500, 1, 4, 4, n_paths=1, angle_spread_deg=0.0, seed=6)
    tr, te = split(D, 0.8, seed=0)
    g4 = bf_evaluate(te.samples, bf_train(tr.samples, 4, 4, seed=0)).gamma_av
    g6 = bf_evaluate(te.samples, bf_train(tr.samples, 6, 6, seed=0)).gamma_av
    elapsed = time.perf_counter() - t0
    ok = g4 >= 0.95 and g6 >= 0.99 and elapsed < 300
    record(6, ok, f"Gamma_av [4,4] = {g4:.4f} (>= 0.95), [6,6] = {g6:.4f} (>= 0.99), {elapsed:.1f}s")


def test_criterion_7_precoding_order():
    rho = float(db_to_linear(25))
    D = gen_ray_channel(2500, 2, 4, 4, n_paths=3, seed=7)
    tr, te = split(D, 0.8, seed=0)
    fac = [decompose(s.H, 4, 4, 2) for s in te.samples]
    p8 = pc_evaluate(te.samples, pc_train(tr.samples, 2, 4, 4, seed=0), 2, rho, factors=fac)
    p6 = pc_evaluate(te.samples, pc_train(tr.samples, 2, 3, 3, seed=0), 2, rho, factors=fac)
    p10 = pc_evaluate(te.samples, pc_train(tr.samples, 2, 5, 5, seed=0), 2, rho, factors=fac)
    vq = vq_evaluate(te.samples, vq_train(tr.samples, 2, 8, seed=0), rho)
    full, quant, unq = p8.r_av_fullsvd, p8.r_av_quant, p8.r_av_unquant
    ok = full >= vq.r_av >= quant - 0.05 and unq >= quant and p10.r_av_quant >= p6.r_av_quant - 0.02
    record(
        7,
        ok,
        f"full {full:.3f} >= vq {vq.r_av:.3f} >= quant {quant:.3f} - 0.05; unquant {unq:.3f}; "
        f"10 bits {p10.r_av_quant:.3f} vs 6 bits {p6.r_av_quant:.3f}",
    )


def test_criterion_8_complexity():
    t0 = time.perf_counter()
    res = run_bench(ns=(3, 4, 5, 6), r=2, N=2000, K=16, K_prod=16, repeats=20, seed=0)
    elapsed = time.perf_counter() - t0
    base = res.rows[0].normalized
    ok = res.exponent_vq >= 3.5 and res.exponent_product <= 2.5 and base == 1.0 and elapsed < 900
    record(
        8,
        ok,
        f"exponent vq {res.exponent_vq:.2f} (>= 3.5), product {res.exponent_product:.2f} (<= 2.5), "
        f"baseline row {base}, {elapsed:.1f}s",
    )


def test_criterion_9_cross_pipeline():
    rho = float(db_to_linear(10))
    D = gen_ray_channel(600, 1, 4, 4, n_paths=3, seed=9)
    tr, te = split(D, 0.5, seed=0)
    test = te.samples[:100]
    C = bf_train(tr.samples, 3, 3, seed=0)
    bf = bf_evaluate(test, C)
    # HOOI on a 1 x Mh x Mv tensor yields (v1^*, u1), the conjugates of the
    # beamforming factors, so the precoding codebook is the conjugate one
    pc = pc_evaluate(test, C.conj(), 1, rho)
    worst = float(np.max(np.abs(pc.rate_quant - np.log2(1 + rho * bf.gain))))
    record(9, worst < 1e-8, f"max |R_pc - log2(1 + rho Gamma_bf)| = {worst:.2e} over 100 samples")
