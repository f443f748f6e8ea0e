import numpy as np
import pytest

from grasscode.bench import fit_exponent, run_bench


def test_fit_exponent_recovers_power():
    ns = np.array([3, 4, 5, 6])
    assert fit_exponent(ns, 0.01 * ns**3.2) == pytest.approx(3.2)


def test_baseline_row_is_one():
    res = run_bench(ns=(2, 3), N=64, K=4, K_prod=4, repeats=2)
    first = res.rows[0]
    assert first.method == "product" and first.n == 2 and first.normalized == 1.0
    assert len(res.rows) == 4


def test_repeats_honoured(monkeypatch):
    import grasscode.bench as bench

    calls = []
    real = bench.lloyd_step

    def counting(*a):
        calls.append(1)
        return real(*a)

    monkeypatch.setattr(bench, "lloyd_step", counting)
    run_bench(ns=(2,), N=32, K=2, K_prod=2, repeats=3)
    # three timed clusterings (two product factors, one VQ), each warm-up + repeats
    assert len(calls) == 3 * (1 + 3)
