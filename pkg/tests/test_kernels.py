"""Backend equivalence: the compiled scan/learn kernels must agree with the
pure-NumPy fallback (bit-for-bit on weight updates, to tight tolerance on the
summed scores, where only the accumulation order differs)."""

import numpy as np
import pytest

from lpart import kernels

native = pytest.importorskip(
    "lpart._native", reason="compiled kernels not built; pure fallback covered elsewhere"
)


def workload(seed, nodes=200, dim=8):
    rng = np.random.default_rng(seed)
    weights = rng.random((nodes, 2 * dim))
    norms = weights.sum(axis=1)
    r = rng.random(dim)
    coded = np.concatenate([r, 1.0 - r])
    return weights, norms, coded


@pytest.mark.parametrize("seed", range(5))
def test_scan_backends_agree(seed):
    weights, norms, coded = workload(seed)
    n = len(weights)
    t_pure, v_pure = kernels.scan_pure(weights, norms, n, coded, 0.001, float(coded.sum()))
    t_nat = np.empty(n)
    v_nat = np.empty(n)
    native.scan(weights, norms, n, coded, 0.001, float(coded.sum()), t_nat, v_nat)
    assert np.allclose(t_pure, t_nat, rtol=1e-13, atol=0)
    assert np.allclose(v_pure, v_nat, rtol=1e-13, atol=0)


@pytest.mark.parametrize("beta", [0.0, 0.25, 0.5, 1.0])
def test_min_learn_backends_bit_identical(beta):
    weights_a, _, coded = workload(9)
    weights_b = weights_a.copy()
    for row in range(0, 50):
        norm_p = kernels.min_learn_pure(weights_a, row, coded, beta)
        norm_n = native.min_learn(weights_b, row, coded, beta)
        assert weights_a[row].tobytes() == weights_b[row].tobytes()
        assert norm_p == pytest.approx(norm_n, rel=1e-14)


def test_partial_scan_only_touches_prefix():
    weights, norms, coded = workload(3)
    t, v = kernels.scan(weights, norms, 10, coded, 0.001, float(coded.sum()))
    assert len(t) == 10 and len(v) == 10
    t_all, v_all = kernels.scan(weights, norms, len(weights), coded, 0.001, float(coded.sum()))
    assert np.array_equal(t_all[:10], t) and np.array_equal(v_all[:10], v)


def test_backend_selected():
    assert kernels.BACKEND in ("native", "pure")
