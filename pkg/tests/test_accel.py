"""The numba kernels and their numpy fallbacks must agree."""

import numpy as np
import pytest
import scipy.linalg as sla

from macsparse import _accel

pytestmark = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba disabled")


def test_edge_quadforms(rng):
    n, m = 50, 200
    u, v = rng.integers(0, n, m), rng.integers(0, n, m)
    w, q = rng.uniform(0, 3, m), rng.standard_normal(n)
    np.testing.assert_allclose(
        _accel._edge_quadforms_jit(u, v, w, q), _accel.edge_quadforms_numpy(u, v, w, q), rtol=1e-15
    )


def test_madow_select(rng):
    for _ in range(200):
        m = int(rng.integers(1, 30))
        K = int(rng.integers(1, m + 1))
        x = rng.dirichlet(np.ones(m)) * K
        x = np.minimum(x, 1.0)
        phi = np.cumsum(x)
        phi[-1] = max(phi[-1], K)
        phi = np.minimum(phi, K)
        U = rng.random()
        np.testing.assert_array_equal(
            _accel._madow_select_jit(phi, K, U), _accel.madow_select_numpy(phi, K, U)
        )


def test_count_components(rng):
    for _ in range(50):
        n = int(rng.integers(1, 40))
        k = int(rng.integers(0, 60))
        u, v = rng.integers(0, n, k), rng.integers(0, n, k)
        w = rng.choice([0.0, 1.0], k)
        assert _accel._count_components_jit(u, v, w, n) == _accel.count_components_numpy(u, v, w, n)


@pytest.mark.parametrize("order", ["C", "F"])
def test_chol_update(rng, order):
    n = 30
    B = rng.standard_normal((n, n))
    A = B @ B.T + n * np.eye(n)
    x = rng.standard_normal(n)
    C0 = sla.cholesky(A, lower=True)
    C_jit = _accel._chol_update_jit(np.array(C0, order=order), x)
    C_np = _accel.chol_update_numpy(np.array(C0, order=order), x)
    np.testing.assert_allclose(C_jit, C_np, atol=1e-12)
    np.testing.assert_allclose(C_jit @ C_jit.T, A + np.outer(x, x), atol=1e-10)
