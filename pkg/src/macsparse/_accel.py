"""Hot numeric kernels, JIT-compiled with numba when available.

Set ``MACSPARSE_DISABLE_NUMBA=1`` to force the pure-numpy implementations.
Both paths are kept in lock-step by the test-suite.
"""

import os

import numpy as np

DISABLED = os.environ.get("MACSPARSE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if DISABLED:
        raise ImportError("numba disabled by MACSPARSE_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


# ---------------------------------------------------------------------------
# numpy implementations (always defined, also used as reference in tests)
# ---------------------------------------------------------------------------

def edge_quadforms_numpy(u, v, w, q):
    d = q[u] - q[v]
    return w * d * d


def madow_select_numpy(phi, K, U):
    # phi holds the cumulative sums phi_1..phi_m, phi_m == K exactly
    points = U + np.arange(K, dtype=np.float64)
    return np.searchsorted(phi, points, side="right")


def count_components_numpy(u, v, w, n):
    parent = np.arange(n)

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    count = n
    for a, b, wt in zip(u.tolist(), v.tolist(), w.tolist()):
        if wt <= 0.0:
            continue
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            count -= 1
    return count


def chol_update_numpy(C, x):
    """In-place rank-one update of a lower Cholesky factor: C C^T + x x^T."""
    x = x.copy()
    n = C.shape[0]
    for k in range(n):
        ckk = C[k, k]
        r = np.hypot(ckk, x[k])
        c = r / ckk
        s = x[k] / ckk
        C[k, k] = r
        if k + 1 < n:
            col = C[k + 1:, k]
            col += s * x[k + 1:]
            col /= c
            x[k + 1:] = c * x[k + 1:] - s * col
    return C


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def _edge_quadforms_jit(u, v, w, q):
        m = u.shape[0]
        out = np.empty(m)
        for k in range(m):
            d = q[u[k]] - q[v[k]]
            out[k] = w[k] * d * d
        return out

    @njit(cache=True)
    def _madow_select_jit(phi, K, U):
        out = np.empty(K, dtype=np.int64)
        k = 0
        m = phi.shape[0]
        for i in range(K):
            p = U + i
            while k < m and phi[k] <= p:
                k += 1
            out[i] = k
        return out

    @njit(cache=True)
    def _find(parent, a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            nxt = parent[a]
            parent[a] = root
            a = nxt
        return root

    @njit(cache=True)
    def _count_components_jit(u, v, w, n):
        parent = np.arange(n)
        count = n
        for k in range(u.shape[0]):
            if w[k] <= 0.0:
                continue
            ra = _find(parent, u[k])
            rb = _find(parent, v[k])
            if ra != rb:
                parent[ra] = rb
                count -= 1
        return count

    @njit(cache=True)
    def _chol_update_jit(C, x):
        x = x.copy()
        n = C.shape[0]
        for k in range(n):
            ckk = C[k, k]
            r = np.sqrt(ckk * ckk + x[k] * x[k])
            c = r / ckk
            s = x[k] / ckk
            C[k, k] = r
            for i in range(k + 1, n):
                C[i, k] = (C[i, k] + s * x[i]) / c
                x[i] = c * x[i] - s * C[i, k]
        return C


def edge_quadforms(u, v, w, q):
    """``w_k (q[u_k] - q[v_k])**2`` for every edge."""
    if HAS_NUMBA:
        return _edge_quadforms_jit(u, v, w, np.ascontiguousarray(q, dtype=np.float64))
    return edge_quadforms_numpy(u, v, w, q)


def madow_select(phi, K, U):
    """Indices k with ``phi[k-1] <= U + i < phi[k]`` for i = 0..K-1."""
    if HAS_NUMBA:
        return _madow_select_jit(phi, int(K), float(U))
    return madow_select_numpy(phi, int(K), float(U))


def count_components(u, v, w, n):
    if HAS_NUMBA:
        return int(_count_components_jit(u, v, w, int(n)))
    return count_components_numpy(u, v, w, int(n))


def chol_update(C, x):
    """Rank-one update of the lower factor ``C`` in place; returns ``C``."""
    if HAS_NUMBA:
        return _chol_update_jit(C, np.asarray(x, dtype=np.float64))
    return chol_update_numpy(C, np.asarray(x, dtype=np.float64))
