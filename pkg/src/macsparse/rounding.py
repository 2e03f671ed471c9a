"""Rounding fractional selections onto exactly-K binary selections."""

from __future__ import annotations

import numpy as np

from . import _accel
from .fiedler import DEFAULT_TOL, find_fiedler
from .graph import SparsificationProblem, laplacian_at


def _as_selection(x, K):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("selection must be a vector")
    if not 0 <= K <= x.size:
        raise ValueError(f"K={K} outside [0, {x.size}]")
    return x


def top_k_mask(values, K) -> np.ndarray:
    """Binary vector marking the K largest entries; ties go to the lowest index."""
    values = np.asarray(values, dtype=np.float64)
    out = np.zeros(values.size, dtype=np.float64)
    if K:
        order = np.argsort(-values, kind="stable")
        out[order[:K]] = 1.0
    return out


def round_nearest(x, K: int) -> np.ndarray:
    """Ones at the K largest entries of ``x``: the l1/l2-nearest K-sparse binary vector."""
    x = _as_selection(x, K)
    return top_k_mask(x, K)


def madow_thresholds(x, K: int) -> np.ndarray:
    """Cumulative thresholds ``phi_1..phi_m`` with ``phi_m == K`` exactly.

    Budget drift is absorbed by the strictly fractional entries only, so
    zero entries keep zero-width intervals and unit entries unit width.
    """
    x = np.clip(_as_selection(x, K), 0.0, 1.0)
    total = x.sum()
    if abs(total - K) > 1e-6 * max(1, K):
        raise ValueError(f"selection sums to {total}, expected budget {K}")
    frac = (x > 0) & (x < 1)
    if frac.any() and total != K:
        fixed = x[~frac].sum()
        x = x.copy()
        x[frac] *= (K - fixed) / x[frac].sum()
        np.clip(x, 0.0, 1.0, out=x)
    phi = np.cumsum(x)
    if phi.size:
        phi[-1] = K
        # every interval at most unit width, so no two sample points share one
        idx = np.arange(phi.size, dtype=np.float64)
        phi = np.maximum.accumulate((phi - idx)[::-1])[::-1] + idx
        phi = np.minimum(phi, K)
    return phi


def round_madow(x, K: int, seed=None) -> np.ndarray:
    """Madow systematic sampling of an exactly-K binary vector.

    One uniform draw ``U`` in [0, 1) from a PCG64 generator; element k is
    selected when ``phi_{k-1} <= U + i < phi_k`` for some ``i < K``. The
    inclusion probability of element k equals ``x_k``.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    x = _as_selection(x, K)
    out = np.zeros(x.size, dtype=np.float64)
    if K == 0:
        return out
    phi = madow_thresholds(x, K)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    U = rng.random()
    picked = _accel.madow_select(phi, K, U)
    out[picked] = 1.0
    if out.sum() != K:
        raise AssertionError("Madow sampling produced a selection of the wrong size")
    return out


def evaluate_selection(problem: SparsificationProblem, x_hat, tol: float = DEFAULT_TOL, warm_start=None) -> float:
    """Algebraic connectivity of ``L^f + sum_{k selected} L^c_k``."""
    return find_fiedler(laplacian_at(problem, x_hat), warm_start=warm_start, tol=tol).lambda2


def best_of_madow(problem: SparsificationProblem, x, seed=None, draws: int = 1, tol: float = DEFAULT_TOL):
    """Run Madow sampling ``draws`` times and keep the best-connected sample.

    Returns ``(selection, value, values)`` with ``values`` listing every draw.
    """
    if draws < 1:
        raise ValueError("draws must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    best, best_f, values = None, -np.inf, []
    for _ in range(draws):
        sel = round_madow(x, problem.budget, rng)
        f = evaluate_selection(problem, sel, tol=tol)
        values.append(f)
        if f > best_f:
            best, best_f = sel, f
    return best, best_f, values
