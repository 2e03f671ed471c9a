"""Reference selectors: top-K by weight and lazy greedy D-optimal selection."""

from __future__ import annotations

import heapq

import numpy as np
import scipy.linalg as sla

from . import _accel
from .graph import SparsificationProblem, laplacian_at


class DisconnectedGraphError(ValueError):
    pass


def naive_topk(problem: SparsificationProblem, K: int | None = None) -> np.ndarray:
    """Select the K heaviest candidate edges (ties to the lowest index)."""
    from .rounding import top_k_mask

    K = problem.budget if K is None else K
    if not 0 <= K <= problem.m:
        raise ValueError(f"K={K} outside [0, {problem.m}]")
    return top_k_mask(problem.candidate_arrays[2], K)


def reduced_laplacian(problem: SparsificationProblem, x, anchor: int = 0) -> np.ndarray:
    L = laplacian_at(problem, x).toarray()
    keep = np.arange(problem.n) != anchor
    return L[np.ix_(keep, keep)]


def reduced_logdet(problem: SparsificationProblem, x, anchor: int = 0) -> float:
    """log det of the anchored Laplacian (log of the weighted spanning-tree count)."""
    sign, logdet = np.linalg.slogdet(reduced_laplacian(problem, x, anchor))
    return logdet if sign > 0 else -np.inf


def greedy_esp(problem: SparsificationProblem, K: int | None = None, anchor: int = 0,
               return_gains: bool = False):
    """Lazy greedy maximization of the anchored Laplacian log-determinant.

    Each step adds the candidate with the largest gain
    ``log(1 + w_k a_k^T Lr^{-1} a_k)``, where ``Lr`` is the current anchored
    Laplacian kept as a dense Cholesky factor and updated by rank-one
    modifications. Stale gains are upper bounds by submodularity, so only
    the heap top is re-evaluated.

    Raises
    ------
    DisconnectedGraphError
        If the fixed edges do not connect the graph.
    """
    K = problem.budget if K is None else K
    m, n = problem.m, problem.n
    if not 0 <= K <= m:
        raise ValueError(f"K={K} outside [0, {m}]")
    selection = np.zeros(m)
    gains_taken: list[float] = []
    if K == 0:
        return (selection, gains_taken) if return_gains else selection

    Lr = reduced_laplacian(problem, np.zeros(m), anchor)
    try:
        C = np.asfortranarray(sla.cholesky(Lr, lower=True, check_finite=False))
    except np.linalg.LinAlgError:
        raise DisconnectedGraphError(
            "fixed edges do not connect the graph; seed the problem with a spanning tree"
        ) from None

    cu, cv, cw = problem.candidate_arrays
    n_red = n - 1
    A = np.zeros((n_red, m))
    cols = np.arange(m)
    ru, rv = cu - (cu > anchor), cv - (cv > anchor)
    mu, mv = cu != anchor, cv != anchor
    A[ru[mu], cols[mu]] = 1.0
    A[rv[mv], cols[mv]] = -1.0
    Z = sla.solve_triangular(C, A, lower=True, check_finite=False)
    bounds = np.log1p(cw * np.einsum("ij,ij->j", Z, Z))

    heap = [(-b, k) for k, b in enumerate(bounds)]
    heapq.heapify(heap)
    for _ in range(K):
        while True:
            _, k = heapq.heappop(heap)
            a = A[:, k]
            z = sla.solve_triangular(C, a, lower=True, check_finite=False)
            gain = float(np.log1p(cw[k] * z @ z))
            if not heap or gain >= -heap[0][0] - 1e-12 * max(1.0, abs(gain)):
                break
            heapq.heappush(heap, (-gain, k))
        selection[k] = 1.0
        gains_taken.append(gain)
        if cw[k] > 0:
            _accel.chol_update(C, np.sqrt(cw[k]) * a)
    return (selection, gains_taken) if return_gains else selection
