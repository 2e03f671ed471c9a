"""Algebraic connectivity and Fiedler vectors of sparse Laplacians.

The eigensolver is a block shift-and-invert subspace iteration on the
orthogonal complement of the all-ones vector, with Rayleigh-Ritz
extraction after every sweep (the same structure as TRACEMIN with exact
inner solves).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import SparseLaplacian

DEFAULT_TOL = 1e-8


class FiedlerConvergenceError(RuntimeError):
    def __init__(self, message, best_residual, iterations):
        super().__init__(f"{message} (best residual {best_residual:.3e} after {iterations} iterations)")
        self.best_residual = best_residual
        self.iterations = iterations


@dataclass
class FiedlerPair:
    """Second-smallest Laplacian eigenpair.

    ``lambda3`` is the next Ritz value; it is only an estimate and is used to
    flag near-multiple Fiedler values. ``basis`` is the final Ritz block and
    can be passed back as ``warm_start``.
    """

    lambda2: float
    q2: np.ndarray
    lambda3: float = np.nan
    residual: float = 0.0
    iterations: int = 0
    basis: np.ndarray | None = field(default=None, repr=False)


def _deflate(X):
    return X - X.mean(axis=0, keepdims=True)


def _orthonormalize(X):
    X = _deflate(X)
    Q, R = np.linalg.qr(X)
    # drop numerically dependent columns
    keep = np.abs(np.diag(R)) > 1e-12 * max(1.0, np.abs(R).max(initial=0.0))
    return _deflate(Q[:, keep])


def _canonical_sign(q):
    i = int(np.argmax(np.abs(q)))
    return -q if q[i] < 0 else q


def _initial_block(n, p, warm_start, rng):
    cols = []
    if warm_start is not None:
        W = np.asarray(warm_start, dtype=np.float64)
        if W.ndim == 1:
            W = W[:, None]
        if W.shape[0] != n:
            raise ValueError(f"warm start has {W.shape[0]} rows, expected {n}")
        cols.append(W[:, :p])
    have = sum(c.shape[1] for c in cols)
    if have < p:
        cols.append(rng.standard_normal((n, p - have)))
    X = _orthonormalize(np.hstack(cols))
    while X.shape[1] < p:
        X = _orthonormalize(np.hstack([X, rng.standard_normal((n, p - X.shape[1]))]))
    return X


def find_fiedler(
    L: SparseLaplacian | sp.spmatrix,
    warm_start=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = 1000,
    block_size: int = 6,
    seed: int = 0,
) -> FiedlerPair:
    """Compute ``(lambda_2, q_2)`` for the Laplacian ``L``.

    Parameters
    ----------
    L : SparseLaplacian or scipy sparse matrix
        Graph Laplacian on ``n >= 2`` nodes.
    warm_start : array_like, optional
        Vector (or ``n x k`` block) used to seed the iteration, typically the
        ``basis`` of a previous solve on a nearby Laplacian.
    tol : float
        Converged when ``||L q - lambda q|| <= tol * max(1, ||L||)``.
    max_iter : int
        Number of inverse-iteration sweeps before giving up.

    Returns
    -------
    FiedlerPair
        With ``q2`` of unit norm and orthogonal to the all-ones vector.

    Raises
    ------
    FiedlerConvergenceError
        If the residual test is not met within ``max_iter`` sweeps.
    """
    if isinstance(L, SparseLaplacian):
        A = L.matrix
        scale = max(1.0, L.norm_estimate())
    else:
        A = sp.csr_matrix(L)
        scale = max(1.0, float(abs(A).sum(axis=1).max()))
    n = A.shape[0]
    if n < 2:
        raise ValueError("algebraic connectivity needs at least two nodes")
    if n == 2:
        q = np.array([1.0, -1.0]) / np.sqrt(2.0)
        lam = float(q @ (A @ q))
        return FiedlerPair(lam, q, np.nan, 0.0, 0, q[:, None])

    rng = np.random.default_rng(seed)
    p = min(block_size, n - 1)
    X = _initial_block(n, p, warm_start, rng)
    target = tol * scale

    # small positive shift keeps the factorization nonsingular on the kernel
    shift = 1e-10 * scale
    M = (A + shift * sp.identity(n, format="csr")).tocsc()
    lu = None

    best = np.inf
    for it in range(max_iter + 1):
        AX = A @ X
        H = X.T @ AX
        theta, Y = np.linalg.eigh(0.5 * (H + H.T))
        X = X @ Y
        AX = AX @ Y
        r = np.linalg.norm(AX[:, 0] - theta[0] * X[:, 0])
        best = min(best, r)
        gap = theta[1] - theta[0] if theta.size > 1 else np.inf
        if r <= target and (gap <= target or r <= 1e-6 * gap or theta.size == n - 1):
            break
        if it == max_iter:
            raise FiedlerConvergenceError("Fiedler eigensolver did not converge", best, it)
        if lu is None:
            lu = spla.splu(M, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                           options=dict(SymmetricMode=True))
        Z = lu.solve(np.asfortranarray(X))
        Xn = _orthonormalize(Z)
        if Xn.shape[1] < X.shape[1]:
            Xn = _orthonormalize(np.hstack([Xn, rng.standard_normal((n, X.shape[1] - Xn.shape[1]))]))
        X = Xn

    q = X[:, 0] - X[:, 0].mean()
    q = _canonical_sign(q / np.linalg.norm(q))
    lam = max(float(q @ (A @ q)), 0.0)
    lam3 = float(theta[1]) if theta.size > 1 else np.nan
    return FiedlerPair(lam, q, lam3, float(r), it, X)


def algebraic_connectivity(L, **kwargs) -> float:
    return find_fiedler(L, **kwargs).lambda2

