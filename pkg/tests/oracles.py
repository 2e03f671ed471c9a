"""Reference computations that share no code path with the package."""

import itertools

import numpy as np


def dense_laplacian(n, edges):
    """edges: iterable of (u, v, w)."""
    L = np.zeros((n, n))
    for u, v, w in edges:
        L[u, u] += w
        L[v, v] += w
        L[u, v] -= w
        L[v, u] -= w
    return L


def problem_edges(problem, x):
    out = [(e.u, e.v, e.weight) for e in problem.fixed_edges]
    out += [(e.u, e.v, e.weight * xk) for e, xk in zip(problem.candidate_edges, x)]
    return out


def dense_lambda(problem, x, k=1):
    L = dense_laplacian(problem.n, problem_edges(problem, x))
    return np.linalg.eigvalsh(L)[k]


def dense_eigs(problem, x):
    L = dense_laplacian(problem.n, problem_edges(problem, x))
    return np.linalg.eigh(L)


def brute_force_optimum(problem):
    """Best lambda_2 over all K-subsets of candidates, plus the argmax."""
    m, K = problem.m, problem.budget
    best, arg = -np.inf, None
    for subset in itertools.combinations(range(m), K):
        x = np.zeros(m)
        x[list(subset)] = 1.0
        val = dense_lambda(problem, x)
        if val > best:
            best, arg = val, x
    return best, arg


def brute_force_logdet(problem, anchor=0):
    m, K = problem.m, problem.budget
    best = -np.inf
    keep = np.arange(problem.n) != anchor
    for subset in itertools.combinations(range(m), K):
        x = np.zeros(m)
        x[list(subset)] = 1.0
        L = dense_laplacian(problem.n, problem_edges(problem, x))
        sign, ld = np.linalg.slogdet(L[np.ix_(keep, keep)])
        best = max(best, ld if sign > 0 else -np.inf)
    return best


def central_difference(problem, x, k, h=1e-6):
    e = np.zeros(problem.m)
    e[k] = h
    return (dense_lambda(problem, x + e) - dense_lambda(problem, x - e)) / (2 * h)
