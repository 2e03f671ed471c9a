"""Frank-Wolfe solution of the Boolean relaxation and the full MAC pipeline."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .baselines import naive_topk
from .fiedler import DEFAULT_TOL, FiedlerConvergenceError, FiedlerPair, find_fiedler
from .graph import SparsificationProblem, laplacian_at
from .rounding import best_of_madow, evaluate_selection, round_nearest, top_k_mask

log = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
DEGENERACY_GAP = 1e-6


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    f_value: float
    dual_bound: float
    gap: float
    step_size: float
    fiedler_solve_time: float
    degenerate: bool = False


@dataclass(frozen=True)
class SolveResult:
    relaxed_x: np.ndarray
    rounded_x: np.ndarray
    f_relaxed: float
    f_rounded: float
    best_dual_bound: float
    final_dual_bound: float
    history: list = field(default_factory=list)
    total_time: float = 0.0
    rounding: str = "madow"

    @property
    def iterations(self) -> int:
        return len(self.history)

    @property
    def duality_gap(self) -> float:
        """Certified suboptimality of the rounded selection."""
        return self.best_dual_bound - self.f_rounded


def step_size(t: int) -> float:
    return 2.0 / (2.0 + t)


def supergradient(problem: SparsificationProblem, q2) -> np.ndarray:
    """``g_k = q2^T L^c_k q2 = w_k (q2[u_k] - q2[v_k])^2``."""
    cu, cv, cw = problem.candidate_arrays
    return _accel.edge_quadforms(cu, cv, cw, np.asarray(q2, dtype=np.float64))


def solve_direction(g, K: int) -> np.ndarray:
    """Maximize ``g^T s`` over ``s`` in [0,1]^m with ``1^T s = K``: the top-K indicator."""
    g = np.asarray(g, dtype=np.float64)
    if K > g.size or K < 0:
        raise ValueError(f"K={K} outside [0, {g.size}]")
    return top_k_mask(g, K)


def dual_bound(f_value: float, g, s_star, x) -> float:
    """Upper bound ``f(x) + g^T (s* - x)`` on the relaxed and original optima."""
    return float(f_value + np.dot(g, np.asarray(s_star) - np.asarray(x)))


def check_feasible(x, K, tol=FEASIBILITY_TOL):
    x = np.asarray(x)
    if x.size and (x.min() < -tol or x.max() > 1 + tol):
        raise ValueError("selection leaves the unit box")
    if abs(x.sum() - K) > tol:
        raise ValueError(f"selection sums to {x.sum()!r}, expected {K}")


def uniform_start(problem: SparsificationProblem) -> np.ndarray:
    m = problem.m
    return np.full(m, problem.budget / m) if m else np.zeros(0)


def _oracle(problem, x, warm, tol):
    t0 = time.perf_counter()
    pair = find_fiedler(laplacian_at(problem, x), warm_start=warm, tol=tol)
    return pair, time.perf_counter() - t0


def frank_wolfe(
    problem: SparsificationProblem,
    x0,
    max_iters: int = 20,
    gap_tol: float = 1e-8,
    fiedler_tol: float = DEFAULT_TOL,
    callback=None,
):
    """Frank-Wolfe ascent on ``lambda_2(L(x))`` with step ``2/(2+t)``.

    Stops after ``max_iters`` iterations, or as soon as the duality gap at the
    current iterate is at most ``gap_tol`` (that iterate is then returned).

    Returns ``(x, history, last)`` where ``last`` is the most recent
    ``FiedlerPair`` (useful for warm-starting further solves).
    """
    K = problem.budget
    x = np.array(x0, dtype=np.float64)
    if x.shape != (problem.m,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({problem.m},)")
    check_feasible(x, K)

    history: list[IterationRecord] = []
    warm = None
    pair = None
    for t in range(max_iters):
        try:
            pair, dt = _oracle(problem, x, warm, fiedler_tol)
        except FiedlerConvergenceError as exc:
            raise FiedlerConvergenceError(
                f"Frank-Wolfe iteration {t}: {exc}", exc.best_residual, exc.iterations
            ) from exc
        warm = pair.basis
        f = pair.lambda2
        g = supergradient(problem, pair.q2)
        s = solve_direction(g, K)
        ub = dual_bound(f, g, s, x)
        alpha = step_size(t)
        rec = IterationRecord(
            iter=t,
            f_value=f,
            dual_bound=ub,
            gap=ub - f,
            step_size=alpha,
            fiedler_solve_time=dt,
            degenerate=bool(pair.lambda3 - f < DEGENERACY_GAP),
        )
        history.append(rec)
        log.debug("iter %d  f=%.10g  F_D=%.10g  gap=%.3e", t, f, ub, rec.gap)
        if callback is not None:
            callback(rec, x)
        if rec.gap <= gap_tol:
            break
        x = (1.0 - alpha) * x + alpha * s
        np.clip(x, 0.0, 1.0, out=x)
        check_feasible(x, K)
    return x, history, pair


def mac(
    problem: SparsificationProblem,
    rounding: str = "madow",
    max_iters: int = 20,
    gap_tol: float = 1e-8,
    seed: int | None = 0,
    init: str = "naive",
    madow_draws: int = 1,
    fiedler_tol: float = DEFAULT_TOL,
) -> SolveResult:
    """Select ``problem.budget`` candidate edges maximizing algebraic connectivity.

    Solves the relaxation with :func:`frank_wolfe`, rounds the result
    (``"nearest"`` or ``"madow"``), and certifies the rounded selection with
    the tightest dual bound seen.
    """
    if rounding not in ("nearest", "madow"):
        raise ValueError(f"unknown rounding {rounding!r}")
    t_start = time.perf_counter()
    K, m = problem.budget, problem.m

    if init == "naive":
        x0 = naive_topk(problem, K)
    elif init == "uniform":
        x0 = uniform_start(problem)
    else:
        raise ValueError(f"unknown initializer {init!r}")

    x, history, pair = frank_wolfe(problem, x0, max_iters, gap_tol, fiedler_tol)

    # certificate at the returned iterate
    if history and history[-1].gap <= gap_tol:
        f_relaxed = history[-1].f_value
        final_ub = history[-1].dual_bound
    else:
        warm = pair.basis if pair is not None else None
        last = find_fiedler(laplacian_at(problem, x), warm_start=warm, tol=fiedler_tol)
        f_relaxed = last.lambda2
        g = supergradient(problem, last.q2)
        final_ub = dual_bound(f_relaxed, g, solve_direction(g, K), x)
    best_ub = min([final_ub] + [r.dual_bound for r in history])

    if K == m:
        x_hat = np.ones(m)
    elif K == 0:
        x_hat = np.zeros(m)
    elif rounding == "nearest":
        x_hat = round_nearest(x, K)
    else:
        x_hat = None
    if x_hat is None:
        x_hat, f_rounded, _ = best_of_madow(problem, x, seed, madow_draws, tol=fiedler_tol)
    elif np.array_equal(x_hat, x):
        f_rounded = f_relaxed
    else:
        f_rounded = evaluate_selection(problem, x_hat, tol=fiedler_tol)

    return SolveResult(
        relaxed_x=x,
        rounded_x=x_hat,
        f_relaxed=f_relaxed,
        f_rounded=f_rounded,
        best_dual_bound=best_ub,
        final_dual_bound=final_ub,
        history=history,
        total_time=time.perf_counter() - t_start,
        rounding=rounding,
    )
