"""Weighted undirected graphs, Laplacian assembly and the affine map x -> L(x)."""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from . import _accel


@dataclass(frozen=True)
class WeightedEdge:
    """Undirected edge ``{u, v}`` with nonnegative weight."""

    u: int
    v: int
    weight: float = 1.0

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"self-loop on node {self.u}")
        if self.u < 0 or self.v < 0:
            raise ValueError(f"negative node index in edge ({self.u}, {self.v})")
        if not self.weight >= 0:
            raise ValueError(f"edge ({self.u}, {self.v}) has negative weight {self.weight}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


def edge_arrays(edges: Iterable[WeightedEdge]):
    """Split an edge list into ``(u, v, w)`` arrays."""
    edges = list(edges)
    u = np.fromiter((e.u for e in edges), dtype=np.int64, count=len(edges))
    v = np.fromiter((e.v for e in edges), dtype=np.int64, count=len(edges))
    w = np.fromiter((e.weight for e in edges), dtype=np.float64, count=len(edges))
    return u, v, w


def merge_duplicates(edges: Iterable[WeightedEdge]) -> list[WeightedEdge]:
    """Merge parallel edges by summing their weights; first-seen order is kept."""
    merged: dict[tuple[int, int], float] = {}
    for e in edges:
        merged[e.key] = merged.get(e.key, 0.0) + e.weight
    return [WeightedEdge(a, b, w) for (a, b), w in merged.items()]


class SparseLaplacian:
    """Symmetric sparse graph Laplacian with cheap incremental edge insertion.

    Edges are buffered as COO triplets and folded into a cached CSR matrix on
    the first read after a mutation. Reads are thread-safe; writes are not.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("dimension must be nonnegative")
        self.n = int(n)
        self._u: list[np.ndarray] = []
        self._v: list[np.ndarray] = []
        self._w: list[np.ndarray] = []
        self._pending_u: list[int] = []
        self._pending_v: list[int] = []
        self._pending_w: list[float] = []
        self._csr: sp.csr_matrix | None = None
        self._lock = threading.Lock()

    @classmethod
    def from_arrays(cls, n, u, v, w) -> "SparseLaplacian":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        _check_edge_arrays(n, u, v, w)
        L = cls(n)
        L._u.append(u)
        L._v.append(v)
        L._w.append(w)
        return L

    def add_edge(self, u: int, v: int, weight: float) -> None:
        """Add ``weight * (e_u - e_v)(e_u - e_v)^T``; amortized O(1)."""
        _check_edge_arrays(self.n, np.array([u]), np.array([v]), np.array([weight], dtype=float))
        self._pending_u.append(int(u))
        self._pending_v.append(int(v))
        self._pending_w.append(float(weight))
        self._csr = None

    def _flush(self):
        if self._pending_u:
            self._u.append(np.array(self._pending_u, dtype=np.int64))
            self._v.append(np.array(self._pending_v, dtype=np.int64))
            self._w.append(np.array(self._pending_w, dtype=np.float64))
            self._pending_u, self._pending_v, self._pending_w = [], [], []

    @property
    def matrix(self) -> sp.csr_matrix:
        csr = self._csr
        if csr is not None:
            return csr
        with self._lock:
            if self._csr is None:
                self._flush()
                self._csr = _assemble(self.n, self._u, self._v, self._w)
            return self._csr

    def __matmul__(self, x):
        return self.matrix @ x

    def matvec(self, x):
        return self.matrix @ x

    @property
    def shape(self):
        return (self.n, self.n)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def norm_estimate(self) -> float:
        """Max absolute row sum, an upper bound on the spectral norm."""
        if self.n == 0:
            return 0.0
        return float(2.0 * self.diagonal().max(initial=0.0))

    def scaled(self, c: float) -> "SparseLaplacian":
        self._flush()
        return SparseLaplacian.from_arrays(
            self.n,
            np.concatenate(self._u) if self._u else np.empty(0, np.int64),
            np.concatenate(self._v) if self._v else np.empty(0, np.int64),
            c * np.concatenate(self._w) if self._w else np.empty(0),
        )


def _check_edge_arrays(n, u, v, w):
    if u.size == 0:
        return
    if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
        raise IndexError(f"edge endpoint out of range for n={n}")
    if np.any(u == v):
        raise ValueError("self-loops are not allowed")
    if np.any(~(w >= 0)):
        raise ValueError("edge weights must be nonnegative")


def _assemble(n, us, vs, ws) -> sp.csr_matrix:
    if us:
        u = np.concatenate(us)
        v = np.concatenate(vs)
        w = np.concatenate(ws)
    else:
        u = v = np.empty(0, np.int64)
        w = np.empty(0)
    off = sp.coo_matrix(
        (np.concatenate([-w, -w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
        shape=(n, n),
    ).tocsr()
    off.sum_duplicates()
    # diagonal from the assembled off-diagonal rows so that L @ 1 cancels
    deg = -np.asarray(off.sum(axis=1)).ravel()
    L = (off + sp.diags(deg, format="csr")).tocsr()
    L.sort_indices()
    return L


def build_laplacian(edges: Sequence[WeightedEdge], n: int) -> SparseLaplacian:
    """Weighted Laplacian: ``L_ii = sum of incident weights``, ``L_ij = -w_ij``."""
    u, v, w = edge_arrays(edges)
    return SparseLaplacian.from_arrays(n, u, v, w)


def edge_quadratic_form(edge: WeightedEdge, q) -> float:
    """``q^T L_e q = w (q_u - q_v)^2``."""
    q = np.asarray(q, dtype=float)
    if max(edge.u, edge.v) >= q.shape[0]:
        raise IndexError("edge endpoint outside vector")
    d = q[edge.u] - q[edge.v]
    return float(edge.weight * d * d)


def count_components(edges: Sequence[WeightedEdge], n: int) -> int:
    """Connected components of ``(V, {e : w_e > 0})`` by union-find."""
    u, v, w = edge_arrays(edges)
    _check_edge_arrays(n, u, v, w)
    return _accel.count_components(u, v, w, n)


@dataclass
class SparsificationProblem:
    """Fixed edges, candidate edges and a selection budget on ``n`` nodes.

    Parallel edges inside one list are merged (weights add). A pair that is
    both fixed and candidate is rejected.
    """

    n: int
    fixed_edges: list[WeightedEdge]
    candidate_edges: list[WeightedEdge]
    budget: int
    _arrays: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.fixed_edges = merge_duplicates(self.fixed_edges)
        self.candidate_edges = merge_duplicates(self.candidate_edges)
        fixed_keys = {e.key for e in self.fixed_edges}
        clash = [e.key for e in self.candidate_edges if e.key in fixed_keys]
        if clash:
            raise ValueError(f"edges {clash[:5]} are both fixed and candidate")
        if not 0 <= self.budget <= len(self.candidate_edges):
            raise ValueError(
                f"budget K={self.budget} outside [0, {len(self.candidate_edges)}]"
            )
        self.budget = int(self.budget)
        fu, fv, fw = edge_arrays(self.fixed_edges)
        cu, cv, cw = edge_arrays(self.candidate_edges)
        _check_edge_arrays(self.n, fu, fv, fw)
        _check_edge_arrays(self.n, cu, cv, cw)
        self._arrays = dict(fu=fu, fv=fv, fw=fw, cu=cu, cv=cv, cw=cw)

    @property
    def m(self) -> int:
        return len(self.candidate_edges)

    @property
    def fixed_arrays(self):
        a = self._arrays
        return a["fu"], a["fv"], a["fw"]

    @property
    def candidate_arrays(self):
        a = self._arrays
        return a["cu"], a["cv"], a["cw"]

    def with_budget(self, budget: int) -> "SparsificationProblem":
        return SparsificationProblem(self.n, self.fixed_edges, self.candidate_edges, budget)

    def validate(self) -> bool:
        """Warn when no feasible selection can contain a spanning tree."""
        fu, fv, fw = self.fixed_arrays
        comps_fixed = _accel.count_components(fu, fv, fw, self.n)
        ok = True
        if comps_fixed > 1 and self.budget < comps_fixed - 1:
            warnings.warn(
                f"fixed edges leave {comps_fixed} components but budget K={self.budget} "
                "cannot join them into a spanning tree",
                stacklevel=2,
            )
            ok = False
        cu, cv, cw = self.candidate_arrays
        full = _accel.count_components(
            np.concatenate([fu, cu]), np.concatenate([fv, cv]), np.concatenate([fw, cw]), self.n
        )
        if full > 1:
            warnings.warn(f"full graph has {full} connected components", stacklevel=2)
            ok = False
        return ok


def laplacian_at(problem: SparsificationProblem, x) -> SparseLaplacian:
    """``L(x) = L^f + sum_k x_k L^c_k``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (problem.m,):
        raise ValueError(f"selection has shape {x.shape}, expected ({problem.m},)")
    if x.size and (x.min() < 0 or x.max() > 1):
        raise ValueError("selection entries must lie in [0, 1]")
    fu, fv, fw = problem.fixed_arrays
    cu, cv, cw = problem.candidate_arrays
    return SparseLaplacian.from_arrays(
        problem.n,
        np.concatenate([fu, cu]),
        np.concatenate([fv, cv]),
        np.concatenate([fw, cw * x]),
    )


def fixed_laplacian(problem: SparsificationProblem) -> SparseLaplacian:
    fu, fv, fw = problem.fixed_arrays
    return SparseLaplacian.from_arrays(problem.n, fu, fv, fw)
