"""Reading and writing g2o pose-graph files (SE2 and SE3:QUAT records).

Edge weights are taken from the rotational block of each information
matrix: the (3,3) entry for SE2 edges, the mean of the three rotational
diagonal entries for SE3 edges. Edges between consecutive vertex ids are
treated as odometry (fixed); all others are loop-closure candidates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import SparsificationProblem, WeightedEdge

log = logging.getLogger(__name__)

KAPPA_RULE = {
    "SE2": "information[2,2]",
    "SE3": "mean(information[3,3], information[4,4], information[5,5])",
}

# tag -> (kind, number of pose values, info dimension)
_VERTEX_TAGS = {"VERTEX_SE2": ("SE2", 3), "VERTEX_SE3:QUAT": ("SE3", 7)}
_EDGE_TAGS = {"EDGE_SE2": ("SE2", 3, 3), "EDGE_SE3:QUAT": ("SE3", 7, 6)}
_TAG_FOR_KIND = {
    "SE2": ("VERTEX_SE2", "EDGE_SE2"),
    "SE3": ("VERTEX_SE3:QUAT", "EDGE_SE3:QUAT"),
}


class G2OFormatError(ValueError):
    def __init__(self, message, lineno=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.lineno = lineno


@dataclass(frozen=True)
class Vertex:
    id: int
    pose: tuple
    kind: str


@dataclass(frozen=True)
class Edge:
    id_from: int
    id_to: int
    measurement: tuple
    information: np.ndarray = field(compare=False)
    kind: str

    def __eq__(self, other):
        if not isinstance(other, Edge):
            return NotImplemented
        return (
            (self.id_from, self.id_to, self.measurement, self.kind)
            == (other.id_from, other.id_to, other.measurement, other.kind)
            and np.array_equal(self.information, other.information)
        )

    __hash__ = None

    @property
    def is_odometry(self) -> bool:
        return abs(self.id_to - self.id_from) == 1

    @property
    def kappa(self) -> float:
        return rotational_weight(self.information, self.kind)


@dataclass
class PoseGraphFile:
    vertices: list[Vertex]
    edges: list[Edge]
    kind: str
    skipped: int = 0

    def __eq__(self, other):
        if not isinstance(other, PoseGraphFile):
            return NotImplemented
        return self.kind == other.kind and self.vertices == other.vertices and self.edges == other.edges

    @property
    def odometry_edges(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.is_odometry]

    @property
    def loop_closure_edges(self) -> list[int]:
        return [i for i, e in enumerate(self.edges) if not e.is_odometry]

    def index_map(self) -> dict[int, int]:
        """Vertex id -> 0-based node index (ids in ascending order)."""
        return {vid: k for k, vid in enumerate(sorted(v.id for v in self.vertices))}

    def candidate_groups(self) -> list[list[int]]:
        """Edge-record indices behind each candidate of :func:`to_problem`.

        Parallel loop closures on one node pair share a candidate.
        """
        groups: dict[tuple[int, int], list[int]] = {}
        for i in self.loop_closure_edges:
            e = self.edges[i]
            key = (min(e.id_from, e.id_to), max(e.id_from, e.id_to))
            groups.setdefault(key, []).append(i)
        return list(groups.values())


def rotational_weight(info: np.ndarray, kind: str) -> float:
    if kind == "SE2":
        return float(info[2, 2])
    if kind == "SE3":
        return float(np.mean(np.diag(info)[3:6]))
    raise ValueError(f"unknown pose kind {kind!r}")


def upper_to_full(values, dim: int) -> np.ndarray:
    """Expand a row-major upper-triangular listing into a symmetric matrix."""
    M = np.zeros((dim, dim))
    iu = np.triu_indices(dim)
    M[iu] = values
    M.T[iu] = values
    return M


def full_to_upper(M: np.ndarray) -> np.ndarray:
    return M[np.triu_indices(M.shape[0])]


def _floats(tokens, lineno, path):
    try:
        vals = tuple(float(t) for t in tokens)
    except ValueError as exc:
        raise G2OFormatError(f"malformed number ({exc})", lineno, path) from None
    if not all(math.isfinite(v) for v in vals):
        raise G2OFormatError("non-finite number", lineno, path)
    return vals


def _int(token, lineno, path):
    try:
        return int(token)
    except ValueError:
        raise G2OFormatError(f"malformed vertex id {token!r}", lineno, path) from None


def parse_g2o(path) -> PoseGraphFile:
    """Parse a 2D or 3D g2o file. Unknown record types are skipped and counted."""
    path = Path(path)
    vertices: list[Vertex] = []
    edges: list[Edge] = []
    kind = None
    skipped = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith("#"):
                continue
            tag = tokens[0]
            if tag in _VERTEX_TAGS:
                k, npose = _VERTEX_TAGS[tag]
                if len(tokens) != 2 + npose:
                    raise G2OFormatError(f"{tag} expects {npose + 1} fields, got {len(tokens) - 1}", lineno, path)
                rec_kind = k
                vertices.append(Vertex(_int(tokens[1], lineno, path), _floats(tokens[2:], lineno, path), k))
            elif tag in _EDGE_TAGS:
                k, nmeas, dim = _EDGE_TAGS[tag]
                ninfo = dim * (dim + 1) // 2
                if len(tokens) != 3 + nmeas + ninfo:
                    raise G2OFormatError(
                        f"{tag} expects {2 + nmeas + ninfo} fields, got {len(tokens) - 1}", lineno, path
                    )
                rec_kind = k
                i, j = _int(tokens[1], lineno, path), _int(tokens[2], lineno, path)
                if i == j:
                    raise G2OFormatError(f"edge joins vertex {i} to itself", lineno, path)
                meas = _floats(tokens[3:3 + nmeas], lineno, path)
                info = upper_to_full(_floats(tokens[3 + nmeas:], lineno, path), dim)
                if np.any(np.diag(info) < 0):
                    raise G2OFormatError("information matrix has a negative diagonal entry", lineno, path)
                edges.append(Edge(i, j, meas, info, k))
            else:
                skipped += 1
                continue
            if kind is None:
                kind = rec_kind
            elif kind != rec_kind:
                raise G2OFormatError(f"mixed SE2/SE3 records ({rec_kind} after {kind})", lineno, path)

    if skipped:
        log.warning("%s: skipped %d unsupported records", path, skipped)
    ids = {v.id for v in vertices}
    if len(ids) != len(vertices):
        raise G2OFormatError("duplicate vertex ids", path=path)
    for e in edges:
        if e.id_from not in ids or e.id_to not in ids:
            raise G2OFormatError(f"edge ({e.id_from}, {e.id_to}) references an undeclared vertex", path=path)
    return PoseGraphFile(vertices, edges, kind or "SE2", skipped)


def budget_from_fraction(fraction: float, m: int) -> int:
    """``round(fraction * m)`` with halves rounded up."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"budget fraction {fraction} outside [0, 1]")
    return min(m, int(math.floor(fraction * m + 0.5)))


def to_problem(pg: PoseGraphFile, budget_fraction: float = 1.0, budget: int | None = None) -> SparsificationProblem:
    """Rotational weight graph of ``pg``: odometry edges fixed, loop closures candidate.

    ``budget`` (absolute K) takes precedence over ``budget_fraction``.
    """
    index = pg.index_map()

    def as_edge(e):
        return WeightedEdge(index[e.id_from], index[e.id_to], e.kappa)

    fixed = [as_edge(pg.edges[i]) for i in pg.odometry_edges]
    groups = pg.candidate_groups()
    cands = []
    for g in groups:
        first = as_edge(pg.edges[g[0]])
        w = sum(pg.edges[i].kappa for i in g)
        cands.append(WeightedEdge(first.u, first.v, w))
    m = len(cands)
    K = budget_from_fraction(budget_fraction, m) if budget is None else int(budget)
    return SparsificationProblem(len(pg.vertices), fixed, cands, K)


def _fmt(values) -> str:
    return " ".join(f"{v:.17g}" for v in values)


def write_g2o(pg: PoseGraphFile, selection, path, comment: str | None = None) -> None:
    """Write vertices, all odometry edges, and the selected candidates.

    ``selection`` is a 0/1 vector over the candidates of :func:`to_problem`
    (``None`` keeps everything). Records keep their original order.
    """
    groups = pg.candidate_groups()
    keep = set(pg.odometry_edges)
    if selection is None:
        keep.update(pg.loop_closure_edges)
    else:
        selection = np.asarray(selection)
        if selection.shape != (len(groups),):
            raise ValueError(f"selection has length {selection.size}, expected {len(groups)}")
        for g, bit in zip(groups, selection):
            if bit:
                keep.update(g)
    vtag, etag = _TAG_FOR_KIND[pg.kind]
    lines = [f"# kappa = {KAPPA_RULE[pg.kind]}"]
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    for v in pg.vertices:
        lines.append(f"{vtag} {v.id} {_fmt(v.pose)}")
    for i, e in enumerate(pg.edges):
        if i in keep:
            lines.append(f"{etag} {e.id_from} {e.id_to} {_fmt(e.measurement)} {_fmt(full_to_upper(e.information))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
