"""Random sparsification instances for tests, benchmarks and the CLI demo."""

from __future__ import annotations

import numpy as np

from .graph import SparsificationProblem, WeightedEdge


def random_problem(n, m, K, seed=None, weight_range=(0.1, 10.0), chain=True) -> SparsificationProblem:
    """Odometry-style chain ``0-1-...-(n-1)`` plus ``m`` distinct random candidate pairs.

    With ``chain=False`` the fixed set is empty and the candidates are drawn
    from all node pairs.
    """
    rng = np.random.default_rng(seed)
    lo, hi = weight_range
    fixed = []
    if chain:
        fixed = [WeightedEdge(i, i + 1, float(w)) for i, w in enumerate(rng.uniform(lo, hi, n - 1))]
    taken = {e.key for e in fixed}
    pool = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in taken]
    if m > len(pool):
        raise ValueError(f"only {len(pool)} candidate pairs available on {n} nodes")
    if len(pool) > 50 * m:
        picked = set()
        while len(picked) < m:
            i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
            if (i, j) not in taken:
                picked.add((i, j))
        pairs = sorted(picked)
        rng.shuffle(pairs)
    else:
        idx = rng.choice(len(pool), size=m, replace=False)
        pairs = [pool[i] for i in idx]
    weights = rng.uniform(lo, hi, m)
    cands = [WeightedEdge(i, j, float(w)) for (i, j), w in zip(pairs, weights)]
    return SparsificationProblem(n, fixed, cands, K)


def random_feasible_point(m, K, rng) -> np.ndarray:
    """A random point of ``{x in [0,1]^m : sum(x) = K}`` (mixture of vertices)."""
    rng = np.random.default_rng(rng)
    if K in (0, m):
        return np.full(m, float(K > 0))
    weights = rng.dirichlet(np.ones(4))
    x = np.zeros(m)
    for wt in weights:
        s = np.zeros(m)
        s[rng.choice(m, size=K, replace=False)] = 1.0
        x += wt * s
    return np.clip(x, 0.0, 1.0)


def manhattan_problem(n, m, K=0, seed=None, weight_range=(0.1, 10.0), turn_prob=0.3, radius=1.0,
                      extent=None):
    """Pose-graph-like instance: a random walk on an ``extent x extent`` grid.

    Consecutive poses are joined by odometry edges; loop-closure candidates
    link non-consecutive poses within ``radius`` of each other. ``m``
    candidates are sampled from all such pairs.
    """
    rng = np.random.default_rng(seed)
    lo, hi = weight_range
    headings = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]])
    if extent is None:
        extent = max(2, int(np.ceil(np.sqrt(n) / 2)))
    pos = np.zeros((n, 2), dtype=np.int64)
    h = 0
    for i in range(1, n):
        if rng.random() < turn_prob:
            h = (h + rng.choice([1, 3])) % 4
        nxt = pos[i - 1] + headings[h]
        while not ((0 <= nxt) & (nxt < extent)).all():
            h = (h + rng.choice([1, 2, 3])) % 4
            nxt = pos[i - 1] + headings[h]
        pos[i] = nxt
    d2 = ((pos[:, None, :] - pos[None, :, :]) ** 2).sum(-1)
    ii, jj = np.nonzero(np.triu(d2 <= radius * radius, k=2))
    if len(ii) < m:
        raise ValueError(f"trajectory only yields {len(ii)} loop-closure pairs, need {m}")
    pick = np.sort(rng.choice(len(ii), size=m, replace=False))
    fixed = [WeightedEdge(i, i + 1, float(w)) for i, w in enumerate(rng.uniform(lo, hi, n - 1))]
    cands = [WeightedEdge(int(ii[k]), int(jj[k]), float(w))
             for k, w in zip(pick, rng.uniform(lo, hi, m))]
    return SparsificationProblem(n, fixed, cands, K)
