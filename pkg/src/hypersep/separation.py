"""Separation and uniform-separation constants of finite disc sequences."""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, DuplicatePoints, EmptyInput, NotSplittable
from .geometry import rho
from .validation import check_disc_points

DUPLICATE_TOL = 1e-14


@dataclass
class SeparationReport:
    delta: float
    witness_pair: tuple | None
    uniform_constant: float | None = None
    witness_index: int | None = None

    def to_dict(self):
        return {
            "delta": self.delta,
            "witness_pair": list(self.witness_pair) if self.witness_pair is not None else None,
            "uniform_constant": self.uniform_constant,
            "witness_index": self.witness_index,
        }


def pairwise_rho(points):
    z = np.asarray(points, dtype=complex)
    return rho(z[:, None], z[None, :])


def _checked_matrix(pts):
    D = pairwise_rho(pts)
    np.fill_diagonal(D, np.inf)
    i, j = np.unravel_index(np.argmin(D), D.shape)
    if D[i, j] < DUPLICATE_TOL:
        pair = (int(min(i, j)), int(max(i, j)))
        raise DuplicatePoints(f"points {pair} coincide (rho={D[i, j]:.3e})", pair=pair)
    return D, (int(min(i, j)), int(max(i, j)))


def separation_constant(points):
    """``min_{n != k} rho(z_n, z_k)`` and the pair attaining it."""
    pts = check_disc_points(points)
    if pts.size < 2:
        raise EmptyInput("separation needs at least two points")
    D, pair = _checked_matrix(pts)
    return SeparationReport(delta=float(D[pair]), witness_pair=pair)


def uniform_separation_constant(points):
    """``min_k prod_{n != k} rho(z_n, z_k)``, accumulated as a sum of logs.

    Returns the full report (``delta`` included when there are two or more
    points). A single point gives the empty product 1.
    """
    pts = check_disc_points(points)
    if pts.size == 1:
        return SeparationReport(delta=1.0, witness_pair=None, uniform_constant=1.0, witness_index=0)
    D, pair = _checked_matrix(pts)
    np.fill_diagonal(D, 1.0)
    logs = np.log(D).sum(axis=1)
    k = int(np.argmin(logs))
    np.fill_diagonal(D, np.inf)
    return SeparationReport(
        delta=float(D[pair]),
        witness_pair=pair,
        uniform_constant=float(np.exp(logs[k])),
        witness_index=k,
    )


def _odd_cycle(parent, depth, u, v):
    """Cycle through the BFS-tree paths of ``u`` and ``v`` closed by edge ``(u, v)``."""
    pu, pv = [u], [v]
    while depth[pu[-1]] > depth[pv[-1]]:
        pu.append(parent[pu[-1]])
    while depth[pv[-1]] > depth[pu[-1]]:
        pv.append(parent[pv[-1]])
    while pu[-1] != pv[-1]:
        pu.append(parent[pu[-1]])
        pv.append(parent[pv[-1]])
    return pu + pv[-2::-1]


def split_two_separated(points, delta_target):
    """Split ``points`` into two subsets, each with pairwise ``rho > delta_target``.

    Two-colours the conflict graph (edge when ``rho <= delta_target``) by
    breadth-first search. Isolated points go to the first subset. Returns
    two sorted index lists; raises :class:`NotSplittable` carrying an odd
    cycle of indices when the conflict graph is not bipartite.
    """
    if not 0.0 < delta_target < 1.0:
        raise DomainError("delta_target must lie in (0, 1)")
    pts = check_disc_points(points, allow_empty=True)
    n = pts.size
    if n == 0:
        return [], []
    D = pairwise_rho(pts)
    np.fill_diagonal(D, np.inf)
    adj = [np.flatnonzero(D[i] <= delta_target) for i in range(n)]
    color = [-1] * n
    parent = [-1] * n
    depth = [0] * n
    for s in range(n):
        if color[s] != -1:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                v = int(v)
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    queue.append(v)
                elif color[v] == color[u]:
                    cycle = _odd_cycle(parent, depth, u, v)
                    raise NotSplittable(
                        f"conflict graph has an odd cycle of length {len(cycle)}", cycle=cycle
                    )
    A = [i for i in range(n) if color[i] == 0]
    B = [i for i in range(n) if color[i] == 1]
    return A, B


def best_split_delta(points):
    """Largest threshold at which :func:`split_two_separated` succeeds.

    Bipartiteness is monotone in the threshold, so a binary search over the
    sorted pairwise distances suffices. Returns ``None`` for fewer than
    three points, where every threshold works.
    """
    pts = check_disc_points(points, allow_empty=True)
    if pts.size < 3:
        return None
    D = pairwise_rho(pts)
    cand = np.unique(D[np.triu_indices(pts.size, 1)])
    cand = cand[(cand > 0) & (cand < 1)]
    lo, hi = -1, cand.size - 1
    # invariant: cand[lo] splits (or lo == -1), thresholds above hi fail
    while lo < hi:
        mid = (lo + hi + 1) // 2
        try:
            split_two_separated(pts, float(cand[mid]))
            lo = mid
        except NotSplittable:
            hi = mid - 1
    if lo < 0:
        return 0.5 * float(cand[0])
    return float(cand[lo])
