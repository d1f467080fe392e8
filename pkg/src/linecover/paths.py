"""Shortest deadhead paths over all edges in both directions."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import Unreachable
from .graph_core import Arc, LineCoverageInstance, decode_arc


@dataclass(frozen=True)
class PathResult:
    cost: float
    arcs: tuple[Arc, ...]


def _path_cost(inst: LineCoverageInstance, arcs) -> float:
    # left-to-right accumulation, the same order Dijkstra uses
    total = 0.0
    for a in arcs:
        total += inst.arc_cost(a)
    return total


def shortest_deadhead_path(inst: LineCoverageInstance, src: int, dst: int) -> PathResult:
    """Single-pair Dijkstra on the deadhead multigraph (heap based)."""
    if src == dst:
        return PathResult(0.0, ())
    tails, heads, costs, codes = inst.deadhead_arrays
    adj: list[list[tuple[float, int, int]]] = [[] for _ in range(inst.vertex_count)]
    for t, h, c, k in zip(tails.tolist(), heads.tolist(), costs.tolist(), codes.tolist()):
        if t != h:
            adj[t].append((c, k, h))
    for lst in adj:
        lst.sort()

    dist = {src: 0.0}
    via: dict[int, tuple[int, int]] = {}
    done = set()
    heap = [(0.0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == dst:
            break
        for c, k, y in adj[x]:
            nd = d + c
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                via[y] = (x, k)
                heapq.heappush(heap, (nd, y))
    if dst not in done:
        raise Unreachable(f"no deadhead path from {src} to {dst}")
    arcs = []
    x = dst
    while x != src:
        x, k = via[x]
        arcs.append(decode_arc(k))
    arcs.reverse()
    return PathResult(_path_cost(inst, arcs), tuple(arcs))


class DeadheadPaths:
    """Shortest-path rows computed on demand and cached.

    Parallel arcs are collapsed to the cheapest one (lowest arc code on ties)
    before running scipy's Dijkstra.  When more than a quarter of the
    vertices are requested as sources, all rows are computed in one call.
    """

    def __init__(self, inst: LineCoverageInstance):
        self.inst = inst
        n = inst.vertex_count
        tails, heads, costs, codes = inst.deadhead_arrays
        keep = tails != heads
        tails, heads, costs, codes = tails[keep], heads[keep], costs[keep], codes[keep]
        order = np.lexsort((codes, costs, heads, tails))
        tails, heads, costs, codes = tails[order], heads[order], costs[order], codes[order]
        first = np.ones(len(tails), dtype=bool)
        first[1:] = (tails[1:] != tails[:-1]) | (heads[1:] != heads[:-1])
        tails, heads, costs, codes = tails[first], heads[first], costs[first], codes[first]
        self._graph = csr_matrix((costs, (tails, heads)), shape=(n, n))
        self._arc_code = dict(zip(zip(tails.tolist(), heads.tolist()), codes.tolist()))
        self._dist: dict[int, np.ndarray] = {}
        self._pred: dict[int, np.ndarray] = {}

    def prepare(self, sources) -> None:
        missing = sorted({int(s) for s in sources} - self._dist.keys())
        if not missing:
            return
        n = self.inst.vertex_count
        if len(missing) > n / 4:
            missing = [s for s in range(n) if s not in self._dist]
        dist, pred = dijkstra(self._graph, directed=True, indices=missing, return_predecessors=True)
        for i, s in enumerate(missing):
            self._dist[s] = dist[i]
            self._pred[s] = pred[i]

    def row(self, src: int) -> np.ndarray:
        if src not in self._dist:
            self.prepare([src])
        return self._dist[src]

    def cost(self, src: int, dst: int) -> float:
        c = float(self.row(src)[dst])
        if math.isinf(c):
            raise Unreachable(f"no deadhead path from {src} to {dst}")
        return c

    def matrix(self, vertices=None) -> np.ndarray:
        """Distance sub-matrix with rows and columns in ``vertices`` order."""
        if vertices is None:
            vertices = range(self.inst.vertex_count)
        vertices = [int(x) for x in vertices]
        self.prepare(vertices)
        idx = np.asarray(vertices, dtype=np.int64)
        if not vertices:
            return np.zeros((0, 0))
        return np.vstack([self._dist[s][idx] for s in vertices])

    def path(self, src: int, dst: int) -> PathResult:
        if src == dst:
            return PathResult(0.0, ())
        self.cost(src, dst)
        pred = self._pred[src]
        arcs = []
        x = dst
        while x != src:
            p = int(pred[x])
            arcs.append(decode_arc(self._arc_code[(p, x)]))
            x = p
        arcs.reverse()
        return PathResult(_path_cost(self.inst, arcs), tuple(arcs))


def all_pairs_deadhead(inst: LineCoverageInstance) -> DeadheadPaths:
    """All-pairs shortest deadhead costs; ``.matrix()`` gives the n x n table."""
    paths = DeadheadPaths(inst)
    paths.prepare(range(inst.vertex_count))
    return paths
