"""Asymmetric TSP solvers used to stitch components together."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TooLarge

DP_THRESHOLD = 18


@dataclass(frozen=True)
class AtspInstance:
    costs: np.ndarray
    vertex_map: tuple[int, ...] = field(default=())

    def __post_init__(self):
        c = np.array(self.costs, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("cost matrix must be square")
        if c.shape[0] < 3:
            raise ValueError("an ATSP instance needs at least 3 nodes")
        off = ~np.eye(c.shape[0], dtype=bool)
        if not np.isfinite(c[off]).all():
            raise ValueError("off-diagonal costs must be finite")
        np.fill_diagonal(c, 0.0)
        c.setflags(write=False)
        object.__setattr__(self, "costs", c)
        if not self.vertex_map:
            object.__setattr__(self, "vertex_map", tuple(range(c.shape[0])))

    @property
    def size(self) -> int:
        return self.costs.shape[0]


def tour_cost(costs: np.ndarray, order) -> float:
    n = len(order)
    return math.fsum(float(costs[order[i], order[(i + 1) % n]]) for i in range(n))


def held_karp_atsp(m: AtspInstance, threshold: int = DP_THRESHOLD) -> tuple[list[int], float]:
    """Exact tour by subset dynamic programming, starting and ending at node 0.

    Masks of the same size are processed together so each step is one numpy
    reduction.  Ties go to the lowest-numbered predecessor.
    """
    n = m.size
    if n > threshold:
        raise TooLarge(f"{n} nodes exceeds the exact DP limit of {threshold}")
    c = m.costs
    k = n - 1
    full = 1 << k
    dp = np.full((full, k), np.inf)
    parent = np.full((full, k), -1, dtype=np.int64)
    for j in range(k):
        dp[1 << j, j] = c[0, j + 1]
    masks = np.arange(full, dtype=np.int64)
    popcount = np.zeros(full, dtype=np.int64)
    for j in range(k):
        popcount += (masks >> j) & 1
    inner = c[1:, 1:]
    for size in range(2, k + 1):
        layer = masks[popcount == size]
        for j in range(k):
            sel = layer[((layer >> j) & 1) == 1]
            prev = sel ^ (1 << j)
            cand = dp[prev] + inner[:, j]
            best = np.argmin(cand, axis=1)
            dp[sel, j] = cand[np.arange(len(sel)), best]
            parent[sel, j] = best
    closing = dp[full - 1] + c[1:, 0]
    last = int(np.argmin(closing))
    order = []
    mask, j = full - 1, last
    while j >= 0:
        order.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order.append(0)
    order.reverse()
    return order, tour_cost(c, order)


def _nearest_neighbour(c: list[list[float]], start: int) -> list[int]:
    n = len(c)
    order = [start]
    left = set(range(n)) - {start}
    cur = start
    while left:
        nxt = min(left, key=lambda j: (c[cur][j], j))
        order.append(nxt)
        left.remove(nxt)
        cur = nxt
    return order


def _two_opt_pass(c, order, tol) -> bool:
    n = len(order)
    improved = False
    i = 1
    while i < n - 1:
        fwd = [0.0] * (n + 1)
        bwd = [0.0] * (n + 1)
        for t in range(n - 1):
            fwd[t + 1] = fwd[t] + c[order[t]][order[t + 1]]
            bwd[t + 1] = bwd[t] + c[order[t + 1]][order[t]]
        moved = False
        for j in range(i + 1, n):
            a, b = order[i - 1], order[i]
            x, y = order[j], order[(j + 1) % n]
            old = c[a][b] + (fwd[j] - fwd[i]) + c[x][y]
            new = c[a][x] + (bwd[j] - bwd[i]) + c[b][y]
            if new < old - tol:
                order[i : j + 1] = order[i : j + 1][::-1]
                improved = moved = True
                break
        if not moved:
            i += 1
    return improved


def _or_opt_pass(c, order, tol) -> bool:
    n = len(order)
    improved = False
    for length in (1, 2, 3):
        if length > n - 2:
            break
        i = 0
        while i < n:
            seg = [order[(i + t) % n] for t in range(length)]
            prev, nxt = order[(i - 1) % n], order[(i + length) % n]
            gain = c[prev][seg[0]] + c[seg[-1]][nxt] - c[prev][nxt]
            rest = [order[(i + length + t) % n] for t in range(n - length)]
            best = None
            for p in range(len(rest) - 1):
                u, w = rest[p], rest[p + 1]
                delta = c[u][seg[0]] + c[seg[-1]][w] - c[u][w] - gain
                if delta < -tol and (best is None or delta < best[0]):
                    best = (delta, p)
            if best is not None:
                p = best[1]
                order[:] = rest[: p + 1] + seg + rest[p + 1 :]
                improved = True
            i += 1
    return improved


def _local_search(c, order, tol):
    while _two_opt_pass(c, order, tol) or _or_opt_pass(c, order, tol):
        pass
    return order


def heuristic_atsp(m: AtspInstance, seed: int = 0, kicks: int = 20) -> tuple[list[int], float]:
    """Best nearest-neighbour start, asymmetric 2-opt and or-opt, then a few
    seeded double-bridge restarts.  The returned tour starts at node 0."""
    c = m.costs.tolist()
    n = m.size
    scale = max(1.0, float(np.abs(m.costs).max()))
    tol = 1e-12 * scale * n
    starts = [_nearest_neighbour(c, s) for s in range(n)]
    best = min(starts, key=lambda o: (tour_cost(m.costs, o), o))
    best = _local_search(c, list(best), tol)
    best_cost = tour_cost(m.costs, best)
    if n >= 8:
        rng = np.random.default_rng(seed)
        for _ in range(kicks):
            p1, p2, p3 = sorted(rng.choice(np.arange(1, n), size=3, replace=False).tolist())
            cand = best[:p1] + best[p2:p3] + best[p1:p2] + best[p3:]
            cand = _local_search(c, cand, tol)
            cc = tour_cost(m.costs, cand)
            if cc < best_cost - tol:
                best, best_cost = cand, cc
    z = best.index(0)
    best = best[z:] + best[:z]
    return best, tour_cost(m.costs, best)


def solve_atsp(m: AtspInstance, mode: str = "auto", threshold: int = DP_THRESHOLD, seed: int = 0):
    """Dispatch on ``mode``: ``exact``, ``heuristic`` or ``auto``."""
    if mode == "exact" or (mode == "auto" and m.size <= threshold):
        order, cost = held_karp_atsp(m, threshold)
        return order, cost, "exact"
    if mode in ("heuristic", "auto"):
        order, cost = heuristic_atsp(m, seed)
        return order, cost, "heuristic"
    raise ValueError(f"unknown ATSP mode {mode!r}")
