"""Integral minimum-cost flow with node demands.

Demands follow the inflow-minus-outflow convention: ``d(v) > 0`` means
``v`` must absorb ``d(v)`` units, ``d(v) < 0`` means it supplies ``-d(v)``.

The solver is successive shortest paths with node potentials.  Every
Dijkstra round (multi-source, from all nodes with remaining supply) is
followed by augmentations along as many shortest-path-tree paths as the
residual capacities allow, so the number of Dijkstra rounds stays far below
the total demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import InfeasibleFlow

UNBOUNDED = None


@dataclass(frozen=True)
class FlowArc:
    tail: int
    head: int
    capacity: int | None
    cost: float
    tag: Any = None


@dataclass(frozen=True)
class FlowNetwork:
    node_count: int
    demands: tuple[int, ...]
    arcs: tuple[FlowArc, ...]

    def __post_init__(self):
        object.__setattr__(self, "demands", tuple(int(d) for d in self.demands))
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if len(self.demands) != self.node_count:
            raise ValueError("one demand per node is required")
        if sum(self.demands) != 0:
            raise ValueError("demands must sum to zero")
        for i, a in enumerate(self.arcs):
            if not (0 <= a.tail < self.node_count and 0 <= a.head < self.node_count):
                raise ValueError(f"arc {i} references a node out of range")
            if a.capacity is not None and a.capacity < 0:
                raise ValueError(f"arc {i} has negative capacity")
            if not a.cost >= 0:
                raise ValueError(f"arc {i} has negative or NaN cost {a.cost!r}")

    @property
    def unbounded_capacity(self) -> int:
        """Stand-in capacity for unbounded arcs; no arc carries more in an
        optimal flow with non-negative costs."""
        return sum(abs(d) for d in self.demands)

    def capacities(self) -> np.ndarray:
        big = self.unbounded_capacity
        return np.array([big if a.capacity is None else a.capacity for a in self.arcs], dtype=np.int64)


@dataclass(frozen=True)
class FlowSolution:
    flow: tuple[int, ...]
    total_cost: float


def flow_cost(net: FlowNetwork, flow: Sequence[int]) -> float:
    return math.fsum(a.cost * f for a, f in zip(net.arcs, flow) if f)


def solve_min_cost_flow(net: FlowNetwork) -> FlowSolution:
    n, m = net.node_count, len(net.arcs)
    demand = np.asarray(net.demands, dtype=np.int64)
    supply = np.maximum(-demand, 0)
    deficit = np.maximum(demand, 0)
    if m == 0:
        if supply.any():
            raise InfeasibleFlow("demands cannot be met without arcs")
        return FlowSolution((), 0.0)

    tail = np.fromiter((a.tail for a in net.arcs), dtype=np.int64, count=m)
    head = np.fromiter((a.head for a in net.arcs), dtype=np.int64, count=m)
    cost = np.fromiter((a.cost for a in net.arcs), dtype=float, count=m)
    cap = net.capacities()
    flow = np.zeros(m, dtype=np.int64)
    potential = np.zeros(n)

    # Parallel arcs share the potential shift, so the cheapest usable arc of
    # each (tail, head) pair can be read off one static sort.
    usable = np.flatnonzero((cap > 0) & (tail != head))
    usable = usable[np.lexsort((usable, cost[usable], head[usable], tail[usable]))]
    ukey = tail[usable] * n + head[usable]

    while supply.any():
        # forward residual arcs: first non-saturated arc of each pair
        avail = usable[flow[usable] < cap[usable]]
        akey = ukey[flow[usable] < cap[usable]]
        first = np.ones(len(avail), dtype=bool)
        first[1:] = akey[1:] != akey[:-1]
        f_idx, f_key = avail[first], akey[first]
        f_rc = cost[f_idx] + potential[tail[f_idx]] - potential[head[f_idx]]
        # residual arc code: 2*i for forward use of arc i, 2*i+1 for cancelling it
        f_code = 2 * f_idx

        b_idx = np.flatnonzero(flow > 0)
        b_idx = b_idx[tail[b_idx] != head[b_idx]]
        b_key = head[b_idx] * n + tail[b_idx]
        b_rc = -cost[b_idx] + potential[head[b_idx]] - potential[tail[b_idx]]
        b_code = 2 * b_idx + 1
        if len(b_idx):
            o = np.lexsort((b_code, b_rc, b_key))
            b_key, b_rc, b_code = b_key[o], b_rc[o], b_code[o]
            keep = np.ones(len(b_key), dtype=bool)
            keep[1:] = b_key[1:] != b_key[:-1]
            b_key, b_rc, b_code = b_key[keep], b_rc[keep], b_code[keep]
            hit = np.zeros(len(b_key), dtype=bool)
            if len(f_key):
                pos = np.minimum(np.searchsorted(f_key, b_key), len(f_key) - 1)
                hit = f_key[pos] == b_key
                # a cancelling arc replaces the forward one when strictly better
                better = hit & (b_rc < f_rc[pos])
                f_rc[pos[better]] = b_rc[better]
                f_code[pos[better]] = b_code[better]
            extra = ~hit
            g_key = np.concatenate([f_key, b_key[extra]])
            g_rc = np.concatenate([f_rc, b_rc[extra]])
            g_code = np.concatenate([f_code, b_code[extra]])
        else:
            g_key, g_rc, g_code = f_key, f_rc, f_code
        np.maximum(g_rc, 0.0, out=g_rc)
        graph = csr_matrix((g_rc, (g_key // n, g_key % n)), shape=(n, n))
        order = np.argsort(g_key, kind="stable")
        s_key, s_code = g_key[order], g_code[order]

        sources = np.flatnonzero(supply)
        dist, pred, root = dijkstra(
            graph, directed=True, indices=sources, min_only=True, return_predecessors=True
        )
        reach = np.isfinite(dist)
        sinks = np.flatnonzero((deficit > 0) & reach)
        if len(sinks) == 0:
            raise InfeasibleFlow("remaining demand cannot be routed")
        far = dist[reach].max()
        potential += np.where(reach, dist, far)

        for t in sorted(sinks.tolist(), key=lambda x: (dist[x], x)):
            s = int(root[t])
            if supply[s] == 0 or deficit[t] == 0:
                continue
            keys = []
            x = t
            while x != s:
                p = int(pred[x])
                keys.append(p * n + x)
                x = p
            codes = s_code[np.searchsorted(s_key, keys)]
            arc = codes >> 1
            back = (codes & 1).astype(bool)
            room = np.where(back, flow[arc], cap[arc] - flow[arc])
            amount = min(int(supply[s]), int(deficit[t]), int(room.min()))
            if amount <= 0:
                continue
            np.add.at(flow, arc, np.where(back, -amount, amount))
            supply[s] -= amount
            deficit[t] -= amount

    out = tuple(int(f) for f in flow)
    return FlowSolution(out, flow_cost(net, out))


def verify_flow(net: FlowNetwork, sol: FlowSolution, tol: float = 1e-9) -> bool:
    """Feasibility plus an optimality certificate.

    Optimality is certified by the absence of a negative-cost cycle in the
    residual graph, searched with Bellman-Ford from a virtual root.
    """
    flow = sol.flow
    if len(flow) != len(net.arcs):
        return False
    balance = [0] * net.node_count
    for a, f in zip(net.arcs, flow):
        if f != int(f) or f < 0:
            return False
        if a.capacity is not None and f > a.capacity:
            return False
        balance[a.head] += f
        balance[a.tail] -= f
    if tuple(balance) != net.demands:
        return False
    recomputed = flow_cost(net, flow)
    if not math.isclose(recomputed, sol.total_cost, rel_tol=tol, abs_tol=tol):
        return False

    residual = []
    for a, f in zip(net.arcs, flow):
        if a.tail == a.head:
            continue
        if a.capacity is None or f < a.capacity:
            residual.append((a.tail, a.head, a.cost))
        if f > 0:
            residual.append((a.head, a.tail, -a.cost))
    scale = max([1.0] + [abs(c) for _, _, c in residual])
    eps = tol * scale
    dist = [0.0] * net.node_count
    for _ in range(net.node_count):
        changed = False
        for u, v, c in residual:
            if dist[u] + c < dist[v] - eps:
                dist[v] = dist[u] + c
                changed = True
        if not changed:
            return True
    return False
