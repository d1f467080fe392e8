"""Exhaustive integral min-cost flow, for networks with a handful of arcs."""

import itertools

import numpy as np

from linecover import FlowArc, FlowNetwork


def enumerate_min_cost(net: FlowNetwork):
    """Optimal cost over all integral flows, or ``None`` if infeasible.

    Each arc carries at most the total supply: a min-cost flow with
    non-negative costs never needs more on a single arc.
    """
    supply = sum(d for d in net.demands if d > 0)
    bounds = [min(supply, a.capacity) if a.capacity is not None else supply for a in net.arcs]
    if not net.arcs:
        return 0.0 if supply == 0 else None
    grid = np.array(list(itertools.product(*[range(b + 1) for b in bounds])), dtype=np.int64)
    inc = np.zeros((len(net.arcs), net.node_count), dtype=np.int64)
    for i, a in enumerate(net.arcs):
        inc[i, a.head] += 1
        inc[i, a.tail] -= 1
    ok = (grid @ inc == np.asarray(net.demands)).all(axis=1)
    if not ok.any():
        return None
    cost = np.array([a.cost for a in net.arcs])
    return float((grid[ok] @ cost).min())


def random_network(rng, max_arcs=6, max_nodes=4, max_demand=3, max_cost=9):
    n = int(rng.integers(2, max_nodes + 1))
    demands = [0] * n
    for _ in range(int(rng.integers(0, n + 1))):
        a, b = rng.choice(n, size=2, replace=False)
        if abs(demands[a] + 1) <= max_demand and abs(demands[b] - 1) <= max_demand:
            demands[a] += 1
            demands[b] -= 1
    arcs = []
    for _ in range(int(rng.integers(1, max_arcs + 1))):
        t, h = (int(x) for x in rng.integers(0, n, size=2))
        cap = [None, 0, 1, 2, 3][int(rng.integers(0, 5))]
        arcs.append(FlowArc(t, h, cap, float(rng.integers(0, max_cost + 1))))
    return FlowNetwork(n, tuple(demands), tuple(arcs))
