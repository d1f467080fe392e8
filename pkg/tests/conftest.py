import itertools

import numpy as np
import pytest
from hypothesis import settings

from linecover import Edge, LineCoverageInstance

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def make_instance(n, edges, coords=None):
    """``edges``: ``(u, v, required, (sf, sr, df, dr))``; service costs of
    non-required edges may be ``None``."""
    built = []
    for i, (u, v, req, c) in enumerate(edges):
        sf, sr, df, dr = c
        if not req:
            sf = sr = None
        built.append(Edge(i, u, v, req, sf, sr, df, dr))
    return LineCoverageInstance(n, tuple(built), coords)


def sym(s, d):
    """Symmetric cost tuple: service ``s`` and deadhead ``d`` both ways."""
    return (s, s, d, d)


def floyd_warshall(inst):
    """Dense all-pairs deadhead distances; independent of the library's Dijkstra."""
    n = inst.vertex_count
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for e in inst.edges:
        for fwd in (True, False):
            t, h = e.endpoints(fwd)
            c = e.deadhead_cost(fwd)
            if c < 1e14 and t != h:
                d[t, h] = min(d[t, h], c)
    for k in range(n):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return d


def brute_atsp(c):
    n = len(c)
    best = None
    for perm in itertools.permutations(range(1, n)):
        order = (0,) + perm
        cost = sum(c[order[i]][order[(i + 1) % n]] for i in range(n))
        if best is None or cost < best[0]:
            best = (cost, order)
    return best


@pytest.fixture
def two_cycle():
    """Two vertices, one required edge and a non-required return edge."""
    return make_instance(2, [(0, 1, True, (3, 5, 2, 2)), (0, 1, False, (None, None, 4, 1))])
