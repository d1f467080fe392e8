"""Exact brute-force solver and seeded instance generators."""

from __future__ import annotations

import itertools
import math
from typing import Literal

import numpy as np

from .cost_model import CostSpec, WindModel, build_costs
from .errors import TooLarge, UnsatisfiableProfile
from .graph_core import (
    Arc,
    CoverageTour,
    Edge,
    LineCoverageInstance,
    Mode,
    required_components,
)
from .paths import DeadheadPaths

MAX_REQUIRED = 8
MISSION_WIND = WindModel(service_speed=7.0, deadhead_speed=10.0, wind_speed=2.0, wind_direction=math.pi / 4)


def brute_force_optimal(
    inst: LineCoverageInstance, max_required: int = MAX_REQUIRED
) -> tuple[CoverageTour, float]:
    """Minimum over every cyclic order and direction assignment of the
    required edges, consecutive services joined by shortest deadhead paths.

    The smallest required edge is pinned to the first position; the other
    orders are enumerated in full, each against all ``2**m`` direction
    choices at once.
    """
    req = list(inst.required_edge_ids)
    m = len(req)
    if m > max_required:
        raise TooLarge(f"{m} required edges exceeds the enumeration cap of {max_required}")
    paths = DeadheadPaths(inst)
    verts = sorted(inst.required_vertices)
    vidx = {v: i for i, v in enumerate(verts)}
    dist = paths.matrix(verts)

    tail = np.empty((m, 2), dtype=np.int64)  # [:, 0] forward, [:, 1] reverse
    head = np.empty((m, 2), dtype=np.int64)
    svc = np.empty((m, 2))
    for k, eid in enumerate(req):
        e = inst.edges[eid]
        for d, fwd in enumerate((True, False)):
            t, h = e.endpoints(fwd)
            tail[k, d], head[k, d] = vidx[t], vidx[h]
            svc[k, d] = e.service_cost(fwd)

    dirs = np.array(list(itertools.product((0, 1), repeat=m)), dtype=np.int64)  # (K, m)
    best_cost, best = math.inf, None
    perms = (p for p in itertools.permutations(range(1, m)))
    chunk = max(1, 400_000 // (len(dirs) * m))
    while True:
        block = list(itertools.islice(perms, chunk))
        if not block:
            break
        order = np.array([(0,) + p for p in block], dtype=np.int64).reshape(len(block), m)
        E = order[:, None, :]  # (P, 1, m)
        D = dirs[None, :, :]  # (1, K, m)
        total = svc[E, D].sum(axis=-1)
        h = head[E, D]
        t_next = np.roll(tail[E, D], -1, axis=-1)
        total = total + dist[h, t_next].sum(axis=-1)
        flat = int(np.argmin(total))
        if total.flat[flat] < best_cost:
            best_cost = float(total.flat[flat])
            pi, di = divmod(flat, len(dirs))
            best = (order[pi].tolist(), dirs[di].tolist())

    order, choice = best
    # direction choices are per sequence position, not per edge
    services = [Arc(req[k], choice[pos] == 0, Mode.SERVICE) for pos, k in enumerate(order)]
    steps: list[Arc] = []
    for i, s in enumerate(services):
        steps.append(s)
        nxt = services[(i + 1) % m]
        steps.extend(paths.path(inst.arc_head(s), inst.arc_tail(nxt)).arcs)
    tour = CoverageTour.from_steps(inst, steps)
    if not math.isclose(tour.total_cost, best_cost, rel_tol=1e-9, abs_tol=1e-9):
        raise AssertionError(f"witness cost {tour.total_cost!r} != enumerated {best_cost!r}")
    return tour, tour.total_cost


Profile = Literal["general", "connected", "eulerian"]


def _connected_edges(rng, pool: list[int], n_edges: int) -> list[tuple[int, int]]:
    """Random connected multigraph with ``n_edges`` edges on a prefix of ``pool``."""
    if n_edges < 1 or len(pool) < 2:
        raise UnsatisfiableProfile("a component needs two vertices and one edge")
    n_new = min(len(pool) - 1, n_edges)
    used = [pool[0]]
    edges = []
    for k in range(n_new):
        a = used[int(rng.integers(len(used)))]
        b = pool[k + 1]
        used.append(b)
        edges.append((a, b))
    while len(edges) < n_edges:
        a, b = rng.choice(len(used), size=2, replace=False)
        edges.append((used[int(a)], used[int(b)]))
    rng.shuffle(edges)
    return [(int(a), int(b)) if rng.random() < 0.5 else (int(b), int(a)) for a, b in edges]


def _cycle_lengths(rng, total: int, cap: int) -> list[int]:
    lengths = []
    left = total
    while left:
        hi = min(left, cap)
        options = [L for L in range(2, hi + 1) if left - L != 1]
        if not options:
            raise UnsatisfiableProfile(f"cannot split {total} edges into cycles of length 2..{cap}")
        L = int(rng.choice(options))
        lengths.append(L)
        left -= L
    return lengths


def _eulerian_edges(rng, n_vertices: int, n_edges: int) -> list[tuple[int, int]]:
    if n_vertices < 2 or n_edges < 2:
        raise UnsatisfiableProfile("an Eulerian required graph needs at least 2 edges and 2 vertices")
    edges = []
    on_graph: list[int] = []
    for L in _cycle_lengths(rng, n_edges, n_vertices):
        if on_graph:
            anchor = on_graph[int(rng.integers(len(on_graph)))]
            others = [v for v in rng.permutation(n_vertices).tolist() if v != anchor][: L - 1]
            cyc = [anchor] + others
        else:
            cyc = rng.permutation(n_vertices)[:L].tolist()
        for i in range(L):
            edges.append((int(cyc[i]), int(cyc[(i + 1) % L])))
        on_graph = sorted(set(on_graph) | set(cyc))
    return edges


def random_instance(
    seed: int,
    n_vertices: int,
    n_required: int,
    n_extra_edges: int = 0,
    cost_spec: CostSpec | None = None,
    profile: Profile = "general",
    components: int = 2,
    complete_nonrequired: bool = False,
    extent: float = 1000.0,
) -> LineCoverageInstance:
    """Seeded random instance with points in an ``extent`` x ``extent`` square.

    ``profile`` fixes the required-graph structure: ``eulerian`` (connected,
    all degrees even; a union of cycles), ``connected``, or ``general`` with
    exactly ``components`` connected components.  Non-required edges are the
    ``n_extra_edges`` random ones plus whatever is needed to connect the
    graph, or every missing vertex pair when ``complete_nonrequired``.
    """
    rng = np.random.default_rng(seed)
    if n_required < 1:
        raise UnsatisfiableProfile("need at least one required edge")
    coords = rng.uniform(0.0, extent, size=(n_vertices, 2))

    if profile == "eulerian":
        req = _eulerian_edges(rng, n_vertices, n_required)
    elif profile == "connected":
        pool = rng.permutation(n_vertices).tolist()
        req = _connected_edges(rng, pool[: n_required + 1], n_required)
    elif profile == "general":
        if components < 1 or components > n_required or 2 * components > n_vertices:
            raise UnsatisfiableProfile(
                f"cannot place {components} components with {n_required} edges on {n_vertices} vertices"
            )
        cuts = sorted(rng.choice(np.arange(1, n_required), size=components - 1, replace=False).tolist())
        sizes = np.diff([0] + cuts + [n_required]).tolist()
        room = [2] * components
        spare = n_vertices - 2 * components
        for i in rng.permutation(components).tolist():
            extra = min(spare, sizes[i] - 1)
            room[i] += extra
            spare -= extra
        pool = rng.permutation(n_vertices).tolist()
        req, start = [], 0
        for size, r in zip(sizes, room):
            req += _connected_edges(rng, pool[start : start + r], size)
            start += r
    else:
        raise ValueError(f"unknown profile {profile!r}")

    extra: list[tuple[int, int]] = []
    for _ in range(n_extra_edges):
        a, b = rng.choice(n_vertices, size=2, replace=False)
        extra.append((int(a), int(b)))

    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in req + extra:
        parent[find(a)] = find(b)
    roots = sorted({find(v) for v in range(n_vertices)})
    if len(roots) > 1:
        reps = [int(x) for x in rng.permutation(roots)]
        for a, b in zip(reps, reps[1:]):
            extra.append((a, b))

    if complete_nonrequired:
        have = {frozenset(p) for p in req + extra}
        for a in range(n_vertices):
            for b in range(a + 1, n_vertices):
                if frozenset((a, b)) not in have:
                    extra.append((a, b))

    edges = [Edge(i, a, b, True) for i, (a, b) in enumerate(req)]
    edges += [Edge(len(req) + i, a, b, False) for i, (a, b) in enumerate(extra)]
    raw = LineCoverageInstance(n_vertices, tuple(edges), tuple(map(tuple, coords.tolist())))
    inst = build_costs(raw, cost_spec if cost_spec is not None else MISSION_WIND)

    comps = required_components(inst)
    if profile in ("eulerian", "connected") and len(comps) != 1:
        raise UnsatisfiableProfile("required graph came out disconnected")
    if profile == "general" and len(comps) != components:
        raise UnsatisfiableProfile(f"required graph has {len(comps)} components, wanted {components}")
    if profile == "eulerian":
        deg = np.zeros(n_vertices, dtype=np.int64)
        for a, b in req:
            deg[a] += 1
            deg[b] += 1
        if (deg % 2).any():
            raise UnsatisfiableProfile("required graph has an odd-degree vertex")
    return inst
