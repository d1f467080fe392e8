"""Ambiguity resolution, component stitching and the top-level solver."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .atsp import DP_THRESHOLD, AtspInstance, held_karp_atsp, heuristic_atsp, solve_atsp
from .errors import Infeasible, TooLarge
from .flow_pipeline import LpSolveResult, lp_solve
from .graph_core import (
    INFEASIBLE_THRESHOLD,
    Arc,
    ArcMultiset,
    CoverageTour,
    LineCoverageInstance,
    Mode,
    arc_components,
    euler_tour,
    required_components,
)
from .improve import short_circuit, two_opt
from .paths import DeadheadPaths

log = logging.getLogger(__name__)

__all__ = [
    "AtspInstance",
    "SolveReport",
    "SolverConfig",
    "connect_components",
    "gtsp_connect",
    "held_karp_atsp",
    "heuristic_atsp",
    "resolve_ambiguous",
    "solve",
]


@dataclass(frozen=True)
class SolverConfig:
    atsp_mode: Literal["exact", "heuristic", "auto"] = "auto"
    stitch_mode: Literal["atsp", "gtsp"] = "atsp"
    short_circuit: bool = True
    two_opt: bool = True
    two_opt_move_cap: int | None = None  # None: |V|^3
    seed: int = 0
    dp_threshold: int = DP_THRESHOLD
    gtsp_max_nodes: int = 200

    def __post_init__(self):
        if self.atsp_mode not in ("exact", "heuristic", "auto"):
            raise ValueError(f"unknown atsp_mode {self.atsp_mode!r}")
        if self.stitch_mode not in ("atsp", "gtsp"):
            raise ValueError(f"unknown stitch_mode {self.stitch_mode!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SolveReport:
    cost: float
    lower_bound: float
    ratio: float
    case: str
    components: int
    body_components: int
    ambiguous: int
    cost_lp: float
    cost_resolved: float
    stitch_cost: float
    cost_before_improve: float
    cost_short_circuit: float
    atsp_method: str | None
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _ambiguous_cycle(inst: LineCoverageInstance, edges: dict[int, Arc]):
    """One cycle of the undirected multigraph over ``edges`` as oriented arcs,
    or ``None`` if the graph is a forest.  DFS from the lowest vertex."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for eid in sorted(edges):
        e = inst.edges[eid]
        adj.setdefault(e.u, []).append((eid, e.v))
        if e.u != e.v:
            adj.setdefault(e.v, []).append((eid, e.u))
    visited: set[int] = set()
    for root in sorted(adj):
        if root in visited:
            continue
        visited.add(root)
        path_v, path_e = [root], []
        pos = {root: 0}
        iters = [iter(adj[root])]
        while iters:
            advanced = False
            for eid, w in iters[-1]:
                if path_e and eid == path_e[-1]:
                    continue
                if w in pos:
                    i = pos[w]
                    cyc_v = path_v[i:] + [w]
                    cyc_e = path_e[i:] + [eid]
                    arcs = []
                    for k, ce in enumerate(cyc_e):
                        x, y = cyc_v[k], cyc_v[k + 1]
                        e = inst.edges[ce]
                        arcs.append(Arc(ce, (e.u, e.v) == (x, y), Mode.SERVICE))
                    return arcs
                if w in visited:
                    continue
                visited.add(w)
                pos[w] = len(path_v)
                path_v.append(w)
                path_e.append(eid)
                iters.append(iter(adj[w]))
                advanced = True
                break
            if not advanced:
                iters.pop()
                del pos[path_v.pop()]
                if path_e:
                    path_e.pop()
    return None


def resolve_ambiguous(
    inst: LineCoverageInstance, lp: LpSolveResult, paths: DeadheadPaths | None = None
) -> ArcMultiset:
    """Give every ambiguous edge a service direction, keeping balance.

    Cycles among the ambiguous edges are oriented along their DFS traversal.
    Each remaining edge takes the cheaper of servicing it one way plus the
    shortest deadhead path back, or the other way plus its return path.
    """
    if not lp.ambiguous:
        return lp.balanced
    remaining = {a.edge_id: a for a in lp.ambiguous}
    added: list[Arc] = []
    while True:
        cycle = _ambiguous_cycle(inst, remaining)
        if cycle is None:
            break
        there = math.fsum(inst.arc_cost(a) for a in cycle)
        back = math.fsum(inst.arc_cost(a.reversed()) for a in cycle)
        if abs(there - back) > 1e-6:
            log.warning(
                "ambiguous cycle on edges %s: orientation costs differ (%r vs %r)",
                [a.edge_id for a in cycle], there, back,
            )
        added.extend(cycle)
        for a in cycle:
            del remaining[a.edge_id]

    if remaining:
        paths = paths or DeadheadPaths(inst)
        paths.prepare({inst.arc_tail(a) for a in remaining.values()} | {inst.arc_head(a) for a in remaining.values()})
    for eid in sorted(remaining):
        a = remaining[eid]
        t, h = inst.arc_tail(a), inst.arc_head(a)
        keep = inst.arc_cost(a) + paths.cost(h, t)
        flip = inst.arc_cost(a.reversed()) + paths.cost(t, h)
        if keep <= flip:
            added.append(a)
            added.extend(paths.path(h, t).arcs)
        else:
            added.append(a.reversed())
            added.extend(paths.path(t, h).arcs)
    return lp.balanced.union(added)


def _serviced_components(body: ArcMultiset):
    """Components holding at least one service arc; deadhead-only loops are
    dropped (removing a closed deadhead walk keeps balance and lowers cost)."""
    comps = arc_components(body)
    return [(v, a) for v, a in comps if any(x.mode is Mode.SERVICE for x in a)]


def _representative(inst: LineCoverageInstance, arcs) -> int:
    req = {x for a in arcs if a.mode is Mode.SERVICE for x in (inst.arc_tail(a), inst.arc_head(a))}
    return min(req)


def _expand(paths: DeadheadPaths, vertices) -> list[Arc]:
    out: list[Arc] = []
    n = len(vertices)
    for i in range(n):
        out.extend(paths.path(vertices[i], vertices[(i + 1) % n]).arcs)
    return out


def connect_components(
    inst: LineCoverageInstance,
    body: ArcMultiset,
    cfg: SolverConfig | None = None,
    paths: DeadheadPaths | None = None,
    info: dict | None = None,
) -> ArcMultiset:
    """Join the components of a balanced multiset with an ATSP tour over one
    representative vertex per component (the smallest required vertex)."""
    cfg = cfg or SolverConfig()
    comps = _serviced_components(body)
    kept = [a for _, arcs in comps for a in arcs]
    if len(kept) != len(body.arcs):
        body = ArcMultiset(inst, kept)
    if info is not None:
        info["body_components"] = len(comps)
    if len(comps) <= 1:
        return body
    paths = paths or DeadheadPaths(inst)
    reps = [_representative(inst, arcs) for _, arcs in comps]
    vmap = reps + [reps[0]] if len(reps) == 2 else reps
    atsp = AtspInstance(paths.matrix(vmap), tuple(vmap))
    order, _, method = solve_atsp(atsp, cfg.atsp_mode, cfg.dp_threshold, cfg.seed)
    if info is not None:
        info["atsp_method"] = method
    return body.union(_expand(paths, [vmap[i] for i in order]))


def _noon_bean(dist: np.ndarray, clusters: list[list[int]]) -> np.ndarray:
    """ATSP matrix for a clustered problem; ``dist`` is indexed by the flat
    node order of ``clusters``."""
    n = dist.shape[0]
    cluster_of = np.empty(n, dtype=np.int64)
    succ = np.empty(n, dtype=np.int64)
    start = 0
    for ci, members in enumerate(clusters):
        k = len(members)
        for t in range(k):
            cluster_of[start + t] = ci
            succ[start + t] = start + (t + 1) % k
        start += k
    big_m = float(dist.max()) * (n + 1) + 1.0
    forbid = big_m * (n + 1)
    out = dist[succ, :] + big_m
    same = cluster_of[:, None] == cluster_of[None, :]
    out[same] = forbid
    out[np.arange(n), succ] = 0.0
    np.fill_diagonal(out, 0.0)
    return out


def gtsp_connect(
    inst: LineCoverageInstance,
    body: ArcMultiset,
    cfg: SolverConfig | None = None,
    paths: DeadheadPaths | None = None,
    info: dict | None = None,
) -> ArcMultiset:
    """Like :func:`connect_components`, but any vertex of a component may be
    the one the connecting tour passes through (clustered TSP, solved as an
    ATSP after a Noon-Bean transformation)."""
    cfg = cfg or SolverConfig()
    comps = _serviced_components(body)
    kept = [a for _, arcs in comps for a in arcs]
    if len(kept) != len(body.arcs):
        body = ArcMultiset(inst, kept)
    if info is not None:
        info["body_components"] = len(comps)
    if len(comps) <= 1:
        return body
    clusters = [sorted(v) for v, _ in comps]
    if all(len(c) == 1 for c in clusters):
        return connect_components(inst, body, cfg, paths, info)
    flat = [x for c in clusters for x in c]
    n = len(flat)
    if n > cfg.gtsp_max_nodes or (cfg.atsp_mode == "exact" and n > cfg.dp_threshold):
        raise TooLarge(f"clustered tour problem has {n} nodes")
    paths = paths or DeadheadPaths(inst)
    dist = paths.matrix(flat)
    atsp = AtspInstance(_noon_bean(dist, clusters), tuple(flat))
    order, _, method = solve_atsp(atsp, cfg.atsp_mode, cfg.dp_threshold, cfg.seed)
    if info is not None:
        info["atsp_method"] = method

    cluster_of = {}
    for ci, members in enumerate(clusters):
        for x in members:
            cluster_of[x] = ci
    # rotate so the tour starts where it enters a cluster; the entry node of
    # each cluster is the one whose outgoing cost the transformation charges
    k = next(k for k in range(len(order)) if cluster_of[flat[order[k - 1]]] != cluster_of[flat[order[k]]])
    order = order[k:] + order[:k]
    entries: list[int] = []
    seen: set[int] = set()
    prev = None
    for i in order:
        ci = cluster_of[flat[i]]
        if ci != prev and ci not in seen:
            entries.append(flat[i])
            seen.add(ci)
        elif ci != prev:
            # only a heuristic tour can split a cluster; any one vertex per cluster still works
            log.warning("clustered tour re-enters component %d; keeping its first entry", ci)
        prev = ci
    return body.union(_expand(paths, entries))


def classify(inst: LineCoverageInstance) -> tuple[str, int]:
    comps = required_components(inst)
    if len(comps) > 1:
        return "general", len(comps)
    degree: dict[int, int] = {}
    for i in inst.required_edge_ids:
        e = inst.edges[i]
        degree[e.u] = degree.get(e.u, 0) + 1
        degree[e.v] = degree.get(e.v, 0) + 1
    if all(d % 2 == 0 for d in degree.values()):
        return "eulerian", 1
    return "connected", 1


def solve(
    inst: LineCoverageInstance, cfg: SolverConfig | None = None
) -> tuple[CoverageTour, SolveReport]:
    """Compute a coverage tour.

    Eulerian required graphs are solved optimally, connected ones within a
    factor 2 of the lower bound, and general ones within the ATSP factor
    plus 2.  Short-circuiting and 2-opt only ever lower the cost.
    """
    cfg = cfg or SolverConfig()
    timings: dict[str, float] = {}
    clock = time.perf_counter
    t0 = clock()
    case, n_comp = classify(inst)
    paths = DeadheadPaths(inst)

    t = clock()
    lp = lp_solve(inst)
    timings["lp"] = clock() - t
    cost_lp = lp.balanced.cost()

    t = clock()
    body = resolve_ambiguous(inst, lp, paths)
    timings["resolve"] = clock() - t
    cost_resolved = body.cost()

    t = clock()
    info: dict = {"atsp_method": None}
    stitch = gtsp_connect if cfg.stitch_mode == "gtsp" else connect_components
    full = stitch(inst, body, cfg, paths, info)
    timings["stitch"] = clock() - t
    stitch_cost = full.cost() - math.fsum(
        inst.arc_cost(a) for _, arcs in _serviced_components(body) for a in arcs
    )

    t = clock()
    first = min(inst.required_edge_ids)
    start = next(inst.arc_tail(a) for a in full.arcs if a.edge_id == first and a.mode is Mode.SERVICE)
    tour = euler_tour(full, start)
    timings["euler"] = clock() - t
    cost_before = tour.total_cost

    t = clock()
    if cfg.short_circuit:
        tour = short_circuit(inst, tour, paths)
    cost_sc = tour.total_cost
    if cfg.two_opt:
        cap = cfg.two_opt_move_cap if cfg.two_opt_move_cap is not None else inst.vertex_count**3
        tour = two_opt(inst, tour, cap, paths)
    timings["improve"] = clock() - t
    timings["total"] = clock() - t0

    if tour.total_cost >= INFEASIBLE_THRESHOLD:
        raise Infeasible("the tour found uses a forbidden direction")
    tour = tour.with_lower_bound(lp.lower_bound)
    ratio = tour.total_cost / lp.lower_bound if lp.lower_bound > 0 else (1.0 if tour.total_cost == 0 else math.inf)
    report = SolveReport(
        cost=tour.total_cost,
        lower_bound=lp.lower_bound,
        ratio=ratio,
        case=case,
        components=n_comp,
        body_components=info.get("body_components", 1),
        ambiguous=len(lp.ambiguous),
        cost_lp=cost_lp,
        cost_resolved=cost_resolved,
        stitch_cost=stitch_cost,
        cost_before_improve=cost_before,
        cost_short_circuit=cost_sc,
        atsp_method=info.get("atsp_method"),
        timings=timings,
    )
    return tour, report
