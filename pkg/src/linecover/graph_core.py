"""Multigraph and arc-multiset types, Euler tours, and the tour validator.

An instance is an undirected multigraph whose edges carry four directional
costs: service and deadhead, forward (``u -> v``) and reverse (``v -> u``).
Solutions are multisets of directed arcs, each tagged as a service or a
deadhead traversal, and tours are closed walks over such arcs.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    CostInvariantViolated,
    DisconnectedInstance,
    InvalidInstance,
    NotBalanced,
    NotConnected,
)

INFEASIBLE = 1e15
INFEASIBLE_THRESHOLD = 1e14
EPS = 1e-9


def is_infeasible(cost: float) -> bool:
    return cost >= INFEASIBLE_THRESHOLD


def costs_close(a: float, b: float, rel: float = EPS) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=rel)


class Mode(enum.Enum):
    SERVICE = "service"
    DEADHEAD = "deadhead"


@dataclass(frozen=True)
class Arc:
    """One directed traversal of an edge; ``forward`` means ``u -> v``."""

    edge_id: int
    forward: bool
    mode: Mode = Mode.DEADHEAD

    @property
    def key(self) -> tuple[int, bool, str]:
        return (self.edge_id, self.forward, self.mode.value)

    def reversed(self) -> Arc:
        return Arc(self.edge_id, not self.forward, self.mode)

    def as_mode(self, mode: Mode) -> Arc:
        return Arc(self.edge_id, self.forward, mode)


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    required: bool
    cost_service_fwd: float | None = None
    cost_service_rev: float | None = None
    cost_deadhead_fwd: float | None = None
    cost_deadhead_rev: float | None = None

    @property
    def priced(self) -> bool:
        return self.cost_deadhead_fwd is not None and self.cost_deadhead_rev is not None

    def endpoints(self, forward: bool) -> tuple[int, int]:
        return (self.u, self.v) if forward else (self.v, self.u)

    def service_cost(self, forward: bool) -> float:
        c = self.cost_service_fwd if forward else self.cost_service_rev
        if c is None:
            raise ValueError(f"edge {self.id} has no service cost")
        return c

    def deadhead_cost(self, forward: bool) -> float:
        c = self.cost_deadhead_fwd if forward else self.cost_deadhead_rev
        if c is None:
            raise ValueError(f"edge {self.id} has no deadhead cost")
        return c

    def with_costs(self, sf, sr, df, dr) -> Edge:
        return Edge(self.id, self.u, self.v, self.required, sf, sr, df, dr)


def check_edge_costs(edge: Edge) -> None:
    """Raise :class:`CostInvariantViolated` if ``edge`` has inconsistent costs."""
    if not edge.priced:
        raise CostInvariantViolated(f"edge {edge.id}: deadhead costs missing", edge.id)
    costs = [edge.cost_deadhead_fwd, edge.cost_deadhead_rev]
    if edge.required:
        if edge.cost_service_fwd is None or edge.cost_service_rev is None:
            raise CostInvariantViolated(
                f"edge {edge.id}: required edge without service costs", edge.id
            )
        costs += [edge.cost_service_fwd, edge.cost_service_rev]
    for c in costs:
        if not (c >= 0.0) or math.isinf(c):
            raise CostInvariantViolated(f"edge {edge.id}: cost {c!r} is not finite and >= 0", edge.id)
    if edge.required:
        for fwd, name in ((True, "forward"), (False, "reverse")):
            if edge.service_cost(fwd) < edge.deadhead_cost(fwd):
                raise CostInvariantViolated(
                    f"edge {edge.id}: {name} service cost {edge.service_cost(fwd)!r} "
                    f"is below deadhead cost {edge.deadhead_cost(fwd)!r}",
                    edge.id,
                )


@dataclass(frozen=True)
class LineCoverageInstance:
    """Undirected multigraph with required flags and directional costs.

    Edges must be numbered ``0..len(edges)-1`` in order.  An instance whose
    edges lack costs ("unpriced") is accepted so that a cost model can be
    applied afterwards; see :func:`linecover.cost_model.build_costs`.
    """

    vertex_count: int
    edges: tuple[Edge, ...]
    coordinates: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.coordinates is not None:
            coords = tuple((float(x), float(y)) for x, y in self.coordinates)
            if len(coords) != self.vertex_count:
                raise InvalidInstance("coordinate count does not match vertex count")
            object.__setattr__(self, "coordinates", coords)
        if self.vertex_count <= 0:
            raise InvalidInstance("instance needs at least one vertex")
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise InvalidInstance(f"edge at position {i} has id {e.id}")
            if not (0 <= e.u < self.vertex_count and 0 <= e.v < self.vertex_count):
                raise InvalidInstance(f"edge {i} references a vertex out of range")
        if not any(e.required for e in self.edges):
            raise InvalidInstance("instance has no required edge")
        if self.priced:
            for e in self.edges:
                check_edge_costs(e)
            if not self._deadhead_strongly_connected():
                raise DisconnectedInstance("deadhead graph is not strongly connected")

    @cached_property
    def priced(self) -> bool:
        return all(e.priced for e in self.edges)

    @cached_property
    def required_edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges if e.required)

    @cached_property
    def required_vertices(self) -> frozenset[int]:
        return frozenset(x for i in self.required_edge_ids for x in (self.edges[i].u, self.edges[i].v))

    def arc_tail(self, arc: Arc) -> int:
        e = self.edges[arc.edge_id]
        return e.u if arc.forward else e.v

    def arc_head(self, arc: Arc) -> int:
        e = self.edges[arc.edge_id]
        return e.v if arc.forward else e.u

    def arc_cost(self, arc: Arc) -> float:
        e = self.edges[arc.edge_id]
        if arc.mode is Mode.SERVICE:
            return e.service_cost(arc.forward)
        return e.deadhead_cost(arc.forward)

    @cached_property
    def deadhead_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Feasible deadhead arcs as ``(tails, heads, costs, codes)``.

        ``codes`` holds ``2 * edge_id + forward`` so an entry decodes back to
        an :class:`Arc`.  Arcs priced at or above the infeasibility threshold
        are left out.
        """
        n = len(self.edges)
        u = np.fromiter((e.u for e in self.edges), dtype=np.int64, count=n)
        v = np.fromiter((e.v for e in self.edges), dtype=np.int64, count=n)
        df = np.fromiter((e.cost_deadhead_fwd for e in self.edges), dtype=float, count=n)
        dr = np.fromiter((e.cost_deadhead_rev for e in self.edges), dtype=float, count=n)
        ids = np.arange(n, dtype=np.int64)
        tails = np.concatenate([u, v])
        heads = np.concatenate([v, u])
        costs = np.concatenate([df, dr])
        codes = np.concatenate([2 * ids + 1, 2 * ids])
        keep = costs < INFEASIBLE_THRESHOLD
        return tails[keep], heads[keep], costs[keep], codes[keep]

    def _deadhead_strongly_connected(self) -> bool:
        tails, heads, _, _ = self.deadhead_arrays
        n = self.vertex_count
        if n == 1:
            return True
        g = csr_matrix((np.ones(len(tails)), (tails, heads)), shape=(n, n))
        ncomp, _ = connected_components(g, directed=True, connection="strong")
        return ncomp == 1


def decode_arc(code: int, mode: Mode = Mode.DEADHEAD) -> Arc:
    return Arc(int(code) >> 1, bool(code & 1), mode)


@dataclass(frozen=True)
class ArcMultiset:
    """A multiset of arcs over ``instance`` (order carries no meaning)."""

    instance: LineCoverageInstance = field(repr=False)
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))

    def __len__(self):
        return len(self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    def union(self, more: Iterable[Arc]) -> ArcMultiset:
        return ArcMultiset(self.instance, self.arcs + tuple(more))

    def cost(self) -> float:
        return math.fsum(self.instance.arc_cost(a) for a in self.arcs)

    def counts(self) -> Counter:
        return Counter(self.arcs)

    def service_count(self, edge_id: int) -> int:
        return sum(1 for a in self.arcs if a.edge_id == edge_id and a.mode is Mode.SERVICE)

    def imbalances(self) -> np.ndarray:
        out = np.zeros(self.instance.vertex_count, dtype=np.int64)
        for a in self.arcs:
            out[self.instance.arc_tail(a)] += 1
            out[self.instance.arc_head(a)] -= 1
        return out

    def is_balanced(self) -> bool:
        return not self.imbalances().any()


@dataclass(frozen=True)
class CoverageTour:
    steps: tuple[Arc, ...]
    total_cost: float
    lower_bound: float | None = None

    @classmethod
    def from_steps(cls, inst: LineCoverageInstance, steps: Sequence[Arc], lower_bound=None):
        steps = tuple(steps)
        return cls(steps, math.fsum(inst.arc_cost(a) for a in steps), lower_bound)

    def with_lower_bound(self, lower_bound: float | None) -> CoverageTour:
        return CoverageTour(self.steps, self.total_cost, lower_bound)


def imbalance(arcs: ArcMultiset, v: int) -> int:
    """Outdegree minus indegree of ``v`` in ``arcs``."""
    if not 0 <= v < arcs.instance.vertex_count:
        raise ValueError(f"vertex {v} out of range")
    inst = arcs.instance
    return sum((inst.arc_tail(a) == v) - (inst.arc_head(a) == v) for a in arcs.arcs)


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def required_components(inst: LineCoverageInstance) -> list[frozenset[int]]:
    """Connected components of the required graph, ordered by smallest vertex."""
    ds = _DisjointSet(inst.vertex_count)
    for i in inst.required_edge_ids:
        e = inst.edges[i]
        ds.union(e.u, e.v)
    groups: dict[int, set[int]] = {}
    for v in sorted(inst.required_vertices):
        groups.setdefault(ds.find(v), set()).add(v)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def arc_components(arcs: ArcMultiset) -> list[tuple[frozenset[int], tuple[Arc, ...]]]:
    """Weakly connected components of an arc multiset.

    Returns ``(vertices, arcs)`` pairs sorted by smallest vertex; isolated
    vertices are not reported.
    """
    inst = arcs.instance
    ds = _DisjointSet(inst.vertex_count)
    for a in arcs.arcs:
        ds.union(inst.arc_tail(a), inst.arc_head(a))
    verts: dict[int, set[int]] = {}
    members: dict[int, list[Arc]] = {}
    for a in arcs.arcs:
        r = ds.find(inst.arc_tail(a))
        verts.setdefault(r, set()).update((inst.arc_tail(a), inst.arc_head(a)))
        members.setdefault(r, []).append(a)
    out = [(frozenset(verts[r]), tuple(members[r])) for r in verts]
    return sorted(out, key=lambda item: min(item[0]))


def euler_tour(arcs: ArcMultiset, start: int) -> CoverageTour:
    """Hierholzer's algorithm; the next arc out of a vertex is the smallest by
    ``(edge_id, forward, mode)``."""
    inst = arcs.instance
    if arcs.imbalances().any():
        raise NotBalanced("arc multiset is not balanced")
    if not arcs.arcs:
        return CoverageTour((), 0.0)
    out: dict[int, list[Arc]] = {}
    for a in sorted(arcs.arcs, key=lambda a: a.key, reverse=True):
        out.setdefault(inst.arc_tail(a), []).append(a)
    if start not in out:
        raise NotConnected(f"start vertex {start} has no incident arcs")

    stack: list[tuple[int, Arc | None]] = [(start, None)]
    circuit: list[Arc] = []
    while stack:
        v, via = stack[-1]
        pending = out.get(v)
        if pending:
            a = pending.pop()
            stack.append((inst.arc_head(a), a))
        else:
            stack.pop()
            if via is not None:
                circuit.append(via)
    if len(circuit) != len(arcs.arcs):
        raise NotConnected("arcs span more than one weakly connected component")
    circuit.reverse()
    return CoverageTour.from_steps(inst, circuit)


@dataclass(frozen=True)
class Violation:
    check: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed(self, check: str) -> bool:
        return any(v.check == check for v in self.violations)

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(f"[{v.check}] {v.message}" for v in self.violations)


def validate_tour(inst: LineCoverageInstance, tour: CoverageTour) -> ValidationReport:
    """Check a tour against the feasibility conditions of a coverage tour.

    Checks are labelled ``a`` (closed walk over existing edges), ``b``
    (each required edge serviced exactly once, nothing else serviced),
    ``c`` (balance), ``d`` (reported cost) and ``e`` (no forbidden
    direction).
    """
    found: list[Violation] = []
    steps = tour.steps
    n_edges = len(inst.edges)

    bad = [i for i, a in enumerate(steps) if not 0 <= a.edge_id < n_edges]
    if bad:
        found.append(Violation("a", f"steps {bad[:5]} reference unknown edges"))
        return ValidationReport(tuple(found))
    if not steps:
        found.append(Violation("a", "tour is empty"))
    else:
        for i, a in enumerate(steps):
            nxt = steps[(i + 1) % len(steps)]
            if inst.arc_head(a) != inst.arc_tail(nxt):
                found.append(
                    Violation(
                        "a",
                        f"step {i} ends at {inst.arc_head(a)} but step "
                        f"{(i + 1) % len(steps)} starts at {inst.arc_tail(nxt)}",
                    )
                )

    serviced = Counter(a.edge_id for a in steps if a.mode is Mode.SERVICE)
    for eid, k in sorted(serviced.items()):
        if not inst.edges[eid].required:
            found.append(Violation("b", f"non-required edge {eid} is serviced"))
        elif k != 1:
            found.append(Violation("b", f"required edge {eid} serviced {k} times"))
    for eid in inst.required_edge_ids:
        if eid not in serviced:
            found.append(Violation("b", f"required edge {eid} is never serviced"))

    bal = ArcMultiset(inst, steps).imbalances()
    for v in np.flatnonzero(bal):
        found.append(Violation("c", f"vertex {int(v)} has imbalance {int(bal[v])}"))

    # a serviced non-required edge has no price, so the cost checks cannot run
    if all(a.mode is Mode.DEADHEAD or inst.edges[a.edge_id].required for a in steps):
        recomputed = math.fsum(inst.arc_cost(a) for a in steps)
        if not costs_close(recomputed, tour.total_cost):
            found.append(
                Violation("d", f"reported cost {tour.total_cost!r} != recomputed {recomputed!r}")
            )
        for i, a in enumerate(steps):
            if is_infeasible(inst.arc_cost(a)):
                found.append(Violation("e", f"step {i} uses a forbidden direction of edge {a.edge_id}"))
    return ValidationReport(tuple(found))
