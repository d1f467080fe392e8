"""Tour improvement: short-circuiting deadhead runs and service-order 2-opt."""

from __future__ import annotations

import math

import numpy as np

from .graph_core import (
    INFEASIBLE_THRESHOLD,
    Arc,
    CoverageTour,
    LineCoverageInstance,
    Mode,
)
from .paths import DeadheadPaths


def short_circuit(
    inst: LineCoverageInstance, tour: CoverageTour, paths: DeadheadPaths | None = None
) -> CoverageTour:
    """Replace each maximal run of deadhead steps by a shortest deadhead path
    when that is strictly cheaper."""
    steps = tour.steps
    first = next((i for i, a in enumerate(steps) if a.mode is Mode.SERVICE), None)
    if first is None:
        return tour
    steps = steps[first:] + steps[:first]
    paths = paths or DeadheadPaths(inst)
    out: list[Arc] = []
    changed = False
    i, n = 0, len(steps)
    while i < n:
        if steps[i].mode is Mode.SERVICE:
            out.append(steps[i])
            i += 1
            continue
        j = i
        while j < n and steps[j].mode is Mode.DEADHEAD:
            j += 1
        run = steps[i:j]
        u, v = inst.arc_tail(run[0]), inst.arc_head(run[-1])
        run_cost = math.fsum(inst.arc_cost(a) for a in run)
        sp = paths.path(u, v)
        if sp.cost < run_cost:
            out.extend(sp.arcs)
            changed = True
        else:
            out.extend(run)
        i = j
    if not changed:
        return tour
    new = CoverageTour.from_steps(inst, out, tour.lower_bound)
    return new if new.total_cost <= tour.total_cost else tour


class _ServiceSequence:
    """Service order plus directions, with prefix sums for O(1) move costs."""

    def __init__(self, inst, services, dist, index):
        self.inst = inst
        self.dist = dist
        self.index = index
        self.edge = np.array([a.edge_id for a in services], dtype=np.int64)
        self.fwd = np.array([a.forward for a in services], dtype=bool)
        self.refresh()

    def refresh(self):
        inst, idx = self.inst, self.index
        m = len(self.edge)
        tail = np.empty(m, dtype=np.int64)
        head = np.empty(m, dtype=np.int64)
        svc = np.empty(m)
        flip = np.empty(m)
        for k in range(m):
            e = inst.edges[int(self.edge[k])]
            f = bool(self.fwd[k])
            t, h = e.endpoints(f)
            tail[k], head[k] = idx[t], idx[h]
            svc[k] = e.service_cost(f)
            flip[k] = e.service_cost(not f)
        bad = flip >= INFEASIBLE_THRESHOLD
        flip[bad] = 0.0
        d = self.dist
        T2, H2 = np.concatenate([tail, tail]), np.concatenate([head, head])
        self.tail, self.head = tail, head
        self.link = d[H2[:-1], T2[1:]]  # link after position k
        self.rlink = d[T2[1:], H2[:-1]]  # same link once the pair is reversed
        zero = np.zeros(1)
        self.PL = np.concatenate([zero, np.cumsum(self.link)])
        self.PR = np.concatenate([zero, np.cumsum(self.rlink)])
        self.PS = np.concatenate([zero, np.cumsum(np.concatenate([svc, svc]))])
        self.PF = np.concatenate([zero, np.cumsum(np.concatenate([flip, flip]))])
        self.PB = np.concatenate([[0], np.cumsum(np.concatenate([bad, bad]))])

    def deltas(self, a: int) -> np.ndarray:
        """Cost change of reversing the cyclic segment starting at ``a`` for
        every length ``1..m-1`` (``inf`` where a flipped edge is forbidden)."""
        m = len(self.edge)
        d = self.dist
        b = a + np.arange(m - 1)
        pred = (a - 1) % m
        succ = (b + 1) % m
        old = self.link[pred] + (self.PL[b] - self.PL[a]) + self.link[b] + (self.PS[b + 1] - self.PS[a])
        new = (
            d[self.head[pred], self.head[b % m]]
            + (self.PR[b] - self.PR[a])
            + d[self.tail[a], self.tail[succ]]
            + (self.PF[b + 1] - self.PF[a])
        )
        delta = new - old
        delta[(self.PB[b + 1] - self.PB[a]) > 0] = np.inf
        return delta

    def apply(self, a: int, length: int):
        m = len(self.edge)
        pos = (a + np.arange(length)) % m
        self.edge[pos] = self.edge[pos[::-1]]
        self.fwd[pos] = ~self.fwd[pos[::-1]]
        self.refresh()

    def services(self) -> list[Arc]:
        return [Arc(int(e), bool(f), Mode.SERVICE) for e, f in zip(self.edge, self.fwd)]

    def cost(self) -> float:
        m = len(self.edge)
        return float(self.PS[m] + self.PL[m])


def two_opt(
    inst: LineCoverageInstance,
    tour: CoverageTour,
    move_cap: int | None = None,
    paths: DeadheadPaths | None = None,
) -> CoverageTour:
    """First-improvement 2-opt on the sequence of serviced edges.

    A move reverses a cyclic block of the service sequence, flipping the
    direction of every edge in it; services are joined by shortest deadhead
    paths.  At most ``move_cap`` moves are accepted.
    """
    if move_cap is not None and move_cap <= 0:
        return tour
    services = [a for a in tour.steps if a.mode is Mode.SERVICE]
    m = len(services)
    if m < 2:
        return tour
    paths = paths or DeadheadPaths(inst)
    verts = sorted(inst.required_vertices)
    index = {v: i for i, v in enumerate(verts)}
    dist = paths.matrix(verts)
    seq = _ServiceSequence(inst, services, dist, index)

    moves = 0
    cap = math.inf if move_cap is None else move_cap
    clean = 0  # consecutive start positions without an improving move
    a = 0
    while clean < m and moves < cap:
        tol = 1e-10 * max(1.0, seq.cost())
        delta = seq.deltas(a)
        hits = np.flatnonzero(delta < -tol)
        if len(hits):
            seq.apply(a, int(hits[0]) + 1)
            moves += 1
            clean = 0
        else:
            clean += 1
            a = (a + 1) % m
    if moves == 0:
        return tour

    order = seq.services()
    steps: list[Arc] = []
    for k, s in enumerate(order):
        steps.append(s)
        nxt = order[(k + 1) % m]
        steps.extend(paths.path(inst.arc_head(s), inst.arc_tail(nxt)).arcs)
    new = CoverageTour.from_steps(inst, steps, tour.lower_bound)
    return new if new.total_cost <= tour.total_cost else tour
