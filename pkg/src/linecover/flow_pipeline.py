"""From an instance to a balanced arc multiset and a lower bound.

The cheaper service direction of every required edge is chosen first; a
min-cost flow then decides which services to reverse (reversal arcs of
capacity 2) and which deadheads to add so that every vertex balances.
A reversal flow of exactly 1 leaves that edge's direction undecided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Infeasible
from .graph_core import (
    INFEASIBLE_THRESHOLD,
    Arc,
    ArcMultiset,
    LineCoverageInstance,
    Mode,
)
from .mcf import UNBOUNDED, FlowArc, FlowNetwork, FlowSolution, solve_min_cost_flow


@dataclass(frozen=True)
class MinCostDigraph:
    instance: LineCoverageInstance
    chosen: tuple[Arc, ...]  # one service arc per required edge, edge id order

    def service_cost(self) -> float:
        return math.fsum(self.instance.arc_cost(a) for a in self.chosen)

    def as_multiset(self) -> ArcMultiset:
        return ArcMultiset(self.instance, self.chosen)


@dataclass(frozen=True)
class LpSolveResult:
    balanced: ArcMultiset
    ambiguous: tuple[Arc, ...]  # arcs of the min-cost digraph with reversal flow 1
    lower_bound: float
    network: FlowNetwork
    flow: FlowSolution


def min_cost_digraph(inst: LineCoverageInstance) -> MinCostDigraph:
    chosen = []
    for i in inst.required_edge_ids:
        e = inst.edges[i]
        fwd = e.cost_service_fwd <= e.cost_service_rev
        chosen.append(Arc(i, fwd, Mode.SERVICE))
    return MinCostDigraph(inst, tuple(chosen))


def _capacity(cost: float, cap):
    # forbidden directions get no capacity so the flow never uses them
    return 0 if cost >= INFEASIBLE_THRESHOLD else cap


def construct_flow_digraph(inst: LineCoverageInstance, mcd: MinCostDigraph) -> FlowNetwork:
    """Flow network whose arc tags are ``(kind, Arc)`` with kind in
    ``{"deadhead", "reversal"}``.

    Per required edge (chosen arc ``a``): deadhead ``a``, deadhead reverse of
    ``a``, then the reversal arc; per non-required edge the two deadheads.
    Node demands equal the imbalance of the chosen arcs.
    """
    arcs: list[FlowArc] = []
    demands = [0] * inst.vertex_count
    chosen = {a.edge_id: a for a in mcd.chosen}
    for e in inst.edges:
        if e.id in chosen:
            a = chosen[e.id]
            t, h = e.endpoints(a.forward)
            demands[t] += 1
            demands[h] -= 1
            d_fwd, d_rev = e.deadhead_cost(a.forward), e.deadhead_cost(not a.forward)
            s_fwd, s_rev = e.service_cost(a.forward), e.service_cost(not a.forward)
            reversal = (s_rev - s_fwd) / 2.0
            if reversal < 0:
                raise AssertionError(f"negative reversal cost on edge {e.id}")
            arcs.append(FlowArc(t, h, _capacity(d_fwd, UNBOUNDED), d_fwd, ("deadhead", Arc(e.id, a.forward))))
            arcs.append(FlowArc(h, t, _capacity(d_rev, UNBOUNDED), d_rev, ("deadhead", Arc(e.id, not a.forward))))
            arcs.append(FlowArc(h, t, _capacity(s_rev, 2), reversal, ("reversal", a)))
        else:
            for fwd in (True, False):
                t, h = e.endpoints(fwd)
                c = e.deadhead_cost(fwd)
                arcs.append(FlowArc(t, h, _capacity(c, UNBOUNDED), c, ("deadhead", Arc(e.id, fwd))))
    return FlowNetwork(inst.vertex_count, tuple(demands), tuple(arcs))


def lp_solve(inst: LineCoverageInstance) -> LpSolveResult:
    mcd = min_cost_digraph(inst)
    net = construct_flow_digraph(inst, mcd)
    sol = solve_min_cost_flow(net)

    reversal_flow: dict[int, int] = {}
    deadheads: dict[int, list[tuple[Arc, int]]] = {}
    for fa, f in zip(net.arcs, sol.flow):
        kind, arc = fa.tag
        if kind == "reversal":
            reversal_flow[arc.edge_id] = f
        elif f:
            deadheads.setdefault(arc.edge_id, []).append((arc, f))

    arcs: list[Arc] = []
    ambiguous: list[Arc] = []
    chosen = {a.edge_id: a for a in mcd.chosen}
    for e in inst.edges:
        a = chosen.get(e.id)
        if a is not None:
            r = reversal_flow[e.id]
            if r == 0:
                arcs.append(a)
            elif r == 2:
                arcs.append(a.reversed())
            elif r == 1:
                ambiguous.append(a)
            else:
                raise AssertionError(f"reversal flow {r} exceeds capacity")
        for arc, f in deadheads.get(e.id, ()):
            arcs.extend([arc] * f)

    lower_bound = mcd.service_cost() + sol.total_cost
    if lower_bound >= INFEASIBLE_THRESHOLD:
        raise Infeasible("every coverage tour uses a forbidden direction")
    return LpSolveResult(ArcMultiset(inst, arcs), tuple(ambiguous), lower_bound, net, sol)
