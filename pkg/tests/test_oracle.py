import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linecover import Edge, LineCoverageInstance, Mode, required_components, validate_tour
from linecover.errors import TooLarge, UnsatisfiableProfile
from linecover.oracle import brute_force_optimal, random_instance

from conftest import floyd_warshall, make_instance, sym


def _slow_optimum(inst):
    """Plain enumeration over orders and directions with Floyd-Warshall."""
    d = floyd_warshall(inst)
    req = inst.required_edge_ids
    best = math.inf
    for order in itertools.permutations(req):
        for dirs in itertools.product((True, False), repeat=len(req)):
            ends = [inst.edges[e].endpoints(f) for e, f in zip(order, dirs)]
            cost = sum(inst.edges[e].service_cost(f) for e, f in zip(order, dirs))
            cost += sum(d[ends[i][1], ends[(i + 1) % len(ends)][0]] for i in range(len(ends)))
            best = min(best, cost)
    return best


def test_single_edge_with_return():
    inst = make_instance(2, [(0, 1, True, (3, 5, 2, 4)), (0, 1, False, (None, None, 9, 1))])
    _, cost = brute_force_optimal(inst)
    # forward service 3 back for 1, or reverse service 5 then 2 forward
    assert cost == min(3 + 1, 5 + 2)


def test_parallel_edges_opposite_directions():
    inst = make_instance(2, [(0, 1, True, sym(4, 1)), (0, 1, True, sym(4, 1))])
    tour, cost = brute_force_optimal(inst)
    assert cost == 8
    assert all(a.mode is Mode.SERVICE for a in tour.steps)
    assert {a.forward for a in tour.steps} == {True, False}


def test_cap():
    inst = random_instance(0, 12, 9, 3, profile="connected")
    with pytest.raises(TooLarge):
        brute_force_optimal(inst)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_matches_plain_enumeration(seed, m):
    inst = random_instance(seed, 6, m, 3, profile="connected")
    tour, cost = brute_force_optimal(inst)
    assert math.isclose(cost, _slow_optimum(inst), rel_tol=1e-12)
    assert validate_tour(inst, tour).ok


@given(st.integers(0, 10_000))
def test_relabelling_invariance(seed):
    inst = random_instance(seed, 7, 5, 3, profile="general", components=2)
    perm = np.random.default_rng(seed).permutation(inst.vertex_count)
    edges = tuple(
        Edge(e.id, int(perm[e.u]), int(perm[e.v]), e.required, e.cost_service_fwd, e.cost_service_rev,
             e.cost_deadhead_fwd, e.cost_deadhead_rev)
        for e in inst.edges
    )
    moved = LineCoverageInstance(inst.vertex_count, edges)
    assert math.isclose(brute_force_optimal(inst)[1], brute_force_optimal(moved)[1], rel_tol=1e-9)


def _required_degrees(inst):
    deg = Counter()
    for i in inst.required_edge_ids:
        deg[inst.edges[i].u] += 1
        deg[inst.edges[i].v] += 1
    return deg


@given(st.integers(0, 10_000), st.integers(2, 12))
def test_eulerian_profile(seed, m):
    inst = random_instance(seed, 8, m, 2, profile="eulerian")
    assert len(required_components(inst)) == 1
    assert all(d % 2 == 0 for d in _required_degrees(inst).values())
    assert len(inst.required_edge_ids) == m


@given(st.integers(0, 10_000), st.integers(1, 12))
def test_connected_profile(seed, m):
    inst = random_instance(seed, 15, m, 2, profile="connected")
    assert len(required_components(inst)) == 1


def test_general_three_way_split():
    for seed in range(20):
        inst = random_instance(seed, 10, 6, 2, profile="general", components=3)
        assert len(required_components(inst)) == 3


def test_same_seed_same_instance():
    a = random_instance(42, 20, 12, 8)
    b = random_instance(42, 20, 12, 8)
    assert a == b
    assert a != random_instance(43, 20, 12, 8)


def test_complete_nonrequired():
    inst = random_instance(1, 9, 5, 0, complete_nonrequired=True)
    pairs = {frozenset((e.u, e.v)) for e in inst.edges}
    assert len(pairs) == 9 * 8 // 2


def test_unsatisfiable():
    with pytest.raises(UnsatisfiableProfile):
        random_instance(0, 5, 0, 0)
    with pytest.raises(UnsatisfiableProfile):
        random_instance(0, 5, 3, 0, profile="general", components=3)
    with pytest.raises(UnsatisfiableProfile):
        random_instance(0, 5, 1, 0, profile="eulerian")
