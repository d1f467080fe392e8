import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from linecover import INFEASIBLE, DeadheadPaths, all_pairs_deadhead, shortest_deadhead_path
from linecover.errors import Unreachable
from linecover.oracle import random_instance

from conftest import floyd_warshall, make_instance, sym


def test_same_vertex():
    inst = make_instance(2, [(0, 1, True, (3, 5, 3, 5))])
    res = shortest_deadhead_path(inst, 1, 1)
    assert res.cost == 0 and res.arcs == ()
    assert DeadheadPaths(inst).path(0, 0).arcs == ()


def test_two_vertex_asymmetric():
    inst = make_instance(2, [(0, 1, True, (3, 5, 3, 5))])
    assert shortest_deadhead_path(inst, 0, 1).cost == 3
    assert shortest_deadhead_path(inst, 1, 0).cost == 5
    p = DeadheadPaths(inst)
    assert p.cost(0, 1) == 3 and p.cost(1, 0) == 5


def test_triangle_detour():
    inst = make_instance(
        3, [(0, 1, True, sym(10, 10)), (0, 2, False, sym(None, 4)), (2, 1, False, sym(None, 4))]
    )
    # oracle: every simple path from 0 to 1
    simple = {
        (0,): 10,
        (1, 2): 8,
    }
    best = min(simple.values())
    res = shortest_deadhead_path(inst, 0, 1)
    assert res.cost == best == 8
    assert [a.edge_id for a in res.arcs] == [1, 2]
    assert DeadheadPaths(inst).path(0, 1).cost == 8


def test_forbidden_direction_is_avoided():
    inst = make_instance(
        3,
        [
            (0, 1, True, sym(1, 1)),
            (1, 2, False, (None, None, 1, INFEASIBLE)),
            (2, 0, False, (None, None, 1, INFEASIBLE)),
        ],
    )
    # 0 -> 2 directly would use edge 2 backwards, which is forbidden
    res = shortest_deadhead_path(inst, 0, 2)
    assert res.cost == 2
    assert [(a.edge_id, a.forward) for a in res.arcs] == [(0, True), (1, True)]
    assert DeadheadPaths(inst).cost(0, 2) == 2


def test_diagonal_zero():
    inst = random_instance(0, 15, 10, 10)
    m = all_pairs_deadhead(inst).matrix()
    assert np.all(np.diag(m) == 0)


def test_matrix_matches_single_pair_and_floyd_warshall():
    rng = np.random.default_rng(1)
    for seed in range(4):
        inst = random_instance(seed, 20, 15, 15)
        m = all_pairs_deadhead(inst).matrix()
        fw = floyd_warshall(inst)
        np.testing.assert_allclose(m, fw, rtol=1e-12)
        for _ in range(25):
            u, v = rng.integers(0, 20, size=2)
            assert math.isclose(m[u, v], shortest_deadhead_path(inst, int(u), int(v)).cost, rel_tol=1e-12)


def test_asymmetric_with_wind():
    m = all_pairs_deadhead(random_instance(2, 10, 8, 5)).matrix()
    assert not np.allclose(m, m.T)


@given(st.integers(0, 10_000))
def test_path_cost_equals_matrix_entry(seed):
    inst = random_instance(seed, 9, 6, 5)
    paths = DeadheadPaths(inst)
    for u, v in itertools.product(range(9), repeat=2):
        res = paths.path(u, v)
        assert res.cost == paths.cost(u, v)
        x = u
        for a in res.arcs:
            assert inst.arc_tail(a) == x
            x = inst.arc_head(a)
        assert x == v


def test_matrix_subset_order():
    inst = random_instance(5, 12, 8, 4)
    paths = DeadheadPaths(inst)
    full = all_pairs_deadhead(inst).matrix()
    sub = paths.matrix([7, 2, 9])
    np.testing.assert_array_equal(sub, full[np.ix_([7, 2, 9], [7, 2, 9])])


def test_cost_raises_when_unreachable():
    inst = make_instance(2, [(0, 1, True, sym(1, 1))])
    paths = DeadheadPaths(inst)
    paths._dist[0] = np.array([0.0, np.inf])
    with pytest.raises(Unreachable):
        paths.cost(0, 1)
