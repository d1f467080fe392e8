import numpy as np
import pytest
from hypothesis import given, strategies as st

from linecover import FlowArc, FlowNetwork, FlowSolution, solve_min_cost_flow, verify_flow
from linecover.errors import InfeasibleFlow
from linecover.mcf import UNBOUNDED

from mcf_oracle import enumerate_min_cost, random_network


def test_single_arc():
    net = FlowNetwork(2, (-1, 1), (FlowArc(0, 1, 1, 2.0),))
    sol = solve_min_cost_flow(net)
    assert sol.flow == (1,) and sol.total_cost == 2


def test_parallel_arcs_prefer_cheaper():
    net = FlowNetwork(2, (-1, 1), (FlowArc(0, 1, 1, 5.0), FlowArc(0, 1, 1, 2.0)))
    sol = solve_min_cost_flow(net)
    assert sol.flow == (0, 1) and sol.total_cost == 2


def test_capacity_forces_split():
    only = FlowNetwork(2, (-2, 2), (FlowArc(0, 1, 1, 2.0),))
    with pytest.raises(InfeasibleFlow):
        solve_min_cost_flow(only)
    both = FlowNetwork(2, (-2, 2), (FlowArc(0, 1, 1, 2.0), FlowArc(0, 1, 1, 7.0)))
    sol = solve_min_cost_flow(both)
    # splits (2,0) and (0,2) break a capacity; (1,1) is the only one left
    assert sol.flow == (1, 1) and sol.total_cost == 9
    assert enumerate_min_cost(both) == 9


def test_zero_demand():
    net = FlowNetwork(3, (0, 0, 0), (FlowArc(0, 1, UNBOUNDED, 1.0),))
    assert solve_min_cost_flow(net).flow == (0,)


def test_network_validation():
    with pytest.raises(ValueError):
        FlowNetwork(2, (1, 1), ())
    with pytest.raises(ValueError):
        FlowNetwork(2, (0, 0), (FlowArc(0, 1, 1, -1.0),))
    with pytest.raises(ValueError):
        FlowNetwork(2, (0, 0), (FlowArc(0, 1, -1, 1.0),))


def test_unbounded_capacity_value():
    net = FlowNetwork(3, (-2, 1, 1), (FlowArc(0, 1, UNBOUNDED, 1.0),))
    assert net.unbounded_capacity == 4


def test_verify_rejects_suboptimal():
    # two routes 0 -> 1; sending on the dear one leaves a negative residual cycle
    net = FlowNetwork(2, (-1, 1), (FlowArc(0, 1, 1, 1.0), FlowArc(0, 1, 1, 4.0)))
    assert not verify_flow(net, FlowSolution((0, 1), 4.0))
    assert verify_flow(net, FlowSolution((1, 0), 1.0))


def test_verify_rejects_capacity_violation():
    net = FlowNetwork(2, (-2, 2), (FlowArc(0, 1, 1, 1.0), FlowArc(0, 1, UNBOUNDED, 3.0)))
    assert not verify_flow(net, FlowSolution((2, 0), 2.0))


def test_verify_rejects_conservation_and_cost_errors():
    net = FlowNetwork(2, (-1, 1), (FlowArc(0, 1, 2, 1.0),))
    assert not verify_flow(net, FlowSolution((2,), 2.0))
    assert not verify_flow(net, FlowSolution((1,), 3.0))


def test_solver_on_many_small_networks():
    rng = np.random.default_rng(7)
    for _ in range(200):
        net = random_network(rng)
        best = enumerate_min_cost(net)
        if best is None:
            with pytest.raises(InfeasibleFlow):
                solve_min_cost_flow(net)
            continue
        sol = solve_min_cost_flow(net)
        assert sol.total_cost == best
        assert verify_flow(net, sol)


@given(st.integers(0, 2**32 - 1))
def test_solver_output_certified(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, max_arcs=12, max_nodes=6, max_demand=4)
    try:
        sol = solve_min_cost_flow(net)
    except InfeasibleFlow:
        return
    assert verify_flow(net, sol)


def test_medium_network_against_linprog():
    from scipy.optimize import linprog

    rng = np.random.default_rng(3)
    for _ in range(10):
        n = 25
        demands = np.zeros(n, dtype=int)
        for _ in range(30):
            a, b = rng.choice(n, size=2, replace=False)
            demands[a] += 1
            demands[b] -= 1
        arcs = [FlowArc(i, (i + 1) % n, UNBOUNDED, 50.0) for i in range(n)]
        for _ in range(120):
            t, h = rng.integers(0, n, size=2)
            cap = [UNBOUNDED, 1, 2][int(rng.integers(0, 3))]
            arcs.append(FlowArc(int(t), int(h), cap, float(rng.uniform(0, 10))))
        net = FlowNetwork(n, tuple(int(d) for d in demands), tuple(arcs))
        sol = solve_min_cost_flow(net)
        assert verify_flow(net, sol)
        A = np.zeros((n, len(arcs)))
        for i, a in enumerate(arcs):
            A[a.head, i] += 1
            A[a.tail, i] -= 1
        bounds = [(0, a.capacity) for a in arcs]
        lp = linprog([a.cost for a in arcs], A_eq=A, b_eq=demands, bounds=bounds, method="highs")
        assert abs(lp.fun - sol.total_cost) <= 1e-7 * max(1.0, abs(lp.fun))
