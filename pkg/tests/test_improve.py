import math

from hypothesis import given, strategies as st

from linecover import (
    Arc,
    CoverageTour,
    Edge,
    EuclideanDistance,
    LineCoverageInstance,
    Mode,
    SolverConfig,
    build_costs,
    short_circuit,
    solve,
    two_opt,
    validate_tour,
)
from linecover.oracle import brute_force_optimal, random_instance
from linecover.paths import DeadheadPaths

from conftest import make_instance, sym

S, D = Mode.SERVICE, Mode.DEADHEAD
RAW = SolverConfig(short_circuit=False, two_opt=False)


def _detour():
    # 0 -> 1 serviced; back via 2 costs 6 + 6, the direct edge 1 -> 0 costs 5
    return make_instance(
        3,
        [
            (0, 1, True, (1, 30, 1, 30)),
            (1, 2, False, sym(None, 6)),
            (2, 0, False, sym(None, 6)),
            (1, 0, False, (None, None, 5, 50)),
        ],
    )


def test_short_circuit_replaces_detour():
    inst = _detour()
    tour = CoverageTour.from_steps(inst, [Arc(0, True, S), Arc(1, True, D), Arc(2, True, D)])
    assert tour.total_cost == 13
    out = short_circuit(inst, tour)
    assert out.total_cost == 6
    assert out.steps == (Arc(0, True, S), Arc(3, True, D))
    assert validate_tour(inst, out).ok


def test_short_circuit_keeps_shortest_run():
    inst = _detour()
    tour = CoverageTour.from_steps(inst, [Arc(0, True, S), Arc(3, True, D)])
    assert short_circuit(inst, tour) is tour


def test_short_circuit_without_deadheads():
    inst = make_instance(3, [(0, 1, True, sym(2, 1)), (1, 2, True, sym(2, 1)), (2, 0, True, sym(2, 1))])
    tour = CoverageTour.from_steps(inst, [Arc(i, True, S) for i in range(3)])
    assert short_circuit(inst, tour) is tour


def _stripes():
    # four horizontal required segments at heights 0..3, complete non-required graph
    coords = [(0.0, float(k)) for k in range(4)] + [(10.0, float(k)) for k in range(4)]
    pairs = [(k, 4 + k, True) for k in range(4)]
    pairs += [(a, b, False) for a in range(8) for b in range(a + 1, 8)]
    edges = tuple(Edge(i, u, v, r) for i, (u, v, r) in enumerate(pairs))
    return build_costs(LineCoverageInstance(8, edges, coords), EuclideanDistance())


def _joined(inst, services):
    paths = DeadheadPaths(inst)
    steps = []
    for i, s in enumerate(services):
        steps.append(s)
        nxt = services[(i + 1) % len(services)]
        steps += paths.path(inst.arc_head(s), inst.arc_tail(nxt)).arcs
    return CoverageTour.from_steps(inst, steps)


def test_two_opt_uncrosses_to_optimum():
    inst = _stripes()
    # a serpentine that takes the middle stripes out of order; its two
    # connections on the right side run over each other
    bad = _joined(inst, [Arc(0, True, S), Arc(2, False, S), Arc(1, True, S), Arc(3, False, S)])
    _, opt = brute_force_optimal(inst)
    assert math.isclose(opt, 46.0)  # serpentine sweep plus the 3 m return
    assert math.isclose(bad.total_cost, 48.0)
    out = two_opt(inst, bad)
    assert validate_tour(inst, out).ok
    assert math.isclose(out.total_cost, opt, rel_tol=1e-9)


def test_two_opt_can_stall_when_all_directions_agree():
    # every block reversal flips the edges inside it, so from a start where all
    # stripes run the same way the search settles above the optimum
    inst = _stripes()
    bad = _joined(inst, [Arc(k, True, S) for k in range(4)])
    out = two_opt(inst, bad)
    assert 46.0 < out.total_cost < bad.total_cost


def test_two_opt_cap_zero_is_identity():
    inst = _stripes()
    bad = _joined(inst, [Arc(0, True, S), Arc(2, True, S), Arc(1, True, S), Arc(3, True, S)])
    assert two_opt(inst, bad, move_cap=0) is bad


def test_two_opt_cap_limits_moves():
    inst = _stripes()
    bad = _joined(inst, [Arc(0, True, S), Arc(2, True, S), Arc(1, True, S), Arc(3, True, S)])
    one = two_opt(inst, bad, move_cap=1)
    assert one.total_cost <= bad.total_cost


def test_two_opt_local_optimum_unchanged():
    inst = _stripes()
    best, _ = brute_force_optimal(inst)
    assert two_opt(inst, best) is best


@given(st.integers(0, 10_000), st.sampled_from(["eulerian", "connected", "general"]))
def test_improvements_monotone_and_valid(seed, profile):
    inst = random_instance(seed, 12, 8, 6, profile=profile, components=2)
    raw, _ = solve(inst, RAW)
    sc = short_circuit(inst, raw)
    opt2 = two_opt(inst, sc)
    assert sc.total_cost <= raw.total_cost
    assert opt2.total_cost <= sc.total_cost
    for t in (sc, opt2):
        report = validate_tour(inst, t)
        assert report.ok, str(report)
