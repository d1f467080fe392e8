"""Coverage tours for linear features on asymmetric multigraphs."""

from .approx import SolveReport, SolverConfig, connect_components, gtsp_connect, resolve_ambiguous, solve
from .atsp import AtspInstance, held_karp_atsp, heuristic_atsp
from .cost_model import EuclideanDistance, Explicit, WindModel, build_costs, edge_travel_cost, effective_speed
from .errors import *  # noqa: F401,F403
from .flow_pipeline import LpSolveResult, construct_flow_digraph, lp_solve, min_cost_digraph
from .graph_core import (
    EPS,
    INFEASIBLE,
    Arc,
    ArcMultiset,
    CoverageTour,
    Edge,
    LineCoverageInstance,
    Mode,
    euler_tour,
    imbalance,
    required_components,
    validate_tour,
)
from .improve import short_circuit, two_opt
from .io import export_geojson, instance_to_dict, parse_instance, read_tour, write_tour
from .mcf import FlowArc, FlowNetwork, FlowSolution, solve_min_cost_flow, verify_flow
from .oracle import brute_force_optimal, random_instance
from .paths import DeadheadPaths, all_pairs_deadhead, shortest_deadhead_path

__version__ = "0.1.0"
