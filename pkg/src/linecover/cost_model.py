"""Directional edge costs: explicit values or wind-dependent travel times."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import CostInvariantViolated, MissingCoordinates, WindTooStrong
from .graph_core import LineCoverageInstance, Mode, check_edge_costs

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindModel:
    """Constant wind; ``wind_direction`` is the angle (radians from +x) the
    wind blows toward."""

    service_speed: float = 7.0
    deadhead_speed: float = 10.0
    wind_speed: float = 0.0
    wind_direction: float = 0.0

    def __post_init__(self):
        if self.service_speed <= 0 or self.deadhead_speed <= 0:
            raise ValueError("speeds must be positive")
        if self.wind_speed < 0:
            raise ValueError("wind speed must be non-negative")
        if self.wind_speed >= min(self.service_speed, self.deadhead_speed):
            raise WindTooStrong(
                f"wind {self.wind_speed} m/s is not below the travel speeds "
                f"({self.service_speed}, {self.deadhead_speed})"
            )

    def speed(self, mode: Mode) -> float:
        return self.service_speed if mode is Mode.SERVICE else self.deadhead_speed


@dataclass(frozen=True)
class Explicit:
    """Per-edge ``(service_fwd, service_rev, deadhead_fwd, deadhead_rev)``.

    Non-required edges may give ``None`` for the two service entries.
    """

    costs: Mapping[int, tuple]


@dataclass(frozen=True)
class EuclideanDistance:
    """Edge length in both directions and both modes."""


CostSpec = Union[Explicit, WindModel, EuclideanDistance]


def effective_speed(v: float, w: float, phi: float) -> float:
    """Ground speed along a heading at angle ``phi`` to a wind of speed ``w``."""
    if w >= v:
        raise WindTooStrong(f"wind speed {w} must be below travel speed {v}")
    s = math.sin(phi)
    return w * math.cos(phi) + math.sqrt(v * v - w * w * s * s)


def edge_travel_cost(tail_xy, head_xy, model: WindModel, mode: Mode) -> float:
    """Seconds needed to travel the straight segment ``tail_xy -> head_xy``."""
    dx = head_xy[0] - tail_xy[0]
    dy = head_xy[1] - tail_xy[1]
    length = math.hypot(dx, dy)
    if not math.isfinite(length):
        raise ValueError("coordinates must be finite")
    if length == 0.0:
        return 0.0
    phi = math.atan2(dy, dx) - model.wind_direction
    return length / effective_speed(model.speed(mode), model.wind_speed, phi)


def _wind_costs(xy: np.ndarray, u: np.ndarray, v: np.ndarray, model: WindModel):
    # vectorised twin of edge_travel_cost, used for large instances
    d = xy[v] - xy[u]
    length = np.hypot(d[:, 0], d[:, 1])
    phi = np.arctan2(d[:, 1], d[:, 0]) - model.wind_direction
    w = model.wind_speed
    out = []
    for speed in (model.service_speed, model.deadhead_speed):
        for sign in (1.0, -1.0):
            ang = phi if sign > 0 else phi + math.pi
            veff = w * np.cos(ang) + np.sqrt(speed * speed - (w * np.sin(ang)) ** 2)
            out.append(np.where(length == 0.0, 0.0, length / veff))
    return out  # service fwd, service rev, deadhead fwd, deadhead rev


def build_costs(inst: LineCoverageInstance, spec: CostSpec) -> LineCoverageInstance:
    """Return a copy of ``inst`` with all four directional costs populated."""
    edges = inst.edges
    if isinstance(spec, Explicit):
        new = []
        for e in edges:
            if e.id not in spec.costs:
                raise CostInvariantViolated(f"edge {e.id}: no explicit costs given", e.id)
            sf, sr, df, dr = spec.costs[e.id]
            if not e.required:
                sf = sr = None
            ne = e.with_costs(sf, sr, df, dr)
            check_edge_costs(ne)
            new.append(ne)
        return LineCoverageInstance(inst.vertex_count, tuple(new), inst.coordinates)

    if inst.coordinates is None:
        raise MissingCoordinates("cost model needs vertex coordinates")
    xy = np.asarray(inst.coordinates, dtype=float)
    u = np.fromiter((e.u for e in edges), dtype=np.int64, count=len(edges))
    v = np.fromiter((e.v for e in edges), dtype=np.int64, count=len(edges))
    if isinstance(spec, EuclideanDistance):
        d = xy[v] - xy[u]
        length = np.hypot(d[:, 0], d[:, 1])
        sf = sr = df = dr = length
    elif isinstance(spec, WindModel):
        sf, sr, df, dr = _wind_costs(xy, u, v, spec)
    else:
        raise TypeError(f"unknown cost spec {spec!r}")

    zero = [e.id for e in edges if e.u != e.v and xy[e.u].tolist() == xy[e.v].tolist()]
    if zero:
        log.warning("%d zero-length edges get zero cost (first: %d)", len(zero), zero[0])

    sf, sr, df, dr = (a.tolist() for a in (sf, sr, df, dr))
    new = []
    for i, e in enumerate(edges):
        if e.required:
            ne = e.with_costs(sf[i], sr[i], df[i], dr[i])
        else:
            ne = e.with_costs(None, None, df[i], dr[i])
        new.append(ne)
    return LineCoverageInstance(inst.vertex_count, tuple(new), inst.coordinates)
