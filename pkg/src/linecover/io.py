"""JSON instance and tour files, and GeoJSON export.

Floats are written with ``repr`` (shortest string that round-trips), so
reading a file back gives bit-identical values.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .cost_model import CostSpec, EuclideanDistance, Explicit, WindModel, build_costs
from .errors import MissingCoordinates, SchemaError
from .graph_core import Arc, CoverageTour, Edge, LineCoverageInstance, Mode


def _require(obj, key, path, kinds):
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", path)
    return _typed(obj[key], f"{path}.{key}", kinds)


def _typed(value, path, kinds):
    if isinstance(value, bool) and bool not in kinds:
        raise SchemaError(f"expected {kinds[0].__name__}, got bool", path)
    if not isinstance(value, kinds):
        raise SchemaError(f"expected {kinds[0].__name__}, got {type(value).__name__}", path)
    return value


_NUM = (int, float)


def _cost_spec(doc: dict, edges: list[dict]) -> CostSpec:
    model = doc.get("cost_model", {"type": "explicit"})
    kind = _require(model, "type", "$.cost_model", (str,))
    if kind == "explicit":
        costs = {}
        for i, e in enumerate(edges):
            p = f"$.edges[{i}]"
            c = _require(e, "costs", p, (dict,))
            p += ".costs"
            if e["required"]:
                sf = _require(c, "sf", p, _NUM)
                sr = _require(c, "sr", p, _NUM)
            else:
                sf = sr = None
            costs[i] = (sf, sr, _require(c, "df", p, _NUM), _require(c, "dr", p, _NUM))
        return Explicit(costs)
    if kind == "euclidean":
        return EuclideanDistance()
    if kind == "wind":
        params = {}
        for key in ("service_speed", "deadhead_speed", "wind_speed", "wind_direction"):
            if key in model:
                params[key] = float(_typed(model[key], f"$.cost_model.{key}", _NUM))
        return WindModel(**params)
    raise SchemaError(f"unknown cost model {kind!r}", "$.cost_model.type")


def instance_from_dict(doc: Any) -> LineCoverageInstance:
    """Build and price an instance from a parsed instance document."""
    if not isinstance(doc, dict):
        raise SchemaError("instance document must be an object")
    vertices = _require(doc, "vertices", "$", (list,))
    edges = _require(doc, "edges", "$", (list,))
    index: dict[Any, int] = {}
    coords: list[tuple[float, float]] = []
    if not vertices:
        raise SchemaError("no vertices", "$.vertices")
    with_xy = isinstance(vertices[0], dict) and ("x" in vertices[0] or "y" in vertices[0])
    for i, v in enumerate(vertices):
        p = f"$.vertices[{i}]"
        vid = _require(v, "id", p, (int, str))
        if vid in index:
            raise SchemaError(f"duplicate vertex id {vid!r}", p + ".id")
        index[vid] = i
        if ("x" in v or "y" in v) != with_xy:
            raise SchemaError("coordinates must be given for all vertices or none", p)
        if with_xy:
            coords.append((float(_require(v, "x", p, _NUM)), float(_require(v, "y", p, _NUM))))

    norm_edges: list[dict] = []
    for i, e in enumerate(edges):
        p = f"$.edges[{i}]"
        ends = []
        for key in ("u", "v"):
            ref = _require(e, key, p, (int, str))
            if ref not in index:
                raise SchemaError(f"unknown vertex {ref!r}", f"{p}.{key}")
            ends.append(index[ref])
        required = _require(e, "required", p, (bool,))
        norm_edges.append({**e, "required": required, "_ends": ends})

    complete = doc.get("complete_nonrequired", False)
    _typed(complete, "$.complete_nonrequired", (bool,))
    spec = _cost_spec(doc, norm_edges)

    pairs = [(e["_ends"][0], e["_ends"][1]) for e in norm_edges]
    flags = [e["required"] for e in norm_edges]
    if complete:
        if isinstance(spec, Explicit):
            raise SchemaError("complete_nonrequired needs a wind or euclidean cost model", "$.complete_nonrequired")
        have = {frozenset(p) for p in pairs}
        n = len(vertices)
        for a in range(n):
            for b in range(a + 1, n):
                if frozenset((a, b)) not in have:
                    pairs.append((a, b))
                    flags.append(False)
    raw = LineCoverageInstance(
        len(vertices),
        tuple(Edge(i, a, b, r) for i, ((a, b), r) in enumerate(zip(pairs, flags))),
        tuple(coords) if coords else None,
    )
    return build_costs(raw, spec)


def parse_instance(path) -> LineCoverageInstance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return instance_from_dict(doc)


def instance_to_dict(inst: LineCoverageInstance) -> dict:
    """Normalized form: dense ids, every edge listed with explicit costs."""
    verts = []
    for i in range(inst.vertex_count):
        v: dict[str, Any] = {"id": i}
        if inst.coordinates is not None:
            v["x"], v["y"] = inst.coordinates[i]
        verts.append(v)
    edges = []
    for e in inst.edges:
        costs = {"df": e.cost_deadhead_fwd, "dr": e.cost_deadhead_rev}
        if e.required:
            costs = {"sf": e.cost_service_fwd, "sr": e.cost_service_rev, **costs}
        edges.append({"u": e.u, "v": e.v, "required": e.required, "costs": costs})
    return {
        "vertices": verts,
        "edges": edges,
        "cost_model": {"type": "explicit"},
        "complete_nonrequired": False,
    }


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_instance(inst: LineCoverageInstance, path) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)))


def tour_to_dict(
    inst: LineCoverageInstance,
    tour: CoverageTour,
    components: int | None = None,
    config: dict | None = None,
    seed: int | None = None,
) -> dict:
    steps = []
    for a in tour.steps:
        steps.append(
            {
                "edge_id": a.edge_id,
                "from": inst.arc_tail(a),
                "to": inst.arc_head(a),
                "mode": a.mode.value,
                "cost": inst.arc_cost(a),
            }
        )
    lb = tour.lower_bound
    ratio = None
    if lb is not None and lb > 0:
        ratio = tour.total_cost / lb
    return {
        "steps": steps,
        "totals": {"cost": tour.total_cost, "lower_bound": lb, "ratio": ratio, "components": components},
        "config": config,
        "seed": seed,
    }


def write_tour(path, inst, tour, components=None, config=None, seed=None) -> None:
    Path(path).write_text(dumps(tour_to_dict(inst, tour, components, config, seed)))


def tour_from_dict(inst: LineCoverageInstance, doc: Any) -> CoverageTour:
    """Rebuild a tour; ``total_cost`` is the value stated in the file so
    that validation can compare it with the recomputed cost."""
    steps_doc = _require(doc, "steps", "$", (list,))
    steps = []
    for i, s in enumerate(steps_doc):
        p = f"$.steps[{i}]"
        eid = _require(s, "edge_id", p, (int,))
        if not 0 <= eid < len(inst.edges):
            raise SchemaError(f"unknown edge {eid}", p + ".edge_id")
        e = inst.edges[eid]
        frm, to = _require(s, "from", p, (int,)), _require(s, "to", p, (int,))
        if (frm, to) == (e.u, e.v):
            fwd = True
        elif (frm, to) == (e.v, e.u):
            fwd = False
        else:
            raise SchemaError(f"edge {eid} does not join {frm} and {to}", p)
        mode = _require(s, "mode", p, (str,))
        if mode not in ("service", "deadhead"):
            raise SchemaError(f"unknown mode {mode!r}", p + ".mode")
        steps.append(Arc(eid, fwd, Mode(mode)))
    totals = doc.get("totals") or {}
    cost = totals.get("cost")
    if cost is None:
        cost = math.fsum(s.get("cost", 0.0) for s in steps_doc)
    return CoverageTour(tuple(steps), float(cost), totals.get("lower_bound"))


def read_tour(inst: LineCoverageInstance, path) -> CoverageTour:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return tour_from_dict(inst, doc)


def tour_geojson(inst: LineCoverageInstance, tour: CoverageTour) -> dict:
    if inst.coordinates is None:
        raise MissingCoordinates("GeoJSON export needs vertex coordinates")
    xy = inst.coordinates
    features = []
    for k, a in enumerate(tour.steps):
        t, h = inst.arc_tail(a), inst.arc_head(a)
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [list(xy[t]), list(xy[h])]},
                "properties": {
                    "mode": a.mode.value,
                    "step_index": k,
                    "edge_id": a.edge_id,
                    "cost": inst.arc_cost(a),
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def export_geojson(inst: LineCoverageInstance, tour: CoverageTour, path) -> None:
    Path(path).write_text(dumps(tour_geojson(inst, tour)))
