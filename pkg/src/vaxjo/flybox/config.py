"""Scenario files: JSON schema and conversion to :class:`FlyBoxScenario`."""

from __future__ import annotations

import jsonschema

from ..errors import SchemaError
from .experiments import ConstantSurvival, FlyBoxScenario, RegionSurvival
from .geometry import DEFAULT_RESOLUTION, FoodField, GeometricContext, Splitter

_number_list = {"type": "array", "items": {"type": "number"}}
_region = {"type": "array", "items": _number_list}
_splitter = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["vertical", "horizontal", "angle"]},
        "at": {"type": "number"},
        "phi": {"type": "number"},
        "name": {"type": "string"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "geometry": {"enum": ["square", "disc"]},
        "field": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["uniform", "grid", "sector_sine"]},
                "resolution": {"type": "integer", "minimum": 1},
                "weights": {"type": "array", "items": _number_list},
                "phi0": {"type": "number"},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "context": _region,
        "first": _splitter,
        "second": _splitter,
        "disturbance": {"enum": ["none", "sector_sine"]},
        "survival": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "constant"},
                        "p": {"type": "number", "minimum": 0, "maximum": 1},
                    },
                    "required": ["kind", "p"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "region"},
                        "region": _region,
                        "inside": {"type": "number", "minimum": 0, "maximum": 1},
                        "outside": {"type": "number", "minimum": 0, "maximum": 1},
                        "splitters": {"type": "array", "items": {"type": "string"}},
                    },
                    "required": ["kind", "region", "inside"],
                    "additionalProperties": False,
                },
            ]
        },
        "ensemble": {
            "type": "object",
            "properties": {
                "contexts": {"type": "array", "items": _region, "minItems": 1},
                "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
            },
            "required": ["contexts", "weights"],
            "additionalProperties": False,
        },
        "n": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "workers": {"type": "integer", "minimum": 1},
    },
    "required": ["geometry", "field", "first", "second", "n"],
    "additionalProperties": False,
}


def validate(doc: dict, schema: dict, what: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{what}: {where}: {exc.message}") from None


def _field(geometry: str, doc: dict) -> FoodField:
    kind = doc["kind"]
    if geometry == "square":
        if kind == "uniform":
            return FoodField.uniform_square(doc.get("resolution", DEFAULT_RESOLUTION))
        if kind == "grid":
            if "weights" not in doc:
                raise SchemaError("grid field needs 'weights'")
            return FoodField.from_grid(doc["weights"])
        raise SchemaError(f"field kind {kind!r} is not available on the square")
    if kind == "uniform":
        return FoodField.uniform_disc()
    if kind == "sector_sine":
        return FoodField.sector_sine(doc.get("phi0", 0.0))
    raise SchemaError(f"field kind {kind!r} is not available on the disc")


def _context(geometry: str, items) -> GeometricContext:
    expected = 4 if geometry == "square" else 2
    for item in items or ():
        if len(item) != expected:
            raise SchemaError(f"{geometry} regions are lists of {expected} numbers")
    return GeometricContext.from_list(geometry, items)


def scenario_from_dict(doc: dict, *, seed: int | None = None) -> FlyBoxScenario:
    """Build a scenario from its JSON form; ``seed`` overrides the file's seed."""
    validate(doc, SCENARIO_SCHEMA, "scenario")
    geometry = doc["geometry"]
    survival = doc.get("survival")
    if survival is not None:
        if survival["kind"] == "constant":
            survival = ConstantSurvival(survival["p"])
        else:
            survival = RegionSurvival(
                _context(geometry, survival["region"]),
                survival["inside"],
                survival.get("outside", 1.0),
                survival.get("splitters", ()),
            )
    ensemble = doc.get("ensemble")
    if ensemble is not None:
        if len(ensemble["contexts"]) != len(ensemble["weights"]):
            raise SchemaError("ensemble contexts and weights differ in length")
        ensemble = tuple(
            (_context(geometry, c), float(w)) for c, w in zip(ensemble["contexts"], ensemble["weights"])
        )
    return FlyBoxScenario(
        field=_field(geometry, doc["field"]),
        context=_context(geometry, doc.get("context")),
        first=Splitter.from_dict(doc["first"]),
        second=Splitter.from_dict(doc["second"]),
        n=doc["n"],
        seed=doc.get("seed", 0) if seed is None else seed,
        disturbance=doc.get("disturbance", "none"),
        survival=survival,
        ensemble=ensemble,
        workers=doc.get("workers", 1),
    )
