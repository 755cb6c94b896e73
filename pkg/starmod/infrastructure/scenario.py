"""Scenario files: loading, schema validation and referential integrity."""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from jsonschema import Draft7Validator

from starmod.core.algebras import AlgebraDescriptor
from starmod.core.errors import ParseError, ScenarioError, StarmodError
from starmod.core.star import moyal_star
from starmod.infrastructure import codec
from starmod.infrastructure.config import DEFAULT_SEED, DEFAULT_TRUNCATION_ORDER, MAX_TRUNCATION_ORDER

log = logging.getLogger(__name__)

TASK_KINDS = (
    "check-star",
    "intertwining",
    "deform-projection",
    "bimodule-suite",
    "metric-suite",
    "module-equivalence",
    "fullness",
    "cocycle",
    "cyclicity",
    "index",
    "index-invariance",
    "morita-check",
    "outequiv",
    "kernel",
)

DEFINITION_TYPES = ("projection", "matrix", "series", "cocycle", "model", "class", "transform", "outequiv")

# Task parameters that name a definition (or carry one inline), with the expected type.
REFERENCE_PARAMS: Dict[str, Dict[str, str]] = {
    "check-star": {},
    "intertwining": {"transform": "transform"},
    "deform-projection": {"projection": "projection"},
    "bimodule-suite": {"projection": "projection"},
    "metric-suite": {"projection": "projection"},
    "module-equivalence": {"projection": "projection", "U": "matrix"},
    "fullness": {"projection": "projection"},
    "cocycle": {"cocycle": "cocycle", "solve": "matrix"},
    "cyclicity": {},
    "index": {"projection": "projection"},
    "index-invariance": {"projection": "projection", "U": "matrix"},
    "morita-check": {"model": "model", "class": "class", "class_prime": "class"},
    "outequiv": {"e1": "outequiv", "e2": "outequiv", "model": "model"},
    "kernel": {"model": "model"},
}

_SCALAR = {"type": ["string", "integer"]}

SCENARIO_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["algebra", "K", "tasks"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "algebra": {"$ref": "#/definitions/algebra"},
        "K": {"type": "integer", "minimum": 0, "maximum": MAX_TRUNCATION_ORDER},
        "seed": {"type": "integer", "minimum": 0},
        "star": {"$ref": "#/definitions/star"},
        "definitions": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["type"],
                "properties": {"type": {"enum": list(DEFINITION_TYPES)}},
            },
        },
        "tasks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "kind": {"enum": list(TASK_KINDS)},
                    "params": {"type": "object"},
                },
            },
        },
    },
    "definitions": {
        "algebra": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["torus", "plane"]},
                "theta": _SCALAR,
                "dim": {"type": "integer"},
                "n": {"type": "integer", "minimum": 1},
                "poisson": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
            },
        },
        "star": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "product": {"enum": ["moyal", "perturbed"]},
                "transform": {"type": ["string", "object"]},
                "automorphism": {
                    "type": "object",
                    "required": ["kind"],
                    "properties": {"kind": {"enum": ["identity", "translation", "lattice"]}},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class Diagnostic:
    pointer: str
    message: str

    def __str__(self) -> str:
        return f"{self.pointer or '/'}: {self.message}"


@dataclass(frozen=True)
class TaskSpec:
    id: str
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Scenario:
    descriptor: AlgebraDescriptor
    K: int
    seed: int
    tasks: List[TaskSpec]
    definitions: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    star: Dict[str, Any] = field(default_factory=dict)
    name: Optional[str] = None
    raw: Dict[str, Any] = field(default_factory=dict)


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def read_json(path: str) -> Any:
    """Parse a JSON file; syntax errors become ParseError with line and column."""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def _definition_check(descriptor: AlgebraDescriptor, K: int, definition: Dict[str, Any],
                      definitions: Dict[str, Dict[str, Any]]) -> None:
    kind = definition["type"]
    star = moyal_star(descriptor, K)
    if kind == "projection":
        codec.decode_projection(descriptor, definition)
    elif kind == "matrix":
        codec.decode_matrix(star, definition)
    elif kind == "series":
        codec.decode_series(descriptor, definition, K)
    elif kind == "cocycle":
        codec.decode_cocycle(star, definition)
    elif kind == "transform":
        codec.decode_transform(descriptor, definition, K)
    elif kind == "model":
        codec.decode_model(definition)
    elif kind == "class":
        model_ref = definition.get("model")
        model = None
        if isinstance(model_ref, str) and model_ref in definitions:
            model = codec.decode_model(definitions[model_ref])
        codec.decode_class(definition, model)
    elif kind == "outequiv":
        codec.decode_outequiv(definition)


def validate_data(data: Any) -> List[Diagnostic]:
    """Schema and referential-integrity diagnostics for a parsed scenario."""
    validator = Draft7Validator(SCENARIO_SCHEMA)
    diagnostics = [
        Diagnostic(_pointer(e.absolute_path), e.message)
        for e in sorted(validator.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    ]
    if diagnostics:
        return diagnostics

    try:
        descriptor = codec.decode_descriptor(data["algebra"])
    except StarmodError as e:
        return [Diagnostic("/algebra", str(e))]
    K = data["K"]
    definitions = data.get("definitions", {})

    for def_id, definition in sorted(definitions.items()):
        try:
            _definition_check(descriptor, K, definition, definitions)
        except (StarmodError, TypeError, ValueError) as e:
            diagnostics.append(Diagnostic(f"/definitions/{def_id}", str(e)))

    star_spec = data.get("star", {})
    transform_ref = star_spec.get("transform")
    if isinstance(transform_ref, str) and definitions.get(transform_ref, {}).get("type") != "transform":
        diagnostics.append(Diagnostic("/star/transform", f"Unknown transform definition {transform_ref!r}"))

    seen = set()
    for i, task in enumerate(data["tasks"]):
        if task["id"] in seen:
            diagnostics.append(Diagnostic(f"/tasks/{i}/id", f"Duplicate task id {task['id']!r}"))
        seen.add(task["id"])
        params = task.get("params", {})
        for name, expected in REFERENCE_PARAMS[task["kind"]].items():
            value = params.get(name)
            if isinstance(value, str):
                actual = definitions.get(value, {}).get("type")
                if actual is None:
                    diagnostics.append(Diagnostic(f"/tasks/{i}/params/{name}", f"Unknown definition {value!r}"))
                elif actual != expected:
                    diagnostics.append(Diagnostic(
                        f"/tasks/{i}/params/{name}", f"Definition {value!r} is a {actual}, expected a {expected}"
                    ))
    return diagnostics


def validate_scenario(path: str) -> List[Diagnostic]:
    """Diagnostics for a scenario file without executing it; empty when valid."""
    try:
        data = read_json(path)
    except ParseError as e:
        return [Diagnostic("", str(e))]
    return validate_data(data)


def scenario_from_data(data: Dict[str, Any]) -> Scenario:
    diagnostics = validate_data(data)
    if diagnostics:
        raise ScenarioError("; ".join(str(d) for d in diagnostics))
    return Scenario(
        descriptor=codec.decode_descriptor(data["algebra"]),
        K=data.get("K", DEFAULT_TRUNCATION_ORDER),
        seed=data.get("seed", DEFAULT_SEED),
        tasks=[TaskSpec(t["id"], t["kind"], dict(t.get("params", {}))) for t in data["tasks"]],
        definitions=dict(data.get("definitions", {})),
        star=dict(data.get("star", {})),
        name=data.get("name"),
        raw=data,
    )


def load_scenario(path: str) -> Scenario:
    log.info(f"Loading scenario {path}")
    scenario = scenario_from_data(read_json(path))
    log.info(f"Scenario {scenario.name or path}: {len(scenario.tasks)} tasks, K={scenario.K}, seed={scenario.seed}")
    return scenario
