"""Run configuration: YAML loading, validation, defaults and round-tripping.

Judgment entries may be written as numbers or as ``"a/b"`` fraction strings.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from vhoeval.ahp import PairwiseComparisonMatrix
from vhoeval.criticality import NUMBER_OF_HANDOFFS, RANKING_ABNORMALITY
from vhoeval.decision import AttributeSpec, Method
from vhoeval.errors import ConfigError, VhoevalError
from vhoeval.simulator import ABNORMALITY_MODES, Network, ScenarioSpec, heterogeneous_scenario

SCHEMA_VERSION = 1
TRAFFIC_CLASSES = ("background", "conversational", "interactive", "streaming")
FORMATS = ("table", "csv", "json")
DEFAULT_SEED = 20120101
DEFAULT_EPOCHS = 1000
DEFAULT_RUNS = 10
PARAMETER_LABELS = (RANKING_ABNORMALITY, NUMBER_OF_HANDOFFS)

# Relative importance of number of handoffs over ranking abnormality.
HANDOFF_PREFERENCE = {"background": 1, "conversational": 3, "interactive": 5, "streaming": 7}

# Implementer-chosen attribute priorities (CB, S, AB, D, J, L); the shipped
# attribute judgments are the consistent matrices a_ij = p_i / p_j.
ATTRIBUTE_PRIORITIES = {
    "background": (3, 2, 6, 1, 1, 5),
    "conversational": (2, 2, 3, 6, 6, 4),
    "interactive": (2, 4, 3, 5, 2, 6),
    "streaming": (2, 2, 6, 3, 5, 4),
}


@dataclass(frozen=True)
class OutputSpec:
    format: str = "table"
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioSpec
    traffic_class: str
    methods: tuple[Method, ...]
    attribute_judgments: PairwiseComparisonMatrix
    parameter_judgments: PairwiseComparisonMatrix
    runs: int = DEFAULT_RUNS
    abnormality: str = "order"
    output: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self):
        if self.traffic_class not in TRAFFIC_CLASSES:
            raise ConfigError(f"traffic_class must be one of {TRAFFIC_CLASSES}")
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        if isinstance(self.runs, bool) or not isinstance(self.runs, int) or self.runs < 1:
            raise ConfigError(f"runs must be a positive integer, got {self.runs!r}")
        if self.abnormality not in ABNORMALITY_MODES:
            raise ConfigError(f"abnormality must be one of {ABNORMALITY_MODES}")
        if self.output.format not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}")
        if set(self.attribute_judgments.labels) != set(self.scenario.attribute_names) or (
            self.attribute_judgments.size != len(self.scenario.attribute_names)
        ):
            raise ConfigError(
                f"attribute_judgments labels {self.attribute_judgments.labels} "
                f"do not match scenario attributes {self.scenario.attribute_names}"
            )
        if set(self.parameter_judgments.labels) != set(PARAMETER_LABELS):
            raise ConfigError(
                f"parameter_judgments labels must be {PARAMETER_LABELS}, "
                f"got {self.parameter_judgments.labels}"
            )

    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return config_to_dict(self) == config_to_dict(other)


def default_parameter_judgments(traffic_class: str) -> PairwiseComparisonMatrix:
    x = HANDOFF_PREFERENCE[traffic_class]
    return PairwiseComparisonMatrix(PARAMETER_LABELS, [[1.0, 1.0 / x], [float(x), 1.0]])


def default_attribute_judgments(traffic_class: str) -> PairwiseComparisonMatrix:
    labels = heterogeneous_scenario().attribute_names
    p = ATTRIBUTE_PRIORITIES[traffic_class]
    grid = [[float(Fraction(a, b)) for b in p] for a in p]
    return PairwiseComparisonMatrix(labels, grid)


def default_config(traffic_class: str = "background") -> RunConfig:
    if traffic_class not in TRAFFIC_CLASSES:
        raise ConfigError(f"unknown traffic class {traffic_class!r}")
    return RunConfig(
        scenario=heterogeneous_scenario(DEFAULT_EPOCHS, DEFAULT_SEED),
        traffic_class=traffic_class,
        methods=tuple(Method),
        attribute_judgments=default_attribute_judgments(traffic_class),
        parameter_judgments=default_parameter_judgments(traffic_class),
    )


def with_traffic_class(cfg: RunConfig, traffic_class: str) -> RunConfig:
    """Switch class and both judgment matrices to that class's defaults."""
    d = default_config(traffic_class)
    return replace(
        cfg,
        traffic_class=traffic_class,
        attribute_judgments=d.attribute_judgments,
        parameter_judgments=d.parameter_judgments,
    )


# --- serialisation -------------------------------------------------------


def _judgment_out(x: float):
    if float(x).is_integer():
        return int(x)
    frac = Fraction(x).limit_denominator(1000)
    if float(frac) == x:
        return f"{frac.numerator}/{frac.denominator}"
    return float(x)


def judgments_to_dict(p: PairwiseComparisonMatrix) -> dict:
    return {
        "labels": list(p.labels),
        "matrix": [[_judgment_out(x) for x in row] for row in p.judgments],
    }


def _value_out(x: float):
    return int(x) if float(x).is_integer() else float(x)


def scenario_to_dict(s: ScenarioSpec) -> dict:
    attrs = s.networks[0].attributes
    return {
        "epochs": s.epochs,
        "seed": s.seed,
        "attributes": [
            {"name": a.name, "units": a.units, "direction": a.direction.value} for a in attrs
        ],
        "networks": [
            {
                "name": n.name,
                "values": {
                    a.name: _value_out(a.low) if a.is_fixed
                    else [_value_out(a.low), _value_out(a.high)]
                    for a in n.attributes
                },
            }
            for n in s.networks
        ],
    }


def config_to_dict(cfg: RunConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "traffic_class": cfg.traffic_class,
        "methods": [m.value for m in cfg.methods],
        "runs": cfg.runs,
        "abnormality": cfg.abnormality,
        "scenario": scenario_to_dict(cfg.scenario),
        "attribute_judgments": judgments_to_dict(cfg.attribute_judgments),
        "parameter_judgments": judgments_to_dict(cfg.parameter_judgments),
        "output": {"format": cfg.output.format, "path": cfg.output.path},
    }


def dump_config(cfg: RunConfig) -> str:
    header = (
        f"# vhoeval run configuration ({cfg.traffic_class} traffic).\n"
        "# Attribute judgments are implementer-chosen defaults, not measured data.\n"
    )
    return header + yaml.safe_dump(
        config_to_dict(cfg), sort_keys=False, width=100, default_flow_style=None
    )


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 of the canonical config, excluding output destination."""
    data = config_to_dict(cfg)
    del data["output"]
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# --- parsing -------------------------------------------------------------


class _Reader:
    """Walks parsed YAML, raising ConfigError with a dotted key path."""

    def __init__(self, source: str):
        self.source = source

    def fail(self, where: str, msg: str):
        raise ConfigError(f"{self.source}: {where}: {msg}" if where else f"{self.source}: {msg}")

    def mapping(self, obj, where, required=(), optional=()):
        if not isinstance(obj, dict):
            self.fail(where, "expected a mapping")
        unknown = [k for k in obj if k not in required and k not in optional]
        if unknown:
            self.fail(where, f"unknown key(s) {unknown}")
        missing = [k for k in required if k not in obj]
        if missing:
            self.fail(where, f"missing key(s) {missing}")
        return obj

    def number(self, obj, where, integer=False):
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            if not integer and isinstance(obj, str):
                try:
                    return float(Fraction(obj.strip()))
                except (ValueError, ZeroDivisionError):
                    pass
            self.fail(where, f"expected {'an integer' if integer else 'a number'}, got {obj!r}")
        if integer and not isinstance(obj, int):
            self.fail(where, f"expected an integer, got {obj!r}")
        return obj if integer else float(obj)

    def string_list(self, obj, where):
        if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
            self.fail(where, "expected a list of strings")
        return obj


def _judgments(r: _Reader, obj, where) -> PairwiseComparisonMatrix:
    r.mapping(obj, where, required=("labels", "matrix"))
    labels = r.string_list(obj["labels"], f"{where}.labels")
    rows = obj["matrix"]
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        r.fail(f"{where}.matrix", "expected a list of rows")
    grid = [
        [r.number(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(row)]
        for i, row in enumerate(rows)
    ]
    try:
        return PairwiseComparisonMatrix(tuple(labels), np.array(grid, dtype=float) if grid else np.zeros((0, 0)))
    except (ValueError, VhoevalError) as exc:
        r.fail(where, str(exc))


def _scenario(r: _Reader, obj, where) -> ScenarioSpec:
    r.mapping(obj, where, required=("attributes", "networks"), optional=("epochs", "seed"))
    epochs = r.number(obj.get("epochs", DEFAULT_EPOCHS), f"{where}.epochs", integer=True)
    seed = r.number(obj.get("seed", DEFAULT_SEED), f"{where}.seed", integer=True)
    heads = obj["attributes"]
    if not isinstance(heads, list) or not heads:
        r.fail(f"{where}.attributes", "expected a non-empty list")
    names = []
    for i, h in enumerate(heads):
        loc = f"{where}.attributes[{i}]"
        r.mapping(h, loc, required=("name", "direction"), optional=("units",))
        if h["direction"] not in ("benefit", "cost"):
            r.fail(f"{loc}.direction", "must be 'benefit' or 'cost'")
        names.append(h["name"])
    nets_raw = obj["networks"]
    if not isinstance(nets_raw, list) or not nets_raw:
        r.fail(f"{where}.networks", "expected a non-empty list")
    networks = []
    for i, n in enumerate(nets_raw):
        loc = f"{where}.networks[{i}]"
        r.mapping(n, loc, required=("name", "values"))
        vals = r.mapping(n["values"], f"{loc}.values", required=names)
        attrs = []
        for h in heads:
            vloc = f"{loc}.values.{h['name']}"
            cell = vals[h["name"]]
            if isinstance(cell, list):
                if len(cell) != 2:
                    r.fail(vloc, "range must be [low, high]")
                lo, hi = (r.number(x, vloc) for x in cell)
            else:
                lo = hi = r.number(cell, vloc)
            try:
                attrs.append(AttributeSpec(h["name"], h.get("units", ""), h["direction"], lo, hi))
            except VhoevalError as exc:
                r.fail(vloc, str(exc))
        networks.append(Network(n["name"], tuple(attrs)))
    try:
        return ScenarioSpec(tuple(networks), epochs, seed)
    except VhoevalError as exc:
        r.fail(where, str(exc))


def config_from_dict(data: Any, source: str = "<config>") -> RunConfig:
    """Validate a parsed YAML document into a RunConfig.

    Omitted optional keys take the defaults of the named traffic class.
    """
    r = _Reader(source)
    r.mapping(
        data,
        "",
        required=("traffic_class",),
        optional=(
            "schema_version", "methods", "runs", "abnormality", "scenario",
            "attribute_judgments", "parameter_judgments", "output",
        ),
    )
    if data.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        r.fail("schema_version", f"unsupported version {data['schema_version']!r}")
    tc = data["traffic_class"]
    if tc not in TRAFFIC_CLASSES:
        r.fail("traffic_class", f"must be one of {TRAFFIC_CLASSES}, got {tc!r}")
    base = default_config(tc)

    methods = base.methods
    if "methods" in data:
        raw = data["methods"]
        if not isinstance(raw, list) or not raw:
            r.fail("methods", "methods must be non-empty")
        try:
            methods = tuple(Method(str(m).upper()) for m in raw)
        except ValueError:
            r.fail("methods", f"unknown method in {raw}; choose from {[m.value for m in Method]}")
        if len(set(methods)) != len(methods):
            r.fail("methods", "duplicate method")

    runs = r.number(data.get("runs", base.runs), "runs", integer=True)
    if runs < 1:
        r.fail("runs", f"runs must be a positive integer, got {runs}")
    abnormality = data.get("abnormality", base.abnormality)
    if abnormality not in ABNORMALITY_MODES:
        r.fail("abnormality", f"must be one of {ABNORMALITY_MODES}")

    scenario = _scenario(r, data["scenario"], "scenario") if "scenario" in data else base.scenario
    attr_j = (
        _judgments(r, data["attribute_judgments"], "attribute_judgments")
        if "attribute_judgments" in data else base.attribute_judgments
    )
    param_j = (
        _judgments(r, data["parameter_judgments"], "parameter_judgments")
        if "parameter_judgments" in data else base.parameter_judgments
    )
    output = base.output
    if "output" in data:
        o = r.mapping(data["output"], "output", optional=("format", "path"))
        fmt = o.get("format", "table")
        if fmt not in FORMATS:
            r.fail("output.format", f"must be one of {FORMATS}")
        path = o.get("path")
        if path is not None and not isinstance(path, str):
            r.fail("output.path", "expected a string or null")
        output = OutputSpec(fmt, path)
    try:
        return RunConfig(scenario, tc, methods, attr_j, param_j, runs, abnormality, output)
    except ConfigError as exc:
        r.fail("", str(exc))


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"{path}: {where}parse error: {problem}") from exc
    return config_from_dict(data, str(path))
