"""Evaluation fixtures and the reference-table reproduction check."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from vhoeval.ahp import PairwiseComparisonMatrix
from vhoeval.config import TRAFFIC_CLASSES, _judgments, _Reader
from vhoeval.criticality import CriticalityReport, EvaluationMatrix, Parameter, evaluate
from vhoeval.errors import ConfigError, VhoevalError

CI_TOLERANCE = 0.05
WEIGHT_TOLERANCE = 0.001


@dataclass(frozen=True, eq=False)
class Expected:
    weights: tuple[float, ...] | None = None
    criticality: np.ndarray | None = None
    indices: tuple[float, ...] | None = None


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    traffic_class: str | None
    matrix: EvaluationMatrix
    judgments: PairwiseComparisonMatrix
    expected: Expected = field(default_factory=Expected)


@dataclass(frozen=True, eq=False)
class Check:
    fixture: Fixture
    report: CriticalityReport
    mismatches: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def bundled_fixture_paths() -> list[Path]:
    root = resources.files("vhoeval") / "data" / "fixtures"
    return [Path(str(root / f"{tc}.yaml")) for tc in TRAFFIC_CLASSES]


def fixture_from_dict(data, source: str) -> Fixture:
    r = _Reader(source)
    r.mapping(
        data, "", required=("algorithms", "parameters", "values", "judgments"),
        optional=("traffic_class", "expected"),
    )
    algorithms = r.string_list(data["algorithms"], "algorithms")
    params = []
    if not isinstance(data["parameters"], list):
        r.fail("parameters", "expected a list")
    for i, p in enumerate(data["parameters"]):
        r.mapping(p, f"parameters[{i}]", required=("name",), optional=("direction",))
        try:
            params.append(Parameter(p["name"], p.get("direction", "cost")))
        except ValueError:
            r.fail(f"parameters[{i}].direction", "must be 'benefit' or 'cost'")
    rows = data["values"]
    if not isinstance(rows, list) or len(rows) != len(algorithms):
        r.fail("values", f"expected {len(algorithms)} rows, one per algorithm")
    grid = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(params):
            r.fail(f"values[{i}]", f"expected {len(params)} values")
        grid.append([r.number(x, f"values[{i}][{j}]") for j, x in enumerate(row)])
    try:
        em = EvaluationMatrix(tuple(algorithms), tuple(params), np.array(grid))
    except VhoevalError as exc:
        r.fail("values", str(exc))
    judgments = _judgments(r, data["judgments"], "judgments")

    expected = Expected()
    if "expected" in data:
        e = r.mapping(data["expected"], "expected", optional=("weights", "criticality", "indices"))
        expected = Expected(
            weights=tuple(r.number(x, "expected.weights") for x in e["weights"])
            if "weights" in e else None,
            criticality=np.array(e["criticality"], dtype=int) if "criticality" in e else None,
            indices=tuple(r.number(x, "expected.indices") for x in e["indices"])
            if "indices" in e else None,
        )
    name = data.get("traffic_class") or Path(source).stem
    return Fixture(name, data.get("traffic_class"), em, judgments, expected)


def load_fixture(path: str | Path) -> Fixture:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark else ""
        raise ConfigError(f"{path}: {where}malformed fixture: {exc}") from exc
    return fixture_from_dict(data, str(path))


def check_fixture(fx: Fixture, strict_eq3: bool = False) -> Check:
    """Evaluate a fixture and compare against its expected values.

    Criticality levels must match exactly, weights within 0.001 and
    indices within 0.05.
    """
    report = evaluate(fx.matrix, fx.judgments, strict_eq3)
    exp = fx.expected
    algs = fx.matrix.algorithms
    names = fx.matrix.parameter_names
    bad = []
    if exp.weights is not None:
        for name, want, got in zip(names, exp.weights, report.weights.weights):
            if abs(want - got) > WEIGHT_TOLERANCE:
                bad.append(f"{fx.name}: weight[{name}] expected {want} got {got:.4f}")
    if exp.criticality is not None:
        if exp.criticality.shape != report.criticality.shape:
            bad.append(f"{fx.name}: criticality matrix shape {report.criticality.shape} "
                       f"expected {exp.criticality.shape}")
        else:
            for i, j in np.argwhere(exp.criticality != report.criticality):
                bad.append(
                    f"{fx.name}: criticality[{algs[i]}, {names[j]}] expected "
                    f"{exp.criticality[i, j]} got {report.criticality[i, j]}"
                )
    if exp.indices is not None:
        for alg, want, got in zip(algs, exp.indices, report.indices):
            if abs(want - got) > CI_TOLERANCE:
                bad.append(f"{fx.name}: criticality_index[{alg}] expected {want} got {got:.2f}")
    return Check(fx, report, tuple(bad))
