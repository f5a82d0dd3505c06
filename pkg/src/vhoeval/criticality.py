"""Criticality-index evaluation of handover decision methods.

Measured per-method metrics are normalised by their column maximum, mapped
onto the five-level scale {1, 3, 5, 7, 9}, weighted by AHP and condensed
into a criticality index per method.  The highest index is recommended.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vhoeval.ahp import PairwiseComparisonMatrix, ahp_weights
from vhoeval.decision import Direction, WeightVector
from vhoeval.errors import MatrixError

LEVELS = (1, 3, 5, 7, 9)
# Lower band edges, tested with strict ">", from the top band down.
BAND_EDGES = (0.8, 0.6, 0.4, 0.2)

RANKING_ABNORMALITY = "ranking_abnormality"
NUMBER_OF_HANDOFFS = "number_of_handoffs"


@dataclass(frozen=True)
class Parameter:
    name: str
    direction: Direction = Direction.COST

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))


DEFAULT_PARAMETERS = (Parameter(RANKING_ABNORMALITY), Parameter(NUMBER_OF_HANDOFFS))


@dataclass(frozen=True, eq=False)
class EvaluationMatrix:
    algorithms: tuple[str, ...]
    parameters: tuple[Parameter, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        v = np.array(self.values, dtype=float)
        if not self.algorithms or not self.parameters:
            raise MatrixError("evaluation matrix needs at least one algorithm and one parameter")
        if v.shape != (len(self.algorithms), len(self.parameters)):
            raise MatrixError(
                f"dimension mismatch: grid {v.shape} vs {len(self.algorithms)} "
                f"algorithms x {len(self.parameters)} parameters"
            )
        bad = np.argwhere(~np.isfinite(v) | (v < 0))
        if bad.size:
            i, j = bad[0]
            raise MatrixError(
                f"value at ({self.algorithms[i]}, {self.parameters[j].name}) "
                "must be finite and non-negative"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters)


@dataclass(frozen=True, eq=False)
class CriticalityReport:
    evaluation: EvaluationMatrix
    normalized: np.ndarray
    criticality: np.ndarray
    weights: WeightVector
    scale_divisor: int
    indices: np.ndarray
    recommended: tuple[str, ...]
    strict_eq3: bool = False


def normalize_evaluation(em: EvaluationMatrix, strict_eq3: bool = False) -> np.ndarray:
    """Divide every column by its maximum.

    In ``strict_eq3`` mode cost columns use ``min / v`` instead, which puts
    the best (smallest) measurement at 1.
    """
    v = em.values
    vmax = v.max(axis=0)
    for j in np.flatnonzero(vmax <= 0):
        raise MatrixError(f"column {em.parameters[j].name} has zero maximum")
    d = v / vmax
    if strict_eq3:
        for j, p in enumerate(em.parameters):
            if p.direction is Direction.COST:
                col = v[:, j]
                if np.any(col <= 0):
                    raise MatrixError(
                        f"strict cost normalisation needs positive values in {p.name}"
                    )
                d[:, j] = col.min() / col
    return d


def criticality_level(d: float, direction: Direction | str = Direction.COST) -> int:
    """Band a normalised value in (0, 1] onto {1, 3, 5, 7, 9}.

    For cost parameters the largest values are the least favourable and
    land on 1; benefit parameters use the mirrored scale.
    """
    direction = Direction(direction)
    if not 0.0 < d <= 1.0:
        raise MatrixError(f"normalised value {d!r} outside (0, 1]")
    band = len(BAND_EDGES)
    for b, edge in enumerate(BAND_EDGES):
        if d > edge:
            band = b
            break
    if direction is Direction.COST:
        return LEVELS[band]
    return LEVELS[-1 - band]


def _band_direction(p: Parameter, strict_eq3: bool) -> Direction:
    # min/v already inverts a cost column, so it bands like a benefit one.
    if strict_eq3 and p.direction is Direction.COST:
        return Direction.BENEFIT
    return p.direction


def criticality_matrix(em: EvaluationMatrix, strict_eq3: bool = False) -> np.ndarray:
    d = normalize_evaluation(em, strict_eq3)
    c = np.empty(d.shape, dtype=int)
    for j, p in enumerate(em.parameters):
        direction = _band_direction(p, strict_eq3)
        for i in range(d.shape[0]):
            # A zero measurement sits in the bottom band (d <= 0.2).
            x = d[i, j] if d[i, j] > 0 else BAND_EDGES[-1]
            try:
                c[i, j] = criticality_level(x, direction)
            except MatrixError as exc:
                raise MatrixError(f"({em.algorithms[i]}, {p.name}): {exc}") from None
    return c


def criticality_index(c, w: WeightVector) -> tuple[np.ndarray, int]:
    """Per-algorithm index ``100 * sum_j(w_j * c_ij) / n`` where ``n`` is
    the largest level present anywhere in ``c``."""
    c = np.asarray(c)
    if c.ndim != 2 or c.shape[1] != len(w):
        raise MatrixError(
            f"dimension mismatch: criticality grid {c.shape} vs {len(w)} weights"
        )
    n = int(c.max())
    return 100.0 * (c @ w.as_array()) / n, n


def evaluate(
    em: EvaluationMatrix, p: PairwiseComparisonMatrix, strict_eq3: bool = False
) -> CriticalityReport:
    if set(p.labels) != set(em.parameter_names) or len(p.labels) != len(em.parameters):
        raise MatrixError(
            f"judgment labels {p.labels} do not match parameters {em.parameter_names}"
        )
    p = p.reorder(em.parameter_names)
    w = ahp_weights(p)
    d = normalize_evaluation(em, strict_eq3)
    c = criticality_matrix(em, strict_eq3)
    ci, n = criticality_index(c, w)
    # Co-leaders within rounding noise are all recommended.
    leaders = np.isclose(ci, ci.max(), rtol=1e-12, atol=1e-9)
    recommended = tuple(a for a, lead in zip(em.algorithms, leaders) if lead)
    for arr in (d, c, ci):
        arr.setflags(write=False)
    return CriticalityReport(em, d, c, w, n, ci, recommended, strict_eq3)
