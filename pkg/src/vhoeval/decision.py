"""Decision matrices and the three network rankers (TOPSIS, GRA, DIA).

The public ``rank_*`` functions take a :class:`DecisionMatrix`.  The
underscore-prefixed ``*_scores`` helpers work on raw arrays shaped
``(..., n_alternatives, n_attributes)`` so the simulator can rank every
epoch of an episode in one vectorised call.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from vhoeval.errors import MatrixError

WEIGHT_SUM_TOL = 1e-9
GRA_XI = 0.5


class Direction(str, enum.Enum):
    BENEFIT = "benefit"
    COST = "cost"


class Method(str, enum.Enum):
    TOPSIS = "TOPSIS"
    GRA = "GRA"
    DIA = "DIA"

    @property
    def descending(self) -> bool:
        """True when a larger score is better."""
        return self is not Method.DIA


@dataclass(frozen=True)
class AttributeSpec:
    """One network attribute.  A fixed value is stored as ``low == high``."""

    name: str
    units: str = ""
    direction: Direction = Direction.BENEFIT
    low: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        lo, hi = float(self.low), float(self.high)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise MatrixError(f"attribute {self.name!r}: non-finite bound")
        if lo < 0:
            raise MatrixError(f"attribute {self.name!r}: negative value {lo}")
        if lo > hi:
            raise MatrixError(f"attribute {self.name!r}: range low {lo} > high {hi}")
        object.__setattr__(self, "low", lo)
        object.__setattr__(self, "high", hi)

    @classmethod
    def fixed(cls, name, value, direction=Direction.BENEFIT, units=""):
        return cls(name, units, direction, value, value)

    @classmethod
    def uniform(cls, name, low, high, direction=Direction.BENEFIT, units=""):
        return cls(name, units, direction, low, high)

    @property
    def is_fixed(self) -> bool:
        return self.low == self.high


@dataclass(frozen=True, eq=False)
class DecisionMatrix:
    alternatives: tuple[str, ...]
    attributes: tuple[AttributeSpec, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def benefit_mask(self) -> np.ndarray:
        return np.array([a.direction is Direction.BENEFIT for a in self.attributes])

    def subset(self, rows: Sequence[int]) -> "DecisionMatrix":
        rows = list(rows)
        return DecisionMatrix(
            tuple(self.alternatives[i] for i in rows), self.attributes, self.values[rows]
        )


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", tuple(self.labels))
        if not w:
            raise MatrixError("empty weight vector")
        if any(not math.isfinite(x) or x < 0 for x in w):
            raise MatrixError(f"weights must be finite and non-negative: {w}")
        if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
            raise MatrixError(f"weights must sum to 1, got {math.fsum(w)!r}")
        if self.labels and len(self.labels) != len(w):
            raise MatrixError("weight labels do not match weight count")

    @classmethod
    def normalized(cls, raw, labels=()) -> "WeightVector":
        raw = [float(x) for x in raw]
        total = math.fsum(raw)
        return cls(tuple(x / total for x in raw), tuple(labels))

    @classmethod
    def equal(cls, k: int, labels=()) -> "WeightVector":
        return cls((1.0 / k,) * k, tuple(labels))

    def __len__(self):
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)


@dataclass(frozen=True, eq=False)
class Ranking:
    """Ranker output.  ``scores`` are closeness (TOPSIS), grey relational
    grade (GRA) or distance to the ideal (DIA)."""

    method: Method
    scores: np.ndarray
    order: tuple[int, ...]
    best: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        object.__setattr__(self, "best", self.order[0])


def validate_matrix(m: DecisionMatrix) -> DecisionMatrix:
    if len(m.alternatives) == 0:
        raise MatrixError("empty alternatives")
    if len(m.attributes) == 0:
        raise MatrixError("empty attributes")
    if m.values.ndim != 2 or m.values.shape != (len(m.alternatives), len(m.attributes)):
        raise MatrixError(
            f"dimension mismatch: grid {m.values.shape} vs "
            f"{len(m.alternatives)} alternatives x {len(m.attributes)} attributes"
        )
    bad = np.argwhere(~np.isfinite(m.values))
    if bad.size:
        i, j = bad[0]
        raise MatrixError(
            f"non-finite value at row {i} ({m.alternatives[i]}), "
            f"column {j} ({m.attributes[j].name})"
        )
    return m


def _minmax(values: np.ndarray, benefit: np.ndarray) -> np.ndarray:
    lo = values.min(axis=-2, keepdims=True)
    hi = values.max(axis=-2, keepdims=True)
    span = hi - lo
    constant = span == 0
    span = np.where(constant, 1.0, span)
    r = np.where(benefit, (values - lo) / span, (hi - values) / span)
    # A constant column leaves every alternative equally ideal.
    return np.where(constant, 1.0, r)


def normalize_minmax(m: DecisionMatrix) -> np.ndarray:
    r = _minmax(m.values, m.benefit_mask)
    if not np.all(np.isfinite(r)):
        raise MatrixError("non-finite value in min-max normalisation")
    return r


def _topsis_scores(values, benefit, w):
    norm = np.sqrt((values * values).sum(axis=-2, keepdims=True))
    if np.any(norm == 0):
        raise MatrixError("all-zero column: TOPSIS vector normalisation undefined")
    v = values / norm * w
    vmax = v.max(axis=-2, keepdims=True)
    vmin = v.min(axis=-2, keepdims=True)
    ideal = np.where(benefit, vmax, vmin)
    anti = np.where(benefit, vmin, vmax)
    d_plus = np.sqrt(((v - ideal) ** 2).sum(axis=-1))
    d_minus = np.sqrt(((v - anti) ** 2).sum(axis=-1))
    denom = d_plus + d_minus
    # denom is zero only when every row is identical: full tie.
    return np.divide(d_minus, denom, out=np.ones_like(denom), where=denom > 0)


def _gra_scores(values, benefit, w, xi=GRA_XI):
    delta = np.abs(1.0 - _minmax(values, benefit))
    dmin = delta.min(axis=(-2, -1), keepdims=True)
    dmax = delta.max(axis=(-2, -1), keepdims=True)
    num = dmin + xi * dmax
    den = delta + xi * dmax
    gamma = np.divide(num, den, out=np.ones_like(delta), where=den > 0)
    return (gamma * w).sum(axis=-1)


def _dia_scores(values, benefit, w):
    t = _minmax(values, benefit) * w
    pia = t.max(axis=-2, keepdims=True)
    return np.sqrt(((t - pia) ** 2).sum(axis=-1))


def _scores(method: Method, values, benefit, w, xi=GRA_XI) -> np.ndarray:
    if method is Method.TOPSIS:
        return _topsis_scores(values, benefit, w)
    if method is Method.GRA:
        return _gra_scores(values, benefit, w, xi)
    return _dia_scores(values, benefit, w)


def _order(method: Method, scores: np.ndarray) -> np.ndarray:
    # Stable sort: equal scores keep the lower alternative index first.
    key = -scores if method.descending else scores
    return np.argsort(key, axis=-1, kind="stable")


def rank(m: DecisionMatrix, w: WeightVector, method: Method | str, xi: float = GRA_XI) -> Ranking:
    method = Method(method)
    validate_matrix(m)
    if len(w) != len(m.attributes):
        raise MatrixError(
            f"weight length {len(w)} does not match {len(m.attributes)} attributes"
        )
    scores = _scores(method, m.values, m.benefit_mask, w.as_array(), xi)
    if not np.all(np.isfinite(scores)):
        raise MatrixError(f"{method.value}: non-finite score")
    return Ranking(method, scores, tuple(_order(method, scores)))


def rank_topsis(m: DecisionMatrix, w: WeightVector) -> Ranking:
    """Relative closeness to the positive ideal on the vector-normalised,
    weighted grid; higher is better."""
    return rank(m, w, Method.TOPSIS)


def rank_gra(m: DecisionMatrix, w: WeightVector, xi: float = GRA_XI) -> Ranking:
    """Weighted grey relational grade against the all-ideal reference
    series of the min-max normalised grid; higher is better.

    ``xi`` is the distinguishing coefficient.
    """
    return rank(m, w, Method.GRA, xi)


def rank_dia(m: DecisionMatrix, w: WeightVector) -> Ranking:
    """Euclidean distance to the positive ideal alternative on the weighted
    min-max grid; lower is better."""
    return rank(m, w, Method.DIA)
