"""AHP weighting from pairwise comparison matrices."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from vhoeval.decision import WeightVector
from vhoeval.errors import JudgmentError

RECIPROCITY_TOL = 1e-9
SAATY_MIN, SAATY_MAX = 1.0 / 9.0, 9.0
CR_THRESHOLD = 0.1

# Saaty's random consistency indices.
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24}


class ConsistencyWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class PairwiseComparisonMatrix:
    labels: tuple[str, ...]
    judgments: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        a = np.array(self.judgments, dtype=float)
        object.__setattr__(self, "labels", labels)
        k = len(labels)
        if a.shape != (k, k):
            raise JudgmentError(f"judgment grid {a.shape} does not match {k} labels")
        if len(set(labels)) != k:
            raise JudgmentError(f"duplicate criterion labels: {labels}")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            i, j = np.argwhere(~(np.isfinite(a) & (a > 0)))[0]
            raise JudgmentError(f"non-positive judgment at ({labels[i]}, {labels[j]})")
        for i in range(k):
            if a[i, i] != 1.0:
                raise JudgmentError(f"diagonal entry for {labels[i]} must be 1")
            for j in range(i + 1, k):
                if abs(a[i, j] * a[j, i] - 1.0) > RECIPROCITY_TOL:
                    raise JudgmentError(
                        f"reciprocity violated at ({labels[i]}, {labels[j]}): "
                        f"{a[i, j]} * {a[j, i]} != 1"
                    )
        lo, hi = SAATY_MIN * (1 - 1e-12), SAATY_MAX * (1 + 1e-12)
        if np.any(a < lo) or np.any(a > hi):
            raise JudgmentError("judgments must lie within [1/9, 9]")
        a.setflags(write=False)
        object.__setattr__(self, "judgments", a)

    def __eq__(self, other):
        if not isinstance(other, PairwiseComparisonMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.judgments, other.judgments)

    @property
    def size(self) -> int:
        return len(self.labels)

    @classmethod
    def from_weights(cls, labels, weights) -> "PairwiseComparisonMatrix":
        """Perfectly consistent matrix with ``a_ij = w_i / w_j``."""
        w = np.asarray(weights, dtype=float)
        a = w[:, None] / w[None, :]
        np.fill_diagonal(a, 1.0)
        # Force exact reciprocity on the lower triangle.
        iu = np.triu_indices(len(w), 1)
        a[(iu[1], iu[0])] = 1.0 / a[iu]
        return cls(tuple(labels), a)

    def reorder(self, labels) -> "PairwiseComparisonMatrix":
        idx = [self.labels.index(name) for name in labels]
        return PairwiseComparisonMatrix(tuple(labels), self.judgments[np.ix_(idx, idx)])


def _geometric_mean_weights(a: np.ndarray) -> np.ndarray:
    g = np.exp(np.log(a).mean(axis=1))
    return g / g.sum()


def ahp_weights(p: PairwiseComparisonMatrix, warn: bool = True) -> WeightVector:
    """Row geometric means normalised to one.

    Exact for 2x2 and for consistent matrices, and identical to the principal
    eigenvector for 3x3.  With ``warn`` set, a :class:`ConsistencyWarning` is
    issued when the consistency ratio exceeds 0.1.
    """
    w = _geometric_mean_weights(p.judgments)
    if warn and p.size >= 3:
        cr = _cr(p.judgments, w)
        if cr > CR_THRESHOLD:
            warnings.warn(
                f"consistency ratio {cr:.3f} exceeds {CR_THRESHOLD} for {p.labels}",
                ConsistencyWarning,
                stacklevel=2,
            )
    return WeightVector.normalized(w, p.labels)


def _cr(a: np.ndarray, w: np.ndarray) -> float:
    k = a.shape[0]
    if k <= 2:
        return 0.0
    if k not in RANDOM_INDEX:
        raise JudgmentError(f"no random index tabulated for {k} criteria")
    lam = float(np.mean(a @ w / w))
    return ((lam - k) / (k - 1)) / RANDOM_INDEX[k]


def consistency_ratio(p: PairwiseComparisonMatrix) -> float:
    """Saaty consistency ratio with lambda_max estimated as mean((A w)_i / w_i)."""
    if p.size < 2:
        raise JudgmentError("consistency ratio needs at least two criteria")
    return _cr(p.judgments, _geometric_mean_weights(p.judgments))
