"""Repeated network-selection episodes over a randomised scenario.

Every epoch redraws the ranged attributes of every candidate network and
lets a ranker pick one.  Two things are measured per episode: how often the
ranking of the survivors changes once the worst network is dropped (ranking
abnormality) and how often the selected network changes between
consecutive epochs (handoffs).

Random numbers come from Philox-4x64 keyed by the scenario seed, with the
epoch index in the high counter word.  Each epoch consumes one block of
``n_networks x n_attributes`` uniforms laid out row-major, so a draw is
addressed by (epoch, network, attribute) and lengthening an episode never
changes earlier epochs.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from vhoeval.decision import (
    AttributeSpec,
    DecisionMatrix,
    Direction,
    Method,
    WeightVector,
    _order,
    _scores,
    rank,
)
from vhoeval.errors import MatrixError, SimulationError

U64 = 2**64
ABNORMALITY_MODES = ("order", "top")


@dataclass(frozen=True)
class Network:
    name: str
    attributes: tuple[AttributeSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))


@dataclass(frozen=True)
class ScenarioSpec:
    networks: tuple[Network, ...]
    epochs: int = 1000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "networks", tuple(self.networks))
        if not self.networks:
            raise SimulationError("scenario needs at least one network")
        if int(self.epochs) != self.epochs or self.epochs < 2:
            raise SimulationError(f"epochs must be an integer >= 2, got {self.epochs}")
        if not 0 <= int(self.seed) < U64:
            raise SimulationError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        object.__setattr__(self, "epochs", int(self.epochs))
        object.__setattr__(self, "seed", int(self.seed))
        ref = self.networks[0]
        sig = [(a.name, a.direction) for a in ref.attributes]
        if not sig:
            raise SimulationError(f"network {ref.name} defines no attributes")
        for net in self.networks[1:]:
            if [(a.name, a.direction) for a in net.attributes] != sig:
                raise SimulationError(
                    f"network {net.name} attributes differ from {ref.name}"
                )

    @property
    def network_names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.networks)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.networks[0].attributes)

    @property
    def benefit_mask(self) -> np.ndarray:
        return np.array(
            [a.direction is Direction.BENEFIT for a in self.networks[0].attributes]
        )

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([[a.low for a in n.attributes] for n in self.networks])
        hi = np.array([[a.high for a in n.attributes] for n in self.networks])
        return lo, hi

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return ScenarioSpec(self.networks, self.epochs, seed % U64)


@dataclass(frozen=True)
class EpisodeMetrics:
    method: Method
    abnormality_pct: float
    handoff_pct: float
    selections: tuple[int, ...]
    seed: int = 0


@dataclass(frozen=True)
class MethodSummary:
    method: Method
    abnormality_pct: float
    handoff_pct: float
    runs: int


def heterogeneous_scenario(epochs: int = 1000, seed: int = 0) -> ScenarioSpec:
    """Two UMTS cells, two WLANs and two WiMAX cells.

    Attributes: cost per byte, security, available bandwidth, delay, jitter
    and loss.  Security and bandwidth are benefits, the rest are costs.
    """
    B, C = Direction.BENEFIT, Direction.COST
    rows = {
        "UMTS1": (60, 70, (0.1, 2), (25, 50), (5, 10), (20, 80)),
        "UMTS2": (80, 90, (0.1, 2), (25, 50), (5, 10), (20, 80)),
        "WLAN1": (10, 50, (1, 11), (100, 150), (10, 20), (20, 80)),
        "WLAN2": (5, 50, (1, 11), (100, 150), (10, 20), (20, 80)),
        "WIMAX1": (50, 60, (1, 60), (60, 100), (3, 10), (20, 80)),
        "WIMAX2": (40, 60, (1, 60), (60, 100), (3, 10), (20, 80)),
    }
    heads = (("CB", "%", C), ("S", "%", B), ("AB", "Mbps", B),
             ("D", "ms", C), ("J", "ms", C), ("L", "per 10^6", C))
    networks = []
    for name, cells in rows.items():
        attrs = []
        for (attr, units, direction), cell in zip(heads, cells):
            lo, hi = cell if isinstance(cell, tuple) else (cell, cell)
            attrs.append(AttributeSpec(attr, units, direction, lo, hi))
        networks.append(Network(name, tuple(attrs)))
    return ScenarioSpec(tuple(networks), epochs, seed)


def _uniform_block(seed: int, epoch: int, shape: tuple[int, int]) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, epoch])
    return np.random.Generator(bitgen).random(shape)


def _draw(lo, hi, u):
    return np.where(lo == hi, lo, lo + (hi - lo) * u)


def sample_decision_matrix(s: ScenarioSpec, epoch: int) -> DecisionMatrix:
    """Decision matrix seen at ``epoch``; deterministic in (seed, epoch)."""
    if not 0 <= epoch:
        raise SimulationError(f"negative epoch {epoch}")
    lo, hi = s.bounds()
    values = _draw(lo, hi, _uniform_block(s.seed, epoch, lo.shape))
    return DecisionMatrix(s.network_names, s.networks[0].attributes, values)


@functools.lru_cache(maxsize=16)
def _episode_values(s: ScenarioSpec) -> np.ndarray:
    lo, hi = s.bounds()
    u = np.stack([_uniform_block(s.seed, e, lo.shape) for e in range(s.epochs)])
    values = _draw(lo, hi, u)
    values.setflags(write=False)
    return values


def _drop_rows(values: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Remove row ``rows[b]`` from each batch item ``values[b]``."""
    n = values.shape[-2]
    keep = np.arange(n)[None, :] != rows[:, None]
    return values[keep].reshape(values.shape[0], n - 1, values.shape[-1])


def _abnormal_flags(method, values, benefit, w, mode="order") -> tuple[np.ndarray, np.ndarray]:
    """Per-item best index and abnormality flag for a batch of matrices."""
    scores = _scores(method, values, benefit, w)
    order = _order(method, scores)
    n = values.shape[-2]
    best = order[:, 0]
    if n < 3:
        return best, np.zeros(len(values), dtype=bool)
    worst = order[:, -1]
    sub_order = _order(method, _scores(method, _drop_rows(values, worst), benefit, w))
    # Map survivor positions back to original indices.
    survivors = np.sort(order[:, :-1], axis=1)
    reranked = np.take_along_axis(survivors, sub_order, axis=1)
    original = order[:, :-1]
    if mode == "top":
        return best, reranked[:, 0] != original[:, 0]
    return best, np.any(reranked != original, axis=1)


def detect_abnormality(
    m: DecisionMatrix, w: WeightVector, method: Method | str, mode: str = "order"
) -> bool:
    """True when dropping the worst-ranked alternative reorders the rest.

    ``mode="order"`` flags any change in the survivors' order,
    ``mode="top"`` only a change of the top choice.  Fewer than three
    alternatives never count as abnormal.
    """
    if mode not in ABNORMALITY_MODES:
        raise ValueError(f"abnormality mode must be one of {ABNORMALITY_MODES}")
    full = rank(m, w, method)
    if len(m.alternatives) < 3:
        return False
    survivors = sorted(full.order[:-1])
    sub = rank(m.subset(survivors), w, method)
    reranked = [survivors[i] for i in sub.order]
    original = list(full.order[:-1])
    if mode == "top":
        return reranked[0] != original[0]
    return reranked != original


def run_episode(
    s: ScenarioSpec, method: Method | str, w: WeightVector, abnormality: str = "order"
) -> EpisodeMetrics:
    method = Method(method)
    if abnormality not in ABNORMALITY_MODES:
        raise ValueError(f"abnormality mode must be one of {ABNORMALITY_MODES}")
    n_attr = len(s.attribute_names)
    if len(w) != n_attr:
        raise SimulationError(f"weight length {len(w)} does not match {n_attr} attributes")
    values = _episode_values(s)
    try:
        with np.errstate(divide="raise", over="raise", invalid="raise"):
            best, flags = _abnormal_flags(method, values, s.benefit_mask, w.as_array(), abnormality)
    except (MatrixError, FloatingPointError):
        _locate_failure(s, method, w, values)
        raise
    changes = int(np.count_nonzero(best[1:] != best[:-1]))
    return EpisodeMetrics(
        method=method,
        abnormality_pct=100.0 * int(flags.sum()) / s.epochs,
        handoff_pct=100.0 * changes / (s.epochs - 1),
        selections=tuple(int(b) for b in best),
        seed=s.seed,
    )


def _locate_failure(s, method, w, values):
    for e in range(len(values)):
        m = DecisionMatrix(s.network_names, s.networks[0].attributes, values[e])
        try:
            with np.errstate(divide="raise", over="raise", invalid="raise"):
                detect_abnormality(m, w, method)
        except (MatrixError, FloatingPointError) as exc:
            raise SimulationError(f"epoch {e}: {method.value} failed: {exc}") from exc


def summarize_metrics(runs: Sequence[EpisodeMetrics]) -> list[MethodSummary]:
    """Mean abnormality and handoff percentages per method, in method order."""
    if not runs:
        raise SimulationError("no runs to summarise")
    grouped: dict[Method, list[EpisodeMetrics]] = {}
    for r in runs:
        grouped.setdefault(Method(r.method), []).append(r)
    return [
        MethodSummary(
            method=m,
            abnormality_pct=math.fsum(r.abnormality_pct for r in grouped[m]) / len(grouped[m]),
            handoff_pct=math.fsum(r.handoff_pct for r in grouped[m]) / len(grouped[m]),
            runs=len(grouped[m]),
        )
        for m in Method
        if m in grouped
    ]


def run_seeds(
    s: ScenarioSpec,
    methods: Iterable[Method],
    w: WeightVector,
    runs: int,
    abnormality: str = "order",
) -> list[EpisodeMetrics]:
    """Run ``runs`` episodes per method with seeds ``s.seed + r``.

    Results are ordered by method, then by run index.
    """
    methods = [Method(m) for m in methods]
    out = {m: [] for m in methods}
    for r in range(runs):
        spec = s.with_seed(s.seed + r)
        for m in methods:
            out[m].append(run_episode(spec, m, w, abnormality))
    return [x for m in methods for x in out[m]]
