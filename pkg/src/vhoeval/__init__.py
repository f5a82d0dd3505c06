"""Network-selection rankers, a vertical-handover simulator and a
criticality-index evaluator for comparing handover decision methods."""

__version__ = "0.1.0"

from vhoeval.errors import (
    ConfigError,
    JudgmentError,
    MatrixError,
    SimulationError,
    VhoevalError,
)
from vhoeval.decision import (
    AttributeSpec,
    DecisionMatrix,
    Direction,
    Method,
    Ranking,
    WeightVector,
    normalize_minmax,
    rank,
    rank_dia,
    rank_gra,
    rank_topsis,
    validate_matrix,
)
from vhoeval.ahp import PairwiseComparisonMatrix, ahp_weights, consistency_ratio
from vhoeval.criticality import (
    CriticalityReport,
    EvaluationMatrix,
    Parameter,
    criticality_index,
    criticality_level,
    criticality_matrix,
    evaluate,
    normalize_evaluation,
)
from vhoeval.simulator import (
    EpisodeMetrics,
    MethodSummary,
    Network,
    ScenarioSpec,
    detect_abnormality,
    heterogeneous_scenario,
    run_episode,
    sample_decision_matrix,
    summarize_metrics,
)
