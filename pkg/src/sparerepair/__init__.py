"""Repairability simulation and enhancement for locally shared spare networks."""

from .enhancement import (
    EdgeSuggestion,
    EnhancementStrategy,
    build_spectrum,
    enhance,
    rank_spares,
    rank_units,
    suggest_edge,
)
from .evaluation import (
    Curve,
    CurvePoint,
    EnumerationBudgetExceeded,
    Estimator,
    adversarial_survival,
    estimate_curve_mc,
    exact_curve_offline,
    exact_curve_policy,
    mean_repairability,
    structural_points,
)
from .network import (
    INFINITY,
    NetworkError,
    SpareNetwork,
    SystemState,
    essentiality,
    generate_balanced_ring,
    generate_random,
    make_network,
    min_deg,
    neighbors,
    parse_network,
    reference_network,
    serialize_network,
    spare,
    unit,
)
from .policies import (
    Decision,
    ImmediateReplacementFailure,
    Policy,
    PolicyKind,
    ScriptedPolicy,
    TieBreak,
    candidate_spares,
    select_spare,
)
from .repair import RunOutcome, apply_repair, is_globally_repairable, run_sequence

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "CurvePoint",
    "Decision",
    "EdgeSuggestion",
    "EnhancementStrategy",
    "EnumerationBudgetExceeded",
    "Estimator",
    "INFINITY",
    "ImmediateReplacementFailure",
    "NetworkError",
    "Policy",
    "PolicyKind",
    "RunOutcome",
    "ScriptedPolicy",
    "SpareNetwork",
    "SystemState",
    "TieBreak",
    "adversarial_survival",
    "apply_repair",
    "build_spectrum",
    "candidate_spares",
    "enhance",
    "essentiality",
    "estimate_curve_mc",
    "exact_curve_offline",
    "exact_curve_policy",
    "generate_balanced_ring",
    "generate_random",
    "is_globally_repairable",
    "make_network",
    "mean_repairability",
    "min_deg",
    "neighbors",
    "parse_network",
    "rank_spares",
    "rank_units",
    "reference_network",
    "run_sequence",
    "select_spare",
    "serialize_network",
    "spare",
    "structural_points",
    "suggest_edge",
    "unit",
]
