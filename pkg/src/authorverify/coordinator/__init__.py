"""Coordinator: case state, the belief-revision state machine and its trace."""

from .config import (
    CROSS_LANGUAGE_DISABLED,
    CROSS_LANGUAGE_WEIGHTS,
    SAME_LANGUAGE_WEIGHTS,
    Budgets,
    EngineConfig,
    Thresholds,
)
from .engine import (
    ADJUST,
    DEBATE,
    FINALIZE,
    MODES,
    RECHECK,
    Action,
    Case,
    CaseResult,
    aggregate_score,
    binary_label,
    classify,
    finalize_violations,
    initialize_case,
    should_stop_early,
    synthesis_violations,
    verify_pair,
)
from .narrative import HEADERS, render_narrative
from .state import (
    WEIGHT_MULTIPLIERS,
    CaseState,
    DebateResult,
    FinalDecision,
    PreliminaryHypothesis,
    ReflectionResult,
    SynthesisResult,
    WeightVector,
    adjust_weights,
)
from .trace import FINAL_STAGE, LogicalClock, TraceRecorder, load_trace, parse_trace, wall_clock

__all__ = [
    "ADJUST", "DEBATE", "FINALIZE", "MODES", "RECHECK", "Action", "Budgets", "CROSS_LANGUAGE_DISABLED",
    "CROSS_LANGUAGE_WEIGHTS", "Case", "CaseResult", "CaseState", "DebateResult", "EngineConfig", "FINAL_STAGE",
    "FinalDecision", "HEADERS", "LogicalClock", "PreliminaryHypothesis", "ReflectionResult",
    "SAME_LANGUAGE_WEIGHTS", "SynthesisResult", "Thresholds", "TraceRecorder", "WEIGHT_MULTIPLIERS",
    "WeightVector", "adjust_weights", "aggregate_score", "binary_label", "classify", "finalize_violations",
    "initialize_case", "load_trace", "parse_trace", "render_narrative", "should_stop_early", "synthesis_violations",
    "verify_pair", "wall_clock",
]
