"""Training-free code authorship verification with four stylometric experts."""

from .coordinator import Case, CaseResult, EngineConfig, FinalDecision, WeightVector, verify_pair
from .errors import AuthorVerifyError
from .estimators import AuthorshipVerifier, StyleProfileTransformer
from .evaluation import (
    ConfusionMatrix,
    EvalResult,
    PairSpec,
    build_cross_language_pairs,
    compute_metrics,
    consensus_rate,
    expert_consensus,
    run_ablation,
    sample_pairs,
)
from .experts import ExpertEvidence, ExpertReport, compare_dimension, run_expert
from .llm import HeuristicBackend, LiveBackend, ReplayBackend, ScriptedBackend
from .pair import CodePair
from .stylometry import CodeSample, extract_tool_profile, fingerprint_similarity, tokenize

__version__ = "0.1.0"

__all__ = [
    "AuthorVerifyError", "AuthorshipVerifier", "Case", "CaseResult", "CodePair", "CodeSample", "ConfusionMatrix",
    "EngineConfig", "EvalResult", "ExpertEvidence", "ExpertReport", "FinalDecision", "HeuristicBackend",
    "LiveBackend", "PairSpec", "ReplayBackend", "ScriptedBackend", "StyleProfileTransformer", "WeightVector",
    "build_cross_language_pairs", "compare_dimension", "compute_metrics", "consensus_rate", "expert_consensus",
    "extract_tool_profile", "fingerprint_similarity", "run_ablation", "run_expert", "sample_pairs", "tokenize",
    "verify_pair",
]
