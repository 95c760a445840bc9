"""Case state and the records produced by each coordinator stage."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from ..errors import ContractError
from ..experts import ExpertReport
from ..pair import CodePair
from ..stylometry.profiles import DIMENSIONS

WEIGHT_MULTIPLIERS = {
    "strong_strengthen": 1.5,
    "strengthen": 1.25,
    "neutral": 1.0,
    "weaken": 0.75,
    "strong_weaken": 0.5,
}


@dataclass(frozen=True)
class WeightVector:
    layout: float
    lexical: float
    syntactic: float
    pattern: float

    def __post_init__(self):
        values = self.as_tuple()
        if any(v < 0 for v in values):
            raise ContractError(f"negative weight in {values}")
        if abs(sum(values) - 1.0) > 1e-6:
            raise ContractError(f"weights must sum to 1, got {sum(values)}")

    @classmethod
    def from_mapping(cls, weights: dict) -> "WeightVector":
        return cls(**{d: float(weights[d]) for d in DIMENSIONS})

    @classmethod
    def normalized(cls, raw: dict) -> "WeightVector":
        total = sum(raw[d] for d in DIMENSIONS)
        return cls(**{d: raw[d] / total for d in DIMENSIONS})

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, d) for d in DIMENSIONS)

    def as_dict(self) -> dict:
        return {d: getattr(self, d) for d in DIMENSIONS}

    def __getitem__(self, dimension: str) -> float:
        return getattr(self, dimension)

    def argmax(self) -> str:
        return max(DIMENSIONS, key=lambda d: getattr(self, d))


def adjust_weights(weights: WeightVector, signals: dict) -> WeightVector:
    """Multiply each weight by its signal's factor in [0.5, 1.5] and renormalise."""
    raw = {}
    for d in DIMENSIONS:
        signal = signals.get(d, "neutral")
        if signal not in WEIGHT_MULTIPLIERS:
            raise ContractError(f"unknown weight signal {signal!r} for {d}")
        raw[d] = weights[d] * WEIGHT_MULTIPLIERS[signal]
    if sum(raw.values()) <= 0:
        return weights
    return WeightVector.normalized(raw)


def _pick(cls, payload: dict):
    names = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in payload.items() if k in names})


@dataclass
class PreliminaryHypothesis:
    tendency: str = "uncertain"
    confidence: float = 0.5
    reasoning: list = field(default_factory=list)
    suspected_confounders: list = field(default_factory=list)
    dimension_routing: dict = field(default_factory=dict)
    overall_first_impression: str = ""
    degraded: bool = False
    clamped_from: float | None = None

    def focus_question(self, dimension: str) -> str | None:
        route = self.dimension_routing.get(dimension) or {}
        return route.get("focus_question")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_payload(cls, payload: dict) -> "PreliminaryHypothesis":
        return _pick(cls, payload)


@dataclass
class SynthesisResult:
    per_dimension_summary: list
    overall_assessment: dict
    cross_dimension_analysis: dict = field(default_factory=dict)
    preliminary_update: dict = field(default_factory=dict)
    evidence_balance: dict = field(default_factory=dict)
    what_changed: str = ""
    remaining_questions: list = field(default_factory=list)
    round: int = 0

    def summary_for(self, dimension: str) -> dict | None:
        for item in self.per_dimension_summary:
            if item.get("dimension") == dimension:
                return item
        return None

    def critical_conflict(self) -> tuple | None:
        analysis = self.cross_dimension_analysis or {}
        crit = analysis.get("critical_conflict")
        if crit and len(crit.get("dimensions", [])) == 2:
            return tuple(crit["dimensions"])
        for conflict in analysis.get("conflicts", []) or []:
            if conflict.get("severity") == "critical":
                return tuple(conflict["dimensions"])
        return None

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_payload(cls, payload: dict, round: int = 0) -> "SynthesisResult":
        obj = _pick(cls, payload)
        obj.round = round
        return obj


@dataclass
class ReflectionResult:
    round: int
    evidence_sufficient: bool
    recommendation: str
    assessment: dict = field(default_factory=dict)
    reasoning: str = ""
    suspect_dimensions: list = field(default_factory=list)
    overridden: bool = False
    degraded: bool = False

    def to_dict(self):
        return asdict(self)


@dataclass
class DebateResult:
    debate_topic: str
    proponent: str
    opponent: str
    total_turns: int
    resolution: dict
    final_judgment: str
    confidence_after_debate: float
    recommended_next_action: str | None = None
    turns: list = field(default_factory=list)
    round: int = 0
    resolved_by_judge: bool = True

    def to_dict(self):
        return asdict(self)


@dataclass
class FinalDecision:
    verdict: str
    confidence: float
    evidence_chain: list
    process_alignment: dict
    reasoning: str
    dissenting_opinions: list = field(default_factory=list)
    aggregate_score: float = 0.5
    weights: dict = field(default_factory=dict)
    process: dict = field(default_factory=dict)
    guardrails: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in ("same_author", "different_author", "uncertain"):
            raise ContractError(f"unknown verdict {self.verdict!r}")
        dims = [item["dimension"] for item in self.evidence_chain]
        if sorted(dims) != sorted(DIMENSIONS):
            raise ContractError(f"evidence chain must cover each dimension once, got {dims}")
        total = sum(item["weight"] for item in self.evidence_chain)
        if abs(total - 1.0) > 1e-6:
            raise ContractError(f"evidence chain weights sum to {total}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "FinalDecision":
        return _pick(cls, data)


@dataclass
class CaseState:
    pair: CodePair
    weights: WeightVector
    disabled_tools: frozenset
    preliminary: PreliminaryHypothesis | None = None
    latest_reports: dict = field(default_factory=dict)
    dispatch_reports: dict = field(default_factory=dict)
    synthesis_history: list = field(default_factory=list)
    reflection_history: list = field(default_factory=list)
    debate_history: list = field(default_factory=list)
    recheck_history: list = field(default_factory=list)
    patch_history: list = field(default_factory=list)
    weight_history: list = field(default_factory=list)
    action_history: list = field(default_factory=list)
    pending_signals: dict = field(default_factory=dict)
    round: int = 0
    llm_calls: int = 0
    flags: list = field(default_factory=list)
    expert_traces: dict = field(default_factory=dict)

    @property
    def cross_language(self) -> bool:
        return self.pair.cross_language

    @property
    def debates_used(self) -> int:
        return len(self.debate_history)

    def set_report(self, report: ExpertReport) -> None:
        self.latest_reports[report.dimension] = report

    def similarities(self) -> dict:
        return {d: self.latest_reports[d].similarity_score for d in DIMENSIONS if d in self.latest_reports}

    def debated(self, a: str, b: str) -> bool:
        return any({r.proponent, r.opponent} == {a, b} for r in self.debate_history)
