"""The four dimension experts.

Each expert runs a step-budgeted tool-selection loop over one sample
(:func:`run_expert`) and then compares the two samples of a pair
(:func:`compare_dimension`). The model proposes; the engine enforces
coverage, the no-repeat rule and the step budget.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .errors import (
    BudgetExceeded,
    ConfigurationError,
    ContractError,
    RegistryError,
    ReportParseError,
    StepParseError,
    TransportError,
)
from .llm.backends import ChatRequest, Tag
from .llm.parsing import parse_structured
from .pair import CodePair
from .prompts import PromptPack, default_pack
from .stylometry.fingerprint import fingerprint_similarity
from .stylometry.profiles import (
    DIMENSION_TOOLS,
    DIMENSIONS,
    SampleAnalysis,
    ToolProfile,
    canonical_tool_name,
    extract_tool_profile,
)
from .stylometry.tokenizer import CodeSample

SAME_THRESHOLD = 0.62
DIFFERENT_THRESHOLD = 0.38
LEXICAL_CAP = 0.62
PATTERN_FLOOR = 0.35
SCALE_RATIO = 3.0
TOOL_CONFIDENCE = 0.6
DEGRADED_TOOL_CONFIDENCE = 0.35
NO_SIGNAL_CONFIDENCE = 0.3
FINGERPRINT_TOOL = "fingerprint"

DISPLAY_NAMES = {"layout": "Layout", "lexical": "Lexical", "syntactic": "Syntactic", "pattern": "Pattern"}

# what each dimension should weigh, treat as contrast, and discount in direct comparison
DIMENSION_FOCUS = {
    "layout": {
        "stable": ["indent unit and depth habits", "combinations of brace and delimiter placement",
                   "fine spacing around operators and commas", "rhythm of blank lines", "where comments sit"],
        "different": ["incompatible indent units", "consistent disagreement on brace placement",
                      "clearly different line density", "opposite spacing micro-habits"],
        "confounders": ["automatic formatters", "wrapping caused by code size", "shared boilerplate"],
    },
    "lexical": {
        "stable": ["identifier shape and casing", "habits for temporary names", "masked token templates",
                   "recurring operator and keyword phrasing"],
        "different": ["clashing naming discipline", "different identifier lengths", "different keyword phrasing"],
        "confounders": ["problem vocabulary", "language keywords", "n-gram overlap from templates"],
    },
    "syntactic": {
        "stable": ["how the program is decomposed", "how control structures are combined",
                   "ordering of structural blocks", "structural preferences that survive a language change"],
        "different": ["different decomposition", "different guard and nesting style",
                      "recursion versus iteration"],
        "confounders": ["search and dynamic-programming templates", "parser fallbacks", "problem difficulty"],
    },
    "pattern": {
        "stable": ["problem decomposition", "where complexity concentrates", "choice of APIs and idioms",
                   "semantic naming habits"],
        "different": ["different decomposition depth", "different data-structure choices",
                      "different defensive habits"],
        "confounders": ["problem requirements", "ecosystem idioms", "small programs with little evidence"],
    },
}


def classify_score(score: float, same: float = SAME_THRESHOLD, different: float = DIFFERENT_THRESHOLD) -> str:
    if score >= same:
        return "same_author"
    if score <= different:
        return "different_author"
    return "uncertain"


def dump_payload(payload) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=1)


# -- types ----------------------------------------------------------------------

@dataclass
class ExpertEvidence:
    summary: str
    signals: list
    confidence: float

    def __post_init__(self):
        if not 0.0 <= float(self.confidence) <= 1.0:
            raise ContractError(f"evidence confidence {self.confidence} outside [0, 1]")
        self.confidence = float(self.confidence)
        self.signals = [str(s) for s in self.signals]

    def to_dict(self):
        return {"summary": self.summary, "signals": list(self.signals), "confidence": self.confidence}

    @classmethod
    def from_dict(cls, data):
        return cls(str(data["summary"]), list(data["signals"]), data["confidence"])


@dataclass
class ReActStep:
    thought: str
    action: dict
    stop: bool
    evidence: ExpertEvidence | None = None

    @property
    def tool(self) -> str | None:
        return self.action.get("name") if self.action.get("type") == "tool" else None

    def to_dict(self):
        out = {"thought": self.thought, "action": dict(self.action), "stop": self.stop}
        if self.evidence is not None:
            out["evidence"] = self.evidence.to_dict()
        return out


@dataclass
class TraceStep:
    step_index: int
    step: ReActStep | None
    profile: ToolProfile | None = None
    raw: str | None = None
    substituted_from: str | None = None
    forced: bool = False
    note: str | None = None

    def to_dict(self):
        return {
            "step_index": self.step_index,
            "step": self.step.to_dict() if self.step else None,
            "profile": self.profile.to_dict() if self.profile else None,
            "raw": self.raw,
            "substituted_from": self.substituted_from,
            "forced": self.forced,
            "note": self.note,
        }


@dataclass
class ToolTrace:
    dimension: str
    steps: list = field(default_factory=list)

    @property
    def invoked_tools(self) -> list[str]:
        return [s.profile.tool_name for s in self.steps if s.profile is not None]

    @property
    def tool_steps(self) -> int:
        return len(self.invoked_tools)

    @property
    def substitutions(self) -> list[TraceStep]:
        return [s for s in self.steps if s.substituted_from is not None]

    def profiles(self) -> dict[str, ToolProfile]:
        return {s.profile.tool_name: s.profile for s in self.steps if s.profile is not None}

    def to_dict(self):
        return {"dimension": self.dimension, "steps": [s.to_dict() for s in self.steps]}


REPORT_LISTS = ("matches", "differences", "author_stable_matches", "template_or_task_matches", "high_risk_confounders")


@dataclass
class ExpertReport:
    dimension: str
    tendency: str
    similarity_score: float
    confidence: float
    matches: list = field(default_factory=list)
    differences: list = field(default_factory=list)
    author_stable_matches: list = field(default_factory=list)
    template_or_task_matches: list = field(default_factory=list)
    high_risk_confounders: list = field(default_factory=list)
    signal_quality: str = "medium"
    confounder_risk: str = "medium"
    reasoning: str = ""
    degraded: bool = False
    profiles_degraded: bool = False
    adjustments: list = field(default_factory=list)
    weight_recommendation: str | None = None
    gap_is_task_driven: bool = False
    source: str = "comparator"

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ContractError(f"unknown dimension {self.dimension!r}")
        if self.tendency not in ("same_author", "different_author", "uncertain"):
            raise ContractError(f"unknown tendency {self.tendency!r}")
        for name in ("similarity_score", "confidence"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise ContractError(f"{name}={value} outside [0, 1]")
            setattr(self, name, value)

    @property
    def is_degraded(self) -> bool:
        return self.degraded or self.profiles_degraded

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def fallback_report(dimension: str, reason: str) -> ExpertReport:
    """Stand-in report when a comparison could not be obtained."""
    return ExpertReport(dimension, "uncertain", 0.5, 0.3, signal_quality="low", confounder_risk="high",
                        reasoning=reason, degraded=True, source="fallback")


# -- the tool loop --------------------------------------------------------------

def enabled_tools(dimension: str, disabled=()) -> list[str]:
    if dimension not in DIMENSION_TOOLS:
        raise ContractError(f"unknown dimension {dimension!r}")
    off = {_short(t) for t in disabled}
    tools = [t for t in DIMENSION_TOOLS[dimension] if _short(t) not in off]
    if not tools:
        raise ConfigurationError(f"every {dimension} tool is disabled")
    return tools


def _short(name: str) -> str:
    name = str(name)
    if name.startswith("extract_"):
        name = name[len("extract_"):]
    return name[:-len("_profile")] if name.endswith("_profile") else name


def parse_react_step(raw_text: str) -> ReActStep:
    """Parse one loop step; the stop flag, a stop action and evidence must agree."""
    payload = parse_structured(raw_text, "react_step", error_cls=StepParseError)
    action = payload["action"]
    stop = payload["stop"]
    has_evidence = payload.get("evidence") is not None
    if stop != (action["type"] == "stop"):
        raise StepParseError("stop flag disagrees with action type", raw=raw_text, field="stop")
    if stop != has_evidence:
        raise StepParseError("evidence must be present exactly when stopping", raw=raw_text, field="evidence")
    if action["type"] == "tool" and not action.get("name"):
        raise StepParseError("tool action without a tool name", raw=raw_text, field="action.name")
    evidence = None
    if has_evidence:
        ev = payload["evidence"]
        if not ev["signals"]:
            raise StepParseError("stop evidence needs at least one signal", raw=raw_text, field="evidence.signals")
        evidence = ExpertEvidence(ev["summary"], ev["signals"], ev["confidence"])
    return ReActStep(payload["thought"], dict(action), stop, evidence)


def _scalar_summary(profile: ToolProfile, limit: int = 4) -> str:
    parts = []
    for key, value in profile.metrics.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            continue
        parts.append(f"{key}={value:.3g}" if isinstance(value, float) else f"{key}={value}")
        if len(parts) == limit:
            break
    if not parts:
        for key, value in profile.metrics.items():
            if isinstance(value, list) and value:
                parts.append(f"{key} top={value[0]}")
                break
    tag = " (degraded)" if profile.degraded else ""
    return f"{profile.tool_name}{tag}: " + (", ".join(parts) or "no signal")


def forced_evidence(trace: ToolTrace, enabled: list[str], reason: str = "budget exhausted") -> ExpertEvidence:
    """Evidence the engine writes itself when the loop is cut short."""
    profiles = list(trace.profiles().values())
    signals = [_scalar_summary(p) for p in profiles]
    uncovered = [t for t in enabled if t not in trace.profiles()]
    if uncovered:
        signals.append("uncovered: " + ", ".join(uncovered))
    if profiles:
        conf = sum(DEGRADED_TOOL_CONFIDENCE if p.degraded else TOOL_CONFIDENCE for p in profiles) / len(profiles)
    else:
        conf = NO_SIGNAL_CONFIDENCE
    return ExpertEvidence(reason, signals or ["no observations"], round(conf, 6))


def _react_system(dimension: str, tools: list[str], pack: PromptPack) -> str:
    base = pack.render("common", "react", display_name=DISPLAY_NAMES[dimension], dimension=dimension,
                       tools="\n".join(f"- {t}" for t in tools), tool_count=len(tools))
    if (pack.root / dimension / "react.txt").is_file():
        return pack.render(dimension, "react", base=base.rstrip("\n"))
    return base


def run_expert(dimension: str, sample: CodeSample, max_steps: int, backend, *, disabled=(), round: int = 1,
               side: str = "a", prompts: PromptPack | None = None, focus_question: str | None = None,
               on_call=None):
    """Run one dimension's tool loop on one sample.

    Returns ``(ExpertEvidence, ToolTrace)``. ``on_call(tag, request, raw)`` is
    invoked after every completion that returned text (used for case traces).
    """
    if max_steps < 1:
        raise ContractError("max_steps must be at least 1")
    tools = enabled_tools(dimension, disabled)
    pack = prompts or default_pack()
    system = _react_system(dimension, tools, pack)
    analysis = SampleAnalysis(sample)
    trace = ToolTrace(dimension)
    index = 0

    def finish(reason: str):
        evidence = forced_evidence(trace, tools, reason)
        step = ReActStep(f"engine: {reason}", {"type": "stop"}, True, evidence)
        trace.steps.append(TraceStep(len(trace.steps), step, forced=True, note=reason))
        return evidence, trace

    def run_tool(name: str, step: ReActStep | None, raw: str | None, substituted_from=None, note=None):
        profile = extract_tool_profile(name, sample, analysis)
        if substituted_from is not None or step is None:
            thought = step.thought if step else ""
            step = ReActStep(thought, {"type": "tool", "name": name}, False)
        trace.steps.append(TraceStep(len(trace.steps), step, profile, raw, substituted_from, note=note))

    while True:
        if trace.tool_steps >= max_steps:
            return finish("budget exhausted")
        covered = trace.invoked_tools
        uncovered = [t for t in tools if t not in covered]
        payload = {
            "dimension": dimension,
            "language": sample.language.value,
            "code": sample.text,
            "max_steps": max_steps,
            "steps_used": trace.tool_steps,
            "enabled_tools": tools,
            "invoked_tools": covered,
            "observations": [{"tool": p.tool_name, "degraded": p.degraded, "metrics": p.metrics}
                             for p in trace.profiles().values()],
        }
        if focus_question:
            payload["focus_question"] = focus_question
        tag = Tag("react", round, dimension, f"{side}{index}")
        request = ChatRequest.build(system, dump_payload(payload), tag)
        index += 1
        try:
            raw = backend.complete(request)
        except BudgetExceeded:
            return finish("budget exhausted")
        except TransportError as exc:
            exc.partial_trace = trace
            raise
        if on_call is not None:
            on_call(tag, request, raw)
        try:
            step = parse_react_step(raw)
        except StepParseError as exc:
            if not uncovered:
                return finish("coverage complete")
            run_tool(uncovered[0], None, raw, substituted_from="<unparseable>", note=f"step parse error: {exc}")
            continue
        if step.stop:
            if uncovered and max_steps >= len(tools):
                run_tool(uncovered[0], step, raw, substituted_from="<stop>", note="stop rejected: coverage incomplete")
                continue
            trace.steps.append(TraceStep(len(trace.steps), step, raw=raw))
            return step.evidence, trace
        try:
            name = canonical_tool_name(step.tool)
        except RegistryError:
            name = None
        if name is not None and name in tools and name not in covered:
            run_tool(name, step, raw)
            continue
        if not uncovered:
            return finish("coverage complete")
        reason = "repeated tool" if name in covered else "tool not enabled"
        run_tool(uncovered[0], step, raw, substituted_from=str(step.tool), note=reason)


# -- comparison -----------------------------------------------------------------

def _dominant_case(profile: ToolProfile | None) -> str | None:
    if profile is None:
        return None
    cases = profile.metrics.get("identifier_cases") or {}
    if not any(cases.values()):
        return None
    return max(sorted(cases), key=lambda k: cases[k])


def _ratio_at_least(x: float, y: float, bound: float) -> bool:
    lo, hi = sorted((float(x), float(y)))
    if hi <= 0:
        return False
    return lo <= 0 or hi / lo >= bound


def scale_mismatch(a: CodeSample, b: CodeSample, pa: dict, pb: dict) -> bool:
    """True when one sample is at least three times larger or more complex."""
    la = len([ln for ln in a.text.splitlines() if ln.strip()])
    lb = len([ln for ln in b.text.splitlines() if ln.strip()])
    if _ratio_at_least(la, lb, SCALE_RATIO):
        return True
    fa, fb = pa.get("lizard_function_profile"), pb.get("lizard_function_profile")
    if fa is not None and fb is not None:
        ca, cb = fa.metrics["max_ccn"], fb.metrics["max_ccn"]
        if ca and cb and _ratio_at_least(ca, cb, SCALE_RATIO):
            return True
    return False


def _apply_clamps(report: ExpertReport, pair: CodePair, pa: dict, pb: dict) -> None:
    if report.dimension == "lexical":
        da = _dominant_case(pa.get("identifier_style_profile"))
        db = _dominant_case(pb.get("identifier_style_profile"))
        if da and db and da != db and report.similarity_score > LEXICAL_CAP:
            report.adjustments.append(
                {"rule": "lexical_naming_cap", "from": report.similarity_score, "to": LEXICAL_CAP,
                 "why": f"dominant identifier case differs ({da} vs {db})"})
            report.similarity_score = LEXICAL_CAP
    elif report.dimension == "pattern":
        if report.similarity_score < PATTERN_FLOOR and scale_mismatch(pair.a, pair.b, pa, pb):
            report.adjustments.append(
                {"rule": "pattern_scale_floor", "from": report.similarity_score, "to": PATTERN_FLOOR,
                 "why": "samples differ in size or complexity by 3x or more"})
            report.similarity_score = PATTERN_FLOOR


def report_from_payload(dimension: str, payload: dict) -> ExpertReport:
    """Map either comparator output form onto an :class:`ExpertReport`."""
    adjustments = []
    lists = {name: list(payload.get(name) or []) for name in REPORT_LISTS}
    if any(k in payload for k in ("author_stable_signals", "different_author_signals", "neutral_or_confounding_signals")):
        stable = list(payload.get("author_stable_signals") or [])
        lists["matches"] = lists["matches"] or stable
        lists["author_stable_matches"] = lists["author_stable_matches"] or stable
        lists["differences"] = lists["differences"] or list(payload.get("different_author_signals") or [])
        lists["template_or_task_matches"] = (lists["template_or_task_matches"]
                                             or list(payload.get("neutral_or_confounding_signals") or []))
        source = "direct"
    else:
        source = "comparator"
    reasoning = payload.get("reasoning") or payload.get("summary") or ""
    tendency = payload.get("tendency")
    if tendency is None:
        tendency = classify_score(payload["similarity_score"])
        adjustments.append({"rule": "tendency_derived", "to": tendency, "why": "comparator gave no tendency"})
    return ExpertReport(
        dimension, tendency, payload["similarity_score"], payload["confidence"],
        signal_quality=payload.get("signal_quality", "medium"),
        confounder_risk=payload.get("confounder_risk", "high" if lists["high_risk_confounders"] else "medium"),
        reasoning=reasoning, adjustments=adjustments,
        weight_recommendation=payload.get("weight_recommendation"),
        gap_is_task_driven=bool(payload.get("gap_is_task_driven", False)), source=source, **lists)


def dimension_profiles(dimension: str, sample: CodeSample, disabled=()) -> dict[str, ToolProfile]:
    analysis = SampleAnalysis(sample)
    return {t: extract_tool_profile(t, sample, analysis) for t in enabled_tools(dimension, disabled)}


def compare_dimension(dimension: str, evidence_a: ExpertEvidence, evidence_b: ExpertEvidence, pair: CodePair,
                      backend, *, disabled=(), round: int = 1, prompts: PromptPack | None = None,
                      mode: str = "compare", prior_report: ExpertReport | None = None, context: dict | None = None,
                      turn=None, on_call=None) -> ExpertReport:
    """Ask the comparator for one dimension's pairwise report and validate it.

    ``mode="recheck"`` re-examines ``prior_report``. Raises
    :class:`ReportParseError` when the output fails validation after repair.
    """
    if mode not in ("compare", "recheck"):
        raise ContractError(f"unknown comparison mode {mode!r}")
    pack = prompts or default_pack()
    cross = pair.cross_language
    pa = dimension_profiles(dimension, pair.a, disabled)
    pb = dimension_profiles(dimension, pair.b, disabled)
    focus = DIMENSION_FOCUS[dimension]
    if mode == "recheck":
        system = pack.render(dimension, "recheck", display_name=DISPLAY_NAMES[dimension].lower())
    elif cross:
        la, lb = pair.languages
        system = pack.render(
            dimension, "compare", cross=True, display_name=DISPLAY_NAMES[dimension].lower(),
            context_line=f"CODE_A is written in {la} and CODE_B in {lb}; the languages differ.",
            stable_focus="; ".join(focus["stable"]), different_focus="; ".join(focus["different"]),
            confounders="; ".join(focus["confounders"]))
    else:
        system = pack.render(dimension, "compare")
    payload = {
        "dimension": dimension,
        "languages": list(pair.languages),
        "cross_language": cross,
        "evidence_a": evidence_a.to_dict(),
        "evidence_b": evidence_b.to_dict(),
        "profiles_a": {k: p.to_dict() for k, p in pa.items()},
        "profiles_b": {k: p.to_dict() for k, p in pb.items()},
    }
    if dimension == "syntactic" and FINGERPRINT_TOOL not in {_short(t) for t in disabled}:
        payload["fingerprint"] = fingerprint_similarity(pair.a, pair.b).to_dict()
    if cross or mode == "recheck":
        payload["code_a"] = pair.a.text
        payload["code_b"] = pair.b.text
    if prior_report is not None:
        payload["prior_report"] = prior_report.to_dict()
    if context:
        payload["context"] = context
    tag = Tag(mode, round, dimension, turn)
    request = ChatRequest.build(system, dump_payload(payload), tag)
    raw = backend.complete(request)
    if on_call is not None:
        on_call(tag, request, raw)
    parsed = parse_structured(raw, "expert_report", error_cls=ReportParseError)
    report = report_from_payload(dimension, parsed)
    report.profiles_degraded = any(p.degraded for p in list(pa.values()) + list(pb.values()))
    if mode == "recheck":
        report.source = "recheck"
    _apply_clamps(report, pair, pa, pb)
    return report
