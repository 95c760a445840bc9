"""The coordinator state machine.

One :class:`Case` owns the belief state of one pair and walks it through
preliminary review, expert dispatch (expansion), rounds of synthesis,
reflection and a planned action (recheck, debate or weight adjustment,
i.e. contraction), and the final decision (revision). Every rule a prompt
states that must actually hold is enforced here, not left to the model.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..errors import (
    BudgetExceeded,
    ConfigurationError,
    ContractError,
    InputError,
    ReportParseError,
    StructuredOutputError,
    SynthesisError,
    TransportError,
)
from ..experts import (
    ExpertEvidence,
    ExpertReport,
    classify_score,
    compare_dimension,
    dump_payload,
    enabled_tools,
    fallback_report,
    parse_react_step,
    run_expert,
)
from ..llm.backends import ChatRequest, MeteredBackend, ReservedView, Tag
from ..llm.parsing import parse_structured
from ..pair import CodePair
from ..prompts import PromptPack, default_pack
from ..stylometry.profiles import DIMENSIONS
from ..stylometry.tokenizer import CodeSample
from .config import EngineConfig
from .state import (
    CaseState,
    DebateResult,
    FinalDecision,
    PreliminaryHypothesis,
    ReflectionResult,
    SynthesisResult,
    WeightVector,
    adjust_weights,
)
from .trace import FINAL_STAGE, TraceRecorder

log = logging.getLogger(__name__)

FINALIZE = "FINALIZE"
RECHECK = "RECHECK_DIMENSION"
DEBATE = "START_DEBATE"
ADJUST = "ADJUST_WEIGHTS"
MODES = ("full", "no_expansion", "no_contraction", "no_revision")
STRUCTURAL = ("syntactic", "pattern")
CROSS_CONFIDENCE = (0.35, 0.70)
_STRENGTH_RANK = {"weak": 0, "moderate": 1, "strong": 2}


@dataclass
class Action:
    type: str
    params: dict = field(default_factory=dict)
    reason: str = ""
    forced: bool = False

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class CaseResult:
    decision: FinalDecision
    state: CaseState
    trace: TraceRecorder
    mode: str = "full"

    @property
    def llm_calls(self) -> int:
        return self.state.llm_calls


# -- pure helpers -----------------------------------------------------------------

def _as_sample(value) -> CodeSample:
    if isinstance(value, CodeSample):
        return value
    if isinstance(value, dict):
        return CodeSample.from_text(value["text"], filename_hint=value.get("filename"),
                                    language=value.get("language"), origin=value.get("origin"))
    return CodeSample.from_text(value)


def initialize_case(pair_inputs, config: EngineConfig | None = None) -> CaseState:
    """Build the initial state: languages, cross-language flag, preset weights, disabled tools."""
    config = config or EngineConfig()
    if isinstance(pair_inputs, CodePair):
        pair = pair_inputs
    else:
        try:
            a, b = pair_inputs
        except (TypeError, ValueError):
            raise InputError("pair inputs must be a CodePair or two samples") from None
        pair = CodePair(_as_sample(a), _as_sample(b))
    if pair.cross_language:
        weights = WeightVector.from_mapping(config.cross_language_weights)
        disabled = frozenset(config.cross_language_disabled)
    else:
        weights = WeightVector.from_mapping(config.same_language_weights)
        disabled = frozenset()
    state = CaseState(pair=pair, weights=weights, disabled_tools=disabled)
    if pair.has_unknown_language:
        state.flags.append("unknown_language")
    state.weight_history.append({"round": 0, "signals": None, "weights": weights.as_dict()})
    return state


def aggregate_score(reports: dict, weights: WeightVector) -> float:
    """Weighted sum of per-dimension similarities."""
    missing = [d for d in DIMENSIONS if d not in reports]
    if missing:
        raise ContractError(f"no report for {', '.join(missing)}")
    return sum(weights[d] * reports[d].similarity_score for d in DIMENSIONS)


def classify(score: float, config: EngineConfig | None = None) -> str:
    t = (config or EngineConfig()).thresholds
    return classify_score(score, t.same, t.different)


def should_stop_early(score: float, config: EngineConfig | None = None) -> bool:
    return score > (config or EngineConfig()).thresholds.early_stop


def binary_label(verdict: str, score: float) -> bool:
    """Same-author label used for metrics; uncertain resolves by score >= 0.5."""
    if verdict == "same_author":
        return True
    if verdict == "different_author":
        return False
    return score >= 0.5


def synthesis_violations(payload: dict, reports: dict) -> list[str]:
    problems = []
    seen = [item.get("dimension") for item in payload.get("per_dimension_summary", [])]
    if sorted(seen) != sorted(DIMENSIONS):
        problems.append(f"per_dimension_summary must list each dimension once, got {seen}")
    for item in payload.get("per_dimension_summary", []):
        d = item.get("dimension")
        if d in reports and reports[d].tendency == "uncertain" and item.get("tendency") != "uncertain":
            problems.append(f"{d} is uncertain in its report but summarised as {item.get('tendency')}")
    return problems


def finalize_violations(payload: dict, state: CaseState) -> list[str]:
    """Hard rules a final verdict must satisfy given the case state."""
    chain = payload["evidence_chain"]
    verdict = payload["verdict"]
    problems = []
    same = [c for c in chain if c["supports"] == "same_author"]
    diff = [c for c in chain if c["supports"] == "different_author"]
    if verdict == "different_author":
        moderate = [c for c in diff if _STRENGTH_RANK[c["strength"]] >= 1]
        structural = [c for c in diff if c["strength"] == "strong" and c["dimension"] in STRUCTURAL
                      and c.get("confounder_risk") == "low"]
        if len(moderate) < 2 and not (structural and state.debates_used > 0):
            problems.append("different_author needs two moderate-or-strong different dimensions, "
                            "or one strong low-confounder structural contrast plus a debate")
    if len(same) == 2 and len(diff) == 2 and verdict != "uncertain":
        problems.append("two dimensions support each side, so the verdict must be uncertain")
    if (verdict == "same_author" and state.cross_language and state.preliminary is not None
            and state.preliminary.tendency != "same_author"):
        drivers = [c for c in same if c["dimension"] != "syntactic" and _STRENGTH_RANK[c["strength"]] >= 1]
        if not drivers:
            problems.append("cross-language same_author against the first look needs a "
                            "non-syntactic main driver of at least moderate strength")
    return problems


# -- the case -----------------------------------------------------------------------

class Case:
    """Runs the full verification procedure for one pair."""

    def __init__(self, pair_inputs, backend, config: EngineConfig | None = None,
                 prompts: PromptPack | None = None, clock=None, mode: str = "full"):
        if mode not in MODES:
            raise ContractError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
        self.config = (config or EngineConfig()).validate()
        self.mode = mode
        self.prompts = prompts or (PromptPack(self.config.prompt_pack) if self.config.prompt_pack else default_pack())
        self.state = initialize_case(pair_inputs, self.config)
        self.meter = backend if isinstance(backend, MeteredBackend) else MeteredBackend(backend, self.config.budgets.calls)
        if self.meter.cap > self.config.budgets.calls:
            self.meter.cap = self.config.budgets.calls
        self.view = ReservedView(self.meter, self.config.finalize_reserve)
        self.trace = TraceRecorder(clock)
        self._evidence: dict[str, tuple] = {}
        self.trace_event("init", 0, {
            "languages": list(self.state.pair.languages),
            "cross_language": self.state.cross_language,
            "weights": self.state.weights.as_dict(),
            "disabled_tools": sorted(self.state.disabled_tools),
            "mode": mode,
            "flags": list(self.state.flags),
            "budgets": dataclasses.asdict(self.config.budgets),
        })

    # bookkeeping

    @property
    def pair(self) -> CodePair:
        return self.state.pair

    def trace_event(self, stage, round, payload, *, request: ChatRequest | None = None, raw=None, tag=None):
        self.state.llm_calls = self.meter.calls
        return self.trace.record(stage, round, self.state.weights.as_dict(), self.meter.calls,
                                 prompt_digest=request.digest() if request else None, raw_response=raw,
                                 parsed_payload=payload, tag=tag)

    def can_spend(self, n: int = 1) -> bool:
        return self.meter.remaining - n >= self.config.finalize_reserve

    def _reports_payload(self) -> dict:
        return {d: r.to_dict() for d, r in self.state.latest_reports.items()}

    def _context(self) -> dict:
        s = self.state
        return {
            "languages": list(s.pair.languages),
            "cross_language": s.cross_language,
            "preliminary": s.preliminary.to_dict() if s.preliminary else None,
            "latest_reports": self._reports_payload(),
            "weights": s.weights.as_dict(),
            "latest_synthesis": s.synthesis_history[-1].to_dict() if s.synthesis_history else None,
            "latest_debate": s.debate_history[-1].to_dict() if s.debate_history else None,
            "latest_reflection": s.reflection_history[-1].to_dict() if s.reflection_history else None,
            "recheck_history": list(s.recheck_history),
            "action_history": list(s.action_history),
            "round": s.round,
        }

    def _ask(self, stage: str, tag: Tag, system: str, payload: dict, schema_id: str, *, reserve: bool = True,
             retry_note=None, round=None):
        """One completion plus validation. Returns (parsed or None, raw, error text)."""
        backend = self.view if reserve else self.meter
        request = ChatRequest.build(system, dump_payload(payload), tag)
        if retry_note is not None:
            prev_raw, note = retry_note
            request = ChatRequest(request.messages + ({"role": "assistant", "content": prev_raw},
                                                      {"role": "user", "content": note}), tag)
        try:
            raw = backend.complete(request)
        except BudgetExceeded as exc:
            self.trace_event(f"{stage}_skipped", self.state.round if round is None else round,
                             {"error": str(exc)}, tag=tag.key())
            return None, None, str(exc)
        except TransportError as exc:
            exc.partial_trace = self.trace.events
            raise
        try:
            parsed = parse_structured(raw, schema_id)
            error = None
        except StructuredOutputError as exc:
            parsed, error = None, str(exc)
        self.trace_event(stage, self.state.round if round is None else round,
                         parsed if parsed is not None else {"error": error},
                         request=request, raw=raw, tag=tag.key())
        return parsed, raw, error

    # stages

    def preliminary_review(self) -> PreliminaryHypothesis:
        s = self.state
        cross = s.cross_language
        system = self.prompts.render("coordinator", "preliminary", cross=cross)
        payload = {"code_a": s.pair.a.text, "code_b": s.pair.b.text,
                   "languages": list(s.pair.languages), "cross_language": cross}
        parsed, _, error = self._ask("preliminary", Tag("preliminary", 0), system, payload, "preliminary", round=0)
        if parsed is None:
            hyp = PreliminaryHypothesis(degraded=True, reasoning=[f"fallback: {error}"])
        else:
            hyp = PreliminaryHypothesis.from_payload(parsed)
            if isinstance(hyp.reasoning, str):
                hyp.reasoning = [hyp.reasoning]
            lo, hi = CROSS_CONFIDENCE
            if cross and not lo <= hyp.confidence <= hi:
                hyp.clamped_from = hyp.confidence
                hyp.confidence = min(max(hyp.confidence, lo), hi)
        s.preliminary = hyp
        if hyp.clamped_from is not None:
            self.trace_event("preliminary_clamp", 0, {"from": hyp.clamped_from, "to": hyp.confidence})
        return hyp

    def expert_steps(self) -> int:
        if self.config.expert_steps is not None:
            return self.config.expert_steps
        loops = 2 * len(DIMENSIONS)
        spare = self.meter.remaining - self.config.finalize_reserve - len(DIMENSIONS) - self.config.round_reserve
        return max(1, spare // loops)

    def _dispatch_one(self, dimension: str, steps: int, sink: list):
        s = self.state
        focus = s.preliminary.focus_question(dimension) if s.preliminary else None

        def on_call(tag, request, raw):
            sink.append(("call", tag, request, raw, self.meter.calls))

        try:
            tools = enabled_tools(dimension, s.disabled_tools)
        except ConfigurationError as exc:
            return None, None, fallback_report(dimension, str(exc))
        n = min(steps, len(tools)) if self.config.expert_steps is None else steps
        ev_a, tr_a = run_expert(dimension, s.pair.a, n, self.view, disabled=s.disabled_tools, round=1, side="a",
                                prompts=self.prompts, focus_question=focus, on_call=on_call)
        ev_b, tr_b = run_expert(dimension, s.pair.b, n, self.view, disabled=s.disabled_tools, round=1, side="b",
                                prompts=self.prompts, focus_question=focus, on_call=on_call)
        sink.append(("expert", dimension, ev_a, ev_b, tr_a, tr_b))
        try:
            report = compare_dimension(dimension, ev_a, ev_b, s.pair, self.view, disabled=s.disabled_tools, round=1,
                                       prompts=self.prompts, on_call=on_call)
        except (ReportParseError, BudgetExceeded) as exc:
            report = fallback_report(dimension, f"comparison failed: {exc}")
        return (ev_a, ev_b), (tr_a, tr_b), report

    def _flush(self, sink: list, report: ExpertReport | None):
        pending_call = None
        for item in sink:
            if item[0] == "call":
                _, tag, request, raw, calls = item
                self.state.llm_calls = calls
                pending_call = self.trace.record(tag.stage, tag.round, self.state.weights.as_dict(), calls,
                                                 prompt_digest=request.digest(), raw_response=raw,
                                                 parsed_payload=None, tag=tag.key())
                if tag.stage == "react":
                    try:
                        pending_call["parsed_payload"] = parse_react_step(raw).to_dict()
                    except StructuredOutputError as exc:
                        pending_call["parsed_payload"] = {"error": str(exc)}
            else:
                _, dimension, ev_a, ev_b, tr_a, tr_b = item
                self.trace_event("expert_trace", 1, {
                    "dimension": dimension, "evidence_a": ev_a.to_dict(), "evidence_b": ev_b.to_dict(),
                    "trace_a": tr_a.to_dict(), "trace_b": tr_b.to_dict()})
        if report is not None:
            last = pending_call if pending_call is not None and pending_call["stage"] == "compare" else None
            if last is not None:
                last["parsed_payload"] = report.to_dict()
            else:
                self.trace_event("compare_fallback", 1, report.to_dict())

    def dispatch_experts(self) -> CaseState:
        s = self.state
        s.round = 1
        steps = self.expert_steps()
        sinks = {d: [] for d in DIMENSIONS}
        if self.config.expert_workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.expert_workers) as pool:
                futures = {d: pool.submit(self._dispatch_one, d, steps, sinks[d]) for d in DIMENSIONS}
                results = {d: futures[d].result() for d in DIMENSIONS}
            for d in DIMENSIONS:
                self._flush(sinks[d], results[d][2])
        else:
            results = {}
            for d in DIMENSIONS:
                results[d] = self._dispatch_one(d, steps, sinks[d])
                self._flush(sinks[d], results[d][2])
        for d in DIMENSIONS:
            evidence, traces, report = results[d]
            if evidence is not None:
                self._evidence[d] = evidence
                s.expert_traces[d] = {"a": traces[0].to_dict(), "b": traces[1].to_dict()}
            s.set_report(report)
        s.dispatch_reports = dict(s.latest_reports)
        s.llm_calls = self.meter.calls
        return s

    def aggregate(self) -> float:
        return aggregate_score(self.state.latest_reports, self.state.weights)

    def synthesize(self) -> SynthesisResult | None:
        s = self.state
        if not self.can_spend(1):
            self.trace_event("synthesize_skipped", s.round, {"error": "call budget reserved for the final decision"})
            return None
        system = self.prompts.render("coordinator", "synthesize")
        payload = self._context()
        tag = Tag("synthesize", s.round)
        parsed, raw, error = self._ask("synthesize", tag, system, payload, "synthesis")
        problems = [f"schema: {error}"] if parsed is None else synthesis_violations(parsed, s.latest_reports)
        if problems and raw is not None and self.can_spend(1):
            note = "The engine rejected that synthesis: " + "; ".join(problems) + ". Reply again with a corrected JSON object."
            parsed, raw, error = self._ask("synthesize_retry", tag, system, payload, "synthesis", retry_note=(raw, note))
            problems = [f"schema: {error}"] if parsed is None else synthesis_violations(parsed, s.latest_reports)
        if problems:
            raise SynthesisError("; ".join(problems))
        result = SynthesisResult.from_payload(parsed, s.round)
        s.synthesis_history.append(result)
        return result

    def suspect_dimensions(self) -> list[str]:
        t = self.config.thresholds
        out = []
        for d in DIMENSIONS:
            report = self.state.latest_reports.get(d)
            if report is None or report.gap_is_task_driven:
                continue
            first = self.state.dispatch_reports.get(d, report).similarity_score
            now = report.similarity_score
            if now < t.suspect or (first < t.suspect and now < t.resolved):
                out.append(d)
        return out

    def reflect(self) -> ReflectionResult | None:
        s = self.state
        if s.round <= 1:
            self.trace_event("reflect_skipped", s.round, {"reason": "no reflection in the first round"})
            return None
        suspects = self.suspect_dimensions()
        parsed = None
        if self.can_spend(1):
            system = self.prompts.render("coordinator", "reflect")
            payload = self._context()
            parsed, _, _ = self._ask("reflect", Tag("reflect", s.round), system, payload, "reflection")
        if parsed is None:
            result = ReflectionResult(s.round, False, "CONTINUE", reasoning="reflection unavailable",
                                      suspect_dimensions=suspects, degraded=True)
        else:
            result = ReflectionResult(s.round, parsed["evidence_sufficient"], parsed["recommendation"],
                                      parsed.get("assessment", {}), parsed.get("reasoning", ""), suspects)
        if suspects and result.evidence_sufficient:
            result.evidence_sufficient = False
            result.recommendation = "CONTINUE"
            result.overridden = True
            self.trace_event("reflect_veto", s.round, {"suspect_dimensions": suspects})
        s.reflection_history.append(result)
        return result

    def _lowest(self, candidates=None) -> str:
        sims = self.state.similarities()
        pool = list(candidates) if candidates else list(DIMENSIONS)
        return min(pool, key=lambda d: (sims[d], DIMENSIONS.index(d)))

    def _highest(self) -> str:
        sims = self.state.similarities()
        return max(DIMENSIONS, key=lambda d: (sims[d], -DIMENSIONS.index(d)))

    def _debate_affordable(self) -> bool:
        return (self.state.debates_used < self.config.budgets.debates
                and self.can_spend(self.config.budgets.turns + 1))

    def _guard(self, proposal: dict) -> Action:
        s = self.state
        t = self.config.thresholds
        kind = proposal.get("action_type", FINALIZE)
        params = dict(proposal.get("params") or {})
        reasoning = proposal.get("reasoning", "")
        sims = s.similarities()

        rechecked = {r["dimension"] for r in s.recheck_history}
        degraded = [d for d in DIMENSIONS if s.latest_reports[d].degraded and d not in rechecked]
        if degraded and self.can_spend(1):
            return Action(RECHECK, {"dimension": degraded[0]}, "comparison failed; recheck required", True)

        lo, hi = self._lowest(), self._highest()
        if sims[lo] < t.suspect and sims[hi] >= t.divergence_high and not s.debated(lo, hi):
            if self._debate_affordable():
                if not (kind == DEBATE and {params.get("proponent"), params.get("opponent")} == {lo, hi}):
                    return Action(DEBATE, {"proponent": hi, "opponent": lo}, "divergent dimensions must debate", True)
                return Action(DEBATE, {"proponent": params["proponent"], "opponent": params["opponent"]}, reasoning)
            if kind == FINALIZE and self.can_spend(1):
                return Action(RECHECK, {"dimension": lo}, "divergent dimensions; debate unavailable", True)

        if kind == DEBATE:
            p, o = params.get("proponent"), params.get("opponent")
            if p not in DIMENSIONS or o not in DIMENSIONS or p == o:
                crit = s.synthesis_history[-1].critical_conflict() if s.synthesis_history else None
                if crit and crit[0] != crit[1] and all(d in DIMENSIONS for d in crit):
                    p, o = crit
                else:
                    p, o = hi, lo
                forced = True
            else:
                forced = False
            if p != o and self._debate_affordable():
                return Action(DEBATE, {"proponent": p, "opponent": o}, reasoning, forced)
            if self.can_spend(1):
                return Action(RECHECK, {"dimension": o if o in DIMENSIONS else lo},
                              "debate limit or budget reached; demoted to recheck", True)
            return Action(FINALIZE, {}, "budget exhausted", True)

        if kind == RECHECK:
            d = params.get("dimension")
            forced = d not in DIMENSIONS
            if forced:
                d = lo
            if self.can_spend(1):
                return Action(RECHECK, {"dimension": d}, reasoning, forced)
            return Action(FINALIZE, {}, "budget exhausted", True)

        if kind == ADJUST:
            if s.pending_signals or self._outcome_since_adjust():
                return Action(ADJUST, {"adjustments": dict(params.get("adjustments") or {})}, reasoning)
            if sims[lo] <= t.recheck and self.can_spend(1):
                return Action(RECHECK, {"dimension": lo}, "no recheck or debate outcome to adjust on", True)
            return Action(FINALIZE, {}, "no recheck or debate outcome to adjust on", True)

        reflection = s.reflection_history[-1] if s.reflection_history else None
        if reflection is not None and reflection.round == s.round and not reflection.evidence_sufficient:
            suspects = reflection.suspect_dimensions or [d for d in DIMENSIONS if sims[d] <= t.recheck]
            if suspects and self.can_spend(1):
                return Action(RECHECK, {"dimension": self._lowest(suspects)},
                              "reflection found the evidence insufficient", True)
        return Action(FINALIZE, {}, reasoning)

    def _outcome_since_adjust(self) -> bool:
        for entry in reversed(self.state.action_history):
            if entry["action"]["type"] == ADJUST:
                return False
            if entry["action"]["type"] in (RECHECK, DEBATE):
                return True
        return False

    def decide_next_action(self) -> Action:
        s = self.state
        agg = self.aggregate()
        proposal = None
        if s.round >= self.config.budgets.rounds:
            action = Action(FINALIZE, {}, "round limit reached", True)
        elif should_stop_early(agg, self.config):
            action = Action(FINALIZE, {}, "aggregate score above the early-stop threshold", True)
        elif self.mode == "no_contraction":
            action = Action(FINALIZE, {}, "contraction disabled", True)
        elif not self.can_spend(2):
            action = Action(FINALIZE, {}, "call budget nearly exhausted", True)
        else:
            system = self.prompts.render("coordinator", "decide")
            parsed, _, _ = self._ask("decide", Tag("decide", s.round), system, self._context(), "decision")
            proposal = parsed or {"action_type": FINALIZE, "reasoning": "decision unavailable"}
            action = self._guard(proposal)
        entry = {"round": s.round, "proposed": proposal, "action": action.to_dict()}
        s.action_history.append(entry)
        self.trace_event("action", s.round, entry)
        return action

    def run_debate(self, proponent: str, opponent: str) -> DebateResult:
        s = self.state
        if s.debates_used >= self.config.budgets.debates:
            raise ContractError(f"debate limit {self.config.budgets.debates} already reached")
        if proponent not in DIMENSIONS or opponent not in DIMENSIONS or proponent == opponent:
            raise ContractError(f"debate needs two distinct dimensions, got {proponent!r} and {opponent!r}")
        topic = f"{proponent} vs {opponent}"
        turns = []
        reports = s.latest_reports
        for k in range(1, self.config.budgets.turns + 1):
            speaker = proponent if k % 2 else opponent
            side = "proponent" if speaker == proponent else "opponent"
            system = self.prompts.render("coordinator", "debate_turn", dimension=speaker, side=side, turn=k)
            payload = {
                "debate_topic": topic, "turn": k, "side": side, "dimension": speaker,
                "code_a": s.pair.a.text, "code_b": s.pair.b.text,
                "own_report": reports[speaker].to_dict(),
                "other_report": reports[opponent if speaker == proponent else proponent].to_dict(),
                "previous_turns": turns,
                "preliminary": s.preliminary.to_dict() if s.preliminary else None,
            }
            parsed, raw, error = self._ask("debate_turn", Tag("debate", s.round, speaker, k), system, payload,
                                           "debate_turn")
            turns.append({"turn": k, "speaker": speaker, "side": side,
                          "argument": parsed if parsed is not None else {"unparsed": raw, "error": error}})
        system = self.prompts.render("coordinator", "judge")
        payload = {"debate_topic": topic, "proponent": proponent, "opponent": opponent, "turns": turns,
                   **self._context()}
        parsed, _, error = self._ask("judge", Tag("judge", s.round), system, payload, "judge")
        if parsed is None:
            result = DebateResult(topic, proponent, opponent, len(turns),
                                  {"conflict_resolved": False, "explanation": f"judge output unusable: {error}"},
                                  "uncertain", 0.5, None, turns, s.round, resolved_by_judge=False)
        else:
            result = DebateResult(parsed.get("debate_topic", topic), proponent, opponent, len(turns),
                                  parsed["resolution"], parsed["final_judgment"], parsed["confidence_after_debate"],
                                  parsed.get("recommended_next_action"), turns, s.round)
            self._apply_patches(parsed["resolution"].get("report_patch_suggestions") or [], "debate")
            for d, signal in (parsed["resolution"].get("weight_recommendation") or {}).items():
                s.pending_signals[d] = signal
        s.debate_history.append(result)
        return result

    def _apply_patches(self, suggestions: list, source: str) -> None:
        s = self.state
        for suggestion in suggestions:
            d = suggestion.get("dimension")
            if d not in s.latest_reports:
                continue
            old = s.latest_reports[d]
            tendency = suggestion.get("tendency", old.tendency)
            confidence = suggestion.get("confidence", old.confidence)
            if tendency == old.tendency and confidence == old.confidence:
                continue
            patch = {"round": s.round, "dimension": d, "source": source, "reason": suggestion.get("reason", ""),
                     "from": {"tendency": old.tendency, "confidence": old.confidence},
                     "to": {"tendency": tendency, "confidence": confidence}}
            new = dataclasses.replace(old, tendency=tendency, confidence=confidence,
                                      adjustments=list(old.adjustments) + [dict(patch, rule="patch")],
                                      source=f"{source}_patch")
            s.set_report(new)
            s.patch_history.append(patch)
            self.trace_event("patch", s.round, patch)

    def recheck_dimension(self, dimension: str) -> ExpertReport | None:
        s = self.state
        prior = s.latest_reports[dimension]
        count = sum(1 for r in s.recheck_history if r["dimension"] == dimension) + 1
        evidence = self._evidence.get(dimension) or (ExpertEvidence("no evidence", ["none"], 0.3),) * 2
        reason = s.action_history[-1]["action"]["reason"] if s.action_history else ""
        context = {"reason": reason, "focus_question": s.preliminary.focus_question(dimension) if s.preliminary else None,
                   "recheck_number": count}
        sink = []

        def on_call(tag, request, raw):
            sink.append((tag, request, raw))

        try:
            report = compare_dimension(dimension, evidence[0], evidence[1], s.pair, self.view,
                                       disabled=s.disabled_tools, round=s.round, prompts=self.prompts,
                                       mode="recheck", prior_report=prior, context=context, turn=count,
                                       on_call=on_call)
            error = None
        except (ReportParseError, BudgetExceeded) as exc:
            report, error = None, str(exc)
        except TransportError as exc:
            exc.partial_trace = self.trace.events
            raise
        for tag, request, raw in sink:
            self.trace_event("recheck", s.round, report.to_dict() if report else {"error": error},
                             request=request, raw=raw, tag=tag.key())
        entry = {"round": s.round, "dimension": dimension, "number": count,
                 "before": prior.similarity_score, "after": report.similarity_score if report else None,
                 "error": error}
        s.recheck_history.append(entry)
        if report is None:
            return None
        s.set_report(report)
        if report.weight_recommendation:
            signal = report.weight_recommendation
        elif report.gap_is_task_driven or report.confounder_risk == "high":
            signal = "weaken"
        elif report.confounder_risk == "low":
            signal = "strengthen"
        else:
            signal = "neutral"
        s.pending_signals[dimension] = signal
        return report

    def apply_weight_adjustment(self, overrides: dict | None = None) -> WeightVector:
        s = self.state
        signals = dict(s.pending_signals)
        signals.update({d: v for d, v in (overrides or {}).items() if d in DIMENSIONS})
        before = s.weights
        s.weights = adjust_weights(before, signals)
        s.weight_history.append({"round": s.round, "signals": signals, "weights": s.weights.as_dict()})
        s.pending_signals = {}
        self.trace_event("adjust_weights", s.round, {"signals": signals, "before": before.as_dict(),
                                                      "after": s.weights.as_dict()})
        return s.weights

    def execute(self, action: Action) -> None:
        if action.type == RECHECK:
            self.recheck_dimension(action.params["dimension"])
        elif action.type == DEBATE:
            self.run_debate(action.params["proponent"], action.params["opponent"])
        elif action.type == ADJUST:
            self.apply_weight_adjustment(action.params.get("adjustments"))

    # decisions

    def _chain_from_reports(self) -> list[dict]:
        s = self.state
        chain = []
        for d in DIMENSIONS:
            r = s.latest_reports.get(d)
            sim = r.similarity_score if r else 0.5
            chain.append({"dimension": d, "supports": r.tendency if r else "uncertain",
                          "strength": "moderate" if r and r.confidence >= 0.6 and not r.is_degraded else "weak",
                          "weight": s.weights[d], "similarity_score": sim,
                          "confounder_risk": r.confounder_risk if r else "high",
                          "key_evidence": (r.reasoning if r else "no expert evidence")[:300]})
        return chain

    def _normalize_chain(self, chain: list) -> list[dict]:
        s = self.state
        by_dim = {}
        for item in chain:
            by_dim.setdefault(item["dimension"], item)
        base = {c["dimension"]: c for c in self._chain_from_reports()}
        out = []
        for d in DIMENSIONS:
            item = dict(by_dim.get(d) or base[d])
            item["weight"] = s.weights[d]
            item["similarity_score"] = base[d]["similarity_score"]
            item.setdefault("confounder_risk", base[d]["confounder_risk"])
            item.setdefault("key_evidence", base[d]["key_evidence"])
            out.append(item)
        return out

    def _process(self) -> dict:
        s = self.state
        return {"mode": self.mode, "rounds": s.round, "debates": s.debates_used, "rechecks": len(s.recheck_history),
                "llm_calls": self.meter.calls, "call_cap": self.meter.cap,
                "preliminary": f"{s.preliminary.tendency}@{s.preliminary.confidence:.2f}" if s.preliminary else None}

    def _decision(self, verdict, confidence, chain, alignment, reasoning, dissent=(), guardrails=(),
                  aggregate=None) -> FinalDecision:
        s = self.state
        score = self.aggregate() if aggregate is None else aggregate
        return FinalDecision(verdict, float(confidence), chain, alignment, reasoning, list(dissent), score,
                             s.weights.as_dict(), self._process(), list(guardrails))

    def _review_status(self, verdict: str) -> str:
        prelim = self.state.preliminary.tendency if self.state.preliminary else "uncertain"
        if verdict == prelim:
            return "confirmed"
        return "weakened" if "uncertain" in (verdict, prelim) else "overturned"

    def finalize(self) -> FinalDecision:
        s = self.state
        system = self.prompts.render("coordinator", "finalize")
        payload = self._context()
        payload.update(code_a=s.pair.a.text, code_b=s.pair.b.text)
        tag = Tag("finalize", s.round)
        parsed, raw, error = self._ask("finalize", tag, system, payload, "final_decision", reserve=False)
        if parsed is None:
            return self._decision("uncertain", 0.5, self._chain_from_reports(),
                                  {"preliminary_review_status": self._review_status("uncertain")},
                                  "final decision unavailable; defaulting to uncertain",
                                  [f"final decision failed validation: {error}"], ["finalize_fallback"])
        guardrails = []
        parsed["evidence_chain"] = self._normalize_chain(parsed["evidence_chain"])
        problems = finalize_violations(parsed, s)
        if problems and self.meter.remaining >= 1:
            note = "The engine rejected that decision: " + "; ".join(problems) + ". Reply again with a corrected JSON object."
            retry, _, _ = self._ask("finalize_retry", tag, system, payload, "final_decision", reserve=False,
                                    retry_note=(raw, note))
            guardrails.append("finalize_reprompt")
            if retry is not None:
                retry["evidence_chain"] = self._normalize_chain(retry["evidence_chain"])
                parsed = retry
                problems = finalize_violations(parsed, s)
        dissent = list(parsed.get("dissenting_opinions") or [])
        verdict = parsed["verdict"]
        if problems:
            dissent.append(f"engine demoted {verdict} to uncertain: " + "; ".join(problems))
            guardrails.append("finalize_demotion")
            verdict = "uncertain"
        alignment = dict(parsed.get("process_alignment") or {})
        alignment.setdefault("preliminary_review_status", self._review_status(verdict))
        return self._decision(verdict, parsed["confidence"], parsed["evidence_chain"], alignment,
                              parsed.get("reasoning", ""), dissent, guardrails)

    def decide_by_threshold(self) -> FinalDecision:
        agg = self.aggregate()
        verdict = classify(agg, self.config)
        conf = agg if verdict == "same_author" else 1 - agg if verdict == "different_author" else 0.5
        return self._decision(verdict, conf, self._chain_from_reports(),
                              {"preliminary_review_status": self._review_status(verdict)},
                              f"threshold classification of aggregate score {agg:.4f}", guardrails=["no_revision"])

    def decide_from_preliminary(self) -> FinalDecision:
        hyp = self.state.preliminary
        conf = hyp.confidence
        score = conf if hyp.tendency == "same_author" else 1 - conf if hyp.tendency == "different_author" else 0.5
        chain = [{"dimension": d, "supports": "uncertain", "strength": "weak", "weight": self.state.weights[d],
                  "similarity_score": 0.5, "confounder_risk": "high", "key_evidence": "experts not consulted"}
                 for d in DIMENSIONS]
        return self._decision(hyp.tendency, conf, chain, {"preliminary_review_status": "confirmed"},
                              "decision taken from the preliminary review alone", guardrails=["no_expansion"],
                              aggregate=score)

    def run(self) -> CaseResult:
        s = self.state
        self.preliminary_review()
        if self.mode == "no_expansion":
            decision = self.decide_from_preliminary()
        else:
            self.dispatch_experts()
            try:
                for r in range(1, self.config.budgets.rounds + 1):
                    s.round = r
                    if self.synthesize() is None:
                        break
                    self.reflect()
                    action = self.decide_next_action()
                    if action.type == FINALIZE:
                        break
                    self.execute(action)
                if s.pending_signals and self.mode != "no_contraction":
                    # outcomes from the last action still move the weights before the verdict
                    self.apply_weight_adjustment()
                decision = self.decide_by_threshold() if self.mode == "no_revision" else self.finalize()
            except SynthesisError as exc:
                self.trace_event("synthesis_abort", s.round, {"error": str(exc)})
                decision = self._decision("uncertain", 0.5, self._chain_from_reports(),
                                          {"preliminary_review_status": self._review_status("uncertain")},
                                          f"case aborted: synthesis violated engine rules ({exc})",
                                          [f"synthesis rejected: {exc}"], ["synthesis_abort"])
        s.llm_calls = self.meter.calls
        decision.process["llm_calls"] = self.meter.calls
        self.trace_event(FINAL_STAGE, s.round, decision.to_dict())
        return CaseResult(decision, s, self.trace, self.mode)


def verify_pair(pair_inputs, backend, config: EngineConfig | None = None, *, mode: str = "full",
                prompts: PromptPack | None = None, clock=None) -> CaseResult:
    """Run one verification case end to end."""
    return Case(pair_inputs, backend, config, prompts=prompts, clock=clock, mode=mode).run()
