"""An offline backend that answers every stage from the request payload alone.

It reads the JSON user message, compares the stylometric profiles it carries
and emits schema-valid responses. Useful for demos, the CLI without an
endpoint, and for exercising the engine end to end. It is not a model and
makes no claim to accuracy.
"""

from __future__ import annotations

import json
from collections.abc import Mapping

from ..stylometry.profiles import DIMENSION_TOOLS, DIMENSIONS, extract_profiles
from ..stylometry.tokenizer import CodeSample
from .backends import Backend, ChatRequest

SAME = 0.62
DIFFERENT = 0.38


def _tendency(score: float) -> str:
    if score >= SAME:
        return "same_author"
    if score <= DIFFERENT:
        return "different_author"
    return "uncertain"


def _is_ranked(value) -> bool:
    return isinstance(value, list) and all(isinstance(item, (list, tuple)) and len(item) == 2 for item in value)


def _metric_similarity(a, b) -> float | None:
    if isinstance(a, bool) or isinstance(b, bool):
        return 1.0 if a == b else 0.0
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        top = max(abs(a), abs(b))
        return 1.0 if top == 0 else 1.0 - abs(a - b) / top
    if isinstance(a, Mapping) and isinstance(b, Mapping):
        if all(isinstance(v, (int, float)) for v in list(a.values()) + list(b.values())):
            keys = set(a) | set(b)
            if not keys:
                return None
            ta, tb = sum(a.values()), sum(b.values())
            if ta == 0 and tb == 0:
                return 1.0
            if ta == 0 or tb == 0:
                return 0.0
            l1 = sum(abs(a.get(k, 0) / ta - b.get(k, 0) / tb) for k in keys)
            return 1.0 - 0.5 * l1
        return None
    if _is_ranked(a) and _is_ranked(b):
        ka, kb = {str(k) for k, _ in a}, {str(k) for k, _ in b}
        if not ka and not kb:
            return 1.0
        return len(ka & kb) / len(ka | kb)
    if isinstance(a, list) and isinstance(b, list):
        sa, sb = set(map(str, a)), set(map(str, b))
        return 1.0 if not sa | sb else len(sa & sb) / len(sa | sb)
    return None


def profile_similarity(pa: Mapping, pb: Mapping) -> float:
    """Mean per-metric similarity over the tools both sides carry."""
    scores = []
    for tool in sorted(set(pa) & set(pb)):
        ma, mb = pa[tool]["metrics"], pb[tool]["metrics"]
        for name in sorted(set(ma) & set(mb)):
            s = _metric_similarity(ma[name], mb[name])
            if s is not None:
                scores.append(min(max(s, 0.0), 1.0))
    return sum(scores) / len(scores) if scores else 0.5


def _strength(confidence: float) -> str:
    if confidence >= 0.7:
        return "strong"
    return "moderate" if confidence >= 0.5 else "weak"


class HeuristicBackend(Backend):
    """Rule-based stand-in for a chat model; deterministic for fixed requests."""

    def complete(self, request: ChatRequest) -> str:
        try:
            payload = json.loads(request.messages[-1]["content"])
        except ValueError:
            payload = {}
        handler = getattr(self, f"_{request.tag.stage}", None)
        if handler is None:
            return "{}"
        return json.dumps(handler(payload, request), sort_keys=True)

    def _react(self, p, request):
        uncovered = [t for t in p.get("enabled_tools", []) if t not in p.get("invoked_tools", [])]
        if uncovered and p.get("steps_used", 0) < p.get("max_steps", 0):
            return {"thought": f"next uncovered tool is {uncovered[0]}",
                    "action": {"type": "tool", "name": uncovered[0]}, "stop": False}
        signals = [f"{o['tool']}: {'degraded' if o['degraded'] else 'ok'}" for o in p.get("observations", [])]
        return {"thought": "collected the available profiles", "action": {"type": "stop"}, "stop": True,
                "evidence": {"summary": f"{p.get('dimension')} profile from {len(signals)} tools",
                             "signals": signals or ["no observations"], "confidence": 0.6}}

    def _compare(self, p, request):
        score = profile_similarity(p.get("profiles_a", {}), p.get("profiles_b", {}))
        fp = p.get("fingerprint")
        if fp is not None:
            score = 0.75 * score + 0.25 * fp["similarity"]
        score = round(score, 4)
        return {"similarity_score": score, "confidence": 0.6, "tendency": _tendency(score),
                "signal_quality": "medium", "confounder_risk": "medium",
                "reasoning": f"mean metric agreement {score:.2f}"}

    _recheck = _compare

    def _preliminary(self, p, request):
        a = CodeSample.from_text(p.get("code_a", "x"))
        b = CodeSample.from_text(p.get("code_b", "x"))
        tools = [t for d in DIMENSIONS for t in DIMENSION_TOOLS[d]]
        pa = {k: v.to_dict() for k, v in extract_profiles(a, tools).items()}
        pb = {k: v.to_dict() for k, v in extract_profiles(b, tools).items()}
        score = profile_similarity(pa, pb)
        return {"tendency": _tendency(score), "confidence": 0.5,
                "overall_first_impression": f"raw profile agreement {score:.2f}",
                "reasoning": ["first look from raw profile agreement"]}

    @staticmethod
    def _weighted(p) -> float:
        reports, weights = p.get("latest_reports", {}), p.get("weights", {})
        if not reports:
            return 0.5
        return sum(weights.get(d, 0.25) * reports[d]["similarity_score"] for d in reports)

    def _synthesize(self, p, request):
        reports = p.get("latest_reports", {})
        summary = [{"dimension": d, "tendency": r["tendency"], "confidence": r["confidence"],
                    "is_degraded": bool(r.get("degraded")), "key_signal": r.get("reasoning", "")[:120]}
                   for d, r in ((d, reports[d]) for d in DIMENSIONS if d in reports)]
        score = self._weighted(p)
        return {"per_dimension_summary": summary,
                "overall_assessment": {"tendency": _tendency(score), "confidence": 0.6,
                                       "reasoning": f"weighted agreement {score:.2f}"}}

    def _decide(self, p, request):
        history = p.get("action_history", [])
        last = history[-1]["action"]["type"] if history else None
        if last in ("RECHECK_DIMENSION", "START_DEBATE"):
            return {"action_type": "ADJUST_WEIGHTS", "reasoning": "fold the latest outcome into the weights"}
        return {"action_type": "FINALIZE", "reasoning": "no further action planned"}

    def _reflect(self, p, request):
        return {"evidence_sufficient": True, "recommendation": "FINALIZE", "reasoning": "no open questions"}

    def _debate(self, p, request):
        own = p.get("own_report", {})
        return {"claim": f"{p.get('dimension')} holds at {own.get('similarity_score', 0.5):.2f}",
                "updated_dimension_tendency": own.get("tendency", "uncertain"),
                "updated_confidence": own.get("confidence", 0.5)}

    def _judge(self, p, request):
        score = self._weighted(p)
        return {"resolution": {"conflict_resolved": False, "explanation": "positions unchanged"},
                "final_judgment": _tendency(score), "confidence_after_debate": 0.5}

    def _finalize(self, p, request):
        reports, weights = p.get("latest_reports", {}), p.get("weights", {})
        score = self._weighted(p)
        chain = [{"dimension": d, "supports": reports[d]["tendency"], "strength": _strength(reports[d]["confidence"]),
                  "weight": weights.get(d, 0.25), "similarity_score": reports[d]["similarity_score"],
                  "key_evidence": reports[d].get("reasoning", "")[:200]}
                 for d in DIMENSIONS if d in reports]
        verdict = _tendency(score)
        confidence = score if verdict == "same_author" else 1 - score if verdict == "different_author" else 0.5
        return {"verdict": verdict, "confidence": round(confidence, 4), "evidence_chain": chain,
                "reasoning": f"weighted agreement {score:.2f}"}
