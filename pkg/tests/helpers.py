"""Scripted backends shared by the engine-level tests."""

import json
import random

from authorverify.llm import ScriptedBackend
from authorverify.pair import CodePair
from authorverify.stylometry import DIMENSIONS, CodeSample

from .conftest import CORPUS


def cpp_pair():
    return CodePair(CodeSample.from_path(CORPUS / "cpp_01_comp.cpp"), CodeSample.from_path(CORPUS / "cpp_02_graph.cpp"))


def cross_pair():
    return CodePair(CodeSample.from_path(CORPUS / "py_01_solver.py"), CodeSample.from_path(CORPUS / "cpp_01_comp.cpp"))


def report(sim, tendency="uncertain", confidence=0.6, **kw):
    out = {"similarity_score": sim, "confidence": confidence, "tendency": tendency,
           "signal_quality": "medium", "confounder_risk": "medium", "reasoning": "scripted"}
    out.update(kw)
    return out


def chain(*supports, strength="moderate"):
    return [{"dimension": d, "supports": s, "strength": strength} for d, s in zip(DIMENSIONS, supports)]


class Script:
    """Stage-keyed scripted model; every stage answers validly unless overridden.

    Overrides are callables ``(tag, payload) -> dict or str`` keyed by stage name.
    """

    def __init__(self, sims=None, tendencies=None, **overrides):
        self.sims = dict(zip(DIMENSIONS, sims or (0.5, 0.5, 0.5, 0.5)))
        self.tendencies = dict(zip(DIMENSIONS, tendencies or ("uncertain",) * 4))
        self.overrides = overrides
        self.stages = []

    def backend(self):
        return ScriptedBackend(self)

    def __call__(self, request):
        tag = request.tag
        # a re-prompt keeps its tag and appends the rejected answer plus a note
        stage = tag.stage + "_retry" if len(request.messages) > 2 else tag.stage
        self.stages.append(stage)
        payload = json.loads(request.messages[1]["content"])
        if stage in self.overrides:
            out = self.overrides[stage](tag, payload)
        else:
            out = getattr(self, "default_" + stage)(tag, payload)
        return out if isinstance(out, str) else json.dumps(out)

    def default_preliminary(self, tag, p):
        return {"tendency": "uncertain", "confidence": 0.5}

    def default_react(self, tag, p):
        uncovered = [t for t in p["enabled_tools"] if t not in p["invoked_tools"]]
        if uncovered:
            return {"thought": "t", "action": {"type": "tool", "name": uncovered[0]}, "stop": False}
        return {"thought": "t", "action": {"type": "stop"}, "stop": True,
                "evidence": {"summary": "s", "signals": ["x"], "confidence": 0.6}}

    def default_compare(self, tag, p):
        d = tag.dimension
        return report(self.sims[d], self.tendencies[d])

    def default_recheck(self, tag, p):
        prior = p["prior_report"]
        return report(prior["similarity_score"], prior["tendency"], prior["confidence"])

    def default_synthesize(self, tag, p):
        reports = p["latest_reports"]
        return {"per_dimension_summary": [{"dimension": d, "tendency": r["tendency"], "confidence": r["confidence"]}
                                          for d, r in reports.items()],
                "overall_assessment": {"tendency": "uncertain", "confidence": 0.5}}

    default_synthesize_retry = default_synthesize

    def default_reflect(self, tag, p):
        return {"evidence_sufficient": True, "recommendation": "FINALIZE"}

    def default_decide(self, tag, p):
        return {"action_type": "FINALIZE"}

    def default_debate(self, tag, p):
        return {"claim": "c", "updated_dimension_tendency": "uncertain", "updated_confidence": 0.5}

    def default_judge(self, tag, p):
        return {"resolution": {"conflict_resolved": False}, "final_judgment": "uncertain",
                "confidence_after_debate": 0.5}

    def default_finalize(self, tag, p):
        reports = p["latest_reports"]
        return {"verdict": "uncertain", "confidence": 0.5, "reasoning": "r",
                "evidence_chain": [{"dimension": d, "supports": reports[d]["tendency"], "strength": "weak"}
                                   for d in DIMENSIONS]}

    default_finalize_retry = default_finalize


TENDENCIES = ("same_author", "different_author", "uncertain")
ACTIONS = ("FINALIZE", "RECHECK_DIMENSION", "START_DEBATE", "ADJUST_WEIGHTS")
SIGNALS = ("strong_strengthen", "strengthen", "neutral", "weaken", "strong_weaken")


class RandomScript(Script):
    """Seeded model that mixes valid, invalid and adversarial answers at every stage."""

    def __init__(self, seed):
        self.rng = random.Random(seed)
        super().__init__()

    def __call__(self, request):
        if self.rng.random() < 0.08:
            self.stages.append(request.tag.stage)
            return self.rng.choice(["", "not json", "{\"unbalanced\": ", "```\n[]\n```"])
        return super().__call__(request)

    def default_preliminary(self, tag, p):
        return {"tendency": self.rng.choice(TENDENCIES), "confidence": self.rng.random()}

    def default_react(self, tag, p):
        rng = self.rng
        if rng.random() < 0.3:
            return {"thought": "t", "action": {"type": "stop"}, "stop": True,
                    "evidence": {"summary": "s", "signals": ["x"], "confidence": rng.random()}}
        name = rng.choice(p["enabled_tools"] + ["whitespace_profile", "nope"])
        return {"thought": "t", "action": {"type": "tool", "name": name}, "stop": False}

    def default_compare(self, tag, p):
        return report(round(self.rng.random(), 3), self.rng.choice(TENDENCIES), round(self.rng.random(), 3),
                      gap_is_task_driven=self.rng.random() < 0.2,
                      weight_recommendation=self.rng.choice(SIGNALS))

    default_recheck = default_compare

    def default_synthesize(self, tag, p):
        out = super().default_synthesize(tag, p)
        if self.rng.random() < 0.1:
            for item in out["per_dimension_summary"]:
                item["tendency"] = "same_author"
        dims = list(DIMENSIONS)
        self.rng.shuffle(dims)
        out["cross_dimension_analysis"] = {"conflicts": [{"dimensions": dims[:2],
                                                          "severity": self.rng.choice(["low", "critical"])}]}
        return out

    default_synthesize_retry = default_synthesize

    def default_reflect(self, tag, p):
        return {"evidence_sufficient": self.rng.random() < 0.5, "recommendation": self.rng.choice(["FINALIZE", "CONTINUE"])}

    def default_decide(self, tag, p):
        dims = list(DIMENSIONS) + ["bogus"]
        return {"action_type": self.rng.choice(ACTIONS),
                "params": {"dimension": self.rng.choice(dims), "proponent": self.rng.choice(dims[:4]),
                           "opponent": self.rng.choice(dims[:4]),
                           "adjustments": {self.rng.choice(dims[:4]): self.rng.choice(SIGNALS)}}}

    def default_debate(self, tag, p):
        return {"claim": "c", "updated_dimension_tendency": self.rng.choice(TENDENCIES),
                "updated_confidence": self.rng.random()}

    def default_judge(self, tag, p):
        d = self.rng.choice(DIMENSIONS)
        return {"resolution": {"conflict_resolved": self.rng.random() < 0.5,
                               "weight_recommendation": {d: self.rng.choice(SIGNALS)},
                               "report_patch_suggestions": [{"dimension": d, "tendency": self.rng.choice(TENDENCIES),
                                                             "confidence": self.rng.random()}]},
                "final_judgment": self.rng.choice(TENDENCIES), "confidence_after_debate": self.rng.random()}

    def default_finalize(self, tag, p):
        sup = [self.rng.choice(TENDENCIES) for _ in DIMENSIONS]
        return {"verdict": self.rng.choice(TENDENCIES), "confidence": self.rng.random(), "reasoning": "r",
                "evidence_chain": chain(*sup, strength=self.rng.choice(["weak", "moderate", "strong"]))}

    default_finalize_retry = default_finalize
