"""JSON schemas for every structured model output, keyed by schema id."""

from __future__ import annotations

from jsonschema import Draft202012Validator

from ..errors import RegistryError

DIMENSION_ENUM = ["layout", "lexical", "syntactic", "pattern"]
TENDENCY_ENUM = ["same_author", "different_author", "uncertain"]
LEVEL_ENUM = ["low", "medium", "high"]
SEVERITY_ENUM = ["low", "medium", "high", "critical"]
STRENGTH_ENUM = ["weak", "moderate", "strong"]
ACTION_ENUM = ["FINALIZE", "RECHECK_DIMENSION", "START_DEBATE", "ADJUST_WEIGHTS"]
WEIGHT_SIGNAL_ENUM = ["strong_strengthen", "strengthen", "neutral", "weaken", "strong_weaken"]
REVIEW_STATUS_ENUM = ["confirmed", "weakened", "overturned"]

_unit = {"type": "number", "minimum": 0, "maximum": 1}
_text = {"type": "string"}
_texts = {"type": "array", "items": {"type": "string"}}
_dimension = {"enum": DIMENSION_ENUM}
_tendency = {"enum": TENDENCY_ENUM}
_level = {"enum": LEVEL_ENUM}


def _obj(required: dict, optional: dict | None = None, extra: bool = True) -> dict:
    props = dict(required)
    props.update(optional or {})
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": extra}


def _per_dimension(value_schema: dict) -> dict:
    return {"type": "object", "propertyNames": _dimension, "additionalProperties": value_schema}


EVIDENCE = _obj({"summary": _text, "signals": _texts, "confidence": _unit})

REACT_STEP = _obj(
    {
        "thought": _text,
        "action": _obj({"type": {"enum": ["tool", "stop"]}}, {"name": _text}),
        "stop": {"type": "boolean"},
    },
    {"evidence": EVIDENCE},
)

EXPERT_REPORT = _obj(
    {"similarity_score": _unit, "confidence": _unit},
    {
        "tendency": _tendency,
        "summary": _text,
        "matches": _texts,
        "differences": _texts,
        "author_stable_matches": _texts,
        "template_or_task_matches": _texts,
        "high_risk_confounders": _texts,
        "author_stable_signals": _texts,
        "different_author_signals": _texts,
        "neutral_or_confounding_signals": _texts,
        "signal_quality": _level,
        "confounder_risk": _level,
        "reasoning": _text,
        "weight_recommendation": {"enum": WEIGHT_SIGNAL_ENUM},
        "gap_is_task_driven": {"type": "boolean"},
    },
)

PRELIMINARY = _obj(
    {"tendency": _tendency, "confidence": _unit},
    {
        "overall_first_impression": _text,
        "reasoning": _texts,
        "candidate_style_axes": _texts,
        "suspected_confounders": _texts,
        "dimension_routing": _per_dimension(
            _obj({"priority": _level}, {"why": _text, "focus_question": _text})),
        "global_questions": _texts,
        "do_not_overtrust": _texts,
        "cross_language_mode": {"type": "boolean"},
        "detected_languages": _texts,
        "cross_language_stable_signals": _texts,
    },
)

_conflict = _obj(
    {"dimensions": {"type": "array", "items": _dimension, "minItems": 2, "maxItems": 2}},
    {"severity": {"enum": SEVERITY_ENUM}, "description": _text},
)

SYNTHESIS = _obj(
    {
        "per_dimension_summary": {
            "type": "array",
            "minItems": 4,
            "maxItems": 4,
            "items": _obj(
                {"dimension": _dimension, "tendency": _tendency, "confidence": _unit},
                {"key_signal": _text, "is_degraded": {"type": "boolean"},
                 "signal_quality": _level, "confounder_risk": _level},
            ),
        },
        "overall_assessment": _obj({"tendency": _tendency, "confidence": _unit}, {"reasoning": _text}),
    },
    {
        "cross_dimension_analysis": _obj({}, {
            "consensus": _texts,
            "conflicts": {"type": "array", "items": _conflict},
            "uncertain": _texts,
            "max_severity": {"enum": SEVERITY_ENUM},
            "critical_conflict": {"anyOf": [{"type": "null"}, _conflict]},
        }),
        "preliminary_update": _obj({}, {"status": {"enum": REVIEW_STATUS_ENUM}, "why": _text}),
        "evidence_balance": _obj({}, {
            "same_author_support": _texts,
            "different_author_support": _texts,
            "main_drivers": _texts,
            "high_risk_confounders": _texts,
        }),
        "what_changed": _text,
        "remaining_questions": _texts,
    },
)

DECISION = _obj(
    {"action_type": {"enum": ACTION_ENUM}},
    {
        "reasoning": _text,
        "params": _obj({}, {
            "dimension": _dimension,
            "proponent": _dimension,
            "opponent": _dimension,
            "adjustments": _per_dimension({"enum": WEIGHT_SIGNAL_ENUM}),
        }),
    },
)

REFLECTION = _obj(
    {"evidence_sufficient": {"type": "boolean"}, "recommendation": {"enum": ["FINALIZE", "CONTINUE"]}},
    {
        "round": {"type": "integer", "minimum": 1},
        "assessment": _obj({}, {
            "total_dimensions_analyzed": {"type": "integer", "minimum": 0},
            "high_confidence_dimensions": _texts,
            "resolved_conflicts": _texts,
            "unresolved_conflicts": _texts,
            "overall_evidence_strength": {"enum": STRENGTH_ENUM},
        }),
        "reasoning": _text,
    },
)

DEBATE_TURN = _obj(
    {"claim": _text, "updated_dimension_tendency": _tendency, "updated_confidence": _unit},
    {
        "evidence": _texts,
        "concession": _text,
        "what_would_change_my_mind": _text,
        "verdict_request": _text,
        "new_code_grounded_observations": _texts,
        "which_existing_evidence_is_overstated": _texts,
        "which_existing_evidence_is_confirmed": _texts,
    },
)

JUDGE = _obj(
    {
        "resolution": _obj(
            {"conflict_resolved": {"type": "boolean"}},
            {
                "explanation": _text,
                "dimension_credibility_update": _per_dimension(_text),
                "weight_recommendation": _per_dimension({"enum": WEIGHT_SIGNAL_ENUM}),
                "new_evidence_from_debate": _texts,
                "remaining_issues": _texts,
                "report_patch_suggestions": {
                    "type": "array",
                    "items": _obj({"dimension": _dimension},
                                  {"tendency": _tendency, "confidence": _unit, "reason": _text}),
                },
            },
        ),
        "final_judgment": _tendency,
        "confidence_after_debate": _unit,
    },
    {
        "debate_topic": _text,
        "proponent": _dimension,
        "opponent": _dimension,
        "total_turns": {"type": "integer", "minimum": 0},
        "recommended_next_action": {"enum": ACTION_ENUM},
    },
)

FINAL_DECISION = _obj(
    {
        "verdict": _tendency,
        "confidence": _unit,
        "evidence_chain": {
            "type": "array",
            "minItems": 4,
            "maxItems": 4,
            "items": _obj(
                {"dimension": _dimension, "supports": _tendency, "strength": {"enum": STRENGTH_ENUM}},
                {"weight": {"type": "number", "minimum": 0}, "similarity_score": _unit,
                 "confounder_risk": _level, "key_evidence": _text},
            ),
        },
        "reasoning": _text,
    },
    {
        "process_alignment": _obj({}, {
            "preliminary_review_status": {"enum": REVIEW_STATUS_ENUM},
            "dimension_alignment": _text,
            "debate_contribution": _text,
            "reflection_adoption": _text,
        }),
        "dissenting_opinions": _texts,
    },
)

SCHEMAS = {
    "react_step": REACT_STEP,
    "expert_report": EXPERT_REPORT,
    "preliminary": PRELIMINARY,
    "synthesis": SYNTHESIS,
    "decision": DECISION,
    "reflection": REFLECTION,
    "debate_turn": DEBATE_TURN,
    "judge": JUDGE,
    "final_decision": FINAL_DECISION,
}

_VALIDATORS = {}


def validator(schema_id: str) -> Draft202012Validator:
    if schema_id not in SCHEMAS:
        raise RegistryError(f"unknown schema {schema_id!r}; registered: {', '.join(SCHEMAS)}")
    if schema_id not in _VALIDATORS:
        _VALIDATORS[schema_id] = Draft202012Validator(SCHEMAS[schema_id])
    return _VALIDATORS[schema_id]
