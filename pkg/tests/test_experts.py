import json

import pytest
from hypothesis import given, settings, strategies as st

from authorverify.coordinator.config import CROSS_LANGUAGE_DISABLED
from authorverify.errors import ConfigurationError, ContractError, ReportParseError, StepParseError
from authorverify.experts import (
    LEXICAL_CAP,
    PATTERN_FLOOR,
    ExpertEvidence,
    compare_dimension,
    enabled_tools,
    parse_react_step,
    run_expert,
)
from authorverify.llm import MeteredBackend, ReplayBackend, ScriptedBackend, Transcript, TranscriptEntry
from authorverify.pair import CodePair
from authorverify.stylometry import DIMENSION_TOOLS, DIMENSIONS, TOOL_NAMES, CodeSample

from .conftest import CORPUS, load_json

SAMPLE = CodeSample.from_path(CORPUS / "cpp_01_comp.cpp")
EVIDENCE = ExpertEvidence("portrait", ["signal"], 0.6)


def tool_step(name, thought="next"):
    return json.dumps({"thought": thought, "action": {"type": "tool", "name": name}, "stop": False})


def stop_step(conf=0.7):
    return json.dumps({"thought": "done", "action": {"type": "stop"}, "stop": True,
                       "evidence": {"summary": "style portrait", "signals": ["s1"], "confidence": conf}})


def replay(dimension, responses, side="a", round=1):
    t = Transcript()
    for i, text in enumerate(responses):
        t.append(TranscriptEntry(f"react|{round}|{dimension}|{side}{i}", "", text))
    return ReplayBackend(t)


def test_layout_full_coverage_from_replay():
    tools = DIMENSION_TOOLS["layout"]
    backend = MeteredBackend(replay("layout", [tool_step(t) for t in tools]), cap=40)
    evidence, trace = run_expert("layout", SAMPLE, 4, backend)
    assert len(trace.steps) == 5
    assert set(trace.invoked_tools) == set(tools)
    assert trace.steps[-1].forced and trace.steps[-1].step.stop
    assert [s.step_index for s in trace.steps] == list(range(5))
    assert backend.calls == 4
    assert evidence.summary == "budget exhausted"


def test_voluntary_stop_after_coverage():
    tools = DIMENSION_TOOLS["pattern"]
    backend = replay("pattern", [tool_step(t) for t in tools] + [stop_step(0.8)])
    evidence, trace = run_expert("pattern", SAMPLE, 6, backend)
    assert evidence.confidence == 0.8
    assert trace.tool_steps == 4 and not trace.steps[-1].forced


def test_single_step_budget():
    backend = MeteredBackend(replay("layout", [tool_step("comment_layout_profile")]), cap=40)
    evidence, trace = run_expert("layout", SAMPLE, 1, backend)
    assert trace.invoked_tools == ["comment_layout_profile"]
    assert backend.calls == 1
    assert trace.steps[-1].forced
    uncovered = [s for s in evidence.signals if s.startswith("uncovered:")]
    assert uncovered and "whitespace_profile" in uncovered[0]


def test_repeat_is_substituted():
    script = [tool_step("whitespace_profile"), tool_step("whitespace_profile"), tool_step("comment_layout_profile"),
              tool_step("format_stability_profile"), stop_step()]
    _, trace = run_expert("layout", SAMPLE, 4, replay("layout", script))
    assert trace.invoked_tools == ["whitespace_profile", "delimiter_layout_profile", "comment_layout_profile",
                                   "format_stability_profile"]
    (sub,) = trace.substitutions
    assert sub.substituted_from == "whitespace_profile" and sub.note == "repeated tool"


def test_early_stop_rejected_until_coverage():
    script = [tool_step("whitespace_profile"), stop_step(), stop_step(), stop_step(), stop_step()]
    _, trace = run_expert("layout", SAMPLE, 4, replay("layout", script))
    assert set(trace.invoked_tools) == set(DIMENSION_TOOLS["layout"])
    assert all(s.substituted_from == "<stop>" for s in trace.substitutions)


def test_cross_language_lexical_coverage_means_enabled_tools():
    tools = enabled_tools("lexical", CROSS_LANGUAGE_DISABLED)
    assert tools == ["char_ngram_profile", "identifier_style_profile"]
    script = [tool_step("token_frequency_profile"), tool_step("char_ngram_profile"), stop_step()]
    _, trace = run_expert("lexical", SAMPLE, 5, replay("lexical", script), disabled=CROSS_LANGUAGE_DISABLED)
    assert set(trace.invoked_tools) == set(tools)
    assert trace.substitutions[0].note == "tool not enabled"


def test_all_tools_disabled_is_configuration_error():
    with pytest.raises(ConfigurationError):
        run_expert("syntactic", SAMPLE, 4, ScriptedBackend(lambda r: stop_step()), disabled=DIMENSION_TOOLS["syntactic"])


def test_max_steps_precondition():
    with pytest.raises(ContractError):
        run_expert("layout", SAMPLE, 0, ScriptedBackend(lambda r: stop_step()))


ACTIONS = st.one_of(
    st.sampled_from(TOOL_NAMES + ("bogus_profile", "extract_whitespace_profile")).map(tool_step),
    st.just(stop_step()),
    st.sampled_from(["not json", "{\"thought\": 1}", "```json\n{}\n```", ""]),
)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(DIMENSIONS), st.lists(ACTIONS, min_size=1, max_size=12), st.integers(0, 3),
       st.booleans())
def test_coverage_property(dimension, script, extra, cross):
    disabled = CROSS_LANGUAGE_DISABLED if cross else ()
    tools = enabled_tools(dimension, disabled)
    calls = iter(script * 10)
    _, trace = run_expert(dimension, SAMPLE, len(tools) + extra, ScriptedBackend(lambda r: next(calls)),
                          disabled=disabled)
    assert set(trace.invoked_tools) == set(tools)
    assert len(trace.invoked_tools) == len(set(trace.invoked_tools))
    assert trace.tool_steps <= len(tools) + extra


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(DIMENSIONS), st.lists(ACTIONS, min_size=1, max_size=12), st.integers(1, 6))
def test_budget_and_no_repeat(dimension, script, max_steps):
    calls = iter(script * 10)
    _, trace = run_expert(dimension, SAMPLE, max_steps, ScriptedBackend(lambda r: next(calls)))
    assert trace.tool_steps <= max_steps
    assert len(trace.invoked_tools) == len(set(trace.invoked_tools))


# -- step parsing -----------------------------------------------------------------

def test_continue_step():
    step = parse_react_step(tool_step("whitespace_profile"))
    assert step.stop is False and step.tool == "whitespace_profile"


def test_stop_without_evidence():
    raw = json.dumps({"thought": "x", "action": {"type": "stop"}, "stop": True})
    with pytest.raises(StepParseError) as info:
        parse_react_step(raw)
    assert info.value.field == "evidence" and info.value.raw == raw


@pytest.mark.parametrize("case", load_json("malformed_steps.json"), ids=lambda c: c["name"])
def test_malformed_variants(case):
    expect = case["expect"]
    if expect["ok"]:
        step = parse_react_step(case["raw"])
        assert step.stop is expect["stop"]
        assert step.tool == expect["tool"]
    else:
        with pytest.raises(StepParseError) as info:
            parse_react_step(case["raw"])
        assert info.value.field == expect["field"]
        assert info.value.raw == case["raw"]


def test_malformed_fixture_size():
    assert len(load_json("malformed_steps.json")) == 12


# -- comparison -------------------------------------------------------------------

PAIR = CodePair(CodeSample.from_path(CORPUS / "py_01_solver.py"), CodeSample.from_path(CORPUS / "py_02_util.py"))


def report_json(**kw):
    base = {"similarity_score": 0.58, "confidence": 0.66, "tendency": "uncertain", "matches": ["m1"],
            "differences": ["d1"], "author_stable_matches": ["a1"], "template_or_task_matches": ["t1"],
            "high_risk_confounders": ["c1"], "signal_quality": "high", "confounder_risk": "low",
            "reasoning": "why"}
    base.update(kw)
    return json.dumps(base)


def replay_compare(dimension, text, mode="compare"):
    t = Transcript()
    t.append(TranscriptEntry(f"{mode}|1|{dimension}|-", "", text))
    return ReplayBackend(t)


def test_valid_report_fields_verbatim():
    report = compare_dimension("syntactic", EVIDENCE, EVIDENCE, PAIR, replay_compare("syntactic", report_json()))
    assert (report.tendency, report.similarity_score, report.confidence) == ("uncertain", 0.58, 0.66)
    assert (report.matches, report.differences, report.author_stable_matches) == (["m1"], ["d1"], ["a1"])
    assert (report.template_or_task_matches, report.high_risk_confounders) == (["t1"], ["c1"])
    assert (report.signal_quality, report.confounder_risk, report.reasoning) == ("high", "low", "why")
    assert report.adjustments == []


def test_out_of_range_similarity_names_field():
    with pytest.raises(ReportParseError) as info:
        compare_dimension("layout", EVIDENCE, EVIDENCE, PAIR, ScriptedBackend(lambda r: report_json(similarity_score=1.4)))
    assert info.value.field == "similarity_score"


def test_pattern_floor_for_scale_mismatch():
    small = CodeSample("print(1)\n", "python")
    big = CodeSample.from_path(CORPUS / "py_01_solver.py")
    pair = CodePair(small, big)
    report = compare_dimension("pattern", EVIDENCE, EVIDENCE, pair,
                               ScriptedBackend(lambda r: report_json(similarity_score=0.2, tendency="different_author")))
    assert report.similarity_score == PATTERN_FLOOR
    assert report.adjustments[0]["rule"] == "pattern_scale_floor"
    assert report.adjustments[0]["from"] == 0.2


def test_pattern_floor_not_applied_to_similar_scale():
    same = CodeSample.from_path(CORPUS / "py_01_solver.py")
    report = compare_dimension("pattern", EVIDENCE, EVIDENCE, CodePair(same, same),
                               ScriptedBackend(lambda r: report_json(similarity_score=0.2)))
    assert report.similarity_score == 0.2


def test_lexical_cap_when_naming_differs():
    a = CodeSample("def count_pairs(values_list):\n    total_sum = 0\n    return total_sum\n", "python")
    b = CodeSample("def countPairs(valuesList):\n    totalSum = 0\n    return totalSum\n", "python")
    report = compare_dimension("lexical", EVIDENCE, EVIDENCE, CodePair(a, b),
                               ScriptedBackend(lambda r: report_json(similarity_score=0.9)))
    assert report.similarity_score == LEXICAL_CAP
    assert report.adjustments[0]["rule"] == "lexical_naming_cap"


def test_cross_language_prompt_variant():
    seen = {}

    def respond(request):
        seen["system"] = request.messages[0]["content"]
        seen["user"] = json.loads(request.messages[1]["content"])
        return report_json()

    pair = CodePair(CodeSample.from_path(CORPUS / "py_01_solver.py"), CodeSample.from_path(CORPUS / "cpp_01_comp.cpp"))
    compare_dimension("layout", EVIDENCE, EVIDENCE, pair, ScriptedBackend(respond), disabled=CROSS_LANGUAGE_DISABLED)
    assert "python" in seen["system"] and "cpp" in seen["system"]
    assert seen["user"]["cross_language"] is True and "code_a" in seen["user"]


VALUES = st.one_of(st.none(), st.booleans(), st.integers(-3, 3), st.floats(-2, 2, allow_nan=False),
                   st.sampled_from(["same_author", "different_author", "uncertain", "maybe", "low", "high"]),
                   st.lists(st.text(max_size=5), max_size=2))
KEYS = st.sampled_from(["similarity_score", "confidence", "tendency", "signal_quality", "confounder_risk",
                        "matches", "reasoning", "gap_is_task_driven", "weight_recommendation"])


@settings(max_examples=150, deadline=None)
@given(st.dictionaries(KEYS, VALUES, max_size=9), st.sampled_from(DIMENSIONS))
def test_schema_totality(payload, dimension):
    raw = json.dumps(payload)
    try:
        report = compare_dimension(dimension, EVIDENCE, EVIDENCE, PAIR, ScriptedBackend(lambda r: raw))
    except ReportParseError:
        return
    assert 0.0 <= report.similarity_score <= 1.0
    assert 0.0 <= report.confidence <= 1.0
    assert report.tendency in ("same_author", "different_author", "uncertain")
    assert report.signal_quality in ("low", "medium", "high")
    assert report.confounder_risk in ("low", "medium", "high")
    if payload.get("tendency") == "uncertain":
        assert report.tendency == "uncertain"


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from(DIMENSIONS))
def test_uncertain_is_preserved(sim, conf, dimension):
    raw = report_json(similarity_score=sim, confidence=conf, tendency="uncertain")
    small = CodeSample("print(1)\n", "python")
    pair = CodePair(small, CodeSample.from_path(CORPUS / "py_01_solver.py"))
    report = compare_dimension(dimension, EVIDENCE, EVIDENCE, pair, ScriptedBackend(lambda r: raw))
    assert report.tendency == "uncertain"
