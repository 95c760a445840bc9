from hypothesis import given, settings, strategies as st

from authorverify.coordinator import Case, verify_pair
from authorverify.errors import SynthesisError
from authorverify.stylometry import DIMENSIONS

from .helpers import RandomScript, cpp_pair, cross_pair

HISTORIES = ("synthesis_history", "reflection_history", "debate_history", "recheck_history", "patch_history",
             "weight_history", "action_history")


class AuditedCase(Case):
    """Checks after every stage that no history lost or reordered an entry."""

    def __init__(self, *args, **kwargs):
        self.snapshots = []
        super().__init__(*args, **kwargs)

    def check(self):
        now = {name: [id(x) for x in getattr(self.state, name)] for name in HISTORIES}
        if self.snapshots:
            last = self.snapshots[-1]
            for name in HISTORIES:
                assert now[name][:len(last[name])] == last[name], name
        self.snapshots.append(now)

    def _wrap(name):
        def method(self, *args, **kwargs):
            out = getattr(Case, name)(self, *args, **kwargs)
            self.check()
            return out
        return method

    for _name in ("preliminary_review", "dispatch_experts", "synthesize", "reflect", "decide_next_action",
                  "run_debate", "recheck_dimension", "apply_weight_adjustment", "finalize", "decide_by_threshold"):
        locals()[_name] = _wrap(_name)
    del _name, _wrap


SEEDS = st.integers(0, 10**6)


@settings(max_examples=25, deadline=None)
@given(SEEDS, st.booleans())
def test_budget_safety(seed, cross):
    result = verify_pair(cross_pair() if cross else cpp_pair(), RandomScript(seed).backend())
    s = result.state
    assert result.llm_calls <= 40
    assert s.round <= 4
    assert s.debates_used <= 2
    assert all(d.total_turns == 3 for d in s.debate_history)
    assert all(r.round > 1 for r in s.reflection_history)


@settings(max_examples=20, deadline=None)
@given(SEEDS)
def test_histories_append_only(seed):
    case = AuditedCase(cpp_pair(), RandomScript(seed).backend())
    result = case.run()
    assert len(case.snapshots) >= 2
    rounds = [x.round for x in result.state.synthesis_history]
    assert rounds == sorted(rounds)


@settings(max_examples=20, deadline=None)
@given(SEEDS)
def test_reflection_never_in_round_one(seed):
    case = Case(cross_pair(), RandomScript(seed).backend())
    case.preliminary_review()
    case.dispatch_experts()
    case.state.round = 1
    try:
        if case.synthesize() is not None:
            case.reflect()
    except SynthesisError:
        pass
    assert case.state.reflection_history == []


@settings(max_examples=20, deadline=None)
@given(SEEDS)
def test_trace_determinism(seed):
    first = verify_pair(cpp_pair(), RandomScript(seed).backend()).trace.dumps()
    again = verify_pair(cpp_pair(), RandomScript(seed).backend()).trace.dumps()
    assert first == again


class SynthesisAudit(Case):
    def synthesize(self):
        uncertain = [d for d, r in self.state.latest_reports.items() if r.tendency == "uncertain"]
        result = super().synthesize()
        if result is not None:
            for d in uncertain:
                assert result.summary_for(d)["tendency"] == "uncertain", d
            self.accepted = getattr(self, "accepted", 0) + 1
        return result


@settings(max_examples=20, deadline=None)
@given(SEEDS)
def test_uncertain_survives_synthesis(seed):
    SynthesisAudit(cpp_pair(), RandomScript(seed).backend()).run()
