import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from authorverify.coordinator.config import EngineConfig
from authorverify.errors import ContractError, InputError
from authorverify.estimators import AuthorshipVerifier, StyleProfileTransformer
from authorverify.llm.backends import ScriptedBackend
from authorverify.stylometry.tokenizer import CodeSample

from .conftest import CORPUS
from .oracles.build_golden import golden_pair, respond


def corpus(n=4):
    return [CodeSample.from_path(p) for p in sorted(CORPUS.iterdir())[:n]]


def test_transformer_shape_and_names():
    samples = corpus()
    t = StyleProfileTransformer().fit(samples)
    X = t.transform(samples)
    names = t.get_feature_names_out()
    assert X.shape == (len(samples), len(names))
    assert len(names) == t.n_features_out_
    assert list(names) == sorted(names)
    assert np.isfinite(X).all()
    assert any(n.startswith("whitespace_profile.") for n in names)


def test_transformer_tool_subset():
    t = StyleProfileTransformer(tools=["whitespace_profile"]).fit(corpus(2))
    assert all(n.startswith("whitespace_profile.") for n in t.get_feature_names_out())


def test_transformer_columns_fixed_at_fit():
    t = StyleProfileTransformer().fit(corpus(2))
    X = t.transform(["", "x = 1\n"])
    assert X.shape[1] == t.n_features_out_


def test_transformer_needs_fit():
    with pytest.raises(NotFittedError):
        StyleProfileTransformer().transform(["x = 1\n"])


def test_transformer_rejects_other_inputs():
    with pytest.raises(InputError):
        StyleProfileTransformer().fit([42])


def test_clone_and_params():
    t = StyleProfileTransformer(tools=["whitespace_profile"])
    assert clone(t).get_params() == {"tools": ["whitespace_profile"]}
    v = AuthorshipVerifier(mode="no_revision", calls=20)
    params = clone(v).get_params()
    assert params["mode"] == "no_revision" and params["calls"] == 20
    assert v.set_params(rounds=2).rounds == 2


def test_transformer_in_pipeline():
    pipe = Pipeline([("style", StyleProfileTransformer(tools=["whitespace_profile"]))])
    assert pipe.fit_transform(corpus(3)).shape[0] == 3


def test_verifier_on_golden_script():
    v = AuthorshipVerifier(backend=ScriptedBackend(respond)).fit()
    pair = golden_pair()
    assert v.predict([pair]).tolist() == [True]
    assert v.predict_verdict([pair]) == ["same_author"]
    scores = v.decision_function([pair])
    assert scores[0] == pytest.approx(0.46285714285714286)
    proba = v.predict_proba([pair])
    assert proba.shape == (1, 2)
    assert proba.sum(axis=1) == pytest.approx([1.0])
    assert v.classes_.tolist() == [False, True]
    assert v.results_[0].llm_calls == 36


def test_verifier_default_backend_accepts_text_pairs():
    a = "def f(x):\n    return x + 1\n"
    v = AuthorshipVerifier(mode="no_expansion").fit()
    out = v.predict([(a, a)])
    assert out.dtype == bool and out.shape == (1,)


def test_verifier_settings_reach_engine():
    v = AuthorshipVerifier(calls=12, rounds=2, config={"thresholds": {"suspect": 0.35}}).fit()
    assert v.config_.budgets.calls == 12 and v.config_.budgets.rounds == 2
    assert v.config_.thresholds.suspect == 0.35
    base = EngineConfig()
    AuthorshipVerifier(config=base, calls=9).fit()
    assert base.budgets.calls != 9


def test_verifier_validation():
    with pytest.raises(ContractError):
        AuthorshipVerifier(mode="nope").fit()
    with pytest.raises(ContractError):
        AuthorshipVerifier(backend=object()).fit()
    with pytest.raises(InputError):
        AuthorshipVerifier().fit([("only one",)])
    with pytest.raises(NotFittedError):
        AuthorshipVerifier().predict([("a", "b")])
