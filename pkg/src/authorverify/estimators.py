"""scikit-learn style wrappers around the extractor and the verification engine.

Both are training-free: ``fit`` only validates input and freezes settings.
"""

from __future__ import annotations

import copy

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .coordinator.config import EngineConfig
from .coordinator.engine import MODES, binary_label, verify_pair
from .errors import ContractError, InputError
from .llm.backends import Backend
from .llm.heuristic import HeuristicBackend
from .pair import CodePair
from .stylometry.profiles import TOOL_NAMES, extract_profiles
from .stylometry.tokenizer import CodeSample


def check_samples(X) -> list[CodeSample]:
    out = []
    for item in X:
        if isinstance(item, CodeSample):
            out.append(item)
        elif isinstance(item, (str, bytes)):
            out.append(CodeSample.from_text(item))
        else:
            raise InputError(f"expected a CodeSample or source text, got {type(item).__name__}")
    return out


def check_pairs(X) -> list[CodePair]:
    out = []
    for item in X:
        if isinstance(item, CodePair):
            out.append(item)
            continue
        try:
            a, b = item
        except (TypeError, ValueError):
            raise InputError("each pair must be a CodePair or a 2-sequence of samples") from None
        sa, sb = check_samples([a, b])
        out.append(CodePair(sa, sb))
    return out


def _flatten(prefix: str, value, out: dict) -> None:
    if isinstance(value, bool):
        out[prefix] = float(value)
    elif isinstance(value, (int, float)):
        out[prefix] = float(value)
    elif isinstance(value, dict) and all(isinstance(v, (int, float)) for v in value.values()):
        for k, v in value.items():
            out[f"{prefix}.{k}"] = float(v)
    # ranked lists and sets carry no fixed-width encoding


class StyleProfileTransformer(TransformerMixin, BaseEstimator):
    """Turns code samples into a fixed-width matrix of scalar stylometric metrics.

    Columns are fixed at ``fit`` time; unseen keys at transform time are dropped
    and absent ones read as 0.
    """

    def __init__(self, tools=None):
        self.tools = tools

    def _rows(self, X):
        tools = list(self.tools) if self.tools is not None else list(TOOL_NAMES)
        rows = []
        for sample in check_samples(X):
            flat = {}
            for name, profile in extract_profiles(sample, tools).items():
                for metric, value in profile.metrics.items():
                    _flatten(f"{name}.{metric}", value, flat)
            rows.append(flat)
        return rows

    def fit(self, X, y=None):
        rows = self._rows(X)
        self.feature_names_out_ = np.array(sorted({k for r in rows for k in r}), dtype=object)
        self.n_features_out_ = len(self.feature_names_out_)
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_names_out_")
        rows = self._rows(X)
        return np.array([[r.get(k, 0.0) for k in self.feature_names_out_] for r in rows], dtype=float)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return self.feature_names_out_.copy()


class AuthorshipVerifier(ClassifierMixin, BaseEstimator):
    """Same-author classifier over code pairs, backed by the coordinator engine.

    ``predict`` returns booleans (True = same author); uncertain verdicts
    resolve by aggregate score >= 0.5. Full case results are kept in
    ``results_`` after each predict call.
    """

    def __init__(self, backend=None, mode="full", config=None, calls=40, rounds=4):
        self.backend = backend
        self.mode = mode
        self.config = config
        self.calls = calls
        self.rounds = rounds

    def _engine_config(self) -> EngineConfig:
        if isinstance(self.config, EngineConfig):
            cfg = copy.deepcopy(self.config)
        else:
            cfg = EngineConfig.from_mapping(self.config)
        cfg.budgets.calls = self.calls
        cfg.budgets.rounds = self.rounds
        return cfg.validate()

    def fit(self, X=None, y=None):
        if self.mode not in MODES:
            raise ContractError(f"unknown mode {self.mode!r}")
        if self.backend is not None and not isinstance(self.backend, Backend):
            raise ContractError("backend must be a Backend instance")
        if X is not None:
            check_pairs(X)
        self.config_ = self._engine_config()
        self.backend_ = self.backend if self.backend is not None else HeuristicBackend()
        self.classes_ = np.array([False, True])
        return self

    def _run(self, X):
        check_is_fitted(self, "config_")
        self.results_ = [verify_pair(p, self.backend_, self.config_, mode=self.mode) for p in check_pairs(X)]
        return self.results_

    def decision_function(self, X):
        return np.array([r.decision.aggregate_score for r in self._run(X)])

    def predict(self, X):
        return np.array([binary_label(r.decision.verdict, r.decision.aggregate_score) for r in self._run(X)])

    def predict_verdict(self, X):
        return [r.decision.verdict for r in self._run(X)]

    def predict_proba(self, X):
        scores = self.decision_function(X)
        return np.column_stack([1 - scores, scores])
