"""Engine configuration: thresholds, budgets, weight presets, disabled tools."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigurationError
from ..stylometry.profiles import DIMENSIONS

SAME_LANGUAGE_WEIGHTS = {"layout": 0.23, "lexical": 0.28, "syntactic": 0.27, "pattern": 0.22}
CROSS_LANGUAGE_WEIGHTS = {"layout": 0.22, "lexical": 0.30, "syntactic": 0.08, "pattern": 0.40}
CROSS_LANGUAGE_DISABLED = (
    "token_frequency", "token_ngram", "abstract_lexical",
    "ast_node", "ast_path", "construct_usage",
    "fingerprint", "api_idiom",
)


@dataclass
class Thresholds:
    same: float = 0.62
    different: float = 0.38
    early_stop: float = 0.70
    recheck: float = 0.50
    suspect: float = 0.40
    resolved: float = 0.45
    divergence_high: float = 0.60

    def validate(self):
        if not 0 <= self.different < self.recheck < self.same < self.early_stop <= 1:
            raise ConfigurationError(
                "thresholds must satisfy 0 <= different < recheck < same < early_stop <= 1, got "
                f"{self.different}, {self.recheck}, {self.same}, {self.early_stop}")
        if not self.suspect <= self.resolved:
            raise ConfigurationError("suspect threshold must not exceed the resolved threshold")


@dataclass
class Budgets:
    rounds: int = 4
    debates: int = 2
    turns: int = 3
    calls: int = 40

    def validate(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 1:
                raise ConfigurationError(f"budget {f.name} must be a positive integer, got {value!r}")


@dataclass
class EngineConfig:
    thresholds: Thresholds = field(default_factory=Thresholds)
    budgets: Budgets = field(default_factory=Budgets)
    same_language_weights: dict = field(default_factory=lambda: dict(SAME_LANGUAGE_WEIGHTS))
    cross_language_weights: dict = field(default_factory=lambda: dict(CROSS_LANGUAGE_WEIGHTS))
    cross_language_disabled: tuple = CROSS_LANGUAGE_DISABLED
    prompt_pack: str | None = None
    # tool steps per expert loop; None derives it from the remaining call budget
    expert_steps: int | None = None
    finalize_reserve: int = 1
    round_reserve: int = 18
    expert_workers: int = 1

    def __post_init__(self):
        if isinstance(self.thresholds, dict):
            self.thresholds = Thresholds(**self.thresholds)
        if isinstance(self.budgets, dict):
            self.budgets = Budgets(**self.budgets)
        self.cross_language_disabled = tuple(self.cross_language_disabled)

    def validate(self) -> "EngineConfig":
        self.thresholds.validate()
        self.budgets.validate()
        for name in ("same_language_weights", "cross_language_weights"):
            weights = getattr(self, name)
            if set(weights) != set(DIMENSIONS):
                raise ConfigurationError(f"{name} must name exactly {DIMENSIONS}")
            if any(w < 0 for w in weights.values()) or abs(sum(weights.values()) - 1) > 1e-6:
                raise ConfigurationError(f"{name} must be non-negative and sum to 1")
        if self.expert_steps is not None and self.expert_steps < 1:
            raise ConfigurationError("expert_steps must be at least 1")
        if self.finalize_reserve < 0 or self.round_reserve < 0 or self.expert_workers < 1:
            raise ConfigurationError("reserves must be >= 0 and expert_workers >= 1")
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["cross_language_disabled"] = list(self.cross_language_disabled)
        return out

    @classmethod
    def from_mapping(cls, data: dict | None) -> "EngineConfig":
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown engine settings: {', '.join(sorted(unknown))}")
        return cls(**data).validate()
