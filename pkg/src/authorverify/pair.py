"""The pair of samples under verification."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .stylometry.languages import Language
from .stylometry.tokenizer import CodeSample


@dataclass(frozen=True)
class CodePair:
    a: CodeSample
    b: CodeSample

    def __post_init__(self):
        for name, sample in (("a", self.a), ("b", self.b)):
            if not isinstance(sample, CodeSample):
                raise InputError(f"sample {name} must be a CodeSample")
            if sample.is_blank:
                raise InputError(f"sample {name} ({sample.origin or 'anonymous'}) is empty")

    @property
    def cross_language(self) -> bool:
        la, lb = self.a.language, self.b.language
        return la is not Language.UNKNOWN and lb is not Language.UNKNOWN and la is not lb

    @property
    def has_unknown_language(self) -> bool:
        return Language.UNKNOWN in (self.a.language, self.b.language)

    @property
    def languages(self) -> tuple[str, str]:
        return self.a.language.value, self.b.language.value

    @classmethod
    def from_texts(cls, text_a, text_b, lang_a=None, lang_b=None, hint_a=None, hint_b=None) -> "CodePair":
        return cls(CodeSample.from_text(text_a, filename_hint=hint_a, language=lang_a),
                   CodeSample.from_text(text_b, filename_hint=hint_b, language=lang_b))
