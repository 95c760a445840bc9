"""Lossless lexer producing classed tokens for every supported language.

Concatenating the text of every token (whitespace included) reconstructs the
input exactly; the profile extractors rely on that to map tokens back onto
physical lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from ..errors import InputError
from .languages import C_FAMILY, KEYWORDS, Language, detect_language

ID = "ID"
NUM = "NUM"
STR = "STR"
KW = "KW"
OP = "OP"
PUNC = "PUNC"
COMMENT = "COMMENT"
WS = "WS"

ABSTRACT_CLASSES = (ID, NUM, STR, KW, OP, PUNC)


class Token(NamedTuple):
    text: str
    kind: str
    line: int
    start: int

    @property
    def end_line(self) -> int:
        return self.line + self.text.count("\n")


@dataclass(frozen=True)
class CodeSample:
    """One code sample together with its language and an opaque origin."""

    text: str
    language: Language = Language.UNKNOWN
    origin: str = ""

    def __post_init__(self):
        text = self.text
        if isinstance(text, (bytes, bytearray)):
            try:
                text = bytes(text).decode("utf-8")
            except UnicodeDecodeError as exc:
                raise InputError(f"sample {self.origin or '<anonymous>'} is not valid UTF-8: {exc}") from exc
            object.__setattr__(self, "text", text)
        elif not isinstance(text, str):
            raise InputError(f"sample text must be str or bytes, got {type(text).__name__}")
        else:
            try:
                text.encode("utf-8")
            except UnicodeEncodeError as exc:
                raise InputError(f"sample {self.origin or '<anonymous>'} is not valid UTF-8: {exc}") from exc
        object.__setattr__(self, "language", Language.coerce(self.language))

    @classmethod
    def from_text(cls, text, filename_hint=None, language=None, origin=None) -> "CodeSample":
        """Build a sample, detecting the language when none is given."""
        sample = cls(text, Language.UNKNOWN, origin or filename_hint or "")
        lang = Language.coerce(language) if language else detect_language(sample.text, filename_hint)
        return cls(sample.text, lang, sample.origin)

    @classmethod
    def from_path(cls, path, language=None) -> "CodeSample":
        with open(path, "rb") as fh:
            data = fh.read()
        return cls.from_text(data, filename_hint=str(path), language=language, origin=str(path))

    @property
    def is_blank(self) -> bool:
        return not self.text.strip()


_OPERATORS = sorted(
    [
        ">>>=", "<<=", ">>=", "**=", "//=", "...", "<=>", "===", "!==", ">>>",
        "->", "=>", "::", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
        "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**", "//", "..",
    ],
    key=len,
    reverse=True,
)
_EXTRA_OPERATORS = {
    Language.GO: ("<-", ":=", "&^"),
    Language.PYTHON: (":=",),
    Language.HASKELL: ("<-", "<>", "|>", "++"),
}
_OP_CHARS = frozenset("+-*/%=<>!&|^~?")
_STRING_PREFIXES = {
    Language.PYTHON: frozenset({"r", "u", "b", "f", "br", "rb", "fr", "rf"}),
    Language.C: frozenset({"L", "u", "U", "u8"}),
    Language.CPP: frozenset({"L", "u", "U", "u8", "R"}),
}


def _comment_syntax(lang: Language):
    if lang in C_FAMILY:
        return ("//",), (("/*", "*/"),)
    if lang is Language.PYTHON or lang is Language.RUBY:
        return ("#",), ()
    if lang is Language.HASKELL:
        return ("--",), (("{-", "-}"),)
    return ("//", "#"), (("/*", "*/"),)


def _is_ident_start(ch: str) -> bool:
    return ch == "_" or ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_ident_char(ch: str) -> bool:
    return _is_ident_start(ch) or ("0" <= ch <= "9")


class _Scanner:
    def __init__(self, text: str, lang: Language):
        self.text = text
        self.lang = lang
        self.n = len(text)
        self.line_comments, self.block_comments = _comment_syntax(lang)
        extra = _EXTRA_OPERATORS.get(lang, ())
        self.operators = sorted(set(_OPERATORS) | set(extra), key=len, reverse=True)
        self.keywords = KEYWORDS[lang]
        self.prefixes = _STRING_PREFIXES.get(lang, frozenset())

    def scan(self) -> list[Token]:
        text, n = self.text, self.n
        tokens: list[Token] = []
        pos, line = 0, 1
        while pos < n:
            end, kind = self._next(pos)
            chunk = text[pos:end]
            tokens.append(Token(chunk, kind, line, pos))
            line += chunk.count("\n")
            pos = end
        return tokens

    def _at_line_start(self, pos: int) -> bool:
        return pos == 0 or self.text[pos - 1] == "\n"

    def _next(self, pos: int) -> tuple[int, str]:
        text, n = self.text, self.n
        ch = text[pos]
        if ch.isspace():
            end = pos + 1
            while end < n and text[end].isspace():
                end += 1
            return end, WS
        for opener, closer in self.block_comments:
            if text.startswith(opener, pos):
                close = text.find(closer, pos + len(opener))
                return (n if close < 0 else close + len(closer)), COMMENT
        if self.lang is Language.RUBY and self._at_line_start(pos) and text.startswith("=begin", pos):
            close = text.find("\n=end", pos)
            if close < 0:
                return n, COMMENT
            eol = text.find("\n", close + 1)
            return (n if eol < 0 else eol), COMMENT
        for marker in self.line_comments:
            if text.startswith(marker, pos):
                eol = text.find("\n", pos)
                return (n if eol < 0 else eol), COMMENT
        if ch in "\"'`" or (ch == "@" and self.lang is Language.CSHARP and text.startswith('@"', pos)):
            end = self._string(pos)
            if end is not None:
                return end, STR
        if _is_ident_start(ch):
            end = pos + 1
            while end < n and (_is_ident_char(text[end]) or (self.lang is Language.HASKELL and text[end] == "'")):
                end += 1
            if self.lang is Language.RUBY and end < n and text[end] in "?!" and not text.startswith("=", end + 1):
                end += 1
            word = text[pos:end]
            if word in self.prefixes and end < n and text[end] in "\"'":
                str_end = self._string(end)
                if str_end is not None:
                    return str_end, STR
            return end, (KW if word in self.keywords else ID)
        if ch.isdigit() or (ch == "." and pos + 1 < n and text[pos + 1].isdigit()):
            return self._number(pos), NUM
        for op in self.operators:
            if text.startswith(op, pos):
                return pos + len(op), OP
        if ch in _OP_CHARS:
            return pos + 1, OP
        return pos + 1, PUNC

    def _number(self, pos: int) -> int:
        text, n = self.text, self.n
        hexa = text.startswith(("0x", "0X"), pos)
        end = pos + 1
        while end < n:
            c = text[end]
            if c == "." and end + 1 < n and text[end + 1] == ".":
                break
            if _is_ident_char(c) or c == ".":
                end += 1
            elif c in "+-" and not hexa and text[end - 1] in "eE" and end + 1 < n and text[end + 1].isdigit():
                end += 1
            else:
                break
        return end

    def _string(self, pos: int) -> int | None:
        text, n = self.text, self.n
        ch = text[pos]
        if ch == "@":
            # C# verbatim string: doubled quotes escape, newlines allowed
            end = pos + 2
            while end < n:
                if text[end] == '"':
                    if end + 1 < n and text[end + 1] == '"':
                        end += 2
                        continue
                    return end + 1
                end += 1
            return n
        if ch == "`":
            if self.lang is not Language.GO:
                return None
            close = text.find("`", pos + 1)
            return n if close < 0 else close + 1
        if ch == "'" and self.lang is Language.HASKELL:
            # char literal only; a bare quote is punctuation
            if pos + 2 < n and text[pos + 1] == "\\":
                close = text.find("'", pos + 2)
                if 0 < close and "\n" not in text[pos:close]:
                    return close + 1
                return None
            if pos + 2 < n and text[pos + 2] == "'" and text[pos + 1] != "\n":
                return pos + 3
            return None
        if self.lang is Language.PYTHON and text.startswith(ch * 3, pos):
            close = pos + 3
            while close < n:
                if text[close] == "\\":
                    close += 2
                    continue
                if text.startswith(ch * 3, close):
                    return close + 3
                close += 1
            return n
        end = pos + 1
        while end < n:
            c = text[end]
            if c == "\\":
                if end + 1 < n and text[end + 1] == "\n":
                    end += 2
                    continue
                end += 2
                continue
            if c == ch:
                return end + 1
            if c == "\n":
                return end
            end += 1
        return n


def tokenize(sample: CodeSample | str, language: Language | str | None = None) -> list[Token]:
    """Split a sample into classed tokens.

    ``sample`` may also be raw text (or bytes), in which case ``language``
    selects the keyword table; ``unknown`` uses a language-agnostic lexer.
    """
    if not isinstance(sample, CodeSample):
        sample = CodeSample(sample, Language.coerce(language))
    elif language is not None:
        sample = CodeSample(sample.text, Language.coerce(language), sample.origin)
    if not sample.text:
        return []
    return _Scanner(sample.text, sample.language).scan()


def significant(tokens: list[Token]) -> list[Token]:
    """Tokens other than whitespace and comments."""
    return [t for t in tokens if t.kind != WS and t.kind != COMMENT]


def mask(token: Token) -> str:
    """Abstract form of a token: identifiers and literals become their class."""
    if token.kind in (ID, NUM, STR):
        return token.kind
    return token.text
