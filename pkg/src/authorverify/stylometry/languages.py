"""Language registry, keyword tables and language detection."""

from __future__ import annotations

import os
import re
from enum import Enum


class Language(str, Enum):
    C = "c"
    CPP = "cpp"
    CSHARP = "csharp"
    JAVA = "java"
    GO = "go"
    PYTHON = "python"
    RUBY = "ruby"
    HASKELL = "haskell"
    UNKNOWN = "unknown"

    @classmethod
    def coerce(cls, value) -> "Language":
        if isinstance(value, Language):
            return value
        if value is None:
            return cls.UNKNOWN
        key = str(value).strip().lower()
        return _ALIASES.get(key, cls.UNKNOWN) if key not in cls._value2member_map_ else cls(key)


_ALIASES = {
    "c++": Language.CPP,
    "cxx": Language.CPP,
    "cc": Language.CPP,
    "c#": Language.CSHARP,
    "cs": Language.CSHARP,
    "py": Language.PYTHON,
    "python3": Language.PYTHON,
    "rb": Language.RUBY,
    "hs": Language.HASKELL,
    "golang": Language.GO,
}

C_FAMILY = frozenset({Language.C, Language.CPP, Language.CSHARP, Language.JAVA, Language.GO})

_C_KEYWORDS = {
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double",
    "else", "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long",
    "register", "restrict", "return", "short", "signed", "sizeof", "static", "struct",
    "switch", "typedef", "union", "unsigned", "void", "volatile", "while",
}

KEYWORDS: dict[Language, frozenset[str]] = {
    Language.C: frozenset(_C_KEYWORDS),
    Language.CPP: frozenset(_C_KEYWORDS | {
        "alignas", "alignof", "bool", "catch", "class", "constexpr", "const_cast",
        "decltype", "delete", "dynamic_cast", "explicit", "export", "false", "friend",
        "mutable", "namespace", "new", "noexcept", "nullptr", "operator", "private",
        "protected", "public", "reinterpret_cast", "static_assert", "static_cast",
        "template", "this", "throw", "true", "try", "typeid", "typename", "using",
        "virtual", "wchar_t",
    }),
    Language.CSHARP: frozenset({
        "abstract", "as", "base", "bool", "break", "byte", "case", "catch", "char",
        "checked", "class", "const", "continue", "decimal", "default", "delegate", "do",
        "double", "else", "enum", "event", "explicit", "extern", "false", "finally",
        "fixed", "float", "for", "foreach", "goto", "if", "implicit", "in", "int",
        "interface", "internal", "is", "lock", "long", "namespace", "new", "null",
        "object", "operator", "out", "override", "params", "private", "protected",
        "public", "readonly", "ref", "return", "sbyte", "sealed", "short", "sizeof",
        "static", "string", "struct", "switch", "this", "throw", "true", "try",
        "typeof", "uint", "ulong", "unchecked", "unsafe", "ushort", "using", "var",
        "virtual", "void", "volatile", "while",
    }),
    Language.JAVA: frozenset({
        "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
        "class", "const", "continue", "default", "do", "double", "else", "enum",
        "extends", "false", "final", "finally", "float", "for", "if", "implements",
        "import", "instanceof", "int", "interface", "long", "native", "new", "null",
        "package", "private", "protected", "public", "return", "short", "static",
        "super", "switch", "synchronized", "this", "throw", "throws", "true", "try",
        "void", "volatile", "while", "var",
    }),
    Language.GO: frozenset({
        "break", "case", "chan", "const", "continue", "default", "defer", "else",
        "fallthrough", "for", "func", "go", "goto", "if", "import", "interface", "map",
        "package", "range", "return", "select", "struct", "switch", "type", "var",
        "true", "false", "nil",
    }),
    Language.PYTHON: frozenset({
        "False", "None", "True", "and", "as", "assert", "async", "await", "break",
        "class", "continue", "def", "del", "elif", "else", "except", "finally", "for",
        "from", "global", "if", "import", "in", "is", "lambda", "nonlocal", "not", "or",
        "pass", "raise", "return", "try", "while", "with", "yield",
    }),
    Language.RUBY: frozenset({
        "BEGIN", "END", "alias", "and", "begin", "break", "case", "class", "def",
        "defined?", "do", "else", "elsif", "end", "ensure", "false", "for", "if", "in",
        "module", "next", "nil", "not", "or", "redo", "rescue", "retry", "return",
        "self", "super", "then", "true", "undef", "unless", "until", "when", "while",
        "yield",
    }),
    Language.HASKELL: frozenset({
        "case", "class", "data", "default", "deriving", "do", "else", "foreign", "if",
        "import", "in", "infix", "infixl", "infixr", "instance", "let", "module",
        "newtype", "of", "then", "type", "where",
    }),
}
KEYWORDS[Language.UNKNOWN] = frozenset(KEYWORDS[Language.CPP] | KEYWORDS[Language.PYTHON])

EXTENSIONS = {
    ".c": Language.C,
    ".h": Language.C,
    ".cpp": Language.CPP,
    ".cc": Language.CPP,
    ".cxx": Language.CPP,
    ".c++": Language.CPP,
    ".hpp": Language.CPP,
    ".hh": Language.CPP,
    ".hxx": Language.CPP,
    ".cs": Language.CSHARP,
    ".java": Language.JAVA,
    ".go": Language.GO,
    ".py": Language.PYTHON,
    ".pyw": Language.PYTHON,
    ".rb": Language.RUBY,
    ".hs": Language.HASKELL,
    ".lhs": Language.HASKELL,
}

# (language, pattern, weight); applied in order, highest total wins.
_MARKERS: list[tuple[Language, re.Pattern, int]] = [
    (Language.CPP, re.compile(r"#\s*include\s*<[a-z_]+>"), 3),
    (Language.CPP, re.compile(r"#\s*include\s*<bits/stdc\+\+\.h>"), 4),
    (Language.CPP, re.compile(r"\bstd::|\busing\s+namespace\b|\bcout\b|\bcin\b|\btemplate\s*<"), 3),
    (Language.CPP, re.compile(r"\b(?:vector|unordered_map|nullptr)\b"), 1),
    (Language.C, re.compile(r"#\s*include\s*[<\"][\w/]+\.h[>\"]"), 2),
    (Language.C, re.compile(r"\b(?:printf|scanf|malloc|free)\s*\("), 1),
    (Language.CSHARP, re.compile(r"\busing\s+System\b"), 4),
    (Language.CSHARP, re.compile(r"\bConsole\.(?:Write|Read)"), 3),
    (Language.CSHARP, re.compile(r"\bnamespace\s+\w+(?:\.\w+)*\s*[{;]?\s*$", re.M), 1),
    (Language.JAVA, re.compile(r"\bimport\s+java\."), 4),
    (Language.JAVA, re.compile(r"\bpublic\s+static\s+void\s+main\s*\(\s*String"), 4),
    (Language.JAVA, re.compile(r"\bSystem\.(?:out|in)\b"), 3),
    (Language.JAVA, re.compile(r"\bpublic\s+(?:final\s+)?class\s+\w+"), 1),
    (Language.GO, re.compile(r"^\s*package\s+\w+\s*$", re.M), 3),
    (Language.GO, re.compile(r"\bfunc\s+(?:\([^)]*\)\s*)?\w+\s*\("), 3),
    (Language.GO, re.compile(r":="), 1),
    (Language.GO, re.compile(r"\bfmt\.\w+"), 2),
    (Language.PYTHON, re.compile(r"^#!.*python", re.M), 6),
    (Language.PYTHON, re.compile(r"^\s*def\s+\w+\s*\([^)]*\)\s*(?:->[^:]+)?:", re.M), 3),
    (Language.PYTHON, re.compile(r"^\s*(?:import\s+\w+|from\s+[\w.]+\s+import\b)", re.M), 2),
    (Language.PYTHON, re.compile(r"^\s*(?:elif\b|if\s+__name__)|\bself\.|\bprint\s*\(|\brange\s*\(", re.M), 2),
    (Language.PYTHON, re.compile(r"^\s*(?:for|while|if)\b[^\n{;]*:\s*(?:#.*)?$", re.M), 1),
    (Language.RUBY, re.compile(r"^#!.*ruby", re.M), 6),
    (Language.RUBY, re.compile(r"^\s*end\s*$", re.M), 2),
    (Language.RUBY, re.compile(r"\bputs\b|\brequire\s+['\"]|\.each\s+do\b|\bdo\s*\|\w+|\belsif\b|\.times\b|\bgets\b"), 2),
    (Language.RUBY, re.compile(r"^\s*def\s+[\w?!.]+\s*(?:\([^)]*\))?\s*$", re.M), 2),
    (Language.HASKELL, re.compile(r"^\s*module\s+[\w.]+.*\bwhere\b", re.M), 4),
    (Language.HASKELL, re.compile(r"^\w+\s*::\s*[\w\[(]", re.M), 3),
    (Language.HASKELL, re.compile(r"\bmain\s*=\s*do\b|\bputStrLn\b|\bimport\s+qualified\b|<-\s*getLine\b"), 3),
    (Language.HASKELL, re.compile(r"^\s*import\s+Data\.", re.M), 3),
]

_PRIORITY = [
    Language.CPP, Language.C, Language.JAVA, Language.CSHARP, Language.GO,
    Language.PYTHON, Language.RUBY, Language.HASKELL,
]


def detect_language(sample_text: str, filename_hint: str | None = None) -> Language:
    """Detect the language of ``sample_text``.

    The file extension wins when it is known; otherwise regex markers are
    scored and the highest total is returned (ties break by a fixed order).
    Empty or whitespace-only text is always ``unknown``.
    """
    if not sample_text or not sample_text.strip():
        return Language.UNKNOWN
    if filename_hint:
        hint = filename_hint if filename_hint.startswith(".") else os.path.splitext(filename_hint)[1]
        lang = EXTENSIONS.get(hint.lower())
        if lang is not None:
            return lang
    scores = dict.fromkeys(_PRIORITY, 0)
    for lang, pattern, weight in _MARKERS:
        if pattern.search(sample_text):
            scores[lang] += weight
    best = max(_PRIORITY, key=lambda lang: scores[lang])  # max keeps the first on ties
    return best if scores[best] > 0 else Language.UNKNOWN
