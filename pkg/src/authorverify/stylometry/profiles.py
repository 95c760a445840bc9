"""The seventeen stylometric tools, grouped by evidence dimension.

Every extractor is a pure function of one :class:`CodeSample`. Profiles are
plain JSON-able records; their metric names form the observation payload the
expert agents read.
"""

from __future__ import annotations

import ast
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from ..errors import RegistryError
from .languages import Language
from .structure import (
    IF_WORDS,
    LOOP_WORDS,
    MAIN_LIKE,
    analyze,
    ast_children,
    parse_python,
)
from .tokenizer import (
    ABSTRACT_CLASSES,
    COMMENT,
    ID,
    KW,
    OP,
    PUNC,
    STR,
    WS,
    CodeSample,
    Token,
    mask,
    significant,
    tokenize,
)

TAB_WIDTH = 4
TOP_N = 20

DIMENSIONS = ("layout", "lexical", "syntactic", "pattern")

DIMENSION_TOOLS: dict[str, tuple[str, ...]] = {
    "layout": (
        "whitespace_profile",
        "delimiter_layout_profile",
        "comment_layout_profile",
        "format_stability_profile",
    ),
    "lexical": (
        "token_frequency_profile",
        "token_ngram_profile",
        "char_ngram_profile",
        "identifier_style_profile",
        "abstract_lexical_profile",
    ),
    "syntactic": (
        "ast_node_profile",
        "ast_path_profile",
        "tree_shape_profile",
        "construct_usage_profile",
    ),
    "pattern": (
        "lizard_function_profile",
        "control_strategy_profile",
        "api_idiom_profile",
        "semantic_habit_profile",
    ),
}
TOOL_DIMENSION = {tool: dim for dim, tools in DIMENSION_TOOLS.items() for tool in tools}
TOOL_NAMES = tuple(TOOL_DIMENSION)

CONTROL_WORDS = frozenset({"if", "for", "while", "switch", "catch", "elif", "foreach", "until", "unless", "elsif"})
_NOT_BLOCK_PREV = frozenset({"return", "yield", "in", "of"})
_DOC_MARKERS = ("/**", "///", "//!", "/*!", "-- |", "--|", "-- ^", "{-|", "{- |", "=begin")
IDENTIFIER_CASES = ("lower", "upper", "camel", "pascal", "snake", "screaming", "mixed")
HELPER_MARKERS = ("helper", "util", "do_", "calc", "get_", "is_")

API_FAMILIES: dict[str, frozenset[str]] = {
    "collections": frozenset({
        "vector", "map", "set", "multiset", "multimap", "unordered_map", "unordered_set", "deque",
        "queue", "stack", "priority_queue", "pair", "tuple", "array", "list", "dict", "frozenset",
        "defaultdict", "Counter", "OrderedDict", "heapq", "ArrayList", "LinkedList", "HashMap",
        "HashSet", "TreeMap", "TreeSet", "ArrayDeque", "PriorityQueue", "List", "Map", "Set",
        "Dictionary", "Queue", "Stack", "Hash", "Array", "make", "append", "Data.Map", "Seq",
    }),
    "sorting": frozenset({
        "sort", "sorted", "stable_sort", "qsort", "sortBy", "sortOn", "sort_by", "Sort", "Slice",
        "SliceStable", "nth_element", "partial_sort", "lower_bound", "upper_bound", "binary_search",
        "bisect", "bisect_left", "bisect_right", "insort", "reverse", "reversed", "min_by", "max_by",
    }),
    "io": frozenset({
        "cin", "cout", "cerr", "scanf", "printf", "puts", "gets", "getline", "getchar", "putchar",
        "fgets", "fputs", "fprintf", "print", "input", "readline", "stdin", "stdout", "open",
        "Scanner", "BufferedReader", "InputStreamReader", "PrintWriter", "System", "fmt", "bufio",
        "Println", "Printf", "Scan", "Scanf", "Sscanf", "Console", "ReadLine", "WriteLine",
        "putStrLn", "putStr", "getLine", "getContents", "interact", "readLn", "STDIN", "STDOUT",
    }),
    "exceptions": frozenset({
        "try", "catch", "except", "raise", "throw", "throws", "finally", "rescue", "ensure",
        "panic", "recover", "Exception", "RuntimeError", "ValueError", "error", "errors",
    }),
}
API_FAMILY_NAMES = ("collections", "sorting", "io", "assertions", "exceptions")

_COMPETITIVE_HEADER = re.compile(
    r"bits/stdc\+\+\.h|typedef\s+long\s+long\s+ll\b|using\s+ll\s*=\s*long\s+long|#\s*define\s+ll\s+long\s+long"
    r"|#\s*define\s+int\s+long\s+long|import\s+java\.util\.\*|sys\.setrecursionlimit"
)
_FAST_IO = re.compile(
    r"sync_with_stdio|cin\.tie|sys\.stdin\.readline|sys\.stdin\.buffer|BufferedReader|StreamTokenizer"
    r"|bufio\.New(?:Reader|Scanner|Writer)|getchar_unlocked|fread\s*\("
)


@dataclass
class ToolProfile:
    tool_name: str
    dimension: str
    degraded: bool
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"tool_name": self.tool_name, "dimension": self.dimension,
                "degraded": self.degraded, "metrics": self.metrics}

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "ToolProfile":
        return cls(data["tool_name"], data["dimension"], bool(data["degraded"]), dict(data["metrics"]))


# -- small numeric helpers --------------------------------------------------

def _ratio(num, den) -> float:
    return num / den if den else 0.0


# fsum keeps results independent of traversal order
def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values) if values else 0.0


def _pstd(values) -> float:
    values = list(values)
    if not values:
        return 0.0
    mu = math.fsum(values) / len(values)
    return math.sqrt(math.fsum((v - mu) ** 2 for v in values) / len(values))


def ranked(counter: Counter, limit: int = TOP_N) -> list[list]:
    """Top entries by descending count, ties broken lexicographically."""
    items = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    return [[key, count] for key, count in items[:limit]]


def distribution(counter: Counter, support=None) -> dict[str, float]:
    total = sum(counter.values())
    keys = list(support) if support is not None else sorted(counter)
    return {k: _ratio(counter.get(k, 0), total) for k in keys}


def indent_width(line: str) -> int:
    width = 0
    for ch in line:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width += TAB_WIDTH
        else:
            break
    return width


def identifier_case(name: str) -> str:
    core = name.strip("_")
    letters = [c for c in core if c.isalpha()]
    if not letters:
        return "mixed"
    has_lower = any(c.islower() for c in letters)
    has_upper = any(c.isupper() for c in letters)
    if "_" in core:
        if not has_upper:
            return "snake"
        if not has_lower:
            return "screaming"
        return "mixed"
    if not has_upper:
        return "lower"
    if not has_lower:
        return "upper"
    return "camel" if letters[0].islower() else "pascal"


def is_assert_like(text: str) -> bool:
    return text.lower().startswith("assert") or text == "static_assert"


# -- per-sample analysis cache ------------------------------------------------

class SampleAnalysis:
    """Lazily computed views of one sample shared across extractors."""

    def __init__(self, sample: CodeSample):
        if sample.is_blank:
            sample = CodeSample("", sample.language, sample.origin)
        self.sample = sample
        self.text = sample.text
        self.language = sample.language

    @cached_property
    def tokens(self) -> list[Token]:
        return tokenize(self.sample)

    @cached_property
    def sig(self) -> list[Token]:
        return significant(self.tokens)

    @cached_property
    def lines(self) -> list[str]:
        if not self.text:
            return []
        parts = self.text.split("\n")
        if self.text.endswith("\n"):
            parts.pop()
        return [p[:-1] if p.endswith("\r") else p for p in parts]

    @cached_property
    def indented(self) -> list[str]:
        return [ln for ln in self.lines if ln.strip() and ln[:1] in (" ", "\t")]

    @cached_property
    def python_tree(self):
        if self.language is not Language.PYTHON or not self.text:
            return None
        return parse_python(self.text)

    @cached_property
    def has_grammar(self) -> bool:
        return self.python_tree is not None

    @cached_property
    def structure(self):
        return analyze(self.language, self.sig, self.lines, self.python_tree)

    @cached_property
    def identifiers(self) -> list[str]:
        return [t.text for t in self.sig if t.kind == ID]


# -- layout -------------------------------------------------------------------

def whitespace_profile(a: SampleAnalysis):
    lines = a.lines
    indents = [indent_width(ln) for ln in a.indented]
    lengths = [len(ln) for ln in lines]
    return False, {
        "avg_indent": _mean(indents),
        "tab_lines": sum(1 for ln in a.indented if ln[0] == "\t"),
        "space_lines": sum(1 for ln in a.indented if ln[0] == " "),
        "avg_line_length": _mean(lengths),
        "empty_line_ratio": _ratio(sum(1 for ln in lines if not ln.strip()), len(lines)),
        "trailing_space_lines": sum(1 for ln in lines if ln.endswith((" ", "\t"))),
        "indent_std": _pstd(indents),
    }


def _prev_significant(tokens: list[Token], i: int):
    j = i - 1
    while j >= 0 and tokens[j].kind in (WS, COMMENT):
        j -= 1
    return tokens[j] if j >= 0 else None


def delimiter_layout_profile(a: SampleAnalysis):
    toks = a.tokens
    out = dict.fromkeys((
        "control_space_before_paren", "control_tight_before_paren", "comma_space", "comma_tight",
        "same_line_block_opener", "next_line_block_opener",
    ), 0)
    n = len(toks)
    for i, t in enumerate(toks):
        if t.kind == KW and t.text in CONTROL_WORDS:
            nxt = toks[i + 1] if i + 1 < n else None
            if nxt is not None and nxt.kind == PUNC and nxt.text == "(":
                out["control_tight_before_paren"] += 1
            elif (nxt is not None and nxt.kind == WS and "\n" not in nxt.text and i + 2 < n
                  and toks[i + 2].kind == PUNC and toks[i + 2].text == "("):
                out["control_space_before_paren"] += 1
        elif t.kind == PUNC and t.text == ",":
            nxt = toks[i + 1] if i + 1 < n else None
            if nxt is None:
                continue
            if nxt.kind == WS:
                if nxt.text[0] in " \t":
                    out["comma_space"] += 1
            else:
                out["comma_tight"] += 1
        elif t.kind == PUNC and t.text == "{":
            prev = _prev_significant(toks, i)
            if prev is None:
                continue
            opener = prev.text in (")", "=>", "->") or (prev.kind in (ID, KW) and prev.text not in _NOT_BLOCK_PREV)
            if opener:
                key = "same_line_block_opener" if prev.end_line == t.line else "next_line_block_opener"
                out[key] += 1
    return False, out


def _is_docstring(toks: list[Token], i: int, last_code_line: int) -> bool:
    t = toks[i]
    body = t.text.lstrip("rRuUbBfF")
    if not body.startswith(('"""', "'''")) or last_code_line == t.line:
        return False
    for nxt in toks[i + 1:]:
        if nxt.kind in (WS, COMMENT):
            continue
        return nxt.line > t.end_line
    return True


def comment_layout_profile(a: SampleAnalysis):
    toks = a.tokens
    inline = standalone = doc = 0
    covered: set[int] = set()
    last_code_line = 0
    for i, t in enumerate(toks):
        if t.kind == COMMENT:
            covered.update(range(t.line, t.end_line + 1))
            if t.text.startswith(_DOC_MARKERS) and not t.text.startswith("/**/"):
                doc += 1
            elif last_code_line == t.line:
                inline += 1
            else:
                standalone += 1
        elif t.kind == STR and a.language is Language.PYTHON and _is_docstring(toks, i, last_code_line):
            covered.update(range(t.line, t.end_line + 1))
            doc += 1
            last_code_line = t.end_line
        elif t.kind != WS:
            last_code_line = t.end_line
    total_lines = len(a.lines)
    covered = {ln for ln in covered if ln <= total_lines}
    return False, {
        "comment_line_ratio": _ratio(len(covered), total_lines),
        "inline_comments": inline,
        "standalone_comments": standalone,
        "doc_comments": doc,
    }


def format_stability_profile(a: SampleAnalysis):
    kinds = [ln[0] for ln in a.indented]
    pairs = len(kinds) - 1
    switches = sum(1 for x, y in zip(kinds, kinds[1:]) if x != y)
    return False, {
        "indent_switch_rate": _ratio(switches, pairs) if pairs > 0 else 0.0,
        "line_length_std": _pstd([len(ln) for ln in a.lines]),
    }


# -- lexical ------------------------------------------------------------------

def token_frequency_profile(a: SampleAnalysis):
    sig = a.sig
    kinds = Counter(t.kind for t in sig)
    total = len(sig)
    words = Counter(t.text for t in sig if t.kind in (ID, KW))
    return False, {
        "keyword_ratio": _ratio(kinds[KW], total),
        "identifier_ratio": _ratio(kinds[ID], total),
        "operator_ratio": _ratio(kinds[OP], total),
        "punctuation_ratio": _ratio(kinds[PUNC], total),
        "token_top": ranked(words),
    }


def longest_repeated_run(seq: list[str]) -> int:
    """Length of the longest contiguous run occurring at two distinct offsets."""

    def repeats(length: int) -> bool:
        seen = set()
        for i in range(len(seq) - length + 1):
            key = tuple(seq[i:i + length])
            if key in seen:
                return True
            seen.add(key)
        return False

    lo, hi = 0, max(len(seq) - 1, 0)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if repeats(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def token_ngram_profile(a: SampleAnalysis):
    texts = [t.text for t in a.sig]
    masked = [mask(t) for t in a.sig]
    return False, {
        "token_bigrams": ranked(Counter(" ".join(texts[i:i + 2]) for i in range(len(texts) - 1))),
        "abstract_token_trigrams": ranked(Counter(" ".join(masked[i:i + 3]) for i in range(len(masked) - 2))),
        "longest_repeated_sequence": longest_repeated_run(texts),
    }


def char_ngram_profile(a: SampleAnalysis):
    flat = re.sub(r"\s+", " ", a.text)
    return False, {
        "char_4gram": ranked(Counter(flat[i:i + 4] for i in range(len(flat) - 3))),
        "char_5gram": ranked(Counter(flat[i:i + 5] for i in range(len(flat) - 4))),
    }


def identifier_style_profile(a: SampleAnalysis):
    names = a.identifiers
    total = len(names)
    return False, {
        "identifier_cases": distribution(Counter(identifier_case(n) for n in names), IDENTIFIER_CASES),
        "avg_length": _mean([len(n) for n in names]),
        "unique_ratio": _ratio(len(set(names)), total),
        "digit_ratio": _ratio(sum(1 for n in names if any(c.isdigit() for c in n)), total),
        "underscore_ratio": _ratio(sum(1 for n in names if "_" in n), total),
    }


def abstract_lexical_profile(a: SampleAnalysis):
    classes = [t.kind for t in a.sig]
    return False, {
        "abstract_distribution": distribution(Counter(classes), ABSTRACT_CLASSES),
        "abstract_bigrams": ranked(Counter(" ".join(classes[i:i + 2]) for i in range(len(classes) - 1))),
    }


# -- syntactic ----------------------------------------------------------------

def _ast_nodes(tree):
    return [n for n in ast.walk(tree) if not isinstance(n, ast.expr_context)]


def ast_node_profile(a: SampleAnalysis):
    if a.has_grammar:
        names = Counter(type(n).__name__ for n in _ast_nodes(a.python_tree))
        return False, {"node_type_ratios": distribution(names), "node_total": sum(names.values())}
    keywords = Counter(t.text for t in a.sig if t.kind == KW)
    return bool(a.text), {"node_type_ratios": distribution(keywords), "node_total": sum(keywords.values())}


def ast_path_profile(a: SampleAnalysis):
    if a.has_grammar:
        parent_child: Counter = Counter()
        siblings: Counter = Counter()
        for node in _ast_nodes(a.python_tree):
            kids = [type(c).__name__ for c in ast_children(node)]
            name = type(node).__name__
            parent_child.update(f"{name}>{k}" for k in kids)
            siblings.update(f"{x}~{y}" for x, y in zip(kids, kids[1:]))
        return False, {"parent_child_pairs": ranked(parent_child), "sibling_pairs": ranked(siblings)}
    masked = [mask(t) for t in a.sig]
    return bool(a.text), {
        "parent_child_pairs": ranked(Counter(f"{x}>{y}" for x, y in zip(masked, masked[1:]))),
        "sibling_pairs": ranked(Counter(f"{x}~{y}" for x, y in zip(masked, masked[2:]))),
    }


def _shape(child_counts: list[int], max_depth: int):
    internal = [c for c in child_counts if c > 0]
    return {
        "max_depth": max_depth,
        "node_count": len(child_counts),
        "avg_branching": _mean(internal),
        "branching_std": _pstd(internal),
    }


def tree_shape_profile(a: SampleAnalysis):
    if a.has_grammar:
        counts = []
        max_depth = 0
        stack = [(a.python_tree, 0)]
        while stack:
            node, depth = stack.pop()
            kids = ast_children(node)
            counts.append(len(kids))
            max_depth = max(max_depth, depth)
            stack.extend((k, depth + 1) for k in kids)
        return False, _shape(counts, max_depth)
    if not a.sig:
        return False, _shape([], 0)
    # bracket tree: root, one node per opening bracket, one leaf per other token
    counts = [0]
    path = [0]
    max_depth = 0
    for t in a.sig:
        if t.kind == PUNC and t.text in ")]}":
            if len(path) > 1:
                path.pop()
            continue
        counts[path[-1]] += 1
        counts.append(0)
        max_depth = max(max_depth, len(path))
        if t.kind == PUNC and t.text in "([{":
            path.append(len(counts) - 1)
    return True, _shape(counts, max_depth)


_CONSTRUCTS = ("if", "for", "while", "switch", "return")
_TOKEN_CONSTRUCT_WORDS = {
    "if": IF_WORDS,
    "for": frozenset({"for", "foreach"}),
    "while": frozenset({"while", "until"}),
    "switch": frozenset({"switch", "select"}),
    "return": frozenset({"return"}),
}
_CASE_AS_SWITCH = (Language.RUBY, Language.HASKELL)


def _construct_metrics(counts: dict[str, int], statements: int) -> dict:
    out = {f"{c}_count": counts[c] for c in _CONSTRUCTS}
    out["statement_count"] = statements
    out.update({f"{c}_ratio": _ratio(counts[c], statements) for c in _CONSTRUCTS})
    return out


def construct_usage_profile(a: SampleAnalysis):
    if a.has_grammar:
        counts = dict.fromkeys(_CONSTRUCTS, 0)
        statements = 0
        for node in ast.walk(a.python_tree):
            if not isinstance(node, ast.stmt):
                continue
            statements += 1
            if isinstance(node, ast.If):
                counts["if"] += 1
            elif isinstance(node, (ast.For, ast.AsyncFor)):
                counts["for"] += 1
            elif isinstance(node, ast.While):
                counts["while"] += 1
            elif isinstance(node, ast.Match):
                counts["switch"] += 1
            elif isinstance(node, ast.Return):
                counts["return"] += 1
        return False, _construct_metrics(counts, statements)
    words = dict(_TOKEN_CONSTRUCT_WORDS)
    if a.language in _CASE_AS_SWITCH:
        words["switch"] = words["switch"] | {"case"}
    counts = dict.fromkeys(_CONSTRUCTS, 0)
    per_line: dict[int, list[Token]] = {}
    for t in a.sig:
        per_line.setdefault(t.line, []).append(t)
    statements = 0
    for toks in per_line.values():
        if all(t.kind == PUNC and t.text in "{}()[];" for t in toks):
            continue
        found = 0
        for t in toks:
            if t.kind not in (KW, ID):
                continue
            for construct in _CONSTRUCTS:
                if t.text in words[construct]:
                    counts[construct] += 1
                    found += 1
                    break
        statements += max(1, found)
    return bool(a.text), _construct_metrics(counts, statements)


# -- pattern ------------------------------------------------------------------

def lizard_function_profile(a: SampleAnalysis):
    st = a.structure
    funcs = st.functions
    ccns = [f.ccn for f in funcs]
    total_ccn = sum(ccns)
    return st.degraded and bool(a.text), {
        "function_count": len(funcs),
        "avg_nloc": _mean([f.nloc for f in funcs]),
        "max_nloc": max((f.nloc for f in funcs), default=0),
        "avg_ccn": _mean(ccns),
        "max_ccn": max(ccns, default=0),
        "avg_param_count": _mean([f.params for f in funcs]),
        "complexity_concentration_ratio": _ratio(max(ccns, default=0), total_ccn),
        "main_like_ccn_ratio": _ratio(sum(f.ccn for f in funcs if f.name.lower() in MAIN_LIKE), total_ccn),
    }


def control_strategy_profile(a: SampleAnalysis):
    st = a.structure
    return st.degraded and bool(a.text), {
        "guard_clause_count": st.guard_clause_count,
        "guard_if_ratio": _ratio(st.guard_clause_count, st.if_count),
        "recursive_function_hints": sum(1 for f in st.functions if f.recursive),
        "loop_count": st.loop_count,
        "if_count": st.if_count,
    }


def api_idiom_profile(a: SampleAnalysis):
    families = dict.fromkeys(API_FAMILY_NAMES, 0)
    for t in a.sig:
        if t.kind not in (ID, KW):
            continue
        if is_assert_like(t.text):
            families["assertions"] += 1
        for fam, vocab in API_FAMILIES.items():
            if t.text in vocab:
                families[fam] += 1
    code = "".join(t.text for t in a.tokens if t.kind != COMMENT)
    flags = []
    if _COMPETITIVE_HEADER.search(code):
        flags.append("competitive_header")
    if _FAST_IO.search(code):
        flags.append("fast_io_optimization")
    return False, {"api_families": families, "plugin_flags": flags}


def semantic_habit_profile(a: SampleAnalysis):
    names = sorted(set(a.identifiers))
    total = len(names)
    lowered = [n.lower() for n in names]
    return False, {
        "short_temp_ratio": _ratio(sum(1 for n in names if len(n) <= 2), total),
        "helper_name_ratio": _ratio(sum(1 for n in lowered if any(m in n for m in HELPER_MARKERS)), total),
        "uppercase_constant_ratio": _ratio(
            sum(1 for n in names if len(n) >= 2 and identifier_case(n) in ("upper", "screaming")), total),
        "assert_like_count": sum(1 for t in a.sig if t.kind in (ID, KW) and is_assert_like(t.text)),
    }


_EXTRACTORS = {
    "whitespace_profile": whitespace_profile,
    "delimiter_layout_profile": delimiter_layout_profile,
    "comment_layout_profile": comment_layout_profile,
    "format_stability_profile": format_stability_profile,
    "token_frequency_profile": token_frequency_profile,
    "token_ngram_profile": token_ngram_profile,
    "char_ngram_profile": char_ngram_profile,
    "identifier_style_profile": identifier_style_profile,
    "abstract_lexical_profile": abstract_lexical_profile,
    "ast_node_profile": ast_node_profile,
    "ast_path_profile": ast_path_profile,
    "tree_shape_profile": tree_shape_profile,
    "construct_usage_profile": construct_usage_profile,
    "lizard_function_profile": lizard_function_profile,
    "control_strategy_profile": control_strategy_profile,
    "api_idiom_profile": api_idiom_profile,
    "semantic_habit_profile": semantic_habit_profile,
}


def canonical_tool_name(name: str) -> str:
    """Map ``extract_whitespace_profile`` / ``whitespace_profile`` to the registry key."""
    key = str(name).strip()
    if key.startswith("extract_"):
        key = key[len("extract_"):]
    if key not in _EXTRACTORS:
        raise RegistryError(f"unknown tool {name!r}; registry: {', '.join(TOOL_NAMES)}")
    return key


def extract_tool_profile(tool_name: str, sample: CodeSample, analysis: SampleAnalysis | None = None) -> ToolProfile:
    """Run one registry tool on ``sample``."""
    key = canonical_tool_name(tool_name)
    if analysis is None:
        analysis = SampleAnalysis(sample)
    degraded, metrics = _EXTRACTORS[key](analysis)
    return ToolProfile(key, TOOL_DIMENSION[key], bool(degraded), metrics)


def extract_profiles(sample: CodeSample, tools=TOOL_NAMES) -> dict[str, ToolProfile]:
    """Run several tools on one sample, sharing the tokenization."""
    analysis = SampleAnalysis(sample)
    return {canonical_tool_name(t): extract_tool_profile(t, sample, analysis) for t in tools}
