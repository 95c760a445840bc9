"""Function and control-flow structure shared by the syntactic and pattern tools.

Python samples are parsed with the standard ``ast`` module. Brace languages
use a lizard-style token scan; Ruby, Haskell and unparseable Python fall back
to indentation blocks.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from .languages import C_FAMILY, Language
from .tokenizer import ID, KW, OP, PUNC, Token

MAIN_LIKE = frozenset({"main", "solve", "run"})
EXIT_WORDS = frozenset({"return", "break", "continue", "throw", "raise", "next", "panic"})
IF_WORDS = frozenset({"if", "elif", "elsif", "unless"})
LOOP_WORDS = frozenset({"for", "foreach", "while", "until"})
DECISION_WORDS = frozenset({
    "if", "elif", "elsif", "unless", "for", "foreach", "while", "until", "case",
    "catch", "except", "rescue", "and", "or",
})
DECISION_OPS = frozenset({"&&", "||", "?"})
BRACKET_OPEN = {"(": ")", "[": "]", "{": "}"}


@dataclass
class FunctionInfo:
    name: str
    start_line: int
    end_line: int
    params: int
    ccn: int
    nloc: int
    recursive: bool = False


@dataclass
class Structure:
    """Result of structural analysis for one sample."""

    method: str  # "ast", "tokens", "indent"
    functions: list[FunctionInfo] = field(default_factory=list)
    if_count: int = 0
    loop_count: int = 0
    guard_clause_count: int = 0

    @property
    def degraded(self) -> bool:
        return self.method == "indent"


def parse_python(text: str):
    try:
        return ast.parse(text)
    except (SyntaxError, ValueError, RecursionError, MemoryError):
        return None


def ast_children(node):
    return [c for c in ast.iter_child_nodes(node) if not isinstance(c, ast.expr_context)]


def code_lines(sig: list[Token]) -> set[int]:
    return {t.line for t in sig}


# -- python -----------------------------------------------------------------

_PY_EXIT = (ast.Return, ast.Break, ast.Continue, ast.Raise)
_FUNC_NODES = (ast.FunctionDef, ast.AsyncFunctionDef)


def _py_decisions(node) -> int:
    """Decision points inside ``node`` excluding nested function/class bodies."""
    total = 0
    stack = list(ast_children(node))
    while stack:
        cur = stack.pop()
        if isinstance(cur, (*_FUNC_NODES, ast.ClassDef)):
            continue
        if isinstance(cur, (ast.If, ast.For, ast.AsyncFor, ast.While, ast.IfExp, ast.ExceptHandler)):
            total += 1
        elif isinstance(cur, ast.BoolOp):
            total += len(cur.values) - 1
        elif isinstance(cur, ast.comprehension):
            total += 1 + len(cur.ifs)
        elif isinstance(cur, ast.match_case):
            total += 1
        stack.extend(ast_children(cur))
    return total


def _py_calls_self(func) -> bool:
    for node in ast.walk(func):
        if isinstance(node, ast.Call):
            target = node.func
            if isinstance(target, ast.Name) and target.id == func.name:
                return True
            if isinstance(target, ast.Attribute) and target.attr == func.name:
                return True
    return False


def python_structure(tree, sig: list[Token]) -> Structure:
    lines = code_lines(sig)
    out = Structure("ast")
    for node in ast.walk(tree):
        if isinstance(node, _FUNC_NODES):
            a = node.args
            params = len(a.posonlyargs) + len(a.args) + len(a.kwonlyargs) + (a.vararg is not None) + (a.kwarg is not None)
            start, end = node.lineno, node.end_lineno or node.lineno
            out.functions.append(FunctionInfo(
                name=node.name,
                start_line=start,
                end_line=end,
                params=params,
                ccn=1 + _py_decisions(node),
                nloc=sum(1 for ln in lines if start <= ln <= end),
                recursive=_py_calls_self(node),
            ))
        elif isinstance(node, ast.If):
            out.if_count += 1
            if len(node.body) == 1 and isinstance(node.body[0], _PY_EXIT) and not node.orelse:
                out.guard_clause_count += 1
        elif isinstance(node, (ast.For, ast.AsyncFor, ast.While)):
            out.loop_count += 1
    out.functions.sort(key=lambda f: (f.start_line, f.name))
    return out


# -- brace languages -----------------------------------------------------------

def _match_close(sig: list[Token], i: int) -> int:
    """Index of the bracket closing ``sig[i]``, or len(sig) - 1 when unbalanced."""
    opener = sig[i].text
    closer = BRACKET_OPEN[opener]
    depth = 0
    for j in range(i, len(sig)):
        t = sig[j].text
        if sig[j].kind != PUNC:
            continue
        if t == opener:
            depth += 1
        elif t == closer:
            depth -= 1
            if depth == 0:
                return j
    return len(sig) - 1


def _count_params(inner: list[Token]) -> int:
    if not inner or (len(inner) == 1 and inner[0].text == "void"):
        return 0
    depth = 0
    commas = 0
    for t in inner:
        if t.kind == PUNC and t.text in "([{":
            depth += 1
        elif t.kind == PUNC and t.text in ")]}":
            depth -= 1
        elif t.kind == PUNC and t.text == "," and depth == 0:
            commas += 1
    return commas + 1


def _decisions(tokens) -> int:
    n = 0
    for t in tokens:
        if t.kind in (KW, ID) and t.text in DECISION_WORDS:
            n += 1
        elif t.kind == OP and t.text in DECISION_OPS:
            n += 1
    return n


def strip_preprocessor(sig: list[Token], lang: Language) -> list[Token]:
    """Drop tokens on preprocessor lines (C-family ``#`` directives)."""
    if lang not in (Language.C, Language.CPP, Language.CSHARP, Language.UNKNOWN):
        return sig
    directive_lines = set()
    prev_line = None
    for t in sig:
        if t.line != prev_line:
            prev_line = t.line
            if t.text == "#":
                directive_lines.add(t.line)
    return [t for t in sig if t.line not in directive_lines]


def brace_functions(sig: list[Token], lang: Language) -> list[FunctionInfo]:
    sig = strip_preprocessor(sig, lang)
    lines = code_lines(sig)
    functions = []
    i, n = 0, len(sig)
    while i < n:
        t = sig[i]
        if (t.kind == ID and i + 1 < n and sig[i + 1].text == "(" and sig[i + 1].kind == PUNC
                and not (i > 0 and sig[i - 1].text in (".", "->", "new") and sig[i - 1].kind != ID)):
            close = _match_close(sig, i + 1)
            j = close + 1
            while j < n and sig[j].text not in ("{", ";", "=", "}"):
                if sig[j].kind == PUNC and sig[j].text in "([":
                    j = _match_close(sig, j)
                j += 1
            if j < n and sig[j].text == "{" and sig[j].kind == PUNC:
                end = _match_close(sig, j)
                body = sig[j:end + 1]
                start_line, end_line = t.line, sig[end].line
                recursive = any(
                    b.kind == ID and b.text == t.text and k + 1 < len(body) and body[k + 1].text == "("
                    for k, b in enumerate(body)
                )
                functions.append(FunctionInfo(
                    name=t.text,
                    start_line=start_line,
                    end_line=end_line,
                    params=_count_params(sig[i + 2:close]),
                    ccn=1 + _decisions(sig[close + 1:end + 1]),
                    nloc=sum(1 for ln in lines if start_line <= ln <= end_line),
                    recursive=recursive,
                ))
                i = end + 1
                continue
        i += 1
    return functions


def _brace_guards(sig: list[Token]) -> int:
    guards = 0
    n = len(sig)
    for i, t in enumerate(sig):
        if not (t.kind == KW and t.text == "if"):
            continue
        j = i + 1
        if j < n and sig[j].text == "(" and sig[j].kind == PUNC:
            j = _match_close(sig, j) + 1
        else:
            while j < n and not (sig[j].kind == PUNC and sig[j].text in "{;"):
                if sig[j].kind == PUNC and sig[j].text in "([":
                    j = _match_close(sig, j)
                j += 1
        if j >= n:
            continue
        if sig[j].text == "{" and sig[j].kind == PUNC:
            end = _match_close(sig, j)
            body = sig[j + 1:end]
            if (not body or body[0].text not in EXIT_WORDS
                    or any(b.kind == PUNC and b.text in "{}" for b in body)
                    or sum(1 for b in body if b.kind == PUNC and b.text == ";") > 1):
                continue
        else:
            if sig[j].text not in EXIT_WORDS:
                continue
            end = j
            while end < n and not (sig[end].kind == PUNC and sig[end].text == ";"):
                end += 1
        if end + 1 < n and sig[end + 1].text == "else":
            continue
        guards += 1
    return guards


# -- indentation fallback ---------------------------------------------------

def _line_indent(line: str) -> int:
    width = 0
    for ch in line:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width += 4
        else:
            break
    return width


def _group_by_line(sig: list[Token]) -> dict[int, list[Token]]:
    groups: dict[int, list[Token]] = {}
    for t in sig:
        groups.setdefault(t.line, []).append(t)
    return groups


def indent_functions(sig: list[Token], lines: list[str], lang: Language) -> list[FunctionInfo]:
    by_line = _group_by_line(sig)
    ordered = sorted(by_line)
    functions: list[FunctionInfo] = []
    idx = 0
    while idx < len(ordered):
        ln = ordered[idx]
        toks = by_line[ln]
        name = None
        params = 0
        if toks[0].text == "def" and lang is not Language.HASKELL:
            # dotted receivers such as ``def self.build`` keep the last part
            names = []
            want_name = True
            for tk in toks[1:]:
                if want_name and tk.kind in (ID, KW):
                    names.append(tk.text)
                    want_name = False
                elif not want_name and tk.text == ".":
                    want_name = True
                else:
                    break
            if names:
                name = names[-1]
                paren = next((k for k, tk in enumerate(toks) if tk.text == "(" and tk.kind == PUNC), None)
                if paren is not None:
                    close = _match_close(toks, paren)
                    params = _count_params(toks[paren + 1:close])
        elif (lang is Language.HASKELL and toks[0].kind == ID and _line_indent(lines[ln - 1]) == 0
              and not any(tk.text == "::" for tk in toks)
              and any(tk.kind == OP and tk.text in ("=", "|") for tk in toks)):
            name = toks[0].text
            depth = 0
            for tk in toks[1:]:
                if tk.kind == OP and tk.text in ("=", "|") and depth == 0:
                    break
                if tk.kind == PUNC and tk.text in "([":
                    if depth == 0:
                        params += 1
                    depth += 1
                elif tk.kind == PUNC and tk.text in ")]":
                    depth -= 1
                elif depth == 0 and (tk.kind in (ID, "NUM", "STR") or tk.text == "_"):
                    params += 1
        if name is None:
            idx += 1
            continue
        base = _line_indent(lines[ln - 1])
        end_idx = idx
        k = idx + 1
        while k < len(ordered):
            nxt = ordered[k]
            nt = by_line[nxt]
            indent = _line_indent(lines[nxt - 1])
            if indent > base:
                end_idx = k
            elif lang is Language.HASKELL and nt[0].kind == ID and nt[0].text == name and indent == base:
                end_idx = k  # further equations of the same function
            else:
                break
            k += 1
        span = ordered[idx:end_idx + 1]
        body = [tk for s in span for tk in by_line[s]]
        if lang is Language.HASKELL:
            heads = {id(by_line[s][0]) for s in span}
            candidates = [tk for tk in body if id(tk) not in heads]
        else:
            candidates = [tk for s in span[1:] for tk in by_line[s]]
        recursive = any(tk.kind == ID and tk.text == name for tk in candidates)
        functions.append(FunctionInfo(
            name=name,
            start_line=ln,
            end_line=span[-1],
            params=params,
            ccn=1 + _decisions(body) + (sum(1 for tk in body if tk.kind == OP and tk.text == "|")
                                        if lang is Language.HASKELL else 0),
            nloc=len(span),
            recursive=recursive,
        ))
        idx = end_idx + 1 if lang is Language.HASKELL else idx + 1
    return functions


def _indent_guards(sig: list[Token], lines: list[str]) -> int:
    by_line = _group_by_line(sig)
    ordered = sorted(by_line)
    guards = 0
    for pos, ln in enumerate(ordered):
        toks = by_line[ln]
        if toks[0].text in EXIT_WORDS and any(tk.text in ("if", "unless") for tk in toks[1:]):
            guards += 1
            continue
        if toks[0].text in ("if", "unless") and pos + 1 < len(ordered):
            base = _line_indent(lines[ln - 1])
            body_ln = ordered[pos + 1]
            if _line_indent(lines[body_ln - 1]) <= base or by_line[body_ln][0].text not in EXIT_WORDS:
                continue
            after = ordered[pos + 2] if pos + 2 < len(ordered) else None
            if after is None or _line_indent(lines[after - 1]) <= base:
                head = by_line[after][0].text if after is not None else ""
                if head not in ("else", "elif", "elsif"):
                    guards += 1
    return guards


def _count_words(sig: list[Token], words) -> int:
    return sum(1 for t in sig if t.kind in (KW, ID) and t.text in words)


def analyze(lang: Language, sig: list[Token], lines: list[str], tree=None) -> Structure:
    """Structural summary of a sample; ``tree`` is the parsed Python module, if any."""
    if lang is Language.PYTHON and tree is not None:
        return python_structure(tree, sig)
    brace = lang in C_FAMILY or (lang is Language.UNKNOWN and any(t.text == "{" and t.kind == PUNC for t in sig))
    loops = sum(1 for t in sig if t.kind in (KW, ID) and t.text in LOOP_WORDS)
    ifs = _count_words(sig, IF_WORDS)
    if brace:
        out = Structure("tokens", brace_functions(sig, lang), ifs, loops, _brace_guards(sig))
    else:
        out = Structure("indent", indent_functions(sig, lines, lang), ifs, loops, _indent_guards(sig, lines))
    return out
