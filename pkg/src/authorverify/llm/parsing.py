"""Bounded repair and schema validation of model output."""

from __future__ import annotations

import json
import re

from jsonschema.exceptions import ValidationError

from ..errors import StructuredOutputError
from .schemas import validator

_FENCE = re.compile(r"```[A-Za-z0-9_-]*\s*\n?(.*?)```", re.S)
_DECODER = json.JSONDecoder()


def _is_single_object(text: str) -> bool:
    try:
        value, end = _DECODER.raw_decode(text.strip())
    except ValueError:
        return False
    return isinstance(value, dict) and not text.strip()[end:].strip()


def _balance(text: str) -> str:
    stack = []
    in_str = escape = False
    for ch in text:
        if in_str:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch in "{[":
            stack.append("}" if ch == "{" else "]")
        elif ch in "}]" and stack and stack[-1] == ch:
            stack.pop()
    if in_str:
        text += '"'
    return text + "".join(reversed(stack))


def repair(raw: str) -> str:
    """One repair pass: drop code fences and surrounding prose, close open brackets.

    Already-valid single-object input is returned unchanged.
    """
    if _is_single_object(raw):
        return raw
    text = raw
    fenced = _FENCE.search(text)
    if fenced:
        text = fenced.group(1)
    elif text.lstrip().startswith("```"):
        text = text.lstrip()[3:]
        text = text.split("\n", 1)[1] if "\n" in text else ""
    start = text.find("{")
    if start < 0:
        return text.strip()
    text = text[start:]
    # a truncated object keeps all its text; only trailing prose is cut at the last brace
    whole = _balance(text.rstrip())
    if _is_single_object(whole):
        return whole
    end = text.rfind("}")
    return _balance(text[:end + 1]) if end >= 0 else whole


def load_object(raw: str) -> dict:
    """Decode exactly one top-level JSON object, repairing once if needed."""
    if not isinstance(raw, str):
        raise StructuredOutputError("model output is not text", raw=raw)
    for text in (raw, repair(raw)):
        stripped = text.strip()
        try:
            value, end = _DECODER.raw_decode(stripped)
        except ValueError:
            continue
        if stripped[end:].strip():
            continue
        if isinstance(value, dict):
            return value
    raise StructuredOutputError("output is not a single JSON object after repair", raw=raw)


def _field_of(error: ValidationError) -> str:
    path = [str(p) for p in error.absolute_path]
    if error.validator == "required":
        missing = re.match(r"'([^']+)' is a required property", error.message)
        if missing:
            path.append(missing.group(1))
    return ".".join(path) or "<root>"


def validate(payload: dict, schema_id: str, raw=None, error_cls=StructuredOutputError) -> dict:
    errors = sorted(validator(schema_id).iter_errors(payload), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        first = errors[0]
        field = _field_of(first)
        raise error_cls(f"{schema_id}: field {field}: {first.message}", raw=raw, field=field)
    return payload


def parse_structured(raw: str, schema_id: str, error_cls=StructuredOutputError) -> dict:
    """Repair (once), decode and validate ``raw`` against a registered schema."""
    validator(schema_id)
    try:
        payload = load_object(raw)
    except StructuredOutputError as exc:
        raise error_cls(f"{schema_id}: {exc}", raw=raw) from None
    return validate(payload, schema_id, raw=raw, error_cls=error_cls)
