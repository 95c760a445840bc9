"""Case trace: an ordered JSONL record of every stage, ending in the final decision."""

from __future__ import annotations

import json
from datetime import datetime, timezone

from jsonschema import Draft202012Validator

from ..errors import FormatError

FINAL_STAGE = "final_decision"

EVENT_SCHEMA = {
    "type": "object",
    "required": ["event_id", "stage", "round", "timestamp", "prompt_digest", "raw_response",
                 "parsed_payload", "weight_snapshot", "llm_calls_so_far"],
    "properties": {
        "event_id": {"type": "integer", "minimum": 0},
        "stage": {"type": "string", "minLength": 1},
        "round": {"type": "integer", "minimum": 0},
        "timestamp": {"type": "string"},
        "prompt_digest": {"type": ["string", "null"]},
        "raw_response": {"type": ["string", "null"]},
        "parsed_payload": {},
        "weight_snapshot": {
            "type": "object",
            "required": ["layout", "lexical", "syntactic", "pattern"],
            "additionalProperties": {"type": "number", "minimum": 0},
        },
        "llm_calls_so_far": {"type": "integer", "minimum": 0},
        "tag": {"type": "string"},
    },
}
_EVENT_VALIDATOR = Draft202012Validator(EVENT_SCHEMA)


class LogicalClock:
    """Deterministic timestamps, one tick per event."""

    def __init__(self):
        self.ticks = 0

    def __call__(self) -> str:
        self.ticks += 1
        return f"logical:{self.ticks:06d}"


def wall_clock() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


class TraceRecorder:
    def __init__(self, clock=None):
        self.clock = clock or LogicalClock()
        self.events: list[dict] = []

    def record(self, stage: str, round: int, weights: dict, calls: int, *, prompt_digest=None,
               raw_response=None, parsed_payload=None, tag=None) -> dict:
        event = {
            "event_id": len(self.events),
            "stage": stage,
            "round": round,
            "timestamp": self.clock(),
            "prompt_digest": prompt_digest,
            "raw_response": raw_response,
            "parsed_payload": parsed_payload,
            "weight_snapshot": dict(weights),
            "llm_calls_so_far": calls,
        }
        if tag is not None:
            event["tag"] = tag
        self.events.append(event)
        return event

    def dumps(self) -> str:
        return "".join(json.dumps(e, sort_keys=True, ensure_ascii=False) + "\n" for e in self.events)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())


def parse_trace(text: str, source: str = "<trace>") -> list[dict]:
    """Decode and validate a trace; raises FormatError at the first bad event."""
    events = []
    lines = [ln for ln in text.splitlines() if ln.strip()]
    for index, line in enumerate(lines):
        try:
            event = json.loads(line)
        except ValueError as exc:
            raise FormatError(f"{source}: event {index} is not valid JSON: {exc}", index=index) from None
        errors = list(_EVENT_VALIDATOR.iter_errors(event))
        if errors:
            where = ".".join(map(str, errors[0].absolute_path)) or "<event>"
            raise FormatError(f"{source}: event {index} violates the trace schema at {where}: {errors[0].message}",
                              index=index)
        if event["event_id"] != index:
            raise FormatError(f"{source}: event {index} has event_id {event['event_id']}", index=index)
        events.append(event)
    if not events:
        raise FormatError(f"{source}: trace is empty", index=0)
    if events[-1]["stage"] != FINAL_STAGE:
        raise FormatError(f"{source}: trace does not end with a {FINAL_STAGE} event (truncated?)",
                          index=len(events))
    return events


def load_trace(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read(), source=str(path))
