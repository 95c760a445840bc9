"""Completion backends, structured-output parsing and transcripts."""

from .backends import (
    Backend,
    ChatRequest,
    LiveBackend,
    LiveSettings,
    MeteredBackend,
    ReplayBackend,
    ReservedView,
    ScriptedBackend,
    Tag,
)
from .heuristic import HeuristicBackend
from .parsing import load_object, parse_structured, repair
from .transcript import Transcript, TranscriptEntry, load_transcript

__all__ = [
    "Backend",
    "ChatRequest",
    "HeuristicBackend",
    "LiveBackend",
    "LiveSettings",
    "MeteredBackend",
    "ReplayBackend",
    "ReservedView",
    "ScriptedBackend",
    "Tag",
    "Transcript",
    "TranscriptEntry",
    "load_object",
    "load_transcript",
    "parse_structured",
    "repair",
]
