"""Deterministic stylometric feature extraction."""

from .fingerprint import FingerprintReport, fingerprint_similarity
from .languages import Language, detect_language
from .profiles import (
    DIMENSION_TOOLS,
    DIMENSIONS,
    TOOL_DIMENSION,
    TOOL_NAMES,
    ToolProfile,
    canonical_tool_name,
    extract_profiles,
    extract_tool_profile,
)
from .tokenizer import CodeSample, Token, tokenize

__all__ = [
    "CodeSample",
    "DIMENSIONS",
    "DIMENSION_TOOLS",
    "FingerprintReport",
    "Language",
    "TOOL_DIMENSION",
    "TOOL_NAMES",
    "Token",
    "ToolProfile",
    "canonical_tool_name",
    "detect_language",
    "extract_profiles",
    "extract_tool_profile",
    "fingerprint_similarity",
    "tokenize",
]
