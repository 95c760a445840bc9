"""Masked k-gram winnowing fingerprints for structural overlap between two samples."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass

from ..errors import ContractError
from .tokenizer import CodeSample, mask, significant, tokenize

DEFAULT_K = 5
DEFAULT_WINDOW = 4
SHORT_FACTOR = 4


@dataclass(frozen=True)
class FingerprintReport:
    similarity: float
    total_overlap: int
    longest_fragment: int

    def to_dict(self) -> dict:
        return asdict(self)


def masked_stream(sample: CodeSample) -> list[str]:
    return [mask(t) for t in significant(tokenize(sample))]


def _hash(gram: tuple[str, ...]) -> int:
    digest = hashlib.blake2b("\x1f".join(gram).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def kgram_hashes(stream: list[str], k: int) -> list[int]:
    return [_hash(tuple(stream[i:i + k])) for i in range(len(stream) - k + 1)]


def winnow(hashes: list[int], window: int) -> set[int]:
    """Hash values that are the minimum of at least one window of ``window`` hashes.

    Streams with at most ``SHORT_FACTOR * window`` hashes keep all of them: thinning
    so few k-grams leaves too few fingerprints to measure overlap.
    """
    if len(hashes) <= SHORT_FACTOR * window:
        return set(hashes)
    picked = set()
    for start in range(len(hashes) - window + 1):
        chunk = hashes[start:start + window]
        low = min(chunk)
        picked.add(low)
    return picked


def longest_common_run(a: list[str], b: list[str]) -> int:
    best = 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, 1):
            if x == y:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
        prev = cur
    return best


def fingerprint_similarity(a: CodeSample, b: CodeSample, k: int = DEFAULT_K,
                           window: int = DEFAULT_WINDOW) -> FingerprintReport:
    """Compare two samples by the overlap of their winnowed masked k-gram hashes."""
    if k < 3 or window < 1:
        raise ContractError(f"need k >= 3 and window >= 1, got k={k}, window={window}")
    sa, sb = masked_stream(a), masked_stream(b)
    fa = winnow(kgram_hashes(sa, k), window)
    fb = winnow(kgram_hashes(sb, k), window)
    if not fa or not fb:
        return FingerprintReport(0.0, 0, 0)
    shared = fa & fb
    run = longest_common_run(sa, sb)
    return FingerprintReport(len(shared) / len(fa | fb), len(shared), run if run >= k else 0)
