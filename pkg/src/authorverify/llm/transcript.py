"""Newline-delimited transcript of completions, keyed by request tag."""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass

from ..errors import FormatError


@dataclass(frozen=True)
class TranscriptEntry:
    tag: str
    request_digest: str
    response_text: str


class Transcript:
    """Append-only, thread-safe list of :class:`TranscriptEntry`."""

    def __init__(self, entries=()):
        self._entries = list(entries)
        self._lock = threading.Lock()

    def append(self, entry: TranscriptEntry) -> None:
        with self._lock:
            self._entries.append(entry)

    @property
    def entries(self) -> list[TranscriptEntry]:
        with self._lock:
            return list(self._entries)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return isinstance(other, Transcript) and self.entries == other.entries

    def dumps(self) -> str:
        return "".join(json.dumps(asdict(e), ensure_ascii=False, sort_keys=True) + "\n" for e in self.entries)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> "Transcript":
        entries = []
        for index, line in enumerate(text.splitlines()):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                entry = TranscriptEntry(str(record["tag"]), str(record["request_digest"]),
                                        record["response_text"])
                if not isinstance(entry.response_text, str):
                    raise TypeError("response_text must be a string")
            except (ValueError, KeyError, TypeError) as exc:
                raise FormatError(f"{source}: corrupt transcript record {index}: {exc}", index=index) from None
            entries.append(entry)
        return cls(entries)

    @classmethod
    def load(cls, path) -> "Transcript":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read(), source=str(path))


def load_transcript(path) -> Transcript:
    return Transcript.load(path)
