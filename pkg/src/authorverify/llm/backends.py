"""Completion backends: live HTTP transport, tag-keyed replay, scripted callables.

All of them answer :meth:`complete` with the raw response text. Per-case call
accounting lives in :class:`MeteredBackend`, which wraps any backend.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Callable, NamedTuple

import httpx

from ..errors import BudgetExceeded, ContractError, FixtureError, TransportError
from .transcript import Transcript, TranscriptEntry

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.1
DEFAULT_MAX_TOKENS = 4096
ROLES = ("system", "user", "assistant")


class Tag(NamedTuple):
    """Routing key of a request: (stage, round, dimension, turn)."""

    stage: str
    round: int = 0
    dimension: str | None = None
    turn: str | int | None = None

    def key(self) -> str:
        parts = [self.stage, self.round, self.dimension, self.turn]
        return "|".join("-" if p is None else str(p) for p in parts)

    @classmethod
    def parse(cls, key: str) -> "Tag":
        stage, rnd, dim, turn = key.split("|")
        return cls(stage, int(rnd) if rnd != "-" else 0, None if dim == "-" else dim, None if turn == "-" else turn)

    def __str__(self):
        return self.key()


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple
    tag: Tag
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self):
        msgs = tuple(dict(m) for m in self.messages)
        if not msgs:
            raise ContractError("a chat request needs at least one message")
        if msgs[0].get("role") != "system":
            raise ContractError("the first message must have role 'system'")
        for m in msgs:
            if m.get("role") not in ROLES or not isinstance(m.get("content"), str):
                raise ContractError(f"bad chat message {m!r}")
        object.__setattr__(self, "messages", msgs)

    @classmethod
    def build(cls, system: str, user: str, tag: Tag, **kwargs) -> "ChatRequest":
        return cls(({"role": "system", "content": system}, {"role": "user", "content": user}), tag, **kwargs)

    def digest(self) -> str:
        body = json.dumps({"messages": list(self.messages), "temperature": self.temperature,
                           "max_tokens": self.max_output_tokens}, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]


class Backend:
    """Anything with ``complete(request) -> str``."""

    def complete(self, request: ChatRequest) -> str:
        raise NotImplementedError


class ScriptedBackend(Backend):
    """Backend driven by a Python callable; used by tests and the offline heuristic."""

    def __init__(self, respond: Callable[[ChatRequest], str]):
        self.respond = respond

    def complete(self, request: ChatRequest) -> str:
        return self.respond(request)


class ReplayBackend(Backend):
    """Answer from a transcript: per tag, responses are served first-in first-out.

    With ``strict=True`` the recorded request digest must match as well.
    """

    def __init__(self, transcript: Transcript, strict: bool = False):
        self.strict = strict
        self._queues: dict[str, deque] = defaultdict(deque)
        for entry in transcript:
            self._queues[entry.tag].append(entry)
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        key = request.tag.key()
        with self._lock:
            queue = self._queues.get(key)
            if not queue:
                raise FixtureError(key)
            entry = queue.popleft()
        if self.strict and entry.request_digest and entry.request_digest != request.digest():
            raise FixtureError(f"{key} (request digest {request.digest()} != recorded {entry.request_digest})")
        return entry.response_text

    def remaining(self) -> int:
        with self._lock:
            return sum(len(q) for q in self._queues.values())


@dataclass
class LiveSettings:
    endpoint: str = "http://localhost:8000/v1"
    model: str = "default"
    api_key_env: str = "AUTHORVERIFY_API_KEY"
    timeout: float = 120.0
    max_concurrency: int = 4
    retries: int = 2
    backoff: float = 0.5


class LiveBackend(Backend):
    """OpenAI-compatible chat-completions transport."""

    def __init__(self, settings: LiveSettings | None = None, client: httpx.Client | None = None):
        self.settings = settings or LiveSettings()
        self._client = client or httpx.Client(timeout=self.settings.timeout)
        self._slots = threading.BoundedSemaphore(max(1, self.settings.max_concurrency))

    @property
    def url(self) -> str:
        base = self.settings.endpoint.rstrip("/")
        return base if base.endswith("/chat/completions") else base + "/chat/completions"

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.settings.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def body(self, request: ChatRequest) -> dict:
        return {
            "model": self.settings.model,
            "messages": list(request.messages),
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }

    def complete(self, request: ChatRequest) -> str:
        payload = self.body(request)
        last_error = None
        for attempt in range(self.settings.retries + 1):
            if attempt:
                time.sleep(self.settings.backoff * (2 ** (attempt - 1)))
            try:
                with self._slots:
                    resp = self._client.post(self.url, json=payload, headers=self._headers())
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                log.warning("transport error on %s (attempt %d): %s", request.tag, attempt + 1, last_error)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise TransportError(f"endpoint rejected request {request.tag}: HTTP {resp.status_code} {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed completion body for {request.tag}: {exc}") from None
        raise TransportError(f"endpoint unreachable for {request.tag} after {self.settings.retries + 1} attempts: {last_error}")


@dataclass
class CallRecord:
    tag: str
    digest: str


class MeteredBackend(Backend):
    """Per-case call counter and cap around another backend.

    Only successful completions count. When ``transcript`` is given every
    completion is appended to it, which is how live runs are recorded.
    """

    def __init__(self, inner: Backend, cap: int = 40, transcript: Transcript | None = None):
        self.inner = inner
        self.cap = cap
        self.transcript = transcript
        self.calls = 0
        self.log: list[CallRecord] = []
        self._lock = threading.Lock()
        self._reserved = 0

    @property
    def remaining(self) -> int:
        with self._lock:
            return self.cap - self.calls - self._reserved

    def complete(self, request: ChatRequest, keep: int = 0) -> str:
        """Forward one request; refuse it when fewer than ``keep`` calls would remain."""
        with self._lock:
            if self.calls + self._reserved + keep >= self.cap:
                raise BudgetExceeded(f"call cap {self.cap} reached before {request.tag} (keeping {keep} in reserve)")
            self._reserved += 1
        try:
            text = self.inner.complete(request)
        finally:
            with self._lock:
                self._reserved -= 1
        with self._lock:
            self.calls += 1
            self.log.append(CallRecord(request.tag.key(), request.digest()))
        if self.transcript is not None:
            self.transcript.append(TranscriptEntry(request.tag.key(), request.digest(), text))
        return text


class ReservedView(Backend):
    """A view of a metered backend that always leaves ``keep`` calls unused."""

    def __init__(self, meter: MeteredBackend, keep: int):
        self.meter = meter
        self.keep = keep

    def complete(self, request: ChatRequest) -> str:
        return self.meter.complete(request, keep=self.keep)
