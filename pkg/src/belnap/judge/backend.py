"""Chat-completion backends: an HTTP client for OpenAI-compatible endpoints
and a scripted mock used for offline runs and tests."""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from typing import Any, Mapping

import httpx

from .config import JudgeConfig

logger = logging.getLogger(__name__)


class BackendError(RuntimeError):
    def __init__(self, message: str, latency: float | None = None):
        super().__init__(message)
        # reported latency; None means "measure it"
        self.latency = latency


@dataclass(frozen=True)
class ChatRequest:
    prompt: str
    temperature: float = 0.0
    system: str | None = None
    # routing hints; remote backends ignore them
    side: str | None = None
    subject: str | None = None
    sample_index: int = 0

    def messages(self) -> list[dict]:
        msgs = []
        if self.system is not None:
            msgs.append({"role": "system", "content": self.system})
        msgs.append({"role": "user", "content": self.prompt})
        return msgs


@dataclass(frozen=True)
class Completion:
    text: str
    total_tokens: int | None = None
    latency: float | None = None


class ChatCompletionBackend:
    """POSTs to ``{base_url}/chat/completions`` with retries and a minimum
    spacing between requests."""

    RETRY_STATUS = {408, 409, 429, 500, 502, 503, 504}

    def __init__(
        self,
        config: JudgeConfig,
        client: httpx.Client | None = None,
        min_interval: float = 0.0,
        backoff: float = 1.0,
    ):
        if not config.base_url or not config.model:
            raise ValueError("backend needs base_url and model")
        self.config = config
        self.min_interval = min_interval
        self.backoff = backoff
        headers = {}
        key = os.environ.get(config.api_key_env) if config.api_key_env else None
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self.client = client or httpx.Client(headers=headers, timeout=config.timeout)
        self._lock = threading.Lock()
        self._last_request = 0.0
        self.calls = 0

    def _throttle(self):
        with self._lock:
            wait = self._last_request + self.min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()
            self.calls += 1

    def complete(self, request: ChatRequest) -> Completion:
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        payload = {
            "model": self.config.model,
            "messages": request.messages(),
            "temperature": request.temperature,
        }
        delay = self.backoff
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            self._throttle()
            try:
                resp = self.client.post(url, json=payload, timeout=self.config.timeout)
                if resp.status_code in self.RETRY_STATUS:
                    raise BackendError(f"HTTP {resp.status_code}")
                resp.raise_for_status()
                data = resp.json()
                text = data["choices"][0]["message"]["content"] or ""
                usage = data.get("usage") or {}
                return Completion(text, usage.get("total_tokens"))
            except (httpx.TransportError, BackendError) as exc:
                last_error = exc
                logger.warning("request failed (attempt %d): %s", attempt + 1, exc)
                if attempt < self.config.max_retries:
                    time.sleep(delay)
                    delay *= 2
            except (httpx.HTTPStatusError, KeyError, IndexError, ValueError) as exc:
                raise BackendError(f"bad response from {url}: {exc}") from exc
        raise BackendError(f"giving up after {self.config.max_retries + 1} attempts: {last_error}")


_GTV_MARKERS = {
    "verification": {"t": "VERIFIED", "f": "CANNOT VERIFY", "e": "I am not sure."},
    "refutation": {"t": "REFUTED", "f": "CANNOT REFUTE", "e": "I am not sure."},
}
_VERDICT_MARKERS = {"t": "TRUE", "f": "FALSE", "e": "I am not sure."}


class MockBackend:
    """Deterministic backend answering from a script keyed by subject.

    Script layout::

        {"default": {...}, "items": {"<subject>": {...}}}

    where each entry may give raw outputs per side (``verification``,
    ``refutation``, ``unilateral``, ``negatives``) as a string, a list indexed
    by sample (cycled), or ``null`` to simulate a failing call.  The
    shorthands ``"gtv": "tf"`` and ``"verdict": "t"`` expand to marker
    outputs.  Subjects are item ids for QA items and canonical atom strings
    for atoms.
    """

    def __init__(self, script: Mapping[str, Any]):
        self.script = script
        self.calls = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "MockBackend":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def _spec(self, subject: str | None) -> Mapping[str, Any]:
        items = self.script.get("items", {})
        if subject is not None and subject in items:
            return items[subject]
        return self.script.get("default", {})

    def complete(self, request: ChatRequest) -> Completion:
        with self._lock:
            self.calls += 1
        entry = self._spec(request.subject)
        latency = float(entry.get("latency", 0.0))
        side = request.side
        if side in entry:
            value = entry[side]
        elif side in _GTV_MARKERS and "gtv" in entry:
            code = entry["gtv"][0 if side == "verification" else 1]
            value = _GTV_MARKERS[side][code]
        elif side == "unilateral" and "verdict" in entry:
            value = _VERDICT_MARKERS[entry["verdict"]]
        else:
            raise BackendError(
                f"mock script has no {side!r} output for {request.subject!r}", latency
            )
        if isinstance(value, list):
            value = value[request.sample_index % len(value)] if value else None
        if value is None:
            raise BackendError(f"scripted failure for {request.subject!r} ({side})", latency)
        return Completion(str(value), latency=latency)
