"""Persistent, append-only, first-write-wins valuation cache.

One JSON record per line.  Replaying the file rebuilds the map; when a key
appears twice the earliest record wins and a conflicting later value is
logged.  Writes are serialized and flushed + fsynced before ``put`` returns.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from .truth import GTV

logger = logging.getLogger(__name__)


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class CacheEntry:
    gtv: GTV
    verification_transcript: str = ""
    refutation_transcript: str = ""
    created_at: str = field(default_factory=utc_now)
    fingerprint: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def to_record(self, key: str) -> dict:
        return {
            "key": key,
            "gtv": self.gtv.code,
            "verification_transcript": self.verification_transcript,
            "refutation_transcript": self.refutation_transcript,
            "created_at": self.created_at,
            "fingerprint": self.fingerprint,
            "meta": self.meta,
        }

    @classmethod
    def from_record(cls, rec: dict) -> tuple[str, "CacheEntry"]:
        return rec["key"], cls(
            gtv=GTV.from_code(rec["gtv"]),
            verification_transcript=rec.get("verification_transcript", ""),
            refutation_transcript=rec.get("refutation_transcript", ""),
            created_at=rec["created_at"],
            fingerprint=rec.get("fingerprint", ""),
            meta=rec.get("meta") or {},
        )


def encode_record(key: str, entry: CacheEntry) -> str:
    return json.dumps(entry.to_record(key), sort_keys=True, ensure_ascii=False)


@dataclass(frozen=True)
class PutOutcome:
    entry: CacheEntry
    stored: bool

    @property
    def collision(self) -> bool:
        return not self.stored


class CacheCorruptError(ValueError):
    pass


class ValuationCache:
    """Map from atom keys to cache entries that never changes a stored value.

    ``path=None`` keeps the cache in memory only.  With ``strict=True`` the
    judge fingerprint becomes part of the key, so different judge
    configurations never share entries.
    """

    def __init__(self, path: str | os.PathLike | None = None, strict: bool = False):
        self.path = Path(path) if path is not None else None
        self.strict = strict
        self._entries: dict[str, CacheEntry] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._replay()

    def _replay(self):
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    key, entry = CacheEntry.from_record(json.loads(line))
                except (ValueError, KeyError) as exc:
                    raise CacheCorruptError(f"{self.path}:{lineno}: {exc}") from exc
                prior = self._entries.get(key)
                if prior is None:
                    self._entries[key] = entry
                elif prior.gtv != entry.gtv:
                    logger.warning(
                        "%s:%d: conflicting value %s for %s ignored (kept %s)",
                        self.path, lineno, entry.gtv.code, key, prior.gtv.code,
                    )

    def key_for(self, key: str, fingerprint: str = "") -> str:
        return f"{fingerprint}|{key}" if self.strict else key

    def get(self, key: str) -> CacheEntry | None:
        return self._entries.get(key)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[str]:
        return iter(list(self._entries))

    def items(self) -> list[tuple[str, CacheEntry]]:
        return list(self._entries.items())

    def put(self, key: str, entry: CacheEntry) -> PutOutcome:
        with self._lock:
            existing = self._entries.get(key)
            if existing is not None:
                return PutOutcome(existing, stored=False)
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(encode_record(key, entry) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            self._entries[key] = entry
            return PutOutcome(entry, stored=True)
