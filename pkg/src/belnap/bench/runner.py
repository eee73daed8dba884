"""Benchmark runs: one evaluation record per QA item, resumable through the
valuation cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..cache import CacheEntry, ValuationCache
from ..judge.config import ConfigError
from ..judge.core import Judge, QAItem
from ..truth import E, GTV, TruthValue, neg3, project

logger = logging.getLogger(__name__)

MODES = ("bilateral", "unilateral")


@dataclass(frozen=True)
class EvaluationRecord:
    item_id: str
    mode: str
    gtv: GTV | None
    projected: TruthValue
    gold_label: bool
    elapsed: float
    tokens: int
    tokens_estimated: bool
    transcripts_ref: str

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "mode": self.mode,
            "gtv": self.gtv.code if self.gtv is not None else None,
            "projected": self.projected.symbol,
            "gold_label": self.gold_label,
            "elapsed": self.elapsed,
            "tokens": self.tokens,
            "tokens_estimated": self.tokens_estimated,
            "transcripts_ref": self.transcripts_ref,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationRecord":
        gtv = GTV.from_code(d["gtv"]) if d.get("gtv") else None
        projected = TruthValue.from_symbol(d["projected"])
        if d["mode"] == "bilateral" and (gtv is None or project(gtv) != projected):
            raise ValueError(f"record {d['item_id']}: projected value disagrees with gtv")
        return cls(
            item_id=str(d["item_id"]),
            mode=d["mode"],
            gtv=gtv,
            projected=projected,
            gold_label=bool(d["gold_label"]),
            elapsed=float(d.get("elapsed", 0.0)),
            tokens=int(d.get("tokens", 0)),
            tokens_estimated=bool(d.get("tokens_estimated", False)),
            transcripts_ref=d.get("transcripts_ref", ""),
        )


def item_key(item: QAItem, mode: str = "bilateral") -> str:
    digest = hashlib.sha256(f"{item.question}\x1f{item.answer}".encode()).hexdigest()[:32]
    return ("qa:" if mode == "bilateral" else "uni:") + digest


def _record_from_entry(item: QAItem, mode: str, key: str, entry: CacheEntry) -> EvaluationRecord:
    meta = entry.meta
    if mode == "bilateral":
        gtv, projected = entry.gtv, project(entry.gtv)
    else:
        # a unilateral verdict v is stored as <v, not v>, which projects back to v
        gtv, projected = None, project(entry.gtv)
    return EvaluationRecord(
        item_id=item.id,
        mode=mode,
        gtv=gtv,
        projected=projected,
        gold_label=item.gold_label,
        elapsed=float(meta.get("elapsed", 0.0)),
        tokens=int(meta.get("tokens", 0)),
        tokens_estimated=bool(meta.get("tokens_estimated", False)),
        transcripts_ref=key,
    )


class Runner:
    def __init__(self, judge: Judge, cache: ValuationCache, mode: str = "bilateral"):
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
        self.judge = judge
        self.cache = cache
        self.mode = mode
        self.fingerprint = judge.config.fingerprint()

    def evaluate_item(self, item: QAItem) -> EvaluationRecord:
        key = self.cache.key_for(item_key(item, self.mode), self.fingerprint)
        hit = self.cache.get(key)
        if hit is not None:
            return _record_from_entry(item, self.mode, key, hit)
        try:
            if self.mode == "bilateral":
                result = self.judge.zeta(item)
                sides = (result.verification, result.refutation)
                entry = CacheEntry(
                    result.gtv,
                    verification_transcript=result.verification_transcript,
                    refutation_transcript=result.refutation_transcript,
                    fingerprint=self.fingerprint,
                    meta=result.meta,
                )
            else:
                side = self.judge.unilateral(item)
                sides = (side,)
                entry = CacheEntry(
                    GTV(side.value, neg3(side.value)),
                    verification_transcript=side.text(),
                    fingerprint=self.fingerprint,
                    meta={
                        "elapsed": side.latency,
                        "tokens": side.tokens,
                        "tokens_estimated": side.tokens_estimated,
                        "verdict": side.value.symbol,
                    },
                )
        except ConfigError:
            raise
        except Exception as exc:
            logger.warning("item %s failed: %s", item.id, exc)
            return EvaluationRecord(
                item.id, self.mode, GTV(E, E) if self.mode == "bilateral" else None,
                E, item.gold_label, 0.0, 0, True, "",
            )
        if any(t.error for s in sides for t in s.transcripts):
            # not persisted, so a resumed run retries the failed calls
            return _record_from_entry(item, self.mode, key, entry)
        stored = self.cache.put(key, entry).entry
        return _record_from_entry(item, self.mode, key, stored)


def run_evaluation(
    items: Sequence[QAItem],
    judge: Judge,
    mode: str = "bilateral",
    cache: ValuationCache | None = None,
    max_workers: int = 4,
) -> list[EvaluationRecord]:
    """Evaluate every item; records come back in input order."""
    runner = Runner(judge, cache if cache is not None else ValuationCache(), mode)
    if max_workers <= 1 or len(items) <= 1:
        return [runner.evaluate_item(it) for it in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(runner.evaluate_item, items))


def write_records(records: Iterable[EvaluationRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def load_records(path: str | os.PathLike) -> list[EvaluationRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(EvaluationRecord.from_dict(json.loads(line)))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad record: {exc}") from exc
    return records
