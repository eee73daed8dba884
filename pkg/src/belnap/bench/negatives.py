"""Synthetic wrong answers for building negative QA items."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterable

from ..judge.backend import BackendError, ChatRequest
from ..judge.core import Judge, QAItem
from ..judge.templates import negative_generation_instructions

logger = logging.getLogger(__name__)

NEGATIVES_KEY = "negative_answers"
N_NEGATIVES = 3


class NegativeFormatError(ValueError):
    pass


def extract_json_object(text: str) -> dict:
    """The first JSON object embedded in ``text``, tolerating prose and code
    fences around it."""
    decoder = json.JSONDecoder()
    pos = text.find("{")
    while pos != -1:
        try:
            obj, _ = decoder.raw_decode(text, pos)
        except json.JSONDecodeError:
            pos = text.find("{", pos + 1)
            continue
        if isinstance(obj, dict):
            return obj
        pos = text.find("{", pos + 1)
    raise NegativeFormatError("no JSON object found in response")


def parse_negatives(text: str) -> list[str]:
    obj = extract_json_object(text)
    answers = obj.get(NEGATIVES_KEY)
    if not isinstance(answers, list):
        raise NegativeFormatError(f"response lacks a {NEGATIVES_KEY!r} array")
    if len(answers) != N_NEGATIVES or not all(isinstance(a, str) and a.strip() for a in answers):
        raise NegativeFormatError(
            f"expected exactly {N_NEGATIVES} non-empty strings, got {answers!r}"
        )
    return [a.strip() for a in answers]


def negatives_request(item: QAItem, temperature: float) -> ChatRequest:
    prompt = (
        negative_generation_instructions()
        + f"\nQuestion: {item.question}\nAnswer: {item.answer}\n"
    )
    return ChatRequest(prompt=prompt, temperature=temperature, side="negatives", subject=item.id)


@dataclass
class NegativesResult:
    items: list[QAItem]
    skipped: list[tuple[str, str]]


def generate_negatives(items: Iterable[QAItem], judge: Judge) -> NegativesResult:
    """Ask the judge's backend for three wrong answers per item and emit one
    gold-false item for each.  Malformed responses skip the item."""
    out: list[QAItem] = []
    skipped: list[tuple[str, str]] = []
    for item in items:
        try:
            completion = judge.backend.complete(negatives_request(item, judge.config.temperature))
            answers = parse_negatives(completion.text)
        except (BackendError, NegativeFormatError) as exc:
            logger.warning("skipping negatives for %s: %s", item.id, exc)
            skipped.append((item.id, str(exc)))
            continue
        for i, wrong in enumerate(answers, 1):
            out.append(QAItem(f"{item.id}-neg{i}", item.question, wrong, False, item.source))
    return NegativesResult(out, skipped)
