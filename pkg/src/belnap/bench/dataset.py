from __future__ import annotations

import json
import os
from typing import Iterable

from ..judge.core import QAItem

REQUIRED_FIELDS = ("id", "question", "answer", "gold_label", "source")


class DatasetError(ValueError):
    pass


def load_dataset(path: str | os.PathLike) -> list[QAItem]:
    """Read a JSON-lines dataset; one ``{id, question, answer, gold_label, source}`` per line."""
    items: list[QAItem] = []
    seen: dict[str, int] = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot open dataset {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: invalid JSON: {exc.msg}") from exc
            if not isinstance(rec, dict):
                raise DatasetError(f"{where}: expected a JSON object")
            missing = [f for f in REQUIRED_FIELDS if f not in rec]
            if missing:
                raise DatasetError(f"{where}: missing field(s) {', '.join(missing)}")
            gold = rec["gold_label"]
            if gold in (0, 1) and not isinstance(gold, float):
                gold = bool(gold)
            if not isinstance(gold, bool):
                raise DatasetError(f"{where}: gold_label must be a boolean")
            item_id = str(rec["id"])
            if item_id in seen:
                raise DatasetError(f"{where}: duplicate id {item_id!r} (first on line {seen[item_id]})")
            seen[item_id] = lineno
            try:
                items.append(
                    QAItem(item_id, str(rec["question"]), str(rec["answer"]), gold, str(rec["source"]))
                )
            except ValueError as exc:
                raise DatasetError(f"{where}: {exc}") from exc
    return items


def write_dataset(items: Iterable[QAItem], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item.to_dict(), ensure_ascii=False) + "\n")
