"""Selective-classification metrics over evaluation records.

Records only need ``projected`` (a TruthValue) and ``gold_label`` (bool);
distribution and cost metrics also read ``gtv``, ``elapsed`` and ``tokens``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..truth import ALL_GTVS, E, F, T

DISTRIBUTION_COLUMNS = ("tt", "tf", "ft", "ff")
OTHER = "other"


class UndefinedMetricError(ValueError):
    """The metric has no defined value on this record set."""


class EmptyRecordsError(ValueError):
    pass


def _require(records):
    if not records:
        raise EmptyRecordsError("no records")


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def macro_f1_given_abstention(records: Sequence) -> float:
    """Unweighted mean of the per-class F1 (gold true / gold false) over the
    records whose projected verdict is not E."""
    answered = [r for r in records if r.projected != E]
    scores = []
    for cls in (True, False):
        if not any(r.gold_label == cls for r in answered):
            raise UndefinedMetricError(
                f"no answered records with gold label {cls}; macro F1 is undefined"
            )
        predicted = T if cls else F
        tp = sum(1 for r in answered if r.projected == predicted and r.gold_label == cls)
        fp = sum(1 for r in answered if r.projected == predicted and r.gold_label != cls)
        fn = sum(1 for r in answered if r.projected != predicted and r.gold_label == cls)
        scores.append(_f1(tp, fp, fn))
    return sum(scores) / len(scores)


def coverage(records: Sequence) -> float:
    _require(records)
    return sum(1 for r in records if r.projected != E) / len(records)


def truth_value_distribution(records: Sequence) -> dict[str, float]:
    """Frequency of each of the nine values, keyed by two-letter code."""
    _require(records)
    counts = {g.code: 0 for g in ALL_GTVS}
    for r in records:
        if r.gtv is None:
            raise ValueError(f"record {r.item_id} carries no generalized truth value")
        counts[r.gtv.code] += 1
    return {code: n / len(records) for code, n in counts.items()}


def collapse_distribution(dist: dict[str, float]) -> dict[str, float]:
    """The four classical-pair columns plus everything containing e."""
    out = {c: dist.get(c, 0.0) for c in DISTRIBUTION_COLUMNS}
    out[OTHER] = sum(v for c, v in dist.items() if c not in DISTRIBUTION_COLUMNS)
    return out


def mean_time(records: Sequence) -> float:
    _require(records)
    return sum(r.elapsed for r in records) / len(records)


def mean_tokens(records: Sequence) -> float:
    _require(records)
    return sum(r.tokens for r in records) / len(records)


@dataclass(frozen=True)
class BootstrapEstimate:
    mean: float
    se: float
    n_used: int
    skipped: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "se": self.se, "n_used": self.n_used, "skipped": self.skipped}


def bootstrap_se(
    records: Sequence,
    metric: Callable[[Sequence], float],
    n_resamples: int = 1000,
    subsample_size: int = 100,
    seed: int | None = 0,
) -> BootstrapEstimate:
    """Mean and standard deviation of ``metric`` over ``n_resamples`` draws of
    ``subsample_size`` records with replacement.  Draws where the metric is
    undefined are skipped and counted."""
    _require(records)
    if n_resamples < 1 or subsample_size < 1:
        raise ValueError("n_resamples and subsample_size must be positive")
    rng = np.random.default_rng(seed)
    values = []
    skipped = 0
    for _ in range(n_resamples):
        idx = rng.integers(0, len(records), size=subsample_size)
        try:
            values.append(metric([records[i] for i in idx]))
        except UndefinedMetricError:
            skipped += 1
    if not values:
        raise UndefinedMetricError(f"metric undefined on all {n_resamples} bootstrap draws")
    arr = np.asarray(values, dtype=float)
    se = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return BootstrapEstimate(float(arr.mean()), se, len(arr), skipped)


def _column(code: str):
    def share(rs):
        return collapse_distribution(truth_value_distribution(rs))[code]

    return share


@dataclass
class MetricsReport:
    mode: str
    n: int
    macro_f1: float | None
    coverage: float
    tv_distribution: dict[str, float] | None
    mean_time: float
    mean_tokens: float
    tokens_estimated: bool
    bootstrap: dict[str, BootstrapEstimate] = field(default_factory=dict)
    seed: int | None = 0
    n_resamples: int = 1000
    subsample_size: int = 100

    @property
    def collapsed_distribution(self) -> dict[str, float] | None:
        return collapse_distribution(self.tv_distribution) if self.tv_distribution else None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "macro_f1": self.macro_f1,
            "coverage": self.coverage,
            "tv_distribution": self.tv_distribution,
            "tv_distribution_collapsed": self.collapsed_distribution,
            "mean_time": self.mean_time,
            "mean_tokens": self.mean_tokens,
            "tokens_estimated": self.tokens_estimated,
            "bootstrap": {k: v.to_dict() for k, v in self.bootstrap.items()},
            "seed": self.seed,
            "n_resamples": self.n_resamples,
            "subsample_size": self.subsample_size,
        }


def compute_report(
    records: Sequence,
    seed: int | None = 0,
    n_resamples: int = 1000,
    subsample_size: int = 100,
) -> MetricsReport:
    _require(records)
    modes = {r.mode for r in records}
    if len(modes) != 1:
        raise ValueError(f"records mix evaluation modes: {sorted(modes)}")
    mode = modes.pop()
    try:
        f1 = macro_f1_given_abstention(records)
    except UndefinedMetricError:
        f1 = None
    bilateral = all(r.gtv is not None for r in records)

    metrics: dict[str, Callable] = {"coverage": coverage, "mean_time": mean_time, "mean_tokens": mean_tokens}
    if f1 is not None:
        metrics = {"macro_f1": macro_f1_given_abstention, **metrics}
    if bilateral:
        for code in (*DISTRIBUTION_COLUMNS, OTHER):
            metrics[code] = _column(code)
    boot = {
        name: bootstrap_se(records, fn, n_resamples, subsample_size, seed)
        for name, fn in metrics.items()
    }
    return MetricsReport(
        mode=mode,
        n=len(records),
        macro_f1=f1,
        coverage=coverage(records),
        tv_distribution=truth_value_distribution(records) if bilateral else None,
        mean_time=mean_time(records),
        mean_tokens=mean_tokens(records),
        tokens_estimated=any(getattr(r, "tokens_estimated", False) for r in records),
        bootstrap=boot,
        seed=seed,
        n_resamples=n_resamples,
        subsample_size=subsample_size,
    )
