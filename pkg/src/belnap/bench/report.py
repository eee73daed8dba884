"""Plain-text tables for a metrics report, plus its JSON form."""

from __future__ import annotations

import json

from .metrics import DISTRIBUTION_COLUMNS, OTHER, MetricsReport


def _cell(value: float | None, est=None, digits: int = 3) -> str:
    if value is None:
        return "undefined"
    text = f"{value:.{digits}f}"
    if est is not None:
        text += f" ({est.se:.{digits}f})"
    return text


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


def render_text(report: MetricsReport, label: str = "run") -> str:
    b = report.bootstrap
    parts = [
        f"records: {report.n}  mode: {report.mode}  seed: {report.seed}  "
        f"bootstrap: {report.n_resamples} x {report.subsample_size}",
        "",
        "Macro F1 (given abstention) and coverage, bootstrap SE in parentheses",
        _table(
            ["Evaluator", "Macro F1", "Coverage"],
            [[label, _cell(report.macro_f1, b.get("macro_f1")), _cell(report.coverage, b.get("coverage"))]],
        ),
        "",
        "Mean cost per evaluation",
        _table(
            ["Evaluator", "Time (s)", "Tokens" + (" (est.)" if report.tokens_estimated else "")],
            [[
                label,
                _cell(report.mean_time, b.get("mean_time")),
                _cell(report.mean_tokens, b.get("mean_tokens"), digits=1),
            ]],
        ),
    ]
    collapsed = report.collapsed_distribution
    if collapsed is not None:
        cols = [*DISTRIBUTION_COLUMNS, OTHER]
        headers = ["Evaluator", *(f"<{c[0]},{c[1]}>" for c in DISTRIBUTION_COLUMNS), "other (e)"]
        parts += [
            "",
            "Truth value distribution",
            _table(headers, [[label, *(_cell(collapsed[c], b.get(c)) for c in cols)]]),
        ]
    skipped = {k: v.skipped for k, v in b.items() if v.skipped}
    if skipped:
        parts += ["", "undefined bootstrap draws skipped: "
                  + ", ".join(f"{k}={n}" for k, n in sorted(skipped.items()))]
    return "\n".join(parts) + "\n"


def render_json(report: MetricsReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
