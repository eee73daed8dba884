from __future__ import annotations

from ..truth import E, F, T, TruthValue


def parse_conclusion(raw: str, positive: str, negative: str, lenient: bool = False) -> TruthValue:
    """Map a judge completion to t (positive marker), f (negative marker) or e.

    The last non-empty line decides when it is exactly a marker.  Otherwise the
    whole text is searched, negative marker first, so "CANNOT VERIFY" is never
    read as its positive counterpart.  ``lenient`` adds a case-insensitive
    pass after the exact one.
    """
    if not positive or not negative:
        raise ValueError("markers must be non-empty")
    raw = raw or ""
    lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
    if lines:
        if lines[-1] == negative:
            return F
        if lines[-1] == positive:
            return T
    if negative in raw:
        return F
    if positive in raw:
        return T
    if lenient:
        folded = raw.casefold()
        if lines and lines[-1].casefold() == negative.casefold():
            return F
        if lines and lines[-1].casefold() == positive.casefold():
            return T
        if negative.casefold() in folded:
            return F
        if positive.casefold() in folded:
            return T
    return E


def majority(values: list[TruthValue]) -> TruthValue:
    """Strict majority of ``values``; e when no value has more than half."""
    for v in (T, F, E):
        if 2 * values.count(v) > len(values):
            return v
    return E
