"""Weak Kleene truth values, generalized truth values and the restricted
quantifier functions.

Truth values are small ints so they can index lookup tables shared with the
compiled validity kernel: ``T=0, E=1, F=2``.  A generalized truth value
``<u, v>`` packs to ``3*u + v`` (0..8).
"""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple


class TruthValue(enum.IntEnum):
    T = 0
    E = 1
    F = 2

    @property
    def symbol(self) -> str:
        return "tef"[self]

    @classmethod
    def from_symbol(cls, s: str) -> "TruthValue":
        try:
            return cls("tef".index(s.lower()))
        except ValueError:
            raise ValueError(f"not a truth value symbol: {s!r}") from None

    def __str__(self) -> str:
        return self.symbol


T, E, F = TruthValue.T, TruthValue.E, TruthValue.F
TRUTH_VALUES = (T, E, F)


class QuantifierMode(str, enum.Enum):
    """How the universal quantifier's false case is read.

    ``LITERAL`` applies the three printed cases in order and falls back to E
    when none matches.  ``ERRATA`` reads the false case as
    "<t,f> or <t,e> in X, and some pair has no e-coordinate", which makes the
    three cases disjoint and exhaustive.
    """

    LITERAL = "literal"
    ERRATA = "errata"


DEFAULT_MODE = QuantifierMode.ERRATA


class GTV(NamedTuple):
    """Generalized truth value ``<u, v>``: verification and refutation coordinates."""

    u: TruthValue
    v: TruthValue

    @property
    def code(self) -> str:
        return self.u.symbol + self.v.symbol

    @property
    def index(self) -> int:
        return 3 * self.u + self.v

    @classmethod
    def from_code(cls, code: str) -> "GTV":
        code = code.strip()
        if len(code) != 2:
            raise ValueError(f"generalized truth value code must have two letters: {code!r}")
        return cls(TruthValue.from_symbol(code[0]), TruthValue.from_symbol(code[1]))

    @classmethod
    def from_index(cls, i: int) -> "GTV":
        return ALL_GTVS[i]

    def __str__(self) -> str:
        return self.code

    def __repr__(self) -> str:
        return f"GTV({self.code})"


ALL_GTVS = tuple(GTV(u, v) for u in TRUTH_VALUES for v in TRUTH_VALUES)


def neg3(x: TruthValue) -> TruthValue:
    return TruthValue(2 - x)


def and3(x: TruthValue, y: TruthValue) -> TruthValue:
    if x == E or y == E:
        return E
    return T if (x == T and y == T) else F


def or3(x: TruthValue, y: TruthValue) -> TruthValue:
    if x == E or y == E:
        return E
    return T if (x == T or y == T) else F


def _has_e(pair: tuple) -> bool:
    return pair[0] == E or pair[1] == E


def exists_q(pairs: Iterable[tuple]) -> TruthValue:
    """Restricted existential quantifier over a set of ``(restrictor, matrix)`` pairs."""
    X = {GTV(TruthValue(u), TruthValue(v)) for u, v in pairs}
    if GTV(T, T) in X:
        return T
    if all(_has_e(p) for p in X):
        return E
    return F


def forall_q(pairs: Iterable[tuple], mode: QuantifierMode = DEFAULT_MODE) -> TruthValue:
    """Restricted universal quantifier over a set of ``(restrictor, matrix)`` pairs."""
    X = {GTV(TruthValue(u), TruthValue(v)) for u, v in pairs}
    some_defined = any(not _has_e(p) for p in X)
    if GTV(T, F) not in X and GTV(T, E) not in X and some_defined:
        return T
    if all(_has_e(p) for p in X):
        return E
    if QuantifierMode(mode) is QuantifierMode.LITERAL:
        if X & {GTV(T, T), GTV(T, E)} and any(_has_e(p) for p in X):
            return F
        return E
    if X & {GTV(T, F), GTV(T, E)} and some_defined:
        return F
    return E


def project(g: GTV) -> TruthValue:
    """Collapse a generalized truth value to a single verdict; anything but
    ``<t,f>`` and ``<f,t>`` abstains."""
    if g == (T, F):
        return T
    if g == (F, T):
        return F
    return E


# Lookup tables indexed by packed values; shared by both validity kernels.
NEG_TABLE = tuple(GTV(g.v, g.u).index for g in ALL_GTVS)
AND_TABLE = tuple(
    GTV(and3(a.u, b.u), or3(a.v, b.v)).index for a in ALL_GTVS for b in ALL_GTVS
)
OR_TABLE = tuple(
    GTV(or3(a.u, b.u), and3(a.v, b.v)).index for a in ALL_GTVS for b in ALL_GTVS
)


def _subset(mask: int) -> list[GTV]:
    return [g for g in ALL_GTVS if mask >> g.index & 1]


EXISTS_TABLE = tuple(exists_q(_subset(m)) for m in range(512))
FORALL_TABLES = {
    mode: tuple(forall_q(_subset(m), mode) for m in range(512)) for mode in QuantifierMode
}
