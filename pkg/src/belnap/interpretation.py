"""Table-backed and evaluator-backed interpretations, plus the constructions
converting between them.

Table file format (``.tbl``)::

    # comments and blank lines are ignored
    constants: penguin eagle        # optional; defaults to constants seen in atoms
    bird(penguin)   tf
    flies(penguin)  ft
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from .cache import CacheEntry, ValuationCache
from .semantics import UnknownAtomError
from .syntax import Atom, Signature, format_formula, is_ground_atom, parse_formula
from .truth import GTV


class EvaluatorError(RuntimeError):
    """The evaluator behind a grounded interpretation failed; nothing was cached."""


def _check_ground(atom: Atom) -> str:
    if not is_ground_atom(atom):
        raise ValueError(f"not a ground atom: {atom!r}")
    return format_formula(atom)


@dataclass
class StandardInterpretation:
    sig: Signature
    table: dict[str, GTV] = field(default_factory=dict)

    def atom_value(self, atom: Atom) -> GTV:
        key = _check_ground(atom)
        try:
            return self.table[key]
        except KeyError:
            raise UnknownAtomError(key) from None

    @classmethod
    def from_mapping(
        cls, values: Mapping[str, GTV | str], constants: Iterable[str] = ()
    ) -> "StandardInterpretation":
        """Build from ``{"bird(penguin)": "tf", ...}``; keys are canonicalized."""
        table = {}
        atoms = []
        for text, value in values.items():
            atom = parse_formula(text)
            if not is_ground_atom(atom):
                raise ValueError(f"table keys must be ground atoms: {text!r}")
            atoms.append(atom)
            table[format_formula(atom)] = value if isinstance(value, GTV) else GTV.from_code(value)
        return cls(Signature.infer(atoms, tuple(constants)), table)


class GroundedInterpretation:
    """Interpretation whose atom values come from an evaluator through a cache.

    The evaluator is called only on cache misses; whatever the cache holds
    after the write is returned, so two calls on the same atom always agree.
    The evaluator may return a ``GTV`` or any object with a ``gtv`` attribute
    (and optionally ``verification_transcript``/``refutation_transcript``/``meta``).
    """

    def __init__(
        self,
        sig: Signature,
        evaluator: Callable[[Atom], Any] | None,
        cache: ValuationCache | None = None,
        fingerprint: str = "",
    ):
        self.sig = sig
        self.evaluator = evaluator
        self.cache = cache if cache is not None else ValuationCache()
        self.fingerprint = fingerprint
        self.evaluator_calls = 0

    def atom_value(self, atom: Atom) -> GTV:
        key = self.cache.key_for(_check_ground(atom), self.fingerprint)
        hit = self.cache.get(key)
        if hit is not None:
            return hit.gtv
        if self.evaluator is None:
            raise UnknownAtomError(format_formula(atom))
        self.evaluator_calls += 1
        try:
            result = self.evaluator(atom)
        except Exception as exc:
            raise EvaluatorError(f"evaluating {format_formula(atom)}: {exc}") from exc
        if isinstance(result, GTV):
            entry = CacheEntry(result, fingerprint=self.fingerprint)
        else:
            entry = CacheEntry(
                result.gtv,
                verification_transcript=getattr(result, "verification_transcript", ""),
                refutation_transcript=getattr(result, "refutation_transcript", ""),
                fingerprint=self.fingerprint,
                meta=dict(getattr(result, "meta", {}) or {}),
            )
        return self.cache.put(key, entry).entry.gtv


def seed_cache_from_standard(
    interp: StandardInterpretation,
    atoms: Iterable[Atom],
    cache: ValuationCache | None = None,
) -> ValuationCache:
    """Copy ``interp``'s values for ``atoms`` into a cache, so a grounded
    interpretation over it agrees with ``interp`` without ever calling its evaluator."""
    cache = cache if cache is not None else ValuationCache()
    for atom in atoms:
        cache.put(_check_ground(atom), CacheEntry(interp.atom_value(atom)))
    return cache


def snapshot_to_standard(g: GroundedInterpretation) -> StandardInterpretation:
    """Freeze the grounded interpretation's cached values into a table.

    Entries whose key is not a ground atom (e.g. benchmark ``qa:`` keys) are skipped.
    """
    table = {}
    for key, entry in g.cache.items():
        if g.cache.strict:
            fp, _, key = key.partition("|")
            if fp != g.fingerprint:
                continue
        try:
            atom = parse_formula(key)
        except ValueError:
            continue
        if is_ground_atom(atom):
            table[format_formula(atom)] = entry.gtv
    return StandardInterpretation(g.sig, table)


# -- table files -------------------------------------------------------------


class TableFormatError(ValueError):
    pass


def load_table(path: str | os.PathLike) -> StandardInterpretation:
    constants: list[str] = []
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("constants:"):
                constants.extend(line[len("constants:"):].replace(",", " ").split())
                continue
            parts = line.rsplit(None, 1)
            try:
                if len(parts) != 2:
                    raise ValueError("expected '<atom> <code>'")
                GTV.from_code(parts[1])
                values[parts[0]] = parts[1]
            except ValueError as exc:
                raise TableFormatError(f"{path}:{lineno}: {exc}") from exc
    try:
        return StandardInterpretation.from_mapping(values, constants)
    except ValueError as exc:
        raise TableFormatError(f"{path}: {exc}") from exc


def dump_table(interp: StandardInterpretation) -> str:
    lines = [f"constants: {' '.join(interp.sig.constants)}"] if interp.sig.constants else []
    lines.extend(f"{atom} {g.code}" for atom, g in sorted(interp.table.items()))
    return "\n".join(lines) + "\n"
