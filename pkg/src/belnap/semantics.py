"""The map from formulas to generalized truth values induced by an interpretation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from .syntax import (
    And,
    Atom,
    ExistsR,
    ForallR,
    Formula,
    FreeVariableError,
    Neg,
    Or,
    Signature,
    format_formula,
    is_ground_atom,
    substitute,
)
from .truth import DEFAULT_MODE, GTV, QuantifierMode, and3, exists_q, forall_q, or3


class UnknownAtomError(KeyError):
    """The interpretation has no value for a ground atom."""

    def __str__(self) -> str:
        return f"no valuation for atom {self.args[0]}"


class Interpretation(Protocol):
    sig: Signature

    def atom_value(self, atom: Atom) -> GTV: ...


@dataclass
class TraceNode:
    formula: str
    value: GTV
    children: list["TraceNode"] = field(default_factory=list)

    def render(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}{self.value.code}  {self.formula}"]
        lines.extend(child.render(indent + 1) for child in self.children)
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "formula": self.formula,
            "value": self.value.code,
            "children": [c.to_dict() for c in self.children],
        }


def evaluate(
    interp: Interpretation, f: Formula, mode: QuantifierMode = DEFAULT_MODE
) -> GTV:
    return _eval(interp, f, QuantifierMode(mode), None)


def evaluate_with_trace(
    interp: Interpretation, f: Formula, mode: QuantifierMode = DEFAULT_MODE
) -> TraceNode:
    holder: list[TraceNode] = []
    _eval(interp, f, QuantifierMode(mode), holder)
    return holder[0]


def _eval(interp, f, mode, trace: list | None) -> GTV:
    kids: list | None = [] if trace is not None else None

    if isinstance(f, Atom):
        if not is_ground_atom(f):
            raise FreeVariableError(f"free variable in {format_formula(f)}")
        value = interp.atom_value(f)
    elif isinstance(f, Neg):
        g = _eval(interp, f.body, mode, kids)
        value = GTV(g.v, g.u)
    elif isinstance(f, And):
        a = _eval(interp, f.left, mode, kids)
        b = _eval(interp, f.right, mode, kids)
        value = GTV(and3(a.u, b.u), or3(a.v, b.v))
    elif isinstance(f, Or):
        a = _eval(interp, f.left, mode, kids)
        b = _eval(interp, f.right, mode, kids)
        value = GTV(or3(a.u, b.u), and3(a.v, b.v))
    elif isinstance(f, (ForallR, ExistsR)):
        # each element is the pair <restrictor_u, matrix_u> resp. <restrictor_u, matrix_v>
        verify_pairs, refute_pairs = set(), set()
        for c in interp.sig.constants:
            r = _eval(interp, substitute(f.restrictor, f.var, c), mode, kids)
            m = _eval(interp, substitute(f.matrix, f.var, c), mode, kids)
            verify_pairs.add((r.u, m.u))
            refute_pairs.add((r.u, m.v))
        if isinstance(f, ForallR):
            value = GTV(forall_q(verify_pairs, mode), exists_q(refute_pairs))
        else:
            value = GTV(exists_q(verify_pairs), forall_q(refute_pairs, mode))
    else:
        raise TypeError(f"not a formula: {f!r}")

    if trace is not None:
        trace.append(TraceNode(format_formula(f), value, kids))
    return value
