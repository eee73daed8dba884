"""Truth-preservation validity by exhaustive search over atom valuations.

Premises and conclusion are grounded over the signature's constants and
compiled to postfix programs over packed generalized truth values; a kernel
then walks all ``9**k`` assignments of the ``k`` distinct ground atoms.  The
compiled kernel (``_validity_ext``) is used when importable, otherwise the
pure-Python one.  Set ``BELNAP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

from . import _validity_py
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
from .truth import (
    AND_TABLE,
    DEFAULT_MODE,
    EXISTS_TABLE,
    FORALL_TABLES,
    GTV,
    NEG_TABLE,
    OR_TABLE,
    QuantifierMode,
)

if os.environ.get("BELNAP_PURE_PYTHON"):
    _ext = None
else:
    try:
        from . import _validity_ext as _ext
    except ImportError:
        _ext = None

KERNELS = {"python": _validity_py.search}
if _ext is not None:
    KERNELS["compiled"] = _ext.search
DEFAULT_KERNEL = "compiled" if _ext is not None else "python"

DEFAULT_BUDGET = 10**7

# Per-atom enumeration order: f-heavy values first, so the first countermodel
# found leans towards refuted/unsupported atoms.
WITNESS_ORDER = tuple(range(8, -1, -1))

OP_ATOM, OP_NEG, OP_AND, OP_OR, OP_FORALL, OP_EXISTS = range(6)


class BudgetExceededError(ValueError):
    def __init__(self, k: int, budget: int):
        super().__init__(
            f"{k} distinct ground atoms need 9**{k} = {9**k} assignments, over budget {budget}"
        )
        self.k = k
        self.budget = budget


@dataclass
class Program:
    ops: list[int] = field(default_factory=list)
    args: list[int] = field(default_factory=list)
    starts: list[int] = field(default_factory=lambda: [0])
    atoms: dict[Atom, int] = field(default_factory=dict)
    stack_size: int = 0


def compile_formulas(formulas: Sequence[Formula], constants: Sequence[str]) -> Program:
    """Ground quantifiers over ``constants`` and emit one postfix program per formula."""
    prog = Program()

    def emit(f: Formula, depth: int) -> int:
        # returns the max stack height reached while evaluating f from ``depth``
        if isinstance(f, Atom):
            if not is_ground_atom(f):
                raise FreeVariableError(f"free variable in {format_formula(f)}")
            idx = prog.atoms.setdefault(f, len(prog.atoms))
            prog.ops.append(OP_ATOM)
            prog.args.append(idx)
            return depth + 1
        if isinstance(f, Neg):
            peak = emit(f.body, depth)
            prog.ops.append(OP_NEG)
            prog.args.append(0)
            return peak
        if isinstance(f, (And, Or)):
            peak = max(emit(f.left, depth), emit(f.right, depth + 1))
            prog.ops.append(OP_AND if isinstance(f, And) else OP_OR)
            prog.args.append(0)
            return peak
        if isinstance(f, (ForallR, ExistsR)):
            peak = depth + 1
            for i, c in enumerate(constants):
                peak = max(peak, emit(substitute(f.restrictor, f.var, c), depth + 2 * i))
                peak = max(peak, emit(substitute(f.matrix, f.var, c), depth + 2 * i + 1))
            prog.ops.append(OP_FORALL if isinstance(f, ForallR) else OP_EXISTS)
            prog.args.append(len(constants))
            return peak
        raise TypeError(f"not a formula: {f!r}")

    for f in formulas:
        prog.stack_size = max(prog.stack_size, emit(f, 0))
        prog.starts.append(len(prog.ops))
    return prog


@dataclass
class Verdict:
    valid: bool
    atoms: list[str]
    witness: dict[str, GTV] | None
    checked: int
    mode: QuantifierMode
    kernel: str

    def to_dict(self) -> dict:
        return {
            "verdict": "VALID" if self.valid else "INVALID",
            "mode": self.mode.value,
            "atoms": self.atoms,
            "witness": None if self.witness is None
            else {a: g.code for a, g in self.witness.items()},
            "assignments_checked": self.checked,
        }

    def to_text(self) -> str:
        lines = [
            f"verdict: {'VALID' if self.valid else 'INVALID'}",
            f"mode: {self.mode.value}",
            f"atoms: {len(self.atoms)}",
            f"assignments checked: {self.checked}",
        ]
        if self.witness is not None:
            lines.append("witness:")
            lines.extend(f"  {a} = {g.code}" for a, g in self.witness.items())
        return "\n".join(lines)


def check_validity(
    premises: Sequence[Formula],
    conclusion: Formula,
    sig: Signature,
    budget: int = DEFAULT_BUDGET,
    mode: QuantifierMode = DEFAULT_MODE,
    kernel: str | None = None,
) -> Verdict:
    """Decide whether every valuation verifying all premises verifies the conclusion.

    Returns INVALID with the first countermodel found (in ``WITNESS_ORDER``
    enumeration, first atom varying fastest).
    """
    mode = QuantifierMode(mode)
    kernel = kernel or DEFAULT_KERNEL
    formulas = list(premises) + [conclusion]
    prog = compile_formulas(formulas, sig.constants)
    k = len(prog.atoms)
    if 9**k > budget:
        raise BudgetExceededError(k, budget)
    checked, witness = KERNELS[kernel](
        prog.ops, prog.args, prog.starts, k, WITNESS_ORDER, prog.stack_size,
        NEG_TABLE, AND_TABLE, OR_TABLE,
        [int(x) for x in FORALL_TABLES[mode]], [int(x) for x in EXISTS_TABLE],
    )
    names = [format_formula(a) for a in prog.atoms]
    return Verdict(
        valid=witness is None,
        atoms=names,
        witness=None if witness is None
        else {n: GTV.from_index(i) for n, i in zip(names, witness)},
        checked=checked,
        mode=mode,
        kernel=kernel,
    )
