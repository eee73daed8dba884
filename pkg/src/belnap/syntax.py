"""Formula language: restricted-quantifier first-order formulas without
function symbols.

Concrete grammar (whitespace-insensitive)::

    formula     := disjunction
    disjunction := conjunction ("|" conjunction)*
    conjunction := unary ("&" unary)*
    unary       := "~" unary
                 | "[" ("all" | "some") VAR formula "]" unary
                 | "(" formula ")"
                 | atom
    atom        := REL "(" TERM ("," TERM)* ")"

Identifiers are ``[A-Za-z0-9_]+``; relation names start with a letter and
``all``/``some`` are reserved.  An argument is a variable when it is bound by
an enclosing quantifier, otherwise a constant.  ``&`` and ``|`` associate to
the left.  The canonical printer fully parenthesizes binary connectives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union


class FormulaError(ValueError):
    """Base class for formula syntax and resolution errors."""


class ParseError(FormulaError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text[:pos]}‸{text[pos:]}")
        self.text = text
        self.pos = pos


class UnknownSymbolError(FormulaError):
    pass


class ArityError(FormulaError):
    pass


class FreeVariableError(FormulaError):
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


Term = Union[Const, Var]


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Neg:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForallR:
    var: str
    restrictor: "Formula"
    matrix: "Formula"


@dataclass(frozen=True)
class ExistsR:
    var: str
    restrictor: "Formula"
    matrix: "Formula"


Formula = Union[Atom, Neg, And, Or, ForallR, ExistsR]


@dataclass(frozen=True)
class Signature:
    """Finite constant domain plus relation arities."""

    constants: tuple[str, ...] = ()
    relations: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(dict.fromkeys(self.constants)))
        object.__setattr__(self, "relations", dict(self.relations))
        for rel, arity in self.relations.items():
            if arity < 1:
                raise ValueError(f"relation {rel} must have arity >= 1, got {arity}")

    def __hash__(self):
        return hash((self.constants, tuple(sorted(self.relations.items()))))

    @classmethod
    def infer(cls, formulas: Sequence[Formula], constants: Sequence[str] = ()) -> "Signature":
        """Collect the constants and relation arities used by ``formulas``.

        Explicitly given ``constants`` come first, in order.
        """
        consts = list(constants)
        rels: dict[str, int] = {}
        for f in formulas:
            for a in iter_atoms(f):
                prev = rels.setdefault(a.relation, len(a.args))
                if prev != len(a.args):
                    raise ArityError(
                        f"relation {a.relation} used with arities {prev} and {len(a.args)}"
                    )
                consts.extend(t.name for t in a.args if isinstance(t, Const))
        return cls(tuple(consts), rels)

    def merge(self, other: "Signature") -> "Signature":
        rels = dict(self.relations)
        for rel, arity in other.relations.items():
            if rels.setdefault(rel, arity) != arity:
                raise ArityError(f"relation {rel} has conflicting arities")
        return Signature(self.constants + other.constants, rels)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z0-9_]+)|(?P<punct>[~&|()\[\],]))")
_KEYWORDS = {"all": ForallR, "some": ExistsR}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = "ident" if m.group("ident") else "punct"
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature | None):
        self.text = text
        self.sig = sig
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.advance()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", self.text, pos)

    def error(self, message: str):
        raise ParseError(message, self.text, self.peek()[2])

    def parse(self) -> Formula:
        f = self.disjunction(frozenset())
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def disjunction(self, bound):
        f = self.conjunction(bound)
        while self.peek()[1] == "|":
            self.advance()
            f = Or(f, self.conjunction(bound))
        return f

    def conjunction(self, bound):
        f = self.unary(bound)
        while self.peek()[1] == "&":
            self.advance()
            f = And(f, self.unary(bound))
        return f

    def unary(self, bound):
        kind, val, pos = self.peek()
        if val == "~":
            self.advance()
            return Neg(self.unary(bound))
        if val == "(":
            self.advance()
            f = self.disjunction(bound)
            self.expect(")")
            return f
        if val == "[":
            self.advance()
            kind, kw, kpos = self.advance()
            if kw not in _KEYWORDS:
                raise ParseError("expected 'all' or 'some'", self.text, kpos)
            kind, var, vpos = self.advance()
            if kind != "ident" or var in _KEYWORDS:
                raise ParseError("expected a variable name", self.text, vpos)
            inner = bound | {var}
            restrictor = self.disjunction(inner)
            self.expect("]")
            matrix = self.unary(inner)
            return _KEYWORDS[kw](var, restrictor, matrix)
        if kind == "ident":
            return self.atom(bound)
        self.error("expected a formula")

    def atom(self, bound):
        _, rel, pos = self.advance()
        if rel in _KEYWORDS or not rel[0].isalpha():
            raise ParseError(f"invalid relation name {rel!r}", self.text, pos)
        self.expect("(")
        args = [self.term(bound)]
        while self.peek()[1] == ",":
            self.advance()
            args.append(self.term(bound))
        self.expect(")")
        if self.sig is not None:
            if rel not in self.sig.relations:
                raise UnknownSymbolError(f"unknown relation {rel!r} at position {pos}")
            if self.sig.relations[rel] != len(args):
                raise ArityError(
                    f"relation {rel!r} expects {self.sig.relations[rel]} argument(s), "
                    f"got {len(args)} at position {pos}"
                )
        return Atom(rel, tuple(args))

    def term(self, bound):
        kind, name, pos = self.advance()
        if kind != "ident" or name in _KEYWORDS:
            raise ParseError("expected a constant or variable", self.text, pos)
        if name in bound:
            return Var(name)
        if self.sig is not None and name not in self.sig.constants:
            raise UnknownSymbolError(f"unknown constant {name!r} at position {pos}")
        return Const(name)


def parse_formula(text: str, sig: Signature | None = None) -> Formula:
    """Parse ``text``; when ``sig`` is given every relation, arity and
    constant must resolve against it."""
    return _Parser(text, sig).parse()


# -- printing ----------------------------------------------------------------


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.relation}({','.join(t.name for t in f.args)})"
    if isinstance(f, Neg):
        return "~" + format_formula(f.body)
    if isinstance(f, And):
        return f"({format_formula(f.left)} & {format_formula(f.right)})"
    if isinstance(f, Or):
        return f"({format_formula(f.left)} | {format_formula(f.right)})"
    if isinstance(f, (ForallR, ExistsR)):
        kw = "all" if isinstance(f, ForallR) else "some"
        return f"[{kw} {f.var} {format_formula(f.restrictor)}] {format_formula(f.matrix)}"
    raise TypeError(f"not a formula: {f!r}")


# -- structural helpers ------------------------------------------------------


def substitute(f: Formula, var: str, const: str) -> Formula:
    """Replace free occurrences of ``var`` by the constant ``const``."""
    if isinstance(f, Atom):
        return Atom(
            f.relation,
            tuple(Const(const) if t == Var(var) else t for t in f.args),
        )
    if isinstance(f, Neg):
        return Neg(substitute(f.body, var, const))
    if isinstance(f, (And, Or)):
        return type(f)(substitute(f.left, var, const), substitute(f.right, var, const))
    if f.var == var:
        return f
    return type(f)(f.var, substitute(f.restrictor, var, const), substitute(f.matrix, var, const))


def iter_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Neg):
        yield from iter_atoms(f.body)
    elif isinstance(f, (And, Or)):
        yield from iter_atoms(f.left)
        yield from iter_atoms(f.right)
    else:
        yield from iter_atoms(f.restrictor)
        yield from iter_atoms(f.matrix)


def free_variables(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {t.name for t in f.args if isinstance(t, Var)}
    if isinstance(f, Neg):
        return free_variables(f.body)
    if isinstance(f, (And, Or)):
        return free_variables(f.left) | free_variables(f.right)
    return (free_variables(f.restrictor) | free_variables(f.matrix)) - {f.var}


def is_ground_atom(f: Formula) -> bool:
    return isinstance(f, Atom) and all(isinstance(t, Const) for t in f.args)


def ground_atoms(f: Formula, constants: Sequence[str]) -> list[Atom]:
    """Every ground atom the evaluation of closed ``f`` over ``constants`` can reach,
    in first-reached order."""
    seen: dict[Atom, None] = {}

    def walk(g: Formula):
        if isinstance(g, Atom):
            if not is_ground_atom(g):
                raise FreeVariableError(f"free variable in {format_formula(g)}")
            seen.setdefault(g)
        elif isinstance(g, Neg):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            walk(g.left)
            walk(g.right)
        else:
            for c in constants:
                walk(substitute(g.restrictor, g.var, c))
                walk(substitute(g.matrix, g.var, c))

    walk(f)
    return list(seen)
