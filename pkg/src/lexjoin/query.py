"""Join queries, variable orders, and the text format that carries them.

Grammar of a query file (UTF-8, ``#`` comments run to end of line)::

    query   := NAME "(" varlist ")" ":-" atom ("," atom)* "." order?
    atom    := NAME "(" varlist ")"
    order   := "ORDER" varlist
    varlist := NAME ("," NAME)*

Identifiers are ASCII letters, digits and underscores, starting with a
letter or underscore; everything is case-sensitive.  The head must list
every variable occurring in the body and nothing else (there is no
projection), and it doubles as the lexicographic order unless an ORDER
clause overrides it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, ParseError
from .hypergraph import Hypergraph
from . import hypergraph as hg


@dataclass(frozen=True)
class JoinQuery:
    """A named join query: atoms over variables, no projection.

    ``variables`` is the head tuple; every variable occurs in some atom and
    every atom variable is in the head.  Atoms sharing a relation symbol must
    agree on arity (self-joins are allowed).
    """

    name: str
    atoms: tuple[tuple[str, tuple[str, ...]], ...]
    variables: tuple[str, ...]

    def __post_init__(self):
        if not self.atoms:
            raise InputError("a join query needs at least one atom")
        if len(set(self.variables)) != len(self.variables):
            raise InputError("head lists a variable twice")
        head = set(self.variables)
        body: set[str] = set()
        arities: dict[str, int] = {}
        for sym, vs in self.atoms:
            if not vs:
                raise InputError(f"atom {sym} has no variables")
            body.update(vs)
            if sym in arities and arities[sym] != len(vs):
                raise InputError(f"relation {sym} used with arities {arities[sym]} and {len(vs)}")
            arities.setdefault(sym, len(vs))
        extra = body - head
        if extra:
            raise InputError(f"body variables {sorted(extra)} missing from the head (projection unsupported)")
        unused = head - body
        if unused:
            raise InputError(f"head variables {sorted(unused)} appear in no atom")

    @property
    def symbols(self) -> tuple[str, ...]:
        out: list[str] = []
        for sym, _ in self.atoms:
            if sym not in out:
                out.append(sym)
        return tuple(out)

    def is_self_join_free(self) -> bool:
        return len(self.symbols) == len(self.atoms)


@dataclass(frozen=True)
class VariableOrder:
    """A permutation of a query's variables; position 0 is compared first."""

    variables: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise InputError("order lists a variable twice")
        object.__setattr__(self, "_pos", {v: i for i, v in enumerate(self.variables)})

    def position(self, v: str) -> int:
        try:
            return self._pos[v]
        except KeyError:
            raise InputError(f"variable {v!r} not in the order") from None

    def __len__(self) -> int:
        return len(self.variables)

    def check_against(self, q: JoinQuery) -> None:
        if sorted(self.variables) != sorted(q.variables):
            raise InputError("order is not a permutation of the query variables")


_TOKEN_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.i < len(self.text) and self.text[self.i] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.i += 1

    def _skip_space(self):
        while self.i < len(self.text):
            c = self.text[self.i]
            if c == "#":
                while self.i < len(self.text) and self.text[self.i] != "\n":
                    self._advance()
            elif c.isspace():
                self._advance()
            else:
                return

    def peek(self) -> str | None:
        self._skip_space()
        return self.text[self.i] if self.i < len(self.text) else None

    def error(self, message: str):
        self._skip_space()
        raise ParseError(message, self.line, self.col)

    def expect(self, literal: str):
        self._skip_space()
        if not self.text.startswith(literal, self.i):
            self.error(f"expected {literal!r}")
        self._advance(len(literal))

    def name(self) -> str:
        self._skip_space()
        start = self.i
        if self.i >= len(self.text) or not (self.text[self.i].isalpha() or self.text[self.i] == "_"):
            self.error("expected an identifier")
        while self.i < len(self.text) and self.text[self.i] in _TOKEN_CHARS:
            self._advance()
        return self.text[start:self.i]

    def at_end(self) -> bool:
        return self.peek() is None


def _varlist(tk: _Tokenizer) -> list[str]:
    out = [tk.name()]
    while tk.peek() == ",":
        tk.expect(",")
        out.append(tk.name())
    return out


def parse_query(text: str) -> tuple[JoinQuery, VariableOrder]:
    """Parse query text; the head (or an ORDER clause) defines the order."""
    tk = _Tokenizer(text)
    qname = tk.name()
    tk.expect("(")
    head = _varlist(tk)
    tk.expect(")")
    tk.expect(":-")
    atoms: list[tuple[str, tuple[str, ...]]] = []
    while True:
        sym = tk.name()
        tk.expect("(")
        vs = _varlist(tk)
        tk.expect(")")
        atoms.append((sym, tuple(vs)))
        c = tk.peek()
        if c == ",":
            tk.expect(",")
            continue
        if c == ".":
            tk.expect(".")
            break
        tk.error("expected ',' or '.'")

    order_vars = tuple(head)
    if tk.peek() is not None:
        tk.expect("ORDER")
        order_vars = tuple(_varlist(tk))
    if not tk.at_end():
        tk.error("unexpected trailing input")

    try:
        q = JoinQuery(qname, tuple(atoms), tuple(head))
        order = VariableOrder(order_vars)
        order.check_against(q)
    except ParseError:
        raise
    except InputError as exc:
        raise ParseError(str(exc), tk.line, tk.col) from None
    return q, order


def format_query(q: JoinQuery, order: VariableOrder | None = None) -> str:
    """Canonical text of a query; inverse of :func:`parse_query`."""
    head = ", ".join(q.variables)
    body = ", ".join(f"{sym}({', '.join(vs)})" for sym, vs in q.atoms)
    text = f"{q.name}({head}) :- {body}."
    if order is not None and order.variables != q.variables:
        text += "\nORDER " + ", ".join(order.variables)
    return text


def hypergraph_of(q: JoinQuery) -> Hypergraph:
    """One edge per atom scope, normalized; vertices in head order."""
    return Hypergraph.build([list(vs) for _, vs in q.atoms], vertices=q.variables)


def disruptive_trios(q: JoinQuery, order: VariableOrder) -> list[tuple[str, str, str]]:
    """Variable trios that block cheap lexicographic access under ``order``.

    A trio is (x1, x2, x3) with x3 after both in the order, x1 and x2 never
    in a common atom, and x3 sharing an atom with each.  Canonical form puts
    x1 before x2 in the order.
    """
    order.check_against(q)
    return hg.disruptive_trios(hypergraph_of(q), order.variables)
