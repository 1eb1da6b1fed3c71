"""Query AST, parser and printer for unions of conjunctive queries.

Text format, one rule per disjunct::

    Q1(x,y,w) <- R1(x,z), R2(z,y), R3(y,w).
    Q2(x,y,w) <- R1(x,y), R2(y,w).

A rule may carry several heads over one shared body
(``Q1(w,y), Q2(x,y) <- R(w,x,y).``); each head becomes its own disjunct.
``%`` starts a comment that runs to the end of the line.  ``:-`` and ``←``
are accepted in place of ``<-``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Variable = str


class QueryError(ValueError):
    """Base class for query validation failures."""


class ParseError(QueryError):
    def __init__(self, message: str, position: int, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.position = position
        self.line = line
        self.column = column


class ArityError(QueryError):
    pass


class HeadVariableError(QueryError):
    pass


class HeadArityError(QueryError):
    pass


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Variable, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def vars(self) -> frozenset[Variable]:
        return frozenset(self.args)

    def rename(self, mapping: dict[Variable, Variable]) -> "Atom":
        return Atom(self.relation, tuple(mapping.get(v, v) for v in self.args))

    def __str__(self) -> str:
        return f"{self.relation}({','.join(self.args)})"


@dataclass(frozen=True, eq=False)
class CQ:
    """A conjunctive query.  ``id`` is the position within the original union
    and survives redundancy elimination."""

    head: tuple[Variable, ...]
    body: tuple[Atom, ...]
    id: int = 0
    name: str = "Q"

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "body", tuple(self.body))

    @cached_property
    def free(self) -> frozenset[Variable]:
        return frozenset(self.head)

    @cached_property
    def vars(self) -> frozenset[Variable]:
        return frozenset(v for a in self.body for v in a.args)

    @cached_property
    def var_order(self) -> tuple[Variable, ...]:
        """Variables in order of first appearance in the body."""
        return tuple(dict.fromkeys(v for a in self.body for v in a.args))

    @cached_property
    def existential(self) -> frozenset[Variable]:
        return self.vars - self.free

    @cached_property
    def self_join_free(self) -> bool:
        rels = [a.relation for a in self.body]
        return len(rels) == len(set(rels))

    @property
    def relations(self) -> frozenset[str]:
        return frozenset(a.relation for a in self.body)

    def key(self) -> tuple:
        return (self.head, self.body)

    def __eq__(self, other):
        if not isinstance(other, CQ):
            return NotImplemented
        return self.key() == other.key() and self.id == other.id

    def __hash__(self):
        return hash((self.key(), self.id))

    def with_id(self, id: int, name: str | None = None) -> "CQ":
        return CQ(self.head, self.body, id, self.name if name is None else name)

    def __str__(self) -> str:
        return format_cq(self)


@dataclass(frozen=True, eq=False)
class UCQ:
    disjuncts: tuple[CQ, ...]
    arities: dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))
        if not self.arities:
            object.__setattr__(self, "arities", _arities(self.disjuncts))

    @property
    def head_arity(self) -> int:
        return len(self.disjuncts[0].head) if self.disjuncts else 0

    def __len__(self) -> int:
        return len(self.disjuncts)

    def __iter__(self):
        return iter(self.disjuncts)

    def __getitem__(self, i: int) -> CQ:
        return self.disjuncts[i]

    def by_id(self, id: int) -> CQ:
        for q in self.disjuncts:
            if q.id == id:
                return q
        raise KeyError(id)

    def __eq__(self, other):
        if not isinstance(other, UCQ):
            return NotImplemented
        return [q.key() for q in self] == [q.key() for q in other]

    def __hash__(self):
        return hash(tuple(q.key() for q in self))

    def __str__(self) -> str:
        return format_ucq(self)


def _arities(cqs: Iterable[CQ]) -> dict[str, int]:
    arities: dict[str, int] = {}
    for q in cqs:
        for a in q.body:
            known = arities.setdefault(a.relation, len(a.args))
            if known != len(a.args):
                raise ArityError(
                    f"relation {a.relation} used with arity {len(a.args)} and {known}"
                )
    return arities


def make_ucq(cqs: Sequence[CQ]) -> UCQ:
    """Validate and number a list of CQs."""
    cqs = [q.with_id(i) for i, q in enumerate(cqs)]
    validate(cqs)
    return UCQ(tuple(cqs))


def validate(cqs: Sequence[CQ]) -> None:
    if not cqs:
        raise QueryError("a union needs at least one disjunct")
    _arities(cqs)
    for q in cqs:
        if not q.body:
            raise QueryError(f"{q.name} has an empty body")
        for a in q.body:
            if not a.args:
                raise ArityError(f"{q.name}: nullary atom {a.relation}() is not supported")
        missing = [v for v in q.head if v not in q.vars]
        if missing:
            raise HeadVariableError(
                f"{q.name}: head variable {missing[0]} does not occur in the body"
            )
    arity = len(cqs[0].head)
    for q in cqs[1:]:
        if len(q.head) != arity:
            raise HeadArityError(
                f"{q.name} has head arity {len(q.head)}, expected {arity}"
            )


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<arrow><-|:-|←)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


def _tokens(text: str):
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            _fail(text, pos, f"unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            yield m.lastgroup, m.group(), pos
        pos = m.end()
    yield "eof", "", pos


def _fail(text: str, pos: int, message: str):
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    raise ParseError(message, pos, line, column)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str, value: str | None = None):
        k, v, pos = self.toks[self.i]
        if k != kind or (value is not None and v != value):
            want = value or kind
            got = v or "end of input"
            _fail(self.text, pos, f"expected {want}, found {got!r}")
        self.i += 1
        return v

    def atom(self) -> Atom:
        name = self.take("ident")
        self.take("punct", "(")
        args = []
        if self.peek()[1] != ")":
            args.append(self.take("ident"))
            while self.peek()[1] == ",":
                self.i += 1
                args.append(self.take("ident"))
        self.take("punct", ")")
        return Atom(name, tuple(args))

    def atoms_until(self, stop_kind: str, stop_value: str | None) -> list[Atom]:
        out = [self.atom()]
        while self.peek()[1] == ",":
            self.i += 1
            out.append(self.atom())
        k, v, _ = self.peek()
        if k != stop_kind or (stop_value is not None and v != stop_value):
            self.take(stop_kind, stop_value)
        return out

    def rules(self) -> list[CQ]:
        out: list[CQ] = []
        while self.peek()[0] != "eof":
            heads = self.atoms_until("arrow", None)
            self.take("arrow")
            body = self.atoms_until("punct", ".")
            self.take("punct", ".")
            for h in heads:
                out.append(CQ(h.args, tuple(body), len(out), h.relation))
        return out


def parse_ucq(text: str) -> UCQ:
    """Parse and validate a union of conjunctive queries."""
    cqs = _Parser(text).rules()
    return make_ucq(cqs)


def parse_cq(text: str) -> CQ:
    q = parse_ucq(text)
    if len(q) != 1:
        raise QueryError(f"expected a single rule, found {len(q)}")
    return q[0]


def format_cq(q: CQ) -> str:
    return f"{q.name}({','.join(q.head)}) <- {', '.join(map(str, q.body))}."


def format_ucq(q: UCQ) -> str:
    return "\n".join(format_cq(c) for c in q)


# -- redundancy and shared bodies --------------------------------------------


def remove_redundant(q: UCQ) -> UCQ:
    """Drop every disjunct contained in another one.

    Among equivalent disjuncts the one listed first survives.
    """
    from .morphism import cq_contains

    n = len(q)
    inside = [[i != j and cq_contains(q[i], q[j]) for j in range(n)] for i in range(n)]
    keep = []
    for i in range(n):
        redundant = any(
            inside[i][j] and (not inside[j][i] or j < i) for j in range(n)
        )
        if not redundant:
            keep.append(q[i])
    return UCQ(tuple(keep), q.arities)


@dataclass(frozen=True)
class SharedBody:
    """Body-isomorphic disjuncts rewritten over one body.

    ``renamings[i]`` maps the variables of disjunct ``i`` to the shared
    variables; ``heads[i]`` is its head in shared variables.
    """

    body: tuple[Atom, ...]
    heads: tuple[tuple[Variable, ...], ...]
    renamings: tuple[dict[Variable, Variable], ...]
    source: UCQ

    def as_ucq(self) -> UCQ:
        cqs = [
            CQ(h, self.body, q.id, q.name) for h, q in zip(self.heads, self.source)
        ]
        return UCQ(tuple(cqs), self.source.arities)

    def frees(self) -> list[frozenset[Variable]]:
        return [frozenset(h) for h in self.heads]


def normalize_body_isomorphic(q: UCQ, reference: int = -1) -> SharedBody | None:
    """Rewrite pairwise body-isomorphic disjuncts over the body of
    ``q[reference]`` (the last disjunct by default).  Returns None when some
    pair is not body-isomorphic or a disjunct has self-joins."""
    from .morphism import is_body_isomorphic

    if any(not c.self_join_free for c in q):
        return None
    ref = q[reference]
    heads, renamings = [], []
    for c in q:
        iso = is_body_isomorphic(ref, c)
        if iso is None:
            return None
        inverse = {dst: src for src, dst in iso.map.items()}
        renamings.append(inverse)
        heads.append(tuple(inverse[v] for v in c.head))
    return SharedBody(ref.body, tuple(heads), tuple(renamings), q)


def fresh_names(taken: Iterable[str], prefix: str):
    taken = set(taken)
    for i in itertools.count():
        name = f"{prefix}{i}"
        if name not in taken:
            yield name
