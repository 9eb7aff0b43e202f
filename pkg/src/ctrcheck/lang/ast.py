"""Syntax tree for `.ctr` contracts.

All nodes are frozen dataclasses so that contracts hash and compare
structurally; source positions are carried but excluded from equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

Value = Union[bool, int, str]


# ---------------------------------------------------------------- domains

@dataclass(frozen=True)
class BoolDomain:
    def values(self) -> tuple:
        return (False, True)

    def __contains__(self, v) -> bool:
        return isinstance(v, bool)

    def ordinal(self, v) -> int:
        return int(v)


@dataclass(frozen=True)
class IntDomain:
    lo: int
    hi: int

    def values(self) -> tuple:
        return tuple(range(self.lo, self.hi + 1))

    def __contains__(self, v) -> bool:
        return isinstance(v, int) and not isinstance(v, bool) and self.lo <= v <= self.hi

    def ordinal(self, v) -> int:
        return v - self.lo

    def clamp(self, v: int) -> int:
        return min(self.hi, max(self.lo, v))


@dataclass(frozen=True)
class EnumDomain:
    labels: tuple[str, ...]

    def values(self) -> tuple:
        return self.labels

    def __contains__(self, v) -> bool:
        return isinstance(v, str) and v in self.labels

    def ordinal(self, v) -> int:
        return self.labels.index(v)


Domain = Union[BoolDomain, IntDomain, EnumDomain]

MAX_INT_DOMAIN = 4096


# ------------------------------------------------------------ expressions

@dataclass(frozen=True)
class Lit:
    value: Value
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    """A resource or parameter reference; enum labels are resolved to `Lit`."""
    name: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str  # 'not' | '-'
    arg: 'Expr'
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: 'Expr'
    right: 'Expr'
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


Expr = Union[Lit, Var, Unary, Binary]


# ------------------------------------------------------------- statements

@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Choice:
    branches: tuple[tuple['Stmt', ...], ...]
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple['Stmt', ...]
    orelse: tuple['Stmt', ...] = ()
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    target: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Block:
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Return:
    bindings: tuple[tuple[str, Expr], ...] = ()
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


Stmt = Union[Assign, Choice, If, Call, Block, Return]
Behavior = tuple  # a statement sequence: tuple[Stmt, ...]


# -------------------------------------------------------------- protocols

@dataclass(frozen=True)
class Sym:
    direction: str  # '?' or '!'
    name: str
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    items: tuple['Pattern', ...]


@dataclass(frozen=True)
class Alt:
    options: tuple['Pattern', ...]


@dataclass(frozen=True)
class Repeat:
    body: 'Pattern'
    op: str  # '?' or '*'


Pattern = Union[Sym, Seq, Alt, Repeat]


# ------------------------------------------------------------ declarations

@dataclass(frozen=True)
class VarDecl:
    name: str
    domain: Domain
    init: Value
    pos: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Param:
    name: str
    domain: Domain


@dataclass(frozen=True)
class ServiceDecl:
    name: str
    visibility: str  # 'public' | 'private'
    inputs: tuple[Param, ...]
    outputs: tuple[Param, ...]
    guard: Expr
    pre: Expr
    behavior: Behavior
    pos: tuple = field(default=(0, 0), compare=False, repr=False)

    @property
    def public(self) -> bool:
        return self.visibility == 'public'


@dataclass(frozen=True)
class Contract:
    name: str
    resources: tuple[VarDecl, ...]
    services: tuple[ServiceDecl, ...]
    protocol: Pattern

    def service(self, name: str) -> ServiceDecl:
        for s in self.services:
            if s.name == name:
                return s
        raise KeyError(name)

    def resource(self, name: str) -> VarDecl:
        for r in self.resources:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def public_services(self) -> tuple[ServiceDecl, ...]:
        return tuple(s for s in self.services if s.public)

    @property
    def private_names(self) -> frozenset[str]:
        return frozenset(s.name for s in self.services if not s.public)

    def signature(self) -> tuple:
        """Public interface as comparable data: names, inputs, outputs."""
        return tuple(sorted(
            (s.name, s.inputs, s.outputs) for s in self.public_services))
