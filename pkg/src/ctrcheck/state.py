"""Finite-domain values, valuations, expression evaluation, and the
enumeration of everything a service body can do from a given state."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .lang import ast


@dataclass(frozen=True)
class Valuation:
    """Total assignment of values to a contract's resources.

    Values are kept in declaration order so equal valuations hash equal.
    Assignment through `set` saturates integers at their domain bounds.
    """
    names: tuple[str, ...]
    values: tuple
    domains: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def initial(cls, contract: ast.Contract) -> 'Valuation':
        return cls(tuple(r.name for r in contract.resources),
                   tuple(r.init for r in contract.resources),
                   tuple(r.domain for r in contract.resources))

    def __getitem__(self, name):
        return self.values[self.names.index(name)]

    def __contains__(self, name):
        return name in self.names

    def set(self, name, value) -> 'Valuation':
        i = self.names.index(name)
        if self.domains:
            value = saturate(self.domains[i], value)
        return Valuation(self.names, self.values[:i] + (value,) + self.values[i + 1:],
                         self.domains)

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values))

    def __str__(self):
        from .lang.printer import format_value
        return ', '.join(f'{n}={format_value(v)}' for n, v in zip(self.names, self.values))


def saturate(domain, value):
    if isinstance(domain, ast.IntDomain) and not isinstance(value, bool):
        return domain.clamp(value)
    return value


def evaluate(expr, state: Valuation, params: Mapping = None, domain=None):
    """Evaluate an expression; integer results are clamped to `domain` if given."""
    v = _eval(expr, state, params or {})
    return saturate(domain, v) if domain is not None else v


def _eval(e, state, params):
    if isinstance(e, ast.Lit):
        return e.value
    if isinstance(e, ast.Var):
        if e.name in params:
            return params[e.name]
        return state[e.name]
    if isinstance(e, ast.Unary):
        v = _eval(e.arg, state, params)
        return (not v) if e.op == 'not' else -v
    op = e.op
    if op == 'and':
        return _eval(e.left, state, params) and _eval(e.right, state, params)
    if op == 'or':
        return _eval(e.left, state, params) or _eval(e.right, state, params)
    a, b = _eval(e.left, state, params), _eval(e.right, state, params)
    if op == '+':
        return a + b
    if op == '-':
        return a - b
    if op == '==':
        return a == b
    if op == '!=':
        return a != b
    if op == '<':
        return a < b
    if op == '<=':
        return a <= b
    if op == '>':
        return a > b
    if op == '>=':
        return a >= b
    raise ValueError(f"unknown operator {op!r}")


# ---------------------------------------------------------------- outcomes

@dataclass(frozen=True)
class Returned:
    valuation: Valuation
    outputs: tuple = ()  # ((name, value), ...) in binding order


@dataclass(frozen=True)
class Blocked:
    valuation: Valuation


@dataclass(frozen=True)
class Calls:
    service: str
    valuation: Valuation
    continuation: tuple = ()


Outcome = Returned | Blocked | Calls


def enumerate_outcomes(behavior, state: Valuation, params: Mapping = None,
                       outputs: Optional[Mapping] = None) -> list[Outcome]:
    """All outcomes of running `behavior` from `state`.

    Every `choice` is resolved every way, in branch order; execution stops
    at the first `return`, `block` or `call`. A `Calls` outcome carries the
    statements still to run once the callee returns. Falling off the end of
    the behavior counts as a bare `return`. `outputs` maps output names to
    their domains, for saturating returned integers.

    The result is duplicate-free and in canonical order.
    """
    params = dict(params or {})
    found = []
    seen = set()
    for o in _run(tuple(behavior), state, params, outputs or {}):
        if o not in seen:
            seen.add(o)
            found.append(o)
    return found


def _run(stmts, state, params, outputs):
    for i, st in enumerate(stmts):
        if isinstance(st, ast.Assign):
            state = state.set(st.target, _eval(st.expr, state, params))
        elif isinstance(st, ast.Choice):
            rest = stmts[i + 1:]
            for branch in st.branches:
                yield from _run(branch + rest, state, params, outputs)
            return
        elif isinstance(st, ast.If):
            branch = st.then if _eval(st.cond, state, params) else st.orelse
            yield from _run(branch + stmts[i + 1:], state, params, outputs)
            return
        elif isinstance(st, ast.Call):
            yield Calls(st.target, state, stmts[i + 1:])
            return
        elif isinstance(st, ast.Block):
            yield Blocked(state)
            return
        else:
            yield Returned(state, tuple(
                (n, saturate(outputs.get(n), _eval(e, state, params)))
                for n, e in st.bindings))
            return
    yield Returned(state, ())
