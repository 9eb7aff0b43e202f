"""Deadlock, livelock, consistency and refinement verdicts.

Every check is a search over some product space ordered by the visible
trace that reaches each item: shortest first, then lexicographically by
event. Tau steps do not lengthen the trace. The first violating item
popped therefore carries a minimal counterexample.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import ProtocolError
from .lang import ast
from .lts import (DEFAULT_MAX_STATES, Lts, cycle_names, divergent_states,
                  format_trace, hidden_lts, normalize)
from .semantics import compile_protocol, format_symbol

MODELS = {'T': 'T', 'traces': 'T',
          'F': 'F', 'failures': 'F',
          'FD': 'FD', 'failures-divergences': 'FD'}


@dataclass
class Counterexample:
    kind: str
    trace: tuple
    details: dict = field(default_factory=dict)
    spec_node: Optional[int] = None
    impl_state: Optional[int] = None

    def to_json(self) -> dict:
        out = {'kind': self.kind, 'trace': [e.to_json() for e in self.trace]}
        for k, v in self.details.items():
            out[k] = v
        if self.spec_node is not None:
            out['spec_node'] = self.spec_node
        if self.impl_state is not None:
            out['impl_state'] = self.impl_state
        return out

    def describe(self) -> str:
        text = format_trace(self.trace)
        if self.kind in ('divergence', 'divergence-mismatch') and self.details.get('cycle'):
            names = [n for n in self.details['cycle'] if n != 'chaos']
            if names:
                text += ' then loop ' + ' '.join(f'tau:{n}' for n in names)
            if 'chaos' in self.details['cycle']:
                text += ' then chaos'
        if self.kind == 'refusal-mismatch':
            text += f"; offered {{{', '.join(self.details['offered'])}}}"
        if self.kind == 'trace-mismatch':
            text += ' (not a trace of the specification)'
        if self.kind == 'unmatched-protocol':
            text = 'protocol trace ' + ' '.join(self.details['protocol_trace'])
        return text


@dataclass
class Verdict:
    property: str
    holds: bool
    counterexample: Optional[Counterexample] = None
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.holds == (self.counterexample is None)

    def to_json(self, stats=True) -> dict:
        out = {'property': self.property, 'holds': self.holds,
               'counterexample': self.counterexample.to_json() if self.counterexample else None}
        if stats:
            out['stats'] = self.stats
        return out


class _Search:
    """Priority search keyed by (trace length, trace in event order)."""

    def __init__(self):
        self.explored = 0
        self.transitions = 0

    def run(self, starts, expand, violation):
        counter = itertools.count()
        heap = [((0, ()), next(counter), item, ()) for item in starts]
        heapq.heapify(heap)
        done = set()
        while heap:
            key, _, item, trace = heapq.heappop(heap)
            if item in done:
                continue
            done.add(item)
            self.explored += 1
            bad = violation(item)
            if bad is not None:
                return item, trace, bad
            for ev, nxt in expand(item):
                self.transitions += 1
                if nxt in done:
                    continue
                if ev is None:
                    heapq.heappush(heap, (key, next(counter), nxt, trace))
                else:
                    t = trace + (ev,)
                    heapq.heappush(heap, ((len(t), key[1] + (ev.sort_key(),)),
                                          next(counter), nxt, t))
        return None

    def stats(self, started, **extra) -> dict:
        out = {'explored': self.explored, 'transitions': self.transitions}
        out.update(extra)
        out['elapsed_s'] = round(time.perf_counter() - started, 6)
        return out


def _lts_expand(lts: Lts):
    def expand(s):
        return [(e if e.visible else None, t) for e, t in lts.out[s]]
    return expand


def check_deadlock(contract: ast.Contract, max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """A deadlock is a reachable stable state with nothing to offer."""
    return deadlock_lts(hidden_lts(contract, max_states))


def deadlock_lts(lts: Lts) -> Verdict:
    t0 = time.perf_counter()
    search = _Search()
    found = search.run(
        [lts.start], _lts_expand(lts),
        lambda s: 'deadlock' if lts.is_stable(s) and not lts.out[s] else None)
    stats = search.stats(t0, states=len(lts), lts_transitions=len(lts.edges))
    if found is None:
        return Verdict('deadlock-free', True, stats=stats)
    s, trace, kind = found
    return Verdict('deadlock-free', False, Counterexample(kind, trace, impl_state=s), stats)


def check_livelock(contract: ast.Contract, max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    return livelock_lts(hidden_lts(contract, max_states))


def livelock_lts(lts: Lts) -> Verdict:
    t0 = time.perf_counter()
    div = divergent_states(lts)
    search = _Search()
    found = search.run([lts.start], _lts_expand(lts),
                       lambda s: 'divergence' if s in div else None)
    stats = search.stats(t0, states=len(lts), lts_transitions=len(lts.edges))
    if found is None:
        return Verdict('livelock-free', True, stats=stats)
    s, trace, kind = found
    cx = Counterexample(kind, trace, {'cycle': cycle_names(lts, s)}, impl_state=s)
    return Verdict('livelock-free', False, cx, stats)


def check_protocol_alternation(dfa) -> None:
    """Every request the protocol allows must be answerable next."""
    for q, row in enumerate(dfa.delta):
        for (direction, name), targets in row.items():
            if direction != '?':
                continue
            for t in targets:
                if ('!', name) not in dfa.delta[t]:
                    raise ProtocolError(
                        f"protocol allows ?{name} without a following !{name}")


def check_consistency(contract: ast.Contract, max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """Deadlock- and livelock-freedom along the declared protocol.

    Explores the declared protocol (determinized) in lock-step with the
    normalized contract. Violations, in the order they are tested at each
    product state: a divergent node, then a node that may refuse every
    event while the protocol still expects something. Once the product is
    exhausted, every protocol state must have been matched.
    """
    t0 = time.perf_counter()
    lts = hidden_lts(contract, max_states)
    norm = normalize(lts, max_states)
    dfa = compile_protocol(contract.protocol).determinize()
    check_protocol_alternation(dfa)

    def expand(item):
        q, n = item
        out = []
        for e, n2 in norm.nodes[n].transitions.items():
            targets = dfa.delta[q].get(e.symbol)
            if targets:
                out.append((e, (next(iter(targets)), n2)))
        return out

    def violation(item):
        q, n = item
        node = norm.nodes[n]
        if node.divergent:
            return 'divergence'
        if frozenset() in node.acceptances and dfa.delta[q]:
            return 'total-refusal'
        return None

    search = _Search()
    found = search.run([(dfa.start, norm.start)], expand, violation)
    stats = search.stats(t0, states=len(lts), normalized_nodes=len(norm),
                         protocol_states=dfa.n_states)
    if found is not None:
        (q, n), trace, kind = found
        details = {}
        if kind == 'divergence':
            members = sorted(norm.nodes[n].members & divergent_states(lts))
            details['cycle'] = cycle_names(lts, members[0])
        return Verdict('consistent', False,
                       Counterexample(kind, trace, details, spec_node=n), stats)

    matched = {q for q, _ in _visited_protocol_states(dfa, norm)}
    word = _first_unmatched(dfa, matched)
    if word is not None:
        cx = Counterexample('unmatched-protocol', (),
                            {'protocol_trace': [format_symbol(s) for s in word]})
        return Verdict('consistent', False, cx, stats)
    return Verdict('consistent', True, stats=stats)


def _visited_protocol_states(dfa, norm):
    seen = {(dfa.start, norm.start)}
    stack = list(seen)
    while stack:
        q, n = stack.pop()
        for e, n2 in norm.nodes[n].transitions.items():
            targets = dfa.delta[q].get(e.symbol)
            if targets:
                item = (next(iter(targets)), n2)
                if item not in seen:
                    seen.add(item)
                    stack.append(item)
    return seen


def _first_unmatched(dfa, matched):
    """Shortest protocol word reaching a protocol state no product state matches."""
    queue = [(dfa.start, ())]
    seen = {dfa.start}
    while queue:
        nxt = []
        for q, word in queue:
            if q not in matched:
                return word
            for sym in sorted(dfa.delta[q]):
                t = next(iter(dfa.delta[q][sym]))
                if t not in seen:
                    seen.add(t)
                    nxt.append((t, word + (sym,)))
        queue = nxt
    return None


def check_refinement(spec: ast.Contract, impl: ast.Contract, model: str = 'FD',
                     max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """Decide spec ⊑ impl after hiding each side's private services.

    Models: 'T' (traces), 'F' (failures), 'FD' (failures-divergences).
    In every model a divergent specification node admits any further
    behavior. Failures follow the divergence closure, so an implementation
    trace that has passed through divergence may refuse everything.
    """
    if model not in MODELS:
        raise ValueError(f"unknown refinement model {model!r}")
    if spec.signature() != impl.signature():
        raise ValueError(f"public interfaces of {spec.name} and {impl.name} differ")
    return refines_lts(hidden_lts(spec, max_states), hidden_lts(impl, max_states),
                       model, max_states)


def refines_lts(spec_lts: Lts, impl_lts: Lts, model: str = 'FD',
                max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """Refinement on already-hidden LTSs (see `check_refinement`)."""
    try:
        model = MODELS[model]
    except KeyError:
        raise ValueError(f"unknown refinement model {model!r}") from None
    t0 = time.perf_counter()
    norm = normalize(spec_lts, max_states)
    ilts = impl_lts
    idiv = divergent_states(ilts)

    def expand(item):
        if item[0] == 'mismatch':
            return []
        n, i, diverged = item
        if norm.nodes[n].divergent:
            return []
        out = []
        for e, t in ilts.out[i]:
            if not e.visible:
                out.append((None, (n, t, diverged or t in idiv)))
                continue
            n2 = norm.succ(n, e)
            if n2 is None:
                out.append((e, ('mismatch', n, t)))
            else:
                out.append((e, (n2, t, diverged or t in idiv)))
        return out

    def violation(item):
        if item[0] == 'mismatch':
            return 'trace-mismatch'
        n, i, diverged = item
        node = norm.nodes[n]
        if node.divergent or model == 'T':
            return None
        if model == 'FD' and i in idiv:
            return 'divergence-mismatch'
        if diverged and frozenset() not in node.acceptances:
            return 'refusal-mismatch'
        if ilts.is_stable(i):
            offered = ilts.initials(i)
            if not any(a <= offered for a in node.acceptances):
                return 'refusal-mismatch'
        return None

    search = _Search()
    start = ilts.start
    found = search.run([(norm.start, start, start in idiv)], expand, violation)
    stats = search.stats(t0, spec_nodes=len(norm), impl_states=len(ilts), model=model)
    if found is None:
        return Verdict('refines', True, stats=stats)
    item, trace, kind = found
    if kind == 'trace-mismatch':
        _, n, i = item
        cx = Counterexample(kind, trace, spec_node=n, impl_state=i)
    else:
        n, i, _ = item
        details = {}
        if kind == 'divergence-mismatch':
            details['cycle'] = cycle_names(ilts, i)
        elif kind == 'refusal-mismatch':
            details['offered'] = [str(e) for e in sorted(ilts.initials(i))]
            details['required'] = [[str(e) for e in sorted(a)]
                                   for a in sorted(norm.nodes[n].acceptances,
                                                   key=lambda a: sorted(a))]
        cx = Counterexample(kind, trace, details, spec_node=n, impl_state=i)
    return Verdict('refines', False, cx, stats)
