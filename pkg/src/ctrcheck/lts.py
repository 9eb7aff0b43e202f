"""Explicit labelled transition systems compiled from contracts.

A contract is unfolded breadth-first into states of the form
(valuation, phase). Requests and responses are visible events; a call to
a private service is the visible event ``?p()`` until `hide` turns it
into an internal tau step. Precondition violations lead to a single
chaos state, which is divergent and refines nothing.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Optional

from .errors import ExecutionError, StateSpaceError
from .lang import ast
from .lang.printer import format_value
from .state import Blocked, Calls, Returned, Valuation, enumerate_outcomes, evaluate

DEFAULT_MAX_STATES = 1_000_000

_KIND_RANK = {'req': 0, 'resp': 1, 'call': 2, 'tau': 3}


@dataclass(frozen=True)
class Event:
    kind: str  # 'req' | 'resp' | 'call' | 'tau'
    service: Optional[str]
    args: tuple = ()
    ordinals: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def tau(cls, service=None) -> 'Event':
        return cls('tau', service)

    @property
    def visible(self) -> bool:
        return self.kind != 'tau'

    @property
    def symbol(self) -> tuple[str, str]:
        """Argument-free protocol symbol: ('?', name) or ('!', name)."""
        return ('!' if self.kind == 'resp' else '?', self.service)

    def sort_key(self):
        return (_KIND_RANK[self.kind], self.service or '', self.ordinals or self.args)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.kind == 'tau':
            return f'tau:{self.service}' if self.service else 'tau'
        args = ', '.join(format_value(a) for a in self.args)
        prefix = '!' if self.kind == 'resp' else '?'
        return f'{prefix}{self.service}({args})'

    def to_json(self) -> dict:
        return {'dir': {'req': '?', 'resp': '!', 'call': '?', 'tau': 'tau'}[self.kind],
                'service': self.service, 'args': list(self.args)}


def format_trace(trace) -> str:
    return ' '.join(str(e) for e in trace) if trace else '<>'


# ------------------------------------------------------------------ phases

@dataclass(frozen=True)
class StableIdle:
    def __str__(self):
        return 'idle'


@dataclass(frozen=True)
class MidCall:
    service: str
    params: tuple          # public caller's input bindings
    frames: tuple          # ((remaining statements, is_public_frame), ...)
    callee: str

    def __str__(self):
        return f'{self.service}>{self.callee}[{len(self.frames)}]'


@dataclass(frozen=True)
class Responding:
    service: str
    outputs: tuple

    def __str__(self):
        return f'responding {self.service}'


@dataclass(frozen=True)
class BlockedPhase:
    def __str__(self):
        return 'blocked'


@dataclass(frozen=True)
class ChaosPhase:
    def __str__(self):
        return 'chaos'


@dataclass(frozen=True)
class LtsState:
    valuation: Optional[Valuation]
    phase: object

    def __str__(self):
        if self.valuation is None:
            return str(self.phase)
        return f'{self.phase} | {self.valuation}'


CHAOS = LtsState(None, ChaosPhase())


# -------------------------------------------------------------------- Lts

@dataclass(frozen=True)
class Lts:
    """An explicit LTS with integer-indexed states.

    `states` may hold any hashable labels (build_lts uses LtsState);
    `chaos` and `blocked` mark the distinguished states by index.
    """
    states: tuple[Hashable, ...]
    start: int
    alphabet: frozenset
    edges: tuple  # ((src, Event, dst), ...) in canonical order
    private_names: frozenset = frozenset()
    chaos: frozenset = frozenset()
    blocked: frozenset = frozenset()

    @cached_property
    def out(self) -> list[list[tuple[Event, int]]]:
        out = [[] for _ in self.states]
        for s, e, t in self.edges:
            out[s].append((e, t))
        return out

    @cached_property
    def tau_succ(self) -> list[list[int]]:
        return [[t for e, t in succ if not e.visible] for succ in self.out]

    def initials(self, s: int) -> frozenset:
        return frozenset(e for e, _ in self.out[s] if e.visible)

    def is_stable(self, s: int) -> bool:
        return s not in self.chaos and not self.tau_succ[s]

    def tau_closure(self, states) -> frozenset:
        seen = set(states)
        stack = list(seen)
        while stack:
            for t in self.tau_succ[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def after(self, trace, start=None) -> frozenset:
        """States reachable by performing `trace` with tau steps interleaved."""
        current = self.tau_closure({self.start if start is None else start})
        for ev in trace:
            nxt = {t for s in current for e, t in self.out[s] if e == ev}
            current = self.tau_closure(nxt)
        return current

    def __len__(self):
        return len(self.states)


# ----------------------------------------------------------------- build

def _bindings(params):
    doms = [p.domain.values() for p in params]
    for combo in itertools.product(*doms):
        yield tuple(zip((p.name for p in params), combo)), tuple(
            p.domain.ordinal(v) for p, v in zip(params, combo))


def contract_alphabet(contract: ast.Contract) -> frozenset:
    """Every concrete event the contract could ever engage in, before hiding."""
    events = set()
    for s in contract.services:
        if s.public:
            for b, ords in _bindings(s.inputs):
                events.add(Event('req', s.name, tuple(v for _, v in b), ords))
            for b, ords in _bindings(s.outputs):
                events.add(Event('resp', s.name, tuple(v for _, v in b), ords))
        else:
            events.add(Event('call', s.name))
    return frozenset(events)


class _Builder:
    def __init__(self, contract: ast.Contract):
        self.c = contract
        self.services = {s.name: s for s in contract.services}

    def request_events(self, state: LtsState):
        v = state.valuation
        for svc in self.c.public_services:
            for binding, ords in _bindings(svc.inputs):
                params = dict(binding)
                if not evaluate(svc.guard, v, params):
                    continue
                ev = Event('req', svc.name, tuple(x for _, x in binding), ords)
                if not evaluate(svc.pre, v, params):
                    yield ev, [CHAOS]
                    continue
                outs = {p.name: p.domain for p in svc.outputs}
                targets = []
                for o in enumerate_outcomes(svc.behavior, v, params, outs):
                    targets += self.settle(o, svc.name, binding, (), True)
                yield ev, targets

    def settle(self, outcome, service, params, frames, public_frame) -> list[LtsState]:
        if isinstance(outcome, Blocked):
            return [LtsState(outcome.valuation, BlockedPhase())]
        if isinstance(outcome, Calls):
            callee = self.services[outcome.service]
            v = outcome.valuation
            if not evaluate(callee.guard, v):
                # a private service whose guard is false never fires: wait forever
                return [LtsState(v, BlockedPhase())]
            if outcome.continuation or public_frame:
                frames = frames + ((outcome.continuation, public_frame),)
            return [LtsState(v, MidCall(service, params, frames, callee.name))]
        assert isinstance(outcome, Returned)
        if not frames:
            if not public_frame:
                raise ExecutionError(f"private service returned with no caller in {service}")
            return [LtsState(outcome.valuation, Responding(service, self._outputs(service, outcome)))]
        rest, is_public = frames[-1]
        svc = self.services[service]
        outs = {p.name: p.domain for p in svc.outputs} if is_public else {}
        targets = []
        for o in enumerate_outcomes(rest, outcome.valuation, dict(params) if is_public else {}, outs):
            targets += self.settle(o, service, params, frames[:-1], is_public)
        return targets

    def _outputs(self, service, outcome):
        svc = self.services[service]
        bound = dict(outcome.outputs)
        missing = [p.name for p in svc.outputs if p.name not in bound]
        if missing:
            raise ExecutionError(
                f"service {service} finished without binding {', '.join(missing)}")
        return tuple((p.name, bound[p.name]) for p in svc.outputs)

    def successors(self, state: LtsState):
        phase = state.phase
        if isinstance(phase, StableIdle):
            return list(self.request_events(state))
        if isinstance(phase, Responding):
            svc = self.services[phase.service]
            ords = tuple(p.domain.ordinal(v) for p, (_, v) in zip(svc.outputs, phase.outputs))
            ev = Event('resp', phase.service, tuple(v for _, v in phase.outputs), ords)
            return [(ev, [LtsState(state.valuation, StableIdle())])]
        if isinstance(phase, MidCall):
            callee = self.services[phase.callee]
            ev = Event('call', callee.name)
            v = state.valuation
            if not evaluate(callee.pre, v):
                return [(ev, [CHAOS])]
            targets = []
            for o in enumerate_outcomes(callee.behavior, v):
                targets += self.settle(o, phase.service, phase.params, phase.frames, False)
            return [(ev, targets)]
        return []


def build_lts(contract: ast.Contract, max_states: int = DEFAULT_MAX_STATES) -> Lts:
    """Unfold a typechecked contract into its explicit LTS (nothing hidden).

    States are numbered in breadth-first discovery order with outgoing
    events visited in canonical order, so the result is deterministic.
    """
    builder = _Builder(contract)
    start = LtsState(Valuation.initial(contract), StableIdle())
    index = {start: 0}
    states = [start]
    edges = []
    queue = deque([start])
    while queue:
        st = queue.popleft()
        src = index[st]
        succ = sorted(builder.successors(st), key=lambda p: p[0].sort_key())
        seen_edges = set()
        for ev, targets in succ:
            for t in targets:
                if t not in index:
                    if len(states) >= max_states:
                        raise StateSpaceError('LTS construction', max_states)
                    index[t] = len(states)
                    states.append(t)
                    queue.append(t)
                edge = (src, ev, index[t])
                if edge not in seen_edges:
                    seen_edges.add(edge)
                    edges.append(edge)
    return Lts(
        states=tuple(states),
        start=0,
        alphabet=contract_alphabet(contract),
        edges=tuple(edges),
        private_names=contract.private_names,
        chaos=frozenset(i for i, s in enumerate(states) if isinstance(s.phase, ChaosPhase)),
        blocked=frozenset(i for i, s in enumerate(states) if isinstance(s.phase, BlockedPhase)),
    )


def hide(lts: Lts, private_names) -> Lts:
    """Turn calls of the given private services into internal tau steps."""
    names = frozenset(private_names)
    unknown = names - lts.private_names
    if unknown:
        raise ValueError(f"not a private service: {', '.join(sorted(unknown))}")
    if not names:
        return lts

    def relabel(e):
        return Event.tau(e.service) if e.kind == 'call' and e.service in names else e

    return Lts(
        states=lts.states,
        start=lts.start,
        alphabet=frozenset(e for e in lts.alphabet
                           if not (e.kind == 'call' and e.service in names)),
        edges=tuple((s, relabel(e), t) for s, e, t in lts.edges),
        private_names=lts.private_names,
        chaos=lts.chaos,
        blocked=lts.blocked,
    )


def hidden_lts(contract: ast.Contract, max_states: int = DEFAULT_MAX_STATES) -> Lts:
    """build_lts followed by hiding every private service: the object Ctr \\ PM."""
    return hide(build_lts(contract, max_states), contract.private_names)


# ------------------------------------------------------------- divergence

def tau_sccs(lts: Lts) -> list[list[int]]:
    """Strongly connected components of the tau-subgraph (iterative Tarjan)."""
    succ = lts.tau_succ
    index, low = {}, {}
    on_stack = set()
    stack, sccs = [], []
    counter = 0
    for root in range(len(lts.states)):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            recurse = False
            for j in range(i, len(succ[v])):
                w = succ[v][j]
                if w not in index:
                    work.append((v, j + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return sccs


def tau_cycles(lts: Lts) -> list[list[int]]:
    """The tau-SCCs that contain at least one tau edge."""
    succ = lts.tau_succ
    return [c for c in tau_sccs(lts)
            if len(c) > 1 or c[0] in succ[c[0]]]


def divergent_states(lts: Lts) -> frozenset:
    """States from which an infinite tau path exists, plus chaos and
    every state that can reach chaos silently."""
    seeds = set(lts.chaos)
    for comp in tau_cycles(lts):
        seeds.update(comp)
    pred = [[] for _ in lts.states]
    for s, succ in enumerate(lts.tau_succ):
        for t in succ:
            pred[t].append(s)
    result = set(seeds)
    stack = list(seeds)
    while stack:
        for p in pred[stack.pop()]:
            if p not in result:
                result.add(p)
                stack.append(p)
    return frozenset(result)


def cycle_names(lts: Lts, state: int) -> list[str]:
    """Names on the tau cycles reachable silently from `state`."""
    reach = lts.tau_closure({state})
    names = set()
    for comp in tau_cycles(lts):
        members = set(comp)
        if members & reach:
            for s in comp:
                for e, t in lts.out[s]:
                    if not e.visible and t in members:
                        names.add(e.service or 'tau')
    if reach & lts.chaos:
        names.add('chaos')
    return sorted(names)


# ---------------------------------------------------------- normalization

@dataclass(frozen=True)
class NormNode:
    members: frozenset
    divergent: bool
    acceptances: frozenset  # minimal acceptance sets; empty if no stable member
    transitions: dict = field(compare=False, hash=False)


@dataclass(frozen=True)
class NormalizedLts:
    nodes: tuple[NormNode, ...]
    start: int
    alphabet: frozenset

    def succ(self, node: int, event) -> Optional[int]:
        return self.nodes[node].transitions.get(event)

    def __len__(self):
        return len(self.nodes)


def minimal_sets(sets) -> frozenset:
    sets = set(map(frozenset, sets))
    return frozenset(a for a in sets if not any(b < a for b in sets))


def normalize(lts: Lts, max_nodes: int = DEFAULT_MAX_STATES) -> NormalizedLts:
    """Subset construction over tau-closures.

    Each node records whether any member diverges and the minimal
    acceptance sets of its stable members. Transitions of divergent nodes
    are kept, so the visible trace language is preserved exactly; checkers
    treat divergent specification nodes as accepting everything.
    """
    div = divergent_states(lts)
    start = lts.tau_closure({lts.start})
    index = {start: 0}
    order = [start]
    nodes = []
    i = 0
    while i < len(order):
        members = order[i]
        i += 1
        grouped = {}
        for s in sorted(members):
            for e, t in lts.out[s]:
                if e.visible:
                    grouped.setdefault(e, set()).add(t)
        transitions = {}
        for e in sorted(grouped, key=Event.sort_key):
            target = lts.tau_closure(grouped[e])
            if target not in index:
                if len(order) >= max_nodes:
                    raise StateSpaceError('normalization', max_nodes)
                index[target] = len(order)
                order.append(target)
            transitions[e] = index[target]
        acceptances = minimal_sets(lts.initials(s) for s in members if lts.is_stable(s))
        nodes.append(NormNode(members, bool(members & div), acceptances, transitions))
    return NormalizedLts(tuple(nodes), 0, lts.alphabet)


# -------------------------------------------------------------------- DOT

def _dot_escape(s) -> str:
    return str(s).replace('\\', '\\\\').replace('"', '\\"')


def lts_to_dot(lts: Lts, name='lts') -> str:
    div = divergent_states(lts)
    lines = [f'digraph "{_dot_escape(name)}" {{', '  rankdir=LR;',
             '  __start [shape=point];', f'  __start -> s{lts.start};']
    for i, st in enumerate(lts.states):
        shape = 'doublecircle' if i in div else 'circle'
        extra = ', style=filled, fillcolor=lightgrey' if i in lts.blocked else ''
        lines.append(f'  s{i} [shape={shape}, label="{i}", tooltip="{_dot_escape(st)}"{extra}];')
    for s, e, t in lts.edges:
        style = '' if e.visible else ', style=dashed'
        lines.append(f'  s{s} -> s{t} [label="{_dot_escape(e)}"{style}];')
    lines.append('}')
    return '\n'.join(lines) + '\n'


def normalized_to_dot(norm: NormalizedLts, name='normalized') -> str:
    lines = [f'digraph "{_dot_escape(name)}" {{', '  rankdir=LR;',
             '  __start [shape=point];', f'  __start -> n{norm.start};']
    for i, node in enumerate(norm.nodes):
        shape = 'doublecircle' if node.divergent else 'circle'
        acc = ' | '.join('{' + ','.join(str(e) for e in sorted(a)) + '}'
                         for a in sorted(node.acceptances, key=lambda a: sorted(a)))
        lines.append(f'  n{i} [shape={shape}, label="{i}", tooltip="{_dot_escape(acc)}"];')
        for e, t in node.transitions.items():
            lines.append(f'  n{i} -> n{t} [label="{_dot_escape(e)}"];')
    lines.append('}')
    return '\n'.join(lines) + '\n'
