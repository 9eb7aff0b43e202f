"""Semantic objects of a contract: protocol automata, the weakest protocol,
and brute-force enumeration of failures and divergences.

The enumerators walk traces one by one and never share work between
traces; they exist as oracles for the product-based checkers and for
printing, and are only practical for short bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import StateSpaceError
from .lang import ast
from .lts import Event, Lts, divergent_states

MAX_ENUMERATED = 10 ** 6

Symbol = tuple  # ('?', name) | ('!', name)


def parse_symbol(s) -> Symbol:
    if isinstance(s, tuple):
        return s
    return (s[0], s[1:])


def format_symbol(sym: Symbol) -> str:
    return sym[0] + sym[1]


# ------------------------------------------------------------ automata

@dataclass(frozen=True)
class ProtocolNfa:
    """Epsilon-free automaton over protocol symbols; every state accepts,
    so the language is prefix-closed."""
    n_states: int
    start: int
    delta: tuple  # per state: dict symbol -> frozenset of targets

    def step(self, states: Iterable[int], sym) -> frozenset:
        sym = parse_symbol(sym)
        return frozenset(t for q in states for t in self.delta[q].get(sym, ()))

    def accepts(self, word) -> bool:
        current = frozenset({self.start})
        for sym in word:
            current = self.step(current, sym)
            if not current:
                return False
        return True

    @property
    def symbols(self) -> frozenset:
        return frozenset(s for d in self.delta for s in d)

    @property
    def deterministic(self) -> bool:
        return all(len(ts) == 1 for d in self.delta for ts in d.values())

    def determinize(self) -> 'ProtocolNfa':
        start = frozenset({self.start})
        index = {start: 0}
        order = [start]
        delta = []
        i = 0
        while i < len(order):
            cur = order[i]
            i += 1
            row = {}
            syms = sorted({s for q in cur for s in self.delta[q]})
            for sym in syms:
                nxt = self.step(cur, sym)
                if nxt not in index:
                    index[nxt] = len(order)
                    order.append(nxt)
                row[sym] = frozenset({index[nxt]})
            delta.append(row)
        return ProtocolNfa(len(order), 0, tuple(delta))

    def minimize(self) -> 'ProtocolNfa':
        """Minimal DFA (Moore partition refinement; all states accept)."""
        dfa = self if self.deterministic else self.determinize()
        syms = sorted(dfa.symbols)
        block = [0] * dfa.n_states
        while True:
            sigs = {}
            new = []
            for q in range(dfa.n_states):
                sig = (block[q],) + tuple(
                    block[next(iter(dfa.delta[q][s]))] if s in dfa.delta[q] else -1
                    for s in syms)
                new.append(sigs.setdefault(sig, len(sigs)))
            if len(sigs) == len(set(block)):
                break
            block = new
        # renumber blocks in breadth-first order from the start state
        order, seen = [block[dfa.start]], {block[dfa.start]}
        rep = {}
        for q in range(dfa.n_states):
            rep.setdefault(block[q], q)
        i = 0
        while i < len(order):
            q = rep[order[i]]
            i += 1
            for s in syms:
                if s in dfa.delta[q]:
                    b = block[next(iter(dfa.delta[q][s]))]
                    if b not in seen:
                        seen.add(b)
                        order.append(b)
        num = {b: k for k, b in enumerate(order)}
        delta = []
        for b in order:
            q = rep[b]
            delta.append({s: frozenset({num[block[next(iter(t))]]})
                          for s, t in sorted(dfa.delta[q].items())})
        return ProtocolNfa(len(order), 0, tuple(delta))

    def to_regex(self) -> str:
        return _regex_of(self.minimize())


def compile_protocol(pattern) -> ProtocolNfa:
    """Thompson construction, epsilon elimination, then prefix closure
    (every reachable state accepts)."""
    eps = []
    sym_edges = []

    def new():
        eps.append([])
        sym_edges.append([])
        return len(eps) - 1

    def build(p):
        s, e = new(), new()
        if isinstance(p, ast.Sym):
            sym_edges[s].append(((p.direction, p.name), e))
        elif isinstance(p, ast.Seq):
            cur = s
            for item in p.items:
                a, b = build(item)
                eps[cur].append(a)
                cur = b
            eps[cur].append(e)
        elif isinstance(p, ast.Alt):
            for opt in p.options:
                a, b = build(opt)
                eps[s].append(a)
                eps[b].append(e)
        elif isinstance(p, ast.Repeat):
            a, b = build(p.body)
            eps[s].append(a)
            eps[b].append(e)
            eps[s].append(e)
            if p.op == '*':
                eps[b].append(a)
        else:
            raise TypeError(f"not a protocol pattern: {p!r}")
        return s, e

    start, _ = build(pattern)

    def closure(q):
        seen, stack = {q}, [q]
        while stack:
            for t in eps[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    closures = [closure(q) for q in range(len(eps))]
    # keep only states entered by a symbol (plus the start)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        row = {}
        for p in sorted(closures[q]):
            for sym, t in sym_edges[p]:
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
                row.setdefault(sym, set()).add(index[t])
        delta.append({s: frozenset(ts) for s, ts in sorted(row.items())})
    return ProtocolNfa(len(order), 0, tuple(delta))


def weakest_protocol(lts: Lts) -> ProtocolNfa:
    """Deterministic automaton of the LTS's traces projected to requests."""
    def closure(states):
        seen = set(states)
        stack = list(seen)
        while stack:
            for e, t in lts.out[stack.pop()]:
                if e.kind != 'req' and t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    start = closure({lts.start})
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        grouped = {}
        for s in cur:
            for e, t in lts.out[s]:
                if e.kind == 'req':
                    grouped.setdefault(('?', e.service), set()).add(t)
        row = {}
        for sym in sorted(grouped):
            nxt = closure(grouped[sym])
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row[sym] = frozenset({index[nxt]})
        delta.append(row)
    return ProtocolNfa(len(order), 0, tuple(delta))


# -- regular-expression summaries via state elimination

def _alt(a, b):
    if a is None:
        return b
    if b is None:
        return a
    items = set()
    for r in (a, b):
        items.update(r[1] if r[0] == 'alt' else (r,))
    return ('alt', frozenset(items)) if len(items) > 1 else next(iter(items))


def _cat(*rs):
    if any(r is None for r in rs):
        return None
    items = []
    for r in rs:
        if r[0] == 'cat':
            items.extend(r[1])
        elif r[0] != 'eps':
            items.append(r)
    if not items:
        return ('eps',)
    return ('cat', tuple(items)) if len(items) > 1 else items[0]


def _star(r):
    if r is None or r[0] == 'eps':
        return ('eps',)
    if r[0] == 'star':
        return r
    if r[0] == 'alt' and ('eps',) in r[1]:
        rest = frozenset(x for x in r[1] if x != ('eps',))
        r = ('alt', rest) if len(rest) > 1 else next(iter(rest))
    return ('star', r)


def _render(r, ctx=0) -> str:
    kind = r[0]
    if kind == 'eps':
        return '<>'
    if kind == 'sym':
        return format_symbol(r[1])
    if kind == 'star':
        return _render(r[1], 2) + '*'
    if kind == 'cat':
        s = ' '.join(_render(x, 1) for x in r[1])
        return f'({s})' if ctx >= 2 else s
    opts = [x for x in r[1] if x != ('eps',)]
    body = ' | '.join(sorted(_render(x, 0) for x in opts))
    if ('eps',) in r[1]:
        inner = _render(opts[0], 2) if len(opts) == 1 else f'({body})'
        return inner + '?'
    return f'({body})' if ctx >= 1 else body


def _regex_of(dfa: ProtocolNfa) -> str:
    n = dfa.n_states
    S, F = n, n + 1
    R = {}

    def add(i, j, r):
        R[i, j] = _alt(R.get((i, j)), r)

    add(S, dfa.start, ('eps',))
    for q in range(n):
        add(q, F, ('eps',))
        for sym, ts in dfa.delta[q].items():
            for t in ts:
                add(q, t, ('sym', sym))
    for k in reversed(range(n)):
        loop = _star(R.get((k, k)))
        ins = [(i, r) for (i, j), r in R.items() if j == k and i != k]
        outs = [(j, r) for (i, j), r in R.items() if i == k and j != k]
        for i, a in ins:
            for j, b in outs:
                add(i, j, _cat(a, loop, b))
        R = {key: r for key, r in R.items() if k not in key}
    result = R.get((S, F))
    return _render(result) if result is not None else '<>'


# ------------------------------------------------------ failures, divergences

@dataclass(frozen=True)
class FailurePair:
    trace: tuple
    refusal: frozenset

    def to_json(self) -> dict:
        return {'trace': [e.to_json() for e in self.trace],
                'refusal': [e.to_json() for e in sorted(self.refusal)]}


def _walk(lts: Lts, max_len: int):
    """Yield (trace, states after trace, diverged) for every visible trace
    of length <= max_len, shortest first, in canonical event order."""
    div = divergent_states(lts)
    frontier = [((), lts.tau_closure({lts.start}), False)]
    produced = 0
    for depth in range(max_len + 1):
        nxt = []
        for trace, states, diverged in frontier:
            diverged = diverged or bool(states & div)
            produced += 1
            if produced > MAX_ENUMERATED:
                raise StateSpaceError('trace enumeration', MAX_ENUMERATED)
            yield trace, states, diverged
            if depth == max_len:
                continue
            grouped = {}
            for s in sorted(states):
                for e, t in lts.out[s]:
                    if e.visible:
                        grouped.setdefault(e, set()).add(t)
            for e in sorted(grouped, key=Event.sort_key):
                nxt.append((trace + (e,), lts.tau_closure(grouped[e]), diverged))
        frontier = nxt


def enumerate_failures(lts: Lts, max_len: int) -> frozenset:
    """All failures (trace, maximal refusal) with |trace| <= max_len.

    After a divergent trace the process may refuse everything, so such
    traces contribute the whole alphabet as their only maximal refusal.
    """
    pairs = set()
    for trace, states, diverged in _walk(lts, max_len):
        if diverged:
            refusals = [lts.alphabet]
        else:
            refusals = _maximal(lts.alphabet - lts.initials(s)
                                for s in states if lts.is_stable(s))
        for x in refusals:
            pairs.add(FailurePair(trace, frozenset(x)))
        if len(pairs) > MAX_ENUMERATED:
            raise StateSpaceError('failure enumeration', MAX_ENUMERATED)
    return frozenset(pairs)


def enumerate_divergences(lts: Lts, max_len: int) -> frozenset:
    """Traces (|trace| <= max_len) after which the process may diverge,
    closed under extension by further traces of the LTS."""
    return frozenset(t for t, _, diverged in _walk(lts, max_len) if diverged)


def _maximal(sets):
    sets = set(map(frozenset, sets))
    return [a for a in sets if not any(a < b for b in sets)]


def traces_of(failures) -> frozenset:
    return frozenset(p.trace for p in failures)


def refusals_by_trace(failures) -> dict:
    out = {}
    for p in failures:
        out.setdefault(p.trace, []).append(p.refusal)
    return out


def is_failure(failures, trace, refusal) -> bool:
    """Membership in the downward closure of the stored maximal refusals."""
    trace, refusal = tuple(trace), frozenset(refusal)
    return any(p.trace == trace and refusal <= p.refusal for p in failures)


def is_divergence(divergences, trace) -> bool:
    """Membership in the extension closure of a divergence set."""
    trace = tuple(trace)
    return any(trace[:i] in divergences for i in range(len(trace) + 1))


def bounded_refinement(spec: Lts, impl: Lts, model: str, max_len: int) -> bool:
    """Refinement decided by direct set containment on traces up to
    `max_len`; spec divergence admits any behavior in every model."""
    spec_f = enumerate_failures(spec, max_len)
    spec_d = enumerate_divergences(spec, max_len)
    impl_f = enumerate_failures(impl, max_len)
    spec_ref = refusals_by_trace(spec_f)

    def chaotic(t):
        return is_divergence(spec_d, t)

    if model == 'T':
        return all(chaotic(t) or t in spec_ref for t in traces_of(impl_f))
    ok = all(chaotic(p.trace) or any(p.refusal <= y for y in spec_ref.get(p.trace, ()))
             for p in impl_f)
    if model == 'FD':
        ok = ok and all(chaotic(t) for t in enumerate_divergences(impl, max_len))
    return ok


# ------------------------------------------------------------------- json

def failures_to_json(failures) -> list:
    return [p.to_json() for p in sorted(
        failures, key=lambda p: (len(p.trace), [e.sort_key() for e in p.trace],
                                 sorted(e.sort_key() for e in p.refusal)))]


def divergences_to_json(divergences) -> list:
    return [{'trace': [e.to_json() for e in t], 'divergent': True}
            for t in sorted(divergences, key=lambda t: (len(t), [e.sort_key() for e in t]))]
