import pytest
from hypothesis import given, settings, strategies as st

from ctrcheck.lang import ast
from ctrcheck.lang.parser import parse_contract
from ctrcheck.lts import hidden_lts
from ctrcheck.semantics import (compile_protocol, enumerate_divergences,
                                enumerate_failures, failures_to_json,
                                is_divergence, is_failure, refusals_by_trace,
                                traces_of, weakest_protocol)

from conftest import MINIMAL, corpus_contract, corpus_lts, random_lts


def _pattern(text):
    src = MINIMAL.replace('(?m !m)*', text).replace(
        'protocol', 'service +a() -> () { guard true; pre true; effect { return; } } protocol')
    return parse_contract(src).protocol


def _words(*ws):
    return [w.split() for w in ws]


def test_optional_pair():
    nfa = compile_protocol(_pattern('(?a !a)?'))
    for w in _words('', '?a', '?a !a'):
        assert nfa.accepts(w)
    for w in _words('!a', '?a !a ?a', '?a ?a'):
        assert not nfa.accepts(w)


def test_repeated_pair_is_prefix_closed():
    nfa = compile_protocol(_pattern('(?a !a)*'))
    word = ['?a', '!a'] * 4
    for i in range(len(word) + 1):
        assert nfa.accepts(word[:i])
    assert not nfa.accepts(['?a', '?a'])


def test_manage_account_protocol():
    nfa = compile_protocol(corpus_contract('Ctr1').protocol)
    assert nfa.accepts(['?signUp', '!signUp', '?logIn', '!logIn', '?checkBalance',
                        '!checkBalance', '?deposit', '!deposit', '?logOut', '!logOut'])
    assert not nfa.accepts(['?deposit'])
    assert not nfa.accepts(['?logIn', '!logIn', '?deposit'])


def test_determinize_and_minimize_keep_language():
    nfa = compile_protocol(corpus_contract('Ctr1').protocol)
    dfa = nfa.determinize()
    mini = dfa.minimize()
    assert dfa.deterministic and mini.deterministic
    syms = sorted(nfa.symbols)
    frontier = [()]
    for _ in range(6):
        nxt = []
        for w in frontier:
            for s in syms:
                v = w + (s,)
                assert nfa.accepts(v) == dfa.accepts(v) == mini.accepts(v)
                if nfa.accepts(v):
                    nxt.append(v)
        frontier = nxt


def test_weakest_protocol_single_service(minimal):
    w = weakest_protocol(hidden_lts(minimal)).minimize()
    assert w.n_states == 1
    assert w.delta == ({('?', 'm'): frozenset({0})},)
    assert w.to_regex() == '?m*'


def test_weakest_protocol_ctr1_skips_check_balance():
    w = weakest_protocol(corpus_lts('Ctr1'))
    assert w.accepts(['?logIn', '?deposit'])
    assert not compile_protocol(corpus_contract('Ctr1').protocol).accepts(
        ['?logIn', '!logIn', '?deposit'])


def test_weakest_protocol_all_guards_false():
    c = parse_contract(MINIMAL.replace('guard true', 'guard false'))
    w = weakest_protocol(hidden_lts(c))
    assert w.accepts([])
    assert not w.accepts(['?m'])
    assert w.to_regex() == '<>'


@pytest.mark.parametrize('name', ['Ctr1', 'Ctr2', 'Ctr3'])
def test_weakest_protocol_covers_request_projections(name):
    lts = corpus_lts(name)
    w = weakest_protocol(lts)
    for t in traces_of(enumerate_failures(lts, 6)):
        assert w.accepts([('?', e.service) for e in t if e.kind == 'req'])


def _find(failures, labels):
    return [p for p in failures if [str(e) for e in p.trace] == labels]


def test_ctr1_initial_refusal():
    lts = corpus_lts('Ctr1')
    (p,) = enumerate_failures(lts, 0)
    assert p.trace == ()
    reqs = {e.service for e in p.refusal if e.kind == 'req'}
    assert reqs == {'checkBalance', 'deposit', 'logOut'}
    assert all(e in p.refusal for e in lts.alphabet if e.kind == 'resp')


def test_ctr1_refuses_second_login():
    fails = enumerate_failures(corpus_lts('Ctr1'), 2)
    (p,) = _find(fails, ['?logIn(valid)', '!logIn(true)'])
    assert {e.service for e in p.refusal if e.kind == 'req'} >= {'logIn'}


def test_ctr1_deposit_can_refuse_everything():
    lts = corpus_lts('Ctr1')
    fails = enumerate_failures(lts, 3)
    refusals = [p.refusal for p in _find(fails, ['?logIn(valid)', '!logIn(true)', '?deposit(10)'])]
    assert lts.alphabet in refusals


def test_divergences():
    assert enumerate_divergences(corpus_lts('Ctr1'), 6) == frozenset()
    assert enumerate_divergences(corpus_lts('Ctr3'), 6) == frozenset()
    divs = {' '.join(map(str, t)) for t in enumerate_divergences(corpus_lts('Ctr2'), 5)}
    assert '?logIn(valid) !logIn(true) ?checkBalance() !checkBalance(0) ?deposit(10)' in divs


@settings(deadline=None)
@given(random_lts(), st.integers(1, 4))
def test_divergences_closed_under_extension(lts, k):
    divs = enumerate_divergences(lts, k)
    traces = traces_of(enumerate_failures(lts, k))
    for t in traces:
        if is_divergence(divs, t[:-1]) and t:
            assert t in divs


@settings(deadline=None)
@given(random_lts(), st.integers(0, 3))
def test_failure_traces_prefix_closed_and_downward_closed(lts, k):
    fails = enumerate_failures(lts, k)
    traces = traces_of(fails)
    for t in traces:
        assert t[:-1] in traces or t == ()
    for p in fails:
        assert is_failure(fails, p.trace, frozenset())
        for e in p.refusal:
            assert is_failure(fails, p.trace, p.refusal - {e})
    # stored refusals are maximal (antichains)
    for xs in refusals_by_trace(fails).values():
        assert not any(a < b for a in xs for b in xs)


def test_failures_json_is_canonical():
    fails = enumerate_failures(corpus_lts('Ctr1'), 3)
    assert failures_to_json(fails) == failures_to_json(set(fails))
