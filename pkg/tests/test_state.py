from hypothesis import given, settings, strategies as st

from ctrcheck.lang import ast
from ctrcheck.lang.parser import parse_contract
from ctrcheck.state import (Blocked, Calls, Returned, Valuation,
                            enumerate_outcomes, evaluate)

from conftest import MINIMAL, corpus_contract

BAL = ast.IntDomain(0, 30)


def _expr(text):
    """Parse a boolean/int expression in the context of the Ctr1 resources."""
    src = (f"contract E {{ resources {{ LoginState: bool = false; Balance: int[0..30] = 0; }} "
           f"service +m(amt: int[0..10]) -> () {{ guard true; pre true; "
           f"effect {{ Balance = {text}; return; }} }} protocol {{ (?m !m)* }} }}")
    return parse_contract(src).service('m').behavior[0].expr


def test_guard_false_initially():
    ctr1 = corpus_contract('Ctr1')
    s0 = Valuation.initial(ctr1)
    assert evaluate(_expr('LoginState == true'), s0) is False


def test_precondition_at_ten():
    s0 = Valuation.initial(corpus_contract('Ctr1'))
    assert evaluate(_expr('amt >= 10'), s0, {'amt': 10}) is True
    assert evaluate(_expr('amt >= 10'), s0, {'amt': 5}) is False


def test_saturation_at_upper_bound():
    s = Valuation.initial(corpus_contract('Ctr1')).set('Balance', 28)
    assert evaluate(_expr('Balance + amt'), s, {'amt': 10}, BAL) == 30
    assert s.set('Balance', 45)['Balance'] == 30
    assert s.set('Balance', -3)['Balance'] == 0


def test_plain_return(minimal):
    s0 = Valuation.initial(minimal)
    assert enumerate_outcomes(minimal.service('m').behavior, s0) == \
        [Returned(s0, (('r', True),))]


def test_blocking_deposit_outcomes():
    c = corpus_contract('Ctr1_pre')
    s0 = Valuation.initial(c).set('LoginState', True)
    outs = enumerate_outcomes(c.service('deposit').behavior, s0, {'amt': 10})
    assert set(outs) == {Returned(s0.set('Balance', 10), (('r', True),)), Blocked(s0)}


def test_retrying_deposit_calls_private():
    c = corpus_contract('Ctr2')
    s0 = Valuation.initial(c).set('LoginState', True)
    outs = enumerate_outcomes(c.service('deposit').behavior, s0, {'amt': 10})
    calls = [o for o in outs if isinstance(o, Calls)]
    assert [o.service for o in calls] == ['repeatInvokingPayment']
    assert calls[0].valuation['pendingAmt'] == 10
    assert calls[0].continuation  # the remainder after the call


def test_outcomes_are_deterministic_and_unique():
    c = corpus_contract('Ctr3')
    s0 = Valuation.initial(c).set('LoginState', True)
    a = enumerate_outcomes(c.service('deposit').behavior, s0, {'amt': 10})
    b = enumerate_outcomes(c.service('deposit').behavior, s0, {'amt': 10})
    assert a == b and len(a) == len(set(a))


# nested choices: outcome count never exceeds the product of branch counts
_assign = st.builds(lambda v: ast.Assign('x', ast.Lit(v)), st.integers(0, 5))
_leaf = st.one_of(_assign, st.just(ast.Block()),
                  st.builds(lambda v: ast.Return((('r', ast.Lit(v)),)), st.integers(0, 5)))
_stmt = st.recursive(
    _leaf,
    lambda inner: st.builds(
        lambda bs: ast.Choice(tuple(tuple(b) for b in bs)),
        st.lists(st.lists(inner, min_size=1, max_size=3), min_size=1, max_size=3)),
    max_leaves=8)


def _bound(stmts):
    n = 1
    for s in stmts:
        if isinstance(s, ast.Choice):
            n *= sum(_bound(b) for b in s.branches)
    return n


@settings(deadline=None)
@given(st.lists(_stmt, min_size=1, max_size=4))
def test_outcome_count_bounded_by_branching(stmts):
    dom = ast.IntDomain(0, 5)
    s0 = Valuation(('x',), (0,), (dom,))
    outs = enumerate_outcomes(tuple(stmts), s0, outputs={'r': dom})
    assert 1 <= len(outs) <= _bound(stmts)
    for o in outs:
        assert isinstance(o, (Returned, Blocked))
        assert 0 <= o.valuation['x'] <= 5
