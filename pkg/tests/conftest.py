import functools
import os

import pytest
from hypothesis import settings

from ctrcheck.casestudy import CORPUS_DIR
from ctrcheck.lang import load_contract, parse_contract
from ctrcheck.lts import hidden_lts

settings.register_profile('standard', max_examples=200, deadline=None)
settings.register_profile('thorough', max_examples=3000, deadline=None)
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'standard'))

CORPUS = ('Ctr1', 'Ctr2', 'Ctr3')
ALL_CORPUS = CORPUS + ('Ctr1_pre',)

MINIMAL = ("contract C { resources { b: bool = false; } "
           "service +m() -> (r: bool) { guard true; pre true; effect { return r = true; } } "
           "protocol { (?m !m)* } }")


@functools.lru_cache(maxsize=None)
def corpus_contract(name):
    return load_contract(CORPUS_DIR / f'{name}.ctr')


@functools.lru_cache(maxsize=None)
def corpus_lts(name):
    return hidden_lts(corpus_contract(name))


def corpus_source(name):
    return (CORPUS_DIR / f'{name}.ctr').read_text()


@pytest.fixture
def minimal():
    return parse_contract(MINIMAL)


# ------------------------------------------------------------ random LTSs

from hypothesis import strategies as st  # noqa: E402

from ctrcheck.lts import Event, Lts  # noqa: E402

EV_A, EV_B, EV_C = (Event('req', n) for n in 'abc')
TAU = Event.tau('p')


def make_lts(n, edges, start=0):
    edges = tuple(sorted(set(edges), key=lambda x: (x[0], x[1].sort_key(), x[2])))
    alphabet = frozenset(e for _, e, _ in edges if e.visible) | {EV_A, EV_B, EV_C}
    return Lts(tuple(range(n)), start, alphabet, edges)


@st.composite
def random_lts(draw, max_states=6, events=(EV_A, EV_B, EV_C, TAU)):
    n = draw(st.integers(1, max_states))
    edge = st.tuples(st.integers(0, n - 1), st.sampled_from(events), st.integers(0, n - 1))
    return make_lts(n, draw(st.lists(edge, max_size=3 * n)))
