"""Contract specification language and explicit-state verifier for
service contracts with public and private services."""

from .checkers import (Counterexample, Verdict, check_consistency,
                       check_deadlock, check_livelock, check_refinement)
from .lang import format_contract, load_contract, parse_contract, typecheck
from .lts import build_lts, hidden_lts, hide, normalize

__all__ = ['Counterexample', 'Verdict', 'build_lts', 'check_consistency',
           'check_deadlock', 'check_livelock', 'check_refinement',
           'format_contract', 'hidden_lts', 'hide', 'load_contract',
           'normalize', 'parse_contract', 'typecheck']
