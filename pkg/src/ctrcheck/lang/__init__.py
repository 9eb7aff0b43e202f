"""The `.ctr` contract language: syntax tree, parser, typechecker, printer."""

from pathlib import Path

from ..errors import ContractTypeError, ParseError
from .ast import Contract
from .parser import parse_contract
from .printer import format_contract
from .typecheck import Diagnostic, typecheck

__all__ = ['Contract', 'Diagnostic', 'ParseError', 'format_contract',
           'load_contract', 'parse_contract', 'typecheck']


def load_contract(path) -> Contract:
    """Read, parse and typecheck a contract file."""
    text = Path(path).read_text(encoding='utf-8')
    contract = parse_contract(text)
    diags = typecheck(contract)
    if diags:
        raise ContractTypeError(diags)
    return contract
