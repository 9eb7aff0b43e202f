"""The ManageAccount case study: three successive contracts for the
online shopping system's account interface, with golden verdicts.

* Ctr1: deposit may wait forever for the payment provider (deadlock).
* Ctr2: the wait is replaced by an unbounded private retry (livelock).
* Ctr3: the retry is bounded by MaxRepeatedTimes (consistent, refines Ctr1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

CORPUS_DIR = Path(__file__).parent / 'corpus'

MANIFEST = ('Ctr1', 'Ctr2', 'Ctr3')

PROPERTIES = ('deadlock-free', 'livelock-free', 'consistent')

_REFINED_BY = re.compile(r'^refined-by:(T|F|FD):([A-Za-z_][A-Za-z0-9_]*)$')


@dataclass(frozen=True)
class Expectation:
    key: str               # a property name or refined-by:<model>:<impl>
    holds: bool
    trace_prefix: str = ''  # rendered counterexample must start with this

    @property
    def refinement(self):
        """(model, implementation name) for refined-by keys, else None."""
        m = _REFINED_BY.match(self.key)
        return (m.group(1), m.group(2)) if m else None


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    contract_path: Path
    expect_path: Path
    provenance: str
    expectations: tuple

    def expected(self, key):
        for e in self.expectations:
            if e.key == key:
                return e.holds
        raise KeyError(key)


def parse_expect(text: str) -> tuple:
    """Parse a `.expect` golden file.

    One ``property=true|false`` per line; a following ``trace=...`` line
    constrains the counterexample of that property. ``//`` starts a comment.
    """
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('//', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key, value = key.strip(), value.strip()
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value")
        if key == 'trace':
            if not out:
                raise ValueError(f"line {lineno}: trace= before any property")
            prev = out.pop()
            out.append(Expectation(prev.key, prev.holds, value))
            continue
        if key not in PROPERTIES and not _REFINED_BY.match(key):
            raise ValueError(f"line {lineno}: unknown property {key!r}")
        if value not in ('true', 'false'):
            raise ValueError(f"line {lineno}: value must be true or false")
        out.append(Expectation(key, value == 'true'))
    return tuple(out)


def provenance_of(source: str) -> str:
    lines = []
    for line in source.splitlines():
        if not line.startswith('//'):
            break
        lines.append(line[2:].strip())
    return '\n'.join(lines)


def load_entry(contract_path) -> CorpusEntry:
    path = Path(contract_path)
    expect = path.with_suffix('.expect')
    return CorpusEntry(
        name=path.stem,
        contract_path=path,
        expect_path=expect,
        provenance=provenance_of(path.read_text(encoding='utf-8')),
        expectations=parse_expect(expect.read_text(encoding='utf-8')),
    )


def corpus_manifest() -> list[CorpusEntry]:
    """The three case-study contracts with their expected verdicts."""
    return [load_entry(CORPUS_DIR / f'{name}.ctr') for name in MANIFEST]


def corpus_path(name: str) -> Path:
    return CORPUS_DIR / f'{name}.ctr'
