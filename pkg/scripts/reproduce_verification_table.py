"""Print the case-study verification table: deadlock, livelock and
consistency for each contract, plus refinement between every pair.

    python scripts/reproduce_verification_table.py [--models T F FD] [--json]
"""

import argparse
import itertools
import json
from dataclasses import dataclass, field

from ctrcheck.casestudy import CORPUS_DIR
from ctrcheck.checkers import (check_consistency, check_deadlock,
                               check_livelock, check_refinement)
from ctrcheck.lang import load_contract


@dataclass
class TableConfig:
    contracts: tuple = ('Ctr1', 'Ctr2', 'Ctr3')
    models: tuple = ('FD',)
    as_json: bool = False
    extra: tuple = field(default=())


def build_table(cfg: TableConfig) -> dict:
    names = tuple(cfg.contracts) + tuple(cfg.extra)
    contracts = {n: load_contract(CORPUS_DIR / f'{n}.ctr') for n in names}
    props = {}
    for n, c in contracts.items():
        verdicts = (check_deadlock(c), check_livelock(c), check_consistency(c))
        props[n] = {v.property: {'holds': v.holds,
                                 'witness': v.counterexample.describe() if v.counterexample else None}
                    for v in verdicts}
    refinements = {}
    for m in cfg.models:
        for a, b in itertools.product(names, repeat=2):
            v = check_refinement(contracts[a], contracts[b], m)
            refinements[f'{a} <={m} {b}'] = {
                'holds': v.holds,
                'kind': v.counterexample.kind if v.counterexample else None}
    return {'properties': props, 'refinements': refinements}


def render(table: dict) -> str:
    lines = [f"{'contract':<10}{'deadlock-free':<15}{'livelock-free':<15}consistent"]
    for n, row in table['properties'].items():
        cells = [str(row[p]['holds']).lower() for p in ('deadlock-free', 'livelock-free', 'consistent')]
        lines.append(f"{n:<10}{cells[0]:<15}{cells[1]:<15}{cells[2]}")
    lines.append('')
    for n, row in table['properties'].items():
        for p, v in row.items():
            if v['witness']:
                lines.append(f"{n} {p}: {v['witness']}")
    lines.append('')
    for k, v in table['refinements'].items():
        kind = f"  ({v['kind']})" if v['kind'] else ''
        lines.append(f"{k:<24}{str(v['holds']).lower()}{kind}")
    return '\n'.join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument('--models', nargs='+', default=['FD'], choices=['T', 'F', 'FD'])
    ap.add_argument('--with-pre', action='store_true', help='include Ctr1_pre')
    ap.add_argument('--json', action='store_true')
    ns = ap.parse_args()
    cfg = TableConfig(models=tuple(ns.models), as_json=ns.json,
                      extra=('Ctr1_pre',) if ns.with_pre else ())
    table = build_table(cfg)
    print(json.dumps(table, indent=2) if cfg.as_json else render(table))


if __name__ == '__main__':
    main()
