"""State-space sizes and check timings for each corpus contract."""

import argparse
import time
from dataclasses import dataclass

from ctrcheck.casestudy import CORPUS_DIR
from ctrcheck.checkers import check_consistency, check_deadlock, check_livelock
from ctrcheck.lang import load_contract
from ctrcheck.lts import build_lts, divergent_states, hide, normalize


@dataclass
class StatsConfig:
    contracts: tuple = ('Ctr1', 'Ctr2', 'Ctr3', 'Ctr1_pre')
    repeats: int = 5


def measure(name: str, repeats: int) -> dict:
    c = load_contract(CORPUS_DIR / f'{name}.ctr')
    t0 = time.perf_counter()
    for _ in range(repeats):
        raw = build_lts(c)
    build_s = (time.perf_counter() - t0) / repeats
    lts = hide(raw, c.private_names)
    norm = normalize(lts)
    t0 = time.perf_counter()
    for _ in range(repeats):
        check_deadlock(c), check_livelock(c), check_consistency(c)
    check_s = (time.perf_counter() - t0) / repeats
    return {'contract': name, 'states': len(lts), 'transitions': len(lts.edges),
            'tau': sum(not e.visible for _, e, _ in lts.edges),
            'alphabet': len(lts.alphabet), 'divergent': len(divergent_states(lts)),
            'normalized': len(norm), 'build_ms': build_s * 1e3, 'checks_ms': check_s * 1e3}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--repeats', type=int, default=StatsConfig.repeats)
    cfg = StatsConfig(repeats=ap.parse_args().repeats)
    cols = ('contract', 'states', 'transitions', 'tau', 'alphabet', 'divergent',
            'normalized', 'build_ms', 'checks_ms')
    print(' '.join(f'{c:>11}' for c in cols))
    for name in cfg.contracts:
        row = measure(name, cfg.repeats)
        print(' '.join(f'{row[c]:>11.2f}' if isinstance(row[c], float) else f'{row[c]:>11}'
                       for c in cols))


if __name__ == '__main__':
    main()
