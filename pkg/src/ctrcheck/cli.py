"""Command-line front end: ``ctrcheck check|refine|protocol|export|corpus``."""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import casestudy
from .checkers import (MODELS, check_consistency, check_deadlock,
                       check_livelock, check_refinement)
from .errors import CtrError, StateSpaceError
from .lang import load_contract
from .lang.printer import format_pattern
from .lts import (DEFAULT_MAX_STATES, format_trace, hidden_lts, lts_to_dot,
                  normalize, normalized_to_dot)
from .semantics import weakest_protocol

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

COMMANDS = ('check', 'refine', 'protocol', 'export', 'corpus')

# property name in verdicts -> short label used in text reports
_LABELS = {'deadlock-free': 'deadlock', 'livelock-free': 'livelock',
           'consistent': 'consistency'}


@dataclass(frozen=True)
class RunConfig:
    command: str
    paths: tuple = ()
    model: str = 'FD'
    max_states: int = DEFAULT_MAX_STATES
    fmt: str = 'text'
    export_path: str | None = None
    stats: bool = True
    weakest: bool = False
    normalized: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.max_states <= 0:
            raise ValueError("--max-states must be positive")
        if self.fmt not in ('text', 'json'):
            raise ValueError(f"unknown format {self.fmt!r}")


def _positive(text):
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', dest='fmt', choices=('text', 'json'), default='text')
    common.add_argument('--json', dest='fmt', action='store_const', const='json',
                        help='shorthand for --format json')
    common.add_argument('--no-stats', dest='stats', action='store_false',
                        help='omit timings and counters (stable output)')
    common.add_argument('--max-states', type=_positive, default=DEFAULT_MAX_STATES)

    p = argparse.ArgumentParser(prog='ctrcheck',
                                description='Verify service contracts.')
    sub = p.add_subparsers(dest='command', required=True)

    c = sub.add_parser('check', parents=[common],
                       help='deadlock, livelock and consistency')
    c.add_argument('paths', nargs=1, metavar='file.ctr')

    r = sub.add_parser('refine', parents=[common], help='spec ⊑ impl')
    r.add_argument('spec', metavar='spec.ctr')
    r.add_argument('impl', metavar='impl.ctr')
    r.add_argument('--model', choices=sorted(MODELS), default='FD')

    pr = sub.add_parser('protocol', parents=[common],
                        help='declared and weakest protocols')
    pr.add_argument('paths', nargs=1, metavar='file.ctr')
    pr.add_argument('--weakest', action='store_true')

    e = sub.add_parser('export', parents=[common], help='write the LTS as DOT')
    e.add_argument('paths', nargs=1, metavar='file.ctr')
    e.add_argument('--dot', dest='export_path', required=True, metavar='out',
                   help="output file, or '-' for stdout")
    e.add_argument('--normalized', action='store_true')

    co = sub.add_parser('corpus', parents=[common],
                        help='check every .ctr with a sibling .expect')
    co.add_argument('paths', nargs='?', metavar='dir')
    return p


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    paths = [ns.spec, ns.impl] if ns.command == 'refine' else ns.paths
    if ns.command == 'corpus':
        paths = [paths or str(casestudy.CORPUS_DIR)]
    return RunConfig(
        command=ns.command, paths=tuple(paths), model=getattr(ns, 'model', 'FD'),
        max_states=ns.max_states, fmt=ns.fmt,
        export_path=getattr(ns, 'export_path', None), stats=ns.stats,
        weakest=getattr(ns, 'weakest', False),
        normalized=getattr(ns, 'normalized', False))


# ------------------------------------------------------------------ commands

def _load(path):
    try:
        return load_contract(path)
    except FileNotFoundError:
        raise _UsageError(f"{path}: file not found") from None
    except OSError as exc:
        raise _UsageError(f"{path}: {exc.strerror}") from None
    except StateSpaceError:
        raise
    except CtrError as exc:
        raise _UsageError(f"{path}:{exc}") from None


class _UsageError(Exception):
    pass


def _verdict_text(label, v):
    lines = [f"{label}: {'PASS' if v.holds else 'FAIL'}"]
    if v.counterexample is not None:
        cx = v.counterexample
        lines.append(f"  {cx.kind}: {cx.describe()}")
    return lines


def cmd_check(cfg: RunConfig):
    path = cfg.paths[0]
    contract = _load(path)
    verdicts = [check_deadlock(contract, cfg.max_states),
                check_livelock(contract, cfg.max_states),
                check_consistency(contract, cfg.max_states)]
    code = EXIT_OK if all(v.holds for v in verdicts) else EXIT_FAIL
    if cfg.fmt == 'json':
        return code, {'command': 'check', 'file': path, 'contract': contract.name,
                      'verdicts': [v.to_json(cfg.stats) for v in verdicts]}
    lines = [f"contract {contract.name} ({path})"]
    for v in verdicts:
        lines += _verdict_text(_LABELS[v.property], v)
    return code, lines


def cmd_refine(cfg: RunConfig):
    spec_path, impl_path = cfg.paths
    spec, impl = _load(spec_path), _load(impl_path)
    try:
        v = check_refinement(spec, impl, cfg.model, cfg.max_states)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    code = EXIT_OK if v.holds else EXIT_FAIL
    if cfg.fmt == 'json':
        return code, {'command': 'refine', 'spec': spec_path, 'impl': impl_path,
                      'model': MODELS[cfg.model], 'verdict': v.to_json(cfg.stats)}
    lines = [f"{spec.name} ⊑{MODELS[cfg.model]} {impl.name}",
             f"refines: {'true' if v.holds else 'false'}"]
    if v.counterexample is not None:
        lines.append(f"  {v.counterexample.kind}: {v.counterexample.describe()}")
    return code, lines


def cmd_protocol(cfg: RunConfig):
    path = cfg.paths[0]
    contract = _load(path)
    declared = format_pattern(contract.protocol)
    weakest = weakest_protocol(hidden_lts(contract, cfg.max_states)).to_regex() \
        if cfg.weakest else None
    if cfg.fmt == 'json':
        out = {'command': 'protocol', 'file': path, 'declared': declared}
        if weakest is not None:
            out['weakest'] = weakest
        return EXIT_OK, out
    lines = [f"declared: {declared}"]
    if weakest is not None:
        lines.append(f"weakest: {weakest}")
    return EXIT_OK, lines


def cmd_export(cfg: RunConfig):
    path = cfg.paths[0]
    contract = _load(path)
    lts = hidden_lts(contract, cfg.max_states)
    if cfg.normalized:
        graph = normalize(lts, cfg.max_states)
        dot = normalized_to_dot(graph, contract.name)
        size = {'nodes': len(graph)}
    else:
        dot = lts_to_dot(lts, contract.name)
        size = {'states': len(lts), 'transitions': len(lts.edges)}
    if cfg.export_path == '-':
        return EXIT_OK, dot.rstrip('\n').split('\n')
    try:
        Path(cfg.export_path).write_text(dot, encoding='utf-8')
    except OSError as exc:
        raise _UsageError(f"{cfg.export_path}: {exc.strerror}") from None
    if cfg.fmt == 'json':
        return EXIT_OK, {'command': 'export', 'file': path, 'dot': cfg.export_path, **size}
    desc = ', '.join(f'{v} {k}' for k, v in size.items())
    return EXIT_OK, [f"wrote {cfg.export_path} ({desc})"]


def _check_expectation(exp, verdict):
    """Return a mismatch message, or None when the verdict meets `exp`."""
    if verdict.holds != exp.holds:
        return f"expected {str(exp.holds).lower()}, got {str(verdict.holds).lower()}"
    if exp.trace_prefix:
        got = format_trace(verdict.counterexample.trace) if verdict.counterexample else ''
        if not got.startswith(exp.trace_prefix):
            return f"expected trace starting {exp.trace_prefix!r}, got {got!r}"
    return None


def run_corpus_dir(directory, max_states=DEFAULT_MAX_STATES):
    """Check every contract with an expectation file in `directory`.

    Returns a list of per-contract reports (dicts) in file-name order.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise _UsageError(f"{directory}: not a directory")
    reports = []
    for path in sorted(directory.glob('*.ctr')):
        if not path.with_suffix('.expect').exists():
            continue
        try:
            entry = casestudy.load_entry(path)
        except ValueError as exc:
            raise _UsageError(f"{path.with_suffix('.expect')}: {exc}") from None
        contract = _load(path)
        verdicts = {v.property: v for v in (check_deadlock(contract, max_states),
                                             check_livelock(contract, max_states),
                                             check_consistency(contract, max_states))}
        results = []
        for exp in entry.expectations:
            if exp.refinement:
                model, other = exp.refinement
                impl = _load(directory / f'{other}.ctr')
                v = check_refinement(contract, impl, model, max_states)
            else:
                v = verdicts[exp.key]
            results.append((exp, v, _check_expectation(exp, v)))
        reports.append({'name': entry.name, 'verdicts': verdicts, 'results': results})
    return reports


def cmd_corpus(cfg: RunConfig):
    reports = run_corpus_dir(cfg.paths[0], cfg.max_states)
    total = sum(len(r['results']) for r in reports)
    met = sum(1 for r in reports for *_, bad in r['results'] if bad is None)
    code = EXIT_OK if met == total else EXIT_FAIL
    if cfg.fmt == 'json':
        out = []
        for r in reports:
            out.append({
                'contract': r['name'],
                'verdicts': {k: v.holds for k, v in r['verdicts'].items()},
                'expectations': [
                    {'key': exp.key, 'expected': exp.holds, 'actual': v.holds,
                     'met': bad is None,
                     **({'trace': format_trace(v.counterexample.trace)}
                        if v.counterexample else {})}
                    for exp, v, bad in r['results']],
            })
        return code, {'command': 'corpus', 'dir': cfg.paths[0], 'contracts': out,
                      'met': met, 'total': total}
    lines = []
    for r in reports:
        props = ' '.join(f"{k}={str(v.holds).lower()}" for k, v in r['verdicts'].items())
        lines.append(f"{r['name']}: {props}")
        for exp, v, bad in r['results']:
            if exp.refinement:
                model, other = exp.refinement
                lines.append(f"  {r['name']} ⊑{model} {other}: {str(v.holds).lower()}")
            if bad is not None:
                lines.append(f"  MISMATCH {exp.key}: {bad}")
    lines.append(f"expectations met: {met}/{total}")
    return code, lines


_DISPATCH = {'check': cmd_check, 'refine': cmd_refine, 'protocol': cmd_protocol,
             'export': cmd_export, 'corpus': cmd_corpus}


def run(argv) -> tuple[int, str]:
    """Run one command; return (exit code, rendered output)."""
    err = io.StringIO()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(err):
            cfg = parse_args(list(argv))
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), err.getvalue()
    try:
        code, body = _DISPATCH[cfg.command](cfg)
    except _UsageError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    except StateSpaceError as exc:
        return EXIT_CAP, f"error: {exc}\n"
    except CtrError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    if isinstance(body, dict):
        return code, json.dumps(body, indent=2, ensure_ascii=False) + '\n'
    return code, '\n'.join(body) + '\n'


def main(argv=None) -> None:
    code, text = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if code in (EXIT_OK, EXIT_FAIL) else sys.stderr
    stream.write(text)
    sys.exit(code)


if __name__ == '__main__':
    main()
