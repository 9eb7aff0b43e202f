import json

import pytest

from ctrcheck.casestudy import CORPUS_DIR, corpus_manifest, parse_expect
from ctrcheck.cli import RunConfig, parse_args, run

C = str(CORPUS_DIR)


def test_refine_passes():
    code, out = run(['refine', f'{C}/Ctr1.ctr', f'{C}/Ctr3.ctr', '--model', 'FD'])
    assert code == 0
    assert 'refines: true' in out


def test_refine_fails_with_reason():
    code, out = run(['refine', f'{C}/Ctr1.ctr', f'{C}/Ctr2.ctr'])
    assert code == 1
    assert 'refines: false' in out and 'divergence-mismatch' in out


def test_check_reports_livelock():
    code, out = run(['check', f'{C}/Ctr2.ctr'])
    assert code == 1
    assert 'livelock: FAIL' in out
    line = next(l for l in out.splitlines() if l.strip().startswith('divergence:'))
    assert line.endswith('tau:repeatInvokingPayment')


def test_check_consistent_contract():
    code, out = run(['check', f'{C}/Ctr3.ctr'])
    assert code == 0
    assert out.count('PASS') == 3


def test_missing_file():
    code, out = run(['check', 'nonexistent.ctr'])
    assert code == 2
    assert 'not found' in out


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / 'bad.ctr'
    bad.write_text('contract X {')
    code, out = run(['check', str(bad)])
    assert code == 2 and 'bad.ctr:1:' in out


def test_usage_errors():
    assert run([])[0] == 2
    assert run(['refine', 'a.ctr'])[0] == 2
    assert run(['check', f'{C}/Ctr1.ctr', '--max-states', '0'])[0] == 2
    assert run(['--help'])[0] == 0


def test_state_cap_exit_code():
    code, out = run(['check', f'{C}/Ctr1.ctr', '--max-states', '5'])
    assert code == 3 and 'cap' in out


def test_protocol_command():
    code, out = run(['protocol', f'{C}/Ctr1.ctr', '--weakest'])
    assert code == 0
    assert out.startswith('declared: ((?signUp !signUp)?')
    assert 'weakest: ' in out


def test_export_dot(tmp_path):
    out_file = tmp_path / 'ctr2.dot'
    code, out = run(['export', f'{C}/Ctr2.ctr', '--dot', str(out_file)])
    assert code == 0
    dot = out_file.read_text()
    assert dot.startswith('digraph') and 'style=dashed' in dot
    code, _ = run(['export', f'{C}/Ctr2.ctr', '--dot', str(out_file), '--normalized'])
    assert code == 0 and 'doublecircle' in out_file.read_text()


def test_corpus_runner_default_dir():
    code, out = run(['corpus'])
    assert code == 0
    assert 'MISMATCH' not in out


def test_corpus_runner_detects_mismatch(tmp_path):
    for f in CORPUS_DIR.iterdir():
        (tmp_path / f.name).write_text(f.read_text())
    (tmp_path / 'Ctr3.expect').write_text('deadlock-free=false\n')
    code, out = run(['corpus', str(tmp_path)])
    assert code == 1
    assert 'MISMATCH deadlock-free' in out


def test_corpus_trace_prefix_assertion(tmp_path):
    for f in CORPUS_DIR.glob('Ctr1.*'):
        (tmp_path / f.name).write_text(f.read_text())
    (tmp_path / 'Ctr1.expect').write_text('deadlock-free=false\ntrace=?signUp(valid)\n')
    code, out = run(['corpus', str(tmp_path)])
    assert code == 1 and 'expected trace' in out


@pytest.mark.parametrize('argv', [
    ['check', f'{C}/Ctr1.ctr'],
    ['refine', f'{C}/Ctr1.ctr', f'{C}/Ctr2.ctr', '--model', 'F'],
    ['protocol', f'{C}/Ctr3.ctr', '--weakest'],
    ['corpus'],
])
def test_json_output_is_deterministic(argv):
    a = run(argv + ['--format', 'json', '--no-stats'])
    b = run(argv + ['--json', '--no-stats'])
    assert a == b
    doc = json.loads(a[1])
    assert 'stats' not in a[1] and doc['command'] == argv[0]


def test_run_config_validation():
    cfg = parse_args(['refine', 'a.ctr', 'b.ctr', '--model', 'T'])
    assert cfg == RunConfig('refine', ('a.ctr', 'b.ctr'), model='T')
    with pytest.raises(ValueError):
        RunConfig('check', ('a',), max_states=0)


def test_manifest():
    entries = corpus_manifest()
    assert [e.name for e in entries] == ['Ctr1', 'Ctr2', 'Ctr3']
    by = {e.name: e for e in entries}
    assert by['Ctr1'].expected('deadlock-free') is False
    assert by['Ctr1'].expected('livelock-free') is True
    assert by['Ctr1'].expected('consistent') is False
    assert by['Ctr2'].expected('deadlock-free') is True
    assert by['Ctr2'].expected('livelock-free') is False
    assert by['Ctr2'].expected('consistent') is False
    assert all(by['Ctr3'].expected(p) for p in ('deadlock-free', 'livelock-free', 'consistent'))
    assert by['Ctr1'].expected('refined-by:FD:Ctr3') is True
    assert by['Ctr1'].expected('refined-by:FD:Ctr2') is False
    assert all(e.provenance for e in entries)


def test_expect_parser():
    exps = parse_expect('// c\ndeadlock-free=false\ntrace=?a()\n\nrefined-by:T:X=true\n')
    assert [(e.key, e.holds, e.trace_prefix) for e in exps] == [
        ('deadlock-free', False, '?a()'), ('refined-by:T:X', True, '')]
    assert exps[1].refinement == ('T', 'X')
    with pytest.raises(ValueError):
        parse_expect('nonsense=true')
    with pytest.raises(ValueError):
        parse_expect('consistent=maybe')
