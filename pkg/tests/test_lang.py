import pytest
from hypothesis import given, settings, strategies as st

from ctrcheck.errors import ContractTypeError, ParseError
from ctrcheck.lang import ast, format_contract, load_contract, parse_contract, typecheck
from ctrcheck.lang.printer import format_expr, format_pattern

from conftest import ALL_CORPUS, MINIMAL, corpus_contract, corpus_source


def test_minimal_contract(minimal):
    assert minimal.name == 'C'
    assert len(minimal.resources) == 1
    assert [s.name for s in minimal.public_services] == ['m']
    assert typecheck(minimal) == []


def test_private_service_with_parameters_rejected():
    src = MINIMAL.replace('service +m()', 'service -m(x: bool)')
    with pytest.raises(ParseError) as exc:
        parse_contract(src)
    assert 'private services take no parameters' in str(exc.value)


def test_ctr1_shape():
    c = corpus_contract('Ctr1')
    assert [s.name for s in c.public_services] == \
        ['signUp', 'logIn', 'logOut', 'checkBalance', 'deposit']
    dep = c.service('deposit')
    assert format_expr(dep.pre) == 'amt >= 10'
    assert 'LoginState == true' in format_expr(dep.guard)
    assert format_pattern(c.protocol).startswith('((?signUp !signUp)? ?logIn !logIn')


@pytest.mark.parametrize('name', ALL_CORPUS)
def test_corpus_is_well_typed(name):
    assert typecheck(corpus_contract(name)) == []


@pytest.mark.parametrize('name', ALL_CORPUS)
def test_corpus_round_trips_through_printer(name):
    c = corpus_contract(name)
    assert parse_contract(format_contract(c)) == c


def test_ctr3_private_set():
    c = corpus_contract('Ctr3')
    assert c.private_names == frozenset({'repeatInvokingPayment'})
    assert c.resource('repeatedTimes').domain == ast.IntDomain(0, 3)
    assert c.signature() == corpus_contract('Ctr1').signature()


def test_init_outside_domain():
    diags = typecheck(parse_contract(MINIMAL.replace('b: bool = false', 'b: bool = 5')))
    assert len(diags) == 1
    assert 'init not in domain' in diags[0].message


def test_missing_output_binding_in_deposit():
    src = corpus_source('Ctr1').replace('{ return r = false; }', '{ return; }')
    diags = typecheck(parse_contract(src))
    assert len(diags) == 1
    assert 'output not bound' in diags[0].message


def test_load_contract_raises_on_type_error(tmp_path):
    p = tmp_path / 'bad.ctr'
    p.write_text(MINIMAL.replace('b: bool = false', 'b: bool = 5'))
    with pytest.raises(ContractTypeError):
        load_contract(p)


@pytest.mark.parametrize('src, line, col', [
    ('contract C {\n  resources { b: bool = ; }', 2, 25),
    ('contract { }', 1, 10),
    ('contract C { resources { } protocol { ?m } }', 1, 40),
])
def test_parse_error_positions(src, line, col):
    with pytest.raises(ParseError) as exc:
        parse_contract(src)
    assert (exc.value.line, exc.value.col) == (line, col)


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as exc:
        parse_contract('contract C { resources { b: bool = false } }')
    assert "';'" in str(exc.value) or ';' in exc.value.expected


@pytest.mark.parametrize('mutation, needle', [
    (('guard true;', 'guard 1;'), 'boolean'),
    (('return r = true;', 'return r = 3;'), ''),
    (('(?m !m)*', '(?m !m ?q !q)*'), ''),
])
def test_rejections(mutation, needle):
    src = MINIMAL.replace(*mutation)
    try:
        diags = typecheck(parse_contract(src))
    except ParseError as exc:
        assert needle in str(exc)
        return
    assert diags and needle in diags[0].message


def test_comments_and_crlf():
    src = '// header\r\n' + MINIMAL.replace(' service', '\r\n  // note\r\n service')
    assert parse_contract(src) == parse_contract(MINIMAL)


# -------------------------------------------------------------- round trip

_idents = st.sampled_from(['a', 'b', 'c'])
_sym = st.builds(ast.Sym, st.sampled_from('?!'), st.sampled_from(['m', 'n']))
_patterns = st.recursive(
    _sym,
    lambda inner: st.one_of(
        st.builds(lambda xs: ast.Seq(tuple(xs)), st.lists(inner, min_size=2, max_size=3)),
        st.builds(lambda xs: ast.Alt(tuple(xs)), st.lists(inner, min_size=2, max_size=3)),
        st.builds(ast.Repeat, inner, st.sampled_from('?*'))),
    max_leaves=6)

_int_expr = st.recursive(
    st.one_of(st.builds(ast.Lit, st.integers(0, 9)), st.just(ast.Var('x'))),
    lambda inner: st.builds(ast.Binary, st.sampled_from(['+', '-']), inner, inner),
    max_leaves=5)


def _wrap(body, protocol):
    return (f"contract P {{ resources {{ x: int[0..9] = 0; }} "
            f"service +m() -> (r: int[0..9]) {{ guard true; pre true; effect {{ {body} }} }} "
            f"service +n() -> () {{ guard true; pre true; effect {{ return; }} }} "
            f"protocol {{ {protocol} }} }}")


@settings(deadline=None)
@given(_patterns)
def test_protocol_round_trip(p):
    c = parse_contract(_wrap('return r = 0;', format_pattern(p)))
    assert parse_contract(format_contract(c)) == c
    assert format_pattern(c.protocol) == format_pattern(parse_contract(
        _wrap('return r = 0;', format_pattern(c.protocol))).protocol)


@settings(deadline=None)
@given(_int_expr)
def test_expression_round_trip(e):
    c = parse_contract(_wrap(f'x = {format_expr(e)}; return r = x;', '(?m !m)*'))
    assert parse_contract(format_contract(c)) == c
    assign = c.service('m').behavior[0]
    assert assign.expr == e
