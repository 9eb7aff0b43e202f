"""Recursive-descent parser for `.ctr` contracts.

Parsing also elaborates: duplicate names, unknown identifiers, and
parameterised private services are rejected here, and bare identifiers
that name enum labels are turned into literals. Typing is left to
`typecheck`.
"""

from dataclasses import replace

from ..errors import ParseError
from . import ast
from .lexer import Token, tokenize

_COMPARE_OPS = ('==', '!=', '<', '<=', '>', '>=')


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    # -- token plumbing

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ('kw', 'op') and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != 'eof':
            self.i += 1
        return t

    def fail(self, expected, tok=None):
        tok = tok or self.tok
        raise ParseError(f"unexpected {tok.describe()}", tok.line, tok.col, expected)

    def expect(self, text) -> Token:
        if not self.at(text):
            self.fail([repr(text)])
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != 'ident':
            self.fail(['identifier'])
        return self.advance()

    def integer(self) -> int:
        sign = -1 if self.at('-') and self.advance() else 1
        if self.tok.kind != 'int':
            self.fail(['integer'])
        return sign * int(self.advance().text)

    # -- grammar

    def contract(self) -> ast.Contract:
        self.expect('contract')
        name = self.ident().text
        self.expect('{')
        resources = self.resources()
        services = []
        while self.at('service'):
            services.append(self.service())
        if not self.at('protocol'):
            self.fail(["'service'", "'protocol'"])
        protocol = self.protocol()
        self.expect('}')
        if self.tok.kind != 'eof':
            self.fail(['end of input'])
        return ast.Contract(name, tuple(resources), tuple(services), protocol)

    def resources(self):
        self.expect('resources')
        self.expect('{')
        decls = []
        while self.tok.kind == 'ident':
            t = self.advance()
            self.expect(':')
            dom = self.domain()
            self.expect('=')
            init = self.literal()
            self.expect(';')
            decls.append(ast.VarDecl(t.text, dom, init, (t.line, t.col)))
        self.expect('}')
        return decls

    def domain(self):
        t = self.tok
        if self.at('bool'):
            self.advance()
            return ast.BoolDomain()
        if self.at('int'):
            self.advance()
            self.expect('[')
            lo = self.integer()
            self.expect('..')
            hi = self.integer()
            self.expect(']')
            if lo > hi:
                raise ParseError(f"empty integer domain [{lo}..{hi}]", t.line, t.col)
            if hi - lo + 1 > ast.MAX_INT_DOMAIN:
                raise ParseError(
                    f"integer domain larger than {ast.MAX_INT_DOMAIN} values", t.line, t.col)
            return ast.IntDomain(lo, hi)
        if self.at('enum'):
            self.advance()
            self.expect('{')
            labels = [self.ident()]
            while self.at(','):
                self.advance()
                labels.append(self.ident())
            self.expect('}')
            seen = set()
            for lab in labels:
                if lab.text in seen:
                    raise ParseError(f"duplicate enum label {lab.text!r}", lab.line, lab.col)
                seen.add(lab.text)
            return ast.EnumDomain(tuple(lab.text for lab in labels))
        self.fail(["'bool'", "'int'", "'enum'"])

    def literal(self):
        t = self.tok
        if self.at('true', 'false'):
            self.advance()
            return t.text == 'true'
        if t.kind == 'int' or self.at('-'):
            return self.integer()
        if t.kind == 'ident':
            return self.advance().text
        self.fail(['literal'])

    def params(self):
        out = []
        if self.tok.kind != 'ident':
            return out
        while True:
            t = self.ident()
            self.expect(':')
            out.append((t, self.domain()))
            if not self.at(','):
                return out
            self.advance()

    def service(self):
        self.expect('service')
        if not self.at('+', '-'):
            self.fail(["'+'", "'-'"])
        vis = 'public' if self.advance().text == '+' else 'private'
        name = self.ident()
        self.expect('(')
        inputs = self.params()
        self.expect(')')
        outputs = []
        if self.at('->'):
            self.advance()
            self.expect('(')
            outputs = self.params()
            self.expect(')')
        if vis == 'private' and (inputs or outputs):
            bad = (inputs or outputs)[0][0]
            raise ParseError("private services take no parameters", bad.line, bad.col)
        self.expect('{')
        self.expect('guard')
        guard = self.expr()
        self.expect(';')
        self.expect('pre')
        pre = self.expr()
        self.expect(';')
        self.expect('effect')
        body = self.block()
        self.expect('}')
        seen = set()
        for t, _ in inputs + outputs:
            if t.text in seen:
                raise ParseError(f"duplicate parameter {t.text!r}", t.line, t.col)
            seen.add(t.text)
        return ast.ServiceDecl(
            name.text, vis,
            tuple(ast.Param(t.text, d) for t, d in inputs),
            tuple(ast.Param(t.text, d) for t, d in outputs),
            guard, pre, body, (name.line, name.col))

    def block(self):
        self.expect('{')
        stmts = []
        while not self.at('}'):
            stmts.append(self.stmt())
        self.advance()
        return tuple(stmts)

    def stmt(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == 'ident':
            self.advance()
            self.expect('=')
            e = self.expr()
            self.expect(';')
            return ast.Assign(t.text, e, pos)
        if self.at('choice'):
            self.advance()
            self.expect('{')
            branches = [self.block()]
            while self.at('{'):
                branches.append(self.block())
            self.expect('}')
            return ast.Choice(tuple(branches), pos)
        if self.at('if'):
            self.advance()
            cond = self.expr()
            then = self.block()
            orelse = ()
            if self.at('else'):
                self.advance()
                orelse = self.block()
            return ast.If(cond, then, orelse, pos)
        if self.at('call'):
            self.advance()
            target = self.ident()
            self.expect(';')
            return ast.Call(target.text, (target.line, target.col))
        if self.at('block'):
            self.advance()
            self.expect(';')
            return ast.Block(pos)
        if self.at('return'):
            self.advance()
            bindings = []
            if self.tok.kind == 'ident':
                while True:
                    b = self.ident()
                    self.expect('=')
                    bindings.append((b, self.expr()))
                    if not self.at(','):
                        break
                    self.advance()
            self.expect(';')
            seen = set()
            for b, _ in bindings:
                if b.text in seen:
                    raise ParseError(f"output {b.text!r} bound twice", b.line, b.col)
                seen.add(b.text)
            return ast.Return(tuple((b.text, e) for b, e in bindings), pos)
        self.fail(['identifier', "'choice'", "'if'", "'call'", "'block'", "'return'", "'}'"])

    # expressions, loosest first: or, and, not, comparison, additive, unary

    def expr(self):
        left = self.conj()
        while self.at('or'):
            t = self.advance()
            left = ast.Binary('or', left, self.conj(), (t.line, t.col))
        return left

    def conj(self):
        left = self.neg()
        while self.at('and'):
            t = self.advance()
            left = ast.Binary('and', left, self.neg(), (t.line, t.col))
        return left

    def neg(self):
        if self.at('not'):
            t = self.advance()
            return ast.Unary('not', self.neg(), (t.line, t.col))
        return self.comparison()

    def comparison(self):
        left = self.additive()
        if self.at(*_COMPARE_OPS):
            t = self.advance()
            left = ast.Binary(t.text, left, self.additive(), (t.line, t.col))
        return left

    def additive(self):
        left = self.unary()
        while self.at('+', '-'):
            t = self.advance()
            left = ast.Binary(t.text, left, self.unary(), (t.line, t.col))
        return left

    def unary(self):
        t = self.tok
        if self.at('-'):
            self.advance()
            return ast.Unary('-', self.unary(), (t.line, t.col))
        if self.at('('):
            self.advance()
            e = self.expr()
            self.expect(')')
            return e
        if self.at('true', 'false'):
            self.advance()
            return ast.Lit(t.text == 'true', (t.line, t.col))
        if t.kind == 'int':
            self.advance()
            return ast.Lit(int(t.text), (t.line, t.col))
        if t.kind == 'ident':
            self.advance()
            return ast.Var(t.text, (t.line, t.col))
        self.fail(['expression'])

    # protocol patterns

    def protocol(self):
        self.expect('protocol')
        self.expect('{')
        pat = self.pattern()
        self.expect('}')
        return pat

    def pattern(self):
        options = [self.sequence()]
        while self.at('|'):
            self.advance()
            options.append(self.sequence())
        return options[0] if len(options) == 1 else ast.Alt(tuple(options))

    def _at_symbol(self) -> bool:
        return self.at('?', '!') and self.peek().kind == 'ident'

    def sequence(self):
        items = []
        while self._at_symbol() or self.at('('):
            if self.at('('):
                self.advance()
                atom = self.pattern()
                self.expect(')')
            else:
                d = self.advance()
                n = self.advance()
                atom = ast.Sym(d.text, n.text, (n.line, n.col))
            # `?` followed by an identifier starts the next symbol instead
            while self.at('*') or (self.at('?') and not self._at_symbol()):
                atom = ast.Repeat(atom, self.advance().text)
            items.append(atom)
        return items[0] if len(items) == 1 else ast.Seq(tuple(items))


def _elaborate(c: ast.Contract) -> ast.Contract:
    names = set()
    for r in c.resources:
        if r.name in names:
            raise ParseError(f"duplicate resource {r.name!r}", *r.pos)
        names.add(r.name)
    snames = set()
    for s in c.services:
        if s.name in snames or s.name in names:
            raise ParseError(f"duplicate name {s.name!r}", *s.pos)
        snames.add(s.name)

    labels = set()
    for dom in [r.domain for r in c.resources] + [
            p.domain for s in c.services for p in s.inputs + s.outputs]:
        if isinstance(dom, ast.EnumDomain):
            labels.update(dom.labels)

    resource_names = frozenset(names)

    def resolve(e, scope):
        if isinstance(e, ast.Var):
            if e.name in scope:
                return e
            if e.name in labels:
                return ast.Lit(e.name, e.pos)
            raise ParseError(f"unknown identifier {e.name!r}", *e.pos)
        if isinstance(e, ast.Unary):
            return replace(e, arg=resolve(e.arg, scope))
        if isinstance(e, ast.Binary):
            return replace(e, left=resolve(e.left, scope), right=resolve(e.right, scope))
        return e

    def resolve_block(stmts, scope, outputs):
        out = []
        for st in stmts:
            if isinstance(st, ast.Assign):
                if st.target not in resource_names:
                    raise ParseError(f"unknown resource {st.target!r}", *st.pos)
                st = replace(st, expr=resolve(st.expr, scope))
            elif isinstance(st, ast.Choice):
                st = replace(st, branches=tuple(
                    resolve_block(b, scope, outputs) for b in st.branches))
            elif isinstance(st, ast.If):
                st = replace(st, cond=resolve(st.cond, scope),
                             then=resolve_block(st.then, scope, outputs),
                             orelse=resolve_block(st.orelse, scope, outputs))
            elif isinstance(st, ast.Call):
                if st.target not in snames:
                    raise ParseError(f"unknown service {st.target!r}", *st.pos)
            elif isinstance(st, ast.Return):
                for name, _ in st.bindings:
                    if name not in outputs:
                        raise ParseError(f"unknown output {name!r}", *st.pos)
                st = replace(st, bindings=tuple(
                    (n, resolve(e, scope)) for n, e in st.bindings))
            out.append(st)
        return tuple(out)

    services = []
    for s in c.services:
        for p in s.inputs + s.outputs:
            if p.name in resource_names:
                raise ParseError(f"parameter {p.name!r} shadows a resource", *s.pos)
        scope = resource_names | {p.name for p in s.inputs}
        outputs = {p.name for p in s.outputs}
        services.append(replace(
            s,
            guard=resolve(s.guard, scope),
            pre=resolve(s.pre, scope),
            behavior=resolve_block(s.behavior, scope, outputs)))

    def check_pattern(p):
        if isinstance(p, ast.Sym):
            if p.name not in snames:
                raise ParseError(f"unknown service {p.name!r} in protocol", *p.pos)
        elif isinstance(p, (ast.Seq, ast.Alt)):
            for q in (p.items if isinstance(p, ast.Seq) else p.options):
                check_pattern(q)
        elif isinstance(p, ast.Repeat):
            check_pattern(p.body)

    check_pattern(c.protocol)
    return replace(c, services=tuple(services))


def parse_contract(source: str) -> ast.Contract:
    """Parse and elaborate contract source text.

    Raises `ParseError` carrying a 1-based line/column and, for syntax
    errors, the set of tokens that would have been accepted.
    """
    if source.startswith('﻿'):
        source = source[1:]
    return _elaborate(_Parser(source).contract())
