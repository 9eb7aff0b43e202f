from dataclasses import dataclass

from . import ast

BOOL = ast.BoolDomain()
INT = 'int'


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int = 0
    col: int = 0
    where: str = ''

    def __str__(self):
        loc = f"{self.line}:{self.col}: " if self.line else ''
        ctx = f"[{self.where}] " if self.where else ''
        return f"{loc}{ctx}{self.message}"


def _kind(dom):
    return INT if isinstance(dom, ast.IntDomain) else dom


def _compatible(a, b) -> bool:
    """Whether values of types `a` and `b` may be compared or assigned."""
    if a is None or b is None:
        return True  # already reported
    if isinstance(a, tuple) and isinstance(b, tuple):
        return a == b
    if isinstance(a, tuple):
        a, b = b, a
    if isinstance(b, tuple):  # ('label', name)
        return isinstance(a, ast.EnumDomain) and b[1] in a.labels
    return a == b


class _Checker:
    def __init__(self, contract: ast.Contract):
        self.c = contract
        self.diags: list[Diagnostic] = []
        self.where = ''

    def report(self, message, pos=(0, 0)):
        self.diags.append(Diagnostic(message, pos[0], pos[1], self.where))

    def type_of(self, e, env):
        if isinstance(e, ast.Lit):
            if isinstance(e.value, bool):
                return BOOL
            if isinstance(e.value, int):
                return INT
            return ('label', e.value)
        if isinstance(e, ast.Var):
            return _kind(env[e.name])
        if isinstance(e, ast.Unary):
            t = self.type_of(e.arg, env)
            want = BOOL if e.op == 'not' else INT
            if t is not None and t != want:
                self.report(f"operand of {e.op!r} must be {'bool' if want == BOOL else 'int'}", e.pos)
                return None
            return want
        l, r = self.type_of(e.left, env), self.type_of(e.right, env)
        if e.op in ('+', '-', '<', '<=', '>', '>='):
            if (l is not None and l != INT) or (r is not None and r != INT):
                self.report(f"arithmetic operator {e.op!r} needs int operands", e.pos)
                return None
            return INT if e.op in ('+', '-') else BOOL
        if e.op in ('and', 'or'):
            if (l is not None and l != BOOL) or (r is not None and r != BOOL):
                self.report(f"{e.op!r} needs bool operands", e.pos)
                return None
            return BOOL
        if not _compatible(l, r):
            self.report(f"{e.op!r} compares values of different domains", e.pos)
            return None
        return BOOL

    def predicate(self, e, env, what):
        t = self.type_of(e, env)
        if t is not None and t != BOOL:
            self.report(f"{what} must be a boolean expression", e.pos)

    def block(self, stmts, env, svc):
        """Check a statement sequence; return True if every path through it
        ends in return, block, or call."""
        for i, st in enumerate(stmts):
            rest = stmts[i + 1:]
            if isinstance(st, ast.Assign):
                dom = self.c.resource(st.target).domain
                if not _compatible(_kind(dom), self.type_of(st.expr, env)):
                    self.report(f"cannot assign to {st.target!r}: domain mismatch", st.pos)
            elif isinstance(st, ast.Choice):
                done = [self.block(b, env, svc) for b in st.branches]
                if all(done):
                    return self._tail(rest)
            elif isinstance(st, ast.If):
                self.predicate(st.cond, env, 'if condition')
                done = self.block(st.then, env, svc) & self.block(st.orelse, env, svc)
                if done and st.orelse:
                    return self._tail(rest)
            elif isinstance(st, ast.Call):
                target = self.c.service(st.target)
                if target.public:
                    self.report(f"call target {st.target!r} is not a private service", st.pos)
                if not rest:
                    return True
            elif isinstance(st, ast.Block):
                return self._tail(rest)
            elif isinstance(st, ast.Return):
                bound = {n for n, _ in st.bindings}
                for p in svc.outputs:
                    if p.name not in bound:
                        self.report(f"output not bound: {p.name!r}", st.pos)
                outs = {p.name: p.domain for p in svc.outputs}
                for n, e in st.bindings:
                    if not _compatible(_kind(outs[n]), self.type_of(e, env)):
                        self.report(f"output {n!r}: domain mismatch", st.pos)
                return self._tail(rest)
        return False

    def _tail(self, rest):
        if rest:
            self.report("unreachable statement", rest[0].pos)
        return True

    def run(self) -> list[Diagnostic]:
        c = self.c
        res = {r.name: r.domain for r in c.resources}
        for r in c.resources:
            self.where = r.name
            if r.init not in r.domain:
                self.report("init not in domain", r.pos)
        if not c.public_services:
            self.where = c.name
            self.report("contract declares no public service")
        for s in c.services:
            self.where = s.name
            env = dict(res)
            env.update({p.name: p.domain for p in s.inputs})
            self.predicate(s.guard, env, 'guard')
            self.predicate(s.pre, env, 'precondition')
            if not self.block(s.behavior, env, s):
                self.report("behavior may finish without return, block, or call", s.pos)
        self.where = 'protocol'
        self._protocol(c.protocol)
        return self.diags

    def _protocol(self, p):
        if isinstance(p, ast.Sym):
            if not self.c.service(p.name).public:
                self.report(f"protocol names private service {p.name!r}", p.pos)
        elif isinstance(p, ast.Seq):
            for q in p.items:
                self._protocol(q)
        elif isinstance(p, ast.Alt):
            for q in p.options:
                self._protocol(q)
        elif isinstance(p, ast.Repeat):
            self._protocol(p.body)


def typecheck(contract: ast.Contract) -> list[Diagnostic]:
    """Return the type diagnostics of a parsed contract (empty if well typed)."""
    return _Checker(contract).run()
