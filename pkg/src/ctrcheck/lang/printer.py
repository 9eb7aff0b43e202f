"""Pretty-printer producing source that re-parses to an equal Contract."""

from . import ast

_PREC = {'or': 1, 'and': 2, 'not': 3,
         '==': 4, '!=': 4, '<': 4, '<=': 4, '>': 4, '>=': 4,
         '+': 5, '-': 5}


def format_value(v) -> str:
    if isinstance(v, bool):
        return 'true' if v else 'false'
    return str(v)


def format_domain(d) -> str:
    if isinstance(d, ast.BoolDomain):
        return 'bool'
    if isinstance(d, ast.IntDomain):
        return f'int[{d.lo}..{d.hi}]'
    return 'enum { ' + ', '.join(d.labels) + ' }'


def format_expr(e, ctx=0) -> str:
    if isinstance(e, ast.Lit):
        if isinstance(e.value, int) and not isinstance(e.value, bool) and e.value < 0:
            return f'(-{-e.value})'
        return format_value(e.value)
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Unary):
        if e.op == 'not':
            s, p = 'not ' + format_expr(e.arg, 3), 3
        else:
            s, p = '-' + format_expr(e.arg, 6), 6
    else:
        p = _PREC[e.op]
        # comparisons do not chain, and all binary operators associate left
        lhs = format_expr(e.left, p + 1 if p == 4 else p)
        s = f'{lhs} {e.op} {format_expr(e.right, p + 1)}'
    return f'({s})' if p < ctx else s


def _params(ps) -> str:
    return ', '.join(f'{p.name}: {format_domain(p.domain)}' for p in ps)


def _block(stmts, indent) -> list[str]:
    pad = '    ' * indent
    lines = []
    for st in stmts:
        if isinstance(st, ast.Assign):
            lines.append(f'{pad}{st.target} = {format_expr(st.expr)};')
        elif isinstance(st, ast.Choice):
            lines.append(f'{pad}choice {{')
            for b in st.branches:
                lines.append(f'{pad}    {{')
                lines += _block(b, indent + 2)
                lines.append(f'{pad}    }}')
            lines.append(f'{pad}}}')
        elif isinstance(st, ast.If):
            lines.append(f'{pad}if {format_expr(st.cond)} {{')
            lines += _block(st.then, indent + 1)
            if st.orelse:
                lines.append(f'{pad}}} else {{')
                lines += _block(st.orelse, indent + 1)
            lines.append(f'{pad}}}')
        elif isinstance(st, ast.Call):
            lines.append(f'{pad}call {st.target};')
        elif isinstance(st, ast.Block):
            lines.append(f'{pad}block;')
        else:
            binds = ', '.join(f'{n} = {format_expr(e)}' for n, e in st.bindings)
            lines.append(f'{pad}return {binds};' if binds else f'{pad}return;')
    return lines


def format_pattern(p, ctx=0) -> str:
    # ctx: 0 alternation, 1 sequence item, 2 repeat operand
    if isinstance(p, ast.Sym):
        return p.direction + p.name
    if isinstance(p, ast.Repeat):
        return format_pattern(p.body, 2) + p.op
    if isinstance(p, ast.Seq):
        s = ' '.join(format_pattern(q, 1) for q in p.items)
        return f'({s})' if ctx >= 2 or (ctx == 1 and len(p.items) != 1) else s
    s = ' | '.join(format_pattern(q, 0) for q in p.options)
    return f'({s})' if ctx >= 1 else s


def format_contract(c: ast.Contract) -> str:
    lines = [f'contract {c.name} {{', '    resources {']
    for r in c.resources:
        lines.append(f'        {r.name}: {format_domain(r.domain)} = {format_value(r.init)};')
    lines.append('    }')
    for s in c.services:
        sign = '+' if s.public else '-'
        head = f'    service {sign}{s.name}({_params(s.inputs)})'
        if s.outputs:
            head += f' -> ({_params(s.outputs)})'
        lines.append(head + ' {')
        lines.append(f'        guard {format_expr(s.guard)};')
        lines.append(f'        pre {format_expr(s.pre)};')
        lines.append('        effect {')
        lines += _block(s.behavior, 3)
        lines.append('        }')
        lines.append('    }')
    lines.append(f'    protocol {{ {format_pattern(c.protocol)} }}')
    lines.append('}')
    return '\n'.join(lines) + '\n'
