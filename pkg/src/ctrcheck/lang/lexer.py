import re
from dataclasses import dataclass

from ..errors import ParseError

KEYWORDS = frozenset("""
    contract resources service guard pre effect choice call block return
    protocol bool int enum true false and or not if else
""".split())

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|\.\.|==|!=|<=|>=|[{}()\[\];:,=<>+\-?!*|])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # 'ident', 'int', 'kw', 'op', 'eof'
    text: str
    line: int
    col: int
    offset: int

    def describe(self) -> str:
        return "end of input" if self.kind == 'eof' else repr(self.text)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}",
                             line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == 'ident' and text in KEYWORDS:
            kind = 'kw'
        if kind not in ('ws', 'comment'):
            tokens.append(Token(kind, text, line, pos - line_start + 1, pos))
        newlines = text.count('\n')
        if newlines:
            line += newlines
            line_start = pos + text.rindex('\n') + 1
        pos = m.end()
    tokens.append(Token('eof', '', line, pos - line_start + 1, pos))
    return tokens
