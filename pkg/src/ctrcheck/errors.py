class CtrError(Exception):
    """Base class for all errors raised by ctrcheck."""


class ParseError(CtrError):
    def __init__(self, message, line, col, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        text = f"{line}:{col}: {message}"
        if self.expected:
            text += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(text)


class ContractTypeError(CtrError):
    """Raised by `load_contract` when typechecking produced diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class ProtocolError(CtrError):
    pass


class StateSpaceError(CtrError):
    def __init__(self, what, cap):
        self.cap = cap
        super().__init__(f"{what} exceeded the cap of {cap} states")


class ExecutionError(CtrError):
    """A behavior did something typechecking could not rule out statically."""
