"""Exception hierarchy.  Every error carries a stable machine-readable ``code``."""


class IFError(Exception):
    code = "ERROR"

    def __str__(self):
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class ParseError(IFError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=None, column=None, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        where = f" at line {line}, column {column}" if line is not None else ""
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message}{where}{exp}")


class TupleOutOfRange(IFError):
    code = "TUPLE_OUT_OF_RANGE"


class UnboundVariable(IFError):
    code = "UNBOUND_VARIABLE"


class MissingRelation(IFError):
    code = "MISSING_RELATION"


class CapExceeded(IFError):
    code = "CAP_EXCEEDED"

    def __init__(self, what, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count} exceeds cap {cap}")


class InvalidPair(IFError):
    code = "INVALID_PAIR"


class IncompleteStrategy(IFError):
    code = "INCOMPLETE_STRATEGY"


class BSSPresent(IFError):
    code = "BSS_PRESENT"


class NotWinning(IFError):
    code = "NOT_WINNING"


class NotKM(IFError):
    code = "NOT_KM"


class NotPrenex(IFError):
    code = "NOT_PRENEX"


class VerificationFailed(IFError):
    code = "VERIFICATION_FAILED"
