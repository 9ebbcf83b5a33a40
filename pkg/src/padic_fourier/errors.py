"""Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI maps it to:
2 = parse error, 3 = precondition violation (prime mismatch, depth or
box exhaustion, not enough input precision), 4 = uncertified tail,
5 = internal consistency failure (an invariant that must never break).
"""


class PadicFourierError(Exception):
    exit_code = 1


class ParseError(PadicFourierError):
    exit_code = 2


class PreconditionError(PadicFourierError):
    exit_code = 3


class PrimeMismatch(PreconditionError):
    pass


class PrecisionExhausted(PreconditionError):
    """The input precision cannot certify the requested output precision."""


class BoxExhausted(PreconditionError):
    """The requested computation does not fit in the given truncation box."""


class UncertifiedTailError(PadicFourierError):
    exit_code = 4


class InternalConsistencyError(PadicFourierError):
    exit_code = 5
