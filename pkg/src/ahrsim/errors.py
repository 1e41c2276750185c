"""Run-time error taxonomy shared by the simulator and the reference evaluator."""

from enum import Enum


class ErrorKind(str, Enum):
    CAR_OF_ATOM = "CarOfAtom"
    CDR_OF_ATOM = "CdrOfAtom"
    DIV_BY_ZERO = "DivByZero"
    TYPE_ERROR = "TypeError"
    UNBOUND_SYMBOL = "UnboundSymbol"
    EXPANSION_LIMIT = "ExpansionLimit"
    PASSIVE_MEMORY_FULL = "PassiveMemoryFull"
    OVERFLOW = "Overflow"
    ACTIVE_MEMORY_FULL = "ActiveMemoryFull"
    FIFO_OVERFLOW = "FifoOverflow"

    def __str__(self) -> str:
        return self.value


class LispRuntimeError(Exception):
    def __init__(self, kind: ErrorKind, message: str = ""):
        super().__init__(f"{kind.value}: {message}" if message else kind.value)
        self.kind = kind


DEFAULT_EXPANSION_LIMIT = 10_000


class InvariantViolation(AssertionError):
    """A machine invariant was broken: a simulator bug, never a user error."""


class NoFreeProcessor(LookupError):
    pass
