from __future__ import annotations

from typing import List, Optional, Sequence


class TrackhomError(Exception):
    exit_code = 1


class IndexOutOfRange(TrackhomError):
    exit_code = 1


class ParseError(TrackhomError):
    exit_code = 2


class ValidationError(TrackhomError):
    exit_code = 3

    def __init__(self, message: str, violations: Optional[Sequence[str]] = None):
        super().__init__(message)
        self.violations: List[str] = list(violations or [])


class UnknownMorphism(ValidationError):
    pass


class UnknownCell(ValidationError):
    pass


class NotComposable(ValidationError):
    pass


class FiberMismatch(ValidationError):
    pass


class NotAFunctor(ValidationError):
    pass


class NotSplit(ValidationError):
    pass


class IllDefinedComposite(ValidationError):
    pass


class GateError(TrackhomError):
    exit_code = 4


class CyclicSupport(GateError):
    def __init__(self, message: str, witness: Optional[Sequence[str]] = None):
        super().__init__(message)
        self.witness: List[str] = list(witness or [])


class TooLarge(GateError):
    pass


class GateNotPassed(GateError):
    pass


class CyclicQuiver(GateError):
    pass


class InfiniteCategory(GateError):
    pass


class VerificationError(TrackhomError):
    exit_code = 5


class NotAComplex(VerificationError):
    pass


class InexactDetected(VerificationError):
    def __init__(self, message: str, node: str = "", witness: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.node = node
        self.witness: List[int] = list(witness or [])


class TruncationTooShallow(VerificationError):
    pass
