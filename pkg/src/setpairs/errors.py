"""Exception hierarchy.

Two families of errors exist. ``InvalidInput`` subclasses describe inputs that
are not (n,m)-systems (or are otherwise out of contract); the CLI maps them to
exit code 2. ``Finding`` subclasses mean a pipeline invariant failed on an
input that was expected to satisfy it; they are reported, never suppressed.
"""

from __future__ import annotations

from typing import Any


class SetPairsError(Exception):
    code = "Error"

    def __init__(self, message: str = "", witness: Any = None):
        super().__init__(message or self.code)
        self.witness = witness


class InvalidInput(SetPairsError, ValueError):
    code = "InvalidInput"


class NonUniformSizes(InvalidInput):
    code = "NonUniformSizes"


class UnusedVertex(InvalidInput):
    code = "UnusedVertex"


class KTooSmall(InvalidInput):
    code = "KTooSmall"


class EllTooSmall(InvalidInput):
    code = "EllTooSmall"


class PropertyIFailed(InvalidInput):
    code = "PropertyIFailed"


class PropertyIIFailed(InvalidInput):
    code = "PropertyIIFailed"


class NonPositiveM(InvalidInput):
    code = "NonPositiveM"


class UniverseTooLarge(InvalidInput):
    code = "UniverseTooLarge"


class InfeasibleParameters(InvalidInput):
    code = "InfeasibleParameters"


class MalformedCertificate(InvalidInput):
    code = "MalformedCertificate"


class Finding(SetPairsError):
    code = "Finding"


class KernelChoiceImpossible(Finding):
    code = "KernelChoiceImpossible"


class NoPrivatePair(Finding):
    code = "NoPrivatePair"


class NoGarbageVertex(Finding):
    code = "NoGarbageVertex"


class ReplacementBrokePrivacy(Finding):
    code = "ReplacementBrokePrivacy"


class NotAForest(Finding):
    code = "NotAForest"


class RecursionSizeViolation(Finding):
    code = "RecursionSizeViolation"
