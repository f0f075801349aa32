"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented exit statuses (2 validation, 3 cap exceeded, 4 bound violation).
"""

from __future__ import annotations


class AbelosError(Exception):
    exit_code = 2


class InvalidInput(AbelosError, ValueError):
    """Malformed or out-of-domain input."""


class CapExceeded(AbelosError):
    exit_code = 3


class CompositeP(InvalidInput):
    pass


class TooLarge(CapExceeded):
    pass


class ZeroInput(InvalidInput):
    pass


class SingularCurve(InvalidInput):
    pass


class InconsistentCounts(InvalidInput):
    pass


class InvalidWeilData(InvalidInput):
    pass


class TraceOutOfRange(InvalidInput):
    pass


class OddH2(InvalidInput):
    pass


class OutsidePolygon(InvalidInput):
    pass


class UnlicensedEll(InvalidInput):
    pass


class WrongSpecialization(InvalidInput):
    pass


class PointCapExceeded(CapExceeded):
    pass


class EnumerationCapExceeded(CapExceeded):
    pass


class BoundViolation(AbelosError):
    """A measured code beat a proven lower bound. Never expected."""

    exit_code = 4
