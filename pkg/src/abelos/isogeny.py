"""Weil polynomials of abelian surfaces and the classification that decides
how small a genus of curve a surface may contain.

Canonical form is the trace form
    f(t) = t^4 - t1 t^3 + t2 t^2 - q t1 t + q^2,
with t1 the trace and t2 the middle coefficient.  The polarization criterion
is naturally written in the opposite sign convention
    f(t) = t^4 + a t^3 + b t^2 + q a t + q^2,
and :class:`SignConvention` is the only place the two meet.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath

from .errors import InvalidInput, InvalidWeilData, TraceOutOfRange
from .ff import isqrt_floor, prime_power, trial_factor

RELATIVE_TOLERANCE = 1e-9


def is_weil_surface(q: int, t1: int, t2: int) -> bool:
    """Exact integer test that every root of f has absolute value sqrt(q).

    The roots of f are those of t^2 - u t + q for the two roots u of
    u^2 - t1 u + (t2 - 2q).  They have modulus sqrt(q) exactly when both u are
    real and |u| <= 2 sqrt(q), i.e. |t1| + sqrt(D) <= 4 sqrt(q).
    """
    if q < 2 or t1 * t1 > 16 * q:
        return False
    disc = t1 * t1 - 4 * (t2 - 2 * q)
    if disc < 0:
        return False
    rhs = 16 * q + t1 * t1 - disc
    return rhs >= 0 and 64 * t1 * t1 * q <= rhs * rhs


def validate_weil_surface(q: int, t1: int, t2: int) -> bool:
    """Numeric check (50 digits) that all four roots of f have |root|^2 = q
    to relative tolerance 1e-9.

    Solves the quadratic in u = t + q/t, then t^2 - u t + q = 0 for each u.
    """
    if q < 2 or t1 * t1 > 16 * q:
        return False
    with mpmath.workdps(50):
        disc_u = mpmath.mpf(t1 * t1 - 4 * (t2 - 2 * q))
        root_u = mpmath.sqrt(disc_u)
        for u in ((t1 + root_u) / 2, (t1 - root_u) / 2):
            root_t = mpmath.sqrt(u * u - 4 * q)
            for t in ((u + root_t) / 2, (u - root_t) / 2):
                if abs(abs(t) ** 2 - q) > RELATIVE_TOLERANCE * q:
                    return False
    return True


class SignConvention(enum.Enum):
    TRACE_FORM = "TraceForm"
    HNR_FORM = "HNRForm"

    @staticmethod
    def to_hnr(t1: int, t2: int) -> tuple[int, int]:
        return -t1, t2

    @staticmethod
    def from_hnr(a: int, b: int) -> tuple[int, int]:
        return -a, b


@dataclass(frozen=True, order=True)
class SurfaceWeilData:
    """Isogeny-class invariant (q, Tr(A), a2) of an abelian surface over F_q."""

    q: int
    t1: int
    t2: int

    @property
    def valid(self) -> bool:
        return is_weil_surface(self.q, self.t1, self.t2) and _is_prime_power(self.q)

    @property
    def p(self) -> int:
        return prime_power(self.q)[0]

    @property
    def n(self) -> int:
        return prime_power(self.q)[1]

    @property
    def coefficients(self) -> tuple[int, ...]:
        """Coefficients of f, low degree first."""
        q, t1, t2 = self.q, self.t1, self.t2
        return (q * q, -q * t1, t2, -t1, 1)

    def evaluate(self, x: int) -> int:
        return sum(c * x**i for i, c in enumerate(self.coefficients))

    def hnr(self) -> tuple[int, int]:
        return SignConvention.to_hnr(self.t1, self.t2)

    def require_valid(self) -> "SurfaceWeilData":
        if not self.valid:
            raise InvalidWeilData(f"{self} is not the Weil polynomial of an abelian surface")
        return self

    def to_json(self) -> dict:
        return {"q": self.q, "t1": self.t1, "t2": self.t2}


def _is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except InvalidInput:
        return False
    return True


def all_weil_surfaces(q: int):
    """Every valid (q, t1, t2), sorted by (t1, t2)."""
    bound = isqrt_floor(16 * q)
    for t1 in range(-bound, bound + 1):
        for t2 in range(-2 * q, 6 * q + 1):
            if is_weil_surface(q, t1, t2):
                yield SurfaceWeilData(q, t1, t2)


def point_count_surface(W: SurfaceWeilData) -> int:
    """#A(F_q) = f(1)."""
    W.require_valid()
    q, t1, t2 = W.q, W.t1, W.t2
    return 1 - t1 + t2 - q * t1 + q * q


def is_npp(W: SurfaceWeilData) -> bool:
    """True iff the isogeny class is not principally polarizable."""
    W.require_valid()
    a, b = W.hnr()
    if a * a - b != W.q or b >= 0:
        return False
    return all(f % 3 == 1 for f in trial_factor(b))


def weil_restriction(q: int, trE: int) -> SurfaceWeilData:
    """Weil data over F_q of the restriction of an elliptic curve over F_{q^2}
    with trace ``trE``; f_A(t) = f_E(t^2), so Tr(A) = 0."""
    prime_power(q)
    if trE * trE > 4 * q * q:
        raise TraceOutOfRange(f"|{trE}| exceeds 2q = {2 * q}")
    return SurfaceWeilData(q, 0, -trE)


@dataclass(frozen=True)
class WeilRestrictionMeta:
    p: int
    q: int
    trE: int

    def __post_init__(self):
        p, n = prime_power(self.q)
        if p != self.p:
            raise InvalidInput(f"q = {self.q} is not a power of p = {self.p}")

    @property
    def n(self) -> int:
        return prime_power(self.q)[1]


def restriction_case(meta: WeilRestrictionMeta) -> int | None:
    """Which of the five no-low-genus cases for Weil restrictions applies."""
    p, q, tr = meta.p, meta.q, meta.trE
    q_square = meta.n % 2 == 0
    if tr == 2 * q - 1:
        return 1
    if p > 2 and tr == 2 * q - 2:
        return 2
    if (p % 12 == 11 or p == 3) and q_square and tr == q:
        return 3
    if p == 2 and not q_square and tr == q:
        return 4
    if q in (2, 3) and tr == 2 * q:
        return 5
    return None


def deuring_trace_exists(p: int, q2: int, beta: int) -> bool:
    """Whether some elliptic curve over F_{q2} (q2 = q^2) has trace beta."""
    q = isqrt_floor(q2)
    if q * q != q2 or prime_power(q2)[0] != p:
        raise InvalidInput(f"{q2} is not an even power of {p}")
    if beta * beta <= 4 * q2 and math.gcd(beta, p) == 1:
        return True
    if abs(beta) == 2 * q:
        return True
    return abs(beta) == q and p % 3 != 1


class Simplicity(str, enum.Enum):
    SIMPLE = "Simple"
    NOT_SIMPLE = "NotSimple"
    UNDETERMINED = "Undetermined"


def _divisors(n: int) -> list[int]:
    fs = trial_factor(n)
    divs = {1}
    for f in fs:
        divs |= {d * f for d in divs}
    return sorted(divs)


def integer_roots(W: SurfaceWeilData) -> list[int]:
    qq = W.q * W.q
    return [s * d for d in _divisors(qq) for s in (1, -1) if W.evaluate(s * d) == 0]


def quadratic_factorizations(W: SurfaceWeilData) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All ((u, v), (w, z)) with f = (t^2 + u t + v)(t^2 + w t + z) over Z."""
    q, t1, t2 = W.q, W.t1, W.t2
    qq = q * q
    found = set()
    for d in _divisors(qq):
        for v in (d, -d):
            z = qq // v
            if v != z:
                num, den = t1 * (v - q), z - v
                if num % den:
                    continue
                u = num // den
                pairs = [(u, -t1 - u)]
            else:
                if v != q and t1 != 0:
                    continue
                disc = t1 * t1 - 4 * (t2 - 2 * v)
                if disc < 0 or isqrt_floor(disc) ** 2 != disc or (t1 + isqrt_floor(disc)) % 2:
                    continue
                s = isqrt_floor(disc)
                pairs = [((-t1 + s) // 2, (-t1 - s) // 2), ((-t1 - s) // 2, (-t1 + s) // 2)]
            for u, w in pairs:
                if v + z + u * w == t2 and u * z + w * v == -q * t1:
                    found.add(((u, v), (w, z)))
    return sorted(found)


def is_simple_sufficient(W: SurfaceWeilData) -> Simplicity:
    """Simple if f is irreducible over Q; NotSimple if f is a product of two
    elliptic Weil polynomials t^2 - s t + q with s^2 <= 4q; else Undetermined."""
    W.require_valid()
    facs = quadratic_factorizations(W)
    if not facs and not integer_roots(W):
        return Simplicity.SIMPLE
    q = W.q
    for (u, v), (w, z) in facs:
        if v == q and z == q and u * u <= 4 * q and w * w <= 4 * q:
            return Simplicity.NOT_SIMPLE
    return Simplicity.UNDETERMINED


@dataclass(frozen=True)
class ClassificationReport:
    weil: SurfaceWeilData
    valid: bool
    simplicity: Simplicity
    npp: bool
    ell_max: int
    rule: str
    case: int | None = None

    def grants(self, ell: int) -> bool:
        return 1 <= ell <= self.ell_max

    def to_json(self) -> dict:
        return {
            "q": self.weil.q,
            "t1": self.weil.t1,
            "t2": self.weil.t2,
            "valid": self.valid,
            "simple": self.simplicity.value,
            "npp": self.npp,
            "ell_max": self.ell_max,
            "rule": self.rule,
        }


def classify_no_low_genus(W: SurfaceWeilData, provenance: WeilRestrictionMeta | None = None) -> ClassificationReport:
    """Largest ell for which the surface provably has no absolutely irreducible
    curves of arithmetic genus <= ell, with the rule that justifies it."""
    W.require_valid()
    case = None
    if provenance is not None:
        if W != weil_restriction(provenance.q, provenance.trE):
            raise InvalidWeilData(f"{W} is not the Weil restriction datum of {provenance}")
        case = restriction_case(provenance)
    simplicity = is_simple_sufficient(W)
    npp = is_npp(W)
    if npp:
        ell_max, rule = 2, "npp"
    elif case is not None:
        ell_max, rule = 2, f"prop45-case-{case}"
    elif simplicity is Simplicity.SIMPLE:
        ell_max, rule = 1, "simple"
    else:
        ell_max, rule = 0, "none"
    return ClassificationReport(W, True, simplicity, npp, ell_max, rule, case)
