"""Exact arithmetic in Q(sqrt(a), sqrt(b)) for positive integers a, b.

A value is A + B*sqrt(a) + C*sqrt(b) + D*sqrt(a*b) with rational A..D.
Signs are decided exactly by squaring away one radical at a time, so
comparisons, floors and ceilings never touch floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import InvalidInput


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _sign1(A, B, a) -> int:
    """Sign of A + B*sqrt(a)."""
    sA, sB = _sgn(A), _sgn(B)
    if sB == 0:
        return sA
    if sA == 0 or sA == sB:
        return sB
    return sA * _sgn(A * A - B * B * a)


def _sqrt_approx(n: int, bits: int) -> Fraction:
    """floor(sqrt(n) * 2^bits) / 2^bits."""
    return Fraction(math.isqrt(n << (2 * bits)), 1 << bits)


def _square_part(n: int) -> tuple[int, int]:
    """n = s^2 * k with k squarefree; returns (s, k)."""
    s, k, d = 1, n, 2
    while d * d <= k:
        while k % (d * d) == 0:
            k //= d * d
            s *= d
        d += 1
    return s, k


class QuadExact:
    __slots__ = ("a", "b", "A", "B", "C", "D")

    def __init__(self, a: int, b: int, A=0, B=0, C=0, D=0):
        if a < 1 or b < 1:
            raise InvalidInput("radicands must be positive integers")
        self.a, self.b = a, b
        self.A, self.B, self.C, self.D = A, B, C, D

    @classmethod
    def sqrt_a(cls, a: int, b: int) -> "QuadExact":
        return cls(a, b, 0, 1, 0, 0)

    @classmethod
    def sqrt_b(cls, a: int, b: int) -> "QuadExact":
        return cls(a, b, 0, 0, 1, 0)

    @property
    def coefficients(self) -> tuple:
        return (self.A, self.B, self.C, self.D)

    def _lift(self, other) -> "QuadExact":
        if isinstance(other, QuadExact):
            if (other.a, other.b) != (self.a, self.b):
                raise InvalidInput("QuadExact values over different radicands")
            return other
        if isinstance(other, (int, Rational)):
            return QuadExact(self.a, self.b, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadExact(self.a, self.b, self.A + o.A, self.B + o.B, self.C + o.C, self.D + o.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadExact(self.a, self.b, -self.A, -self.B, -self.C, -self.D)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QuadExact(self.a, self.b, self.A - o.A, self.B - o.B, self.C - o.C, self.D - o.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, QuadExact):
            return QuadExact(self.a, self.b, self.A * other, self.B * other, self.C * other, self.D * other)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        a, b = self.a, self.b
        A1, B1, C1, D1 = self.A, self.B, self.C, self.D
        A2, B2, C2, D2 = o.A, o.B, o.C, o.D
        # sqrt(a)*sqrt(b) = sqrt(ab), sqrt(a)*sqrt(ab) = a sqrt(b), sqrt(b)*sqrt(ab) = b sqrt(a)
        A = A1 * A2 + a * B1 * B2 + b * C1 * C2 + a * b * D1 * D2
        B = A1 * B2 + B1 * A2 + b * (C1 * D2 + D1 * C2)
        C = A1 * C2 + C1 * A2 + a * (B1 * D2 + D1 * B2)
        D = A1 * D2 + D1 * A2 + B1 * C2 + C1 * B2
        return QuadExact(a, b, A, B, C, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, QuadExact):
            f = Fraction(1) / Fraction(other)
            return self * f
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            return NotImplemented
        out = QuadExact(self.a, self.b, 1)
        for _ in range(e):
            out = out * self
        return out

    def sign(self) -> int:
        A, B, C, D, a, b = self.A, self.B, self.C, self.D, self.a, self.b
        # value = P + Q sqrt(b), with P = A + B sqrt(a), Q = C + D sqrt(a)
        sP, sQ = _sign1(A, B, a), _sign1(C, D, a)
        if sQ == 0:
            return sP
        if sP == 0 or sP == sQ:
            return sQ
        rat = A * A + a * B * B - b * (C * C + a * D * D)
        irr = 2 * A * B - 2 * b * C * D
        return sP * _sign1(rat, irr, a)

    def _cmp(self, other) -> int:
        o = self._lift(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QuadExact with {type(other).__name__}")
        return (self - o).sign()

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, InvalidInput):
            return NotImplemented

    def __hash__(self):
        rational, radicals = self.canonical()
        if not radicals:
            return hash(rational)
        return hash((rational, tuple(sorted(radicals.items()))))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def approx(self, bits: int = 64) -> Fraction:
        """A rational within roughly 2^-bits * (|B|+|C|+|D|) of the value."""
        ra = _sqrt_approx(self.a, bits)
        rb = _sqrt_approx(self.b, bits)
        rab = _sqrt_approx(self.a * self.b, bits)
        return Fraction(self.A) + self.B * ra + self.C * rb + self.D * rab

    def floor(self) -> int:
        # approx() errs by at most (|B| + |C| + |D|) 2^-bits; keep that below 1
        spread = abs(self.B) + abs(self.C) + abs(self.D)
        bits = 64 + math.ceil(spread).bit_length()
        n = math.floor(self.approx(bits))
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def ceil(self) -> int:
        return -((-self).floor())

    def canonical(self) -> tuple[Fraction, dict[int, Fraction]]:
        """(rational part, {squarefree radicand: coefficient}) with zero terms dropped."""
        rational = Fraction(self.A)
        radicals: dict[int, Fraction] = {}
        for coef, rad in ((self.B, self.a), (self.C, self.b), (self.D, self.a * self.b)):
            if coef == 0:
                continue
            out, core = _square_part(rad)
            if core == 1:
                rational += coef * out
            else:
                radicals[core] = radicals.get(core, 0) + coef * out
        return rational, {k: v for k, v in radicals.items() if v != 0}

    def is_rational(self) -> bool:
        return not self.canonical()[1]

    def decimal(self, digits: int = 6) -> str:
        """Exact truncation toward -inf to ``digits`` decimals."""
        scale = 10**digits
        n = (self * scale).floor()
        sign = "-" if n < 0 else ""
        whole, frac = divmod(abs(n), scale)
        return f"{sign}{whole}.{frac:0{digits}d}"

    def __float__(self):
        return float(self.approx(60))

    def __str__(self):
        rational, radicals = self.canonical()
        parts = [str(rational)] if rational != 0 or not radicals else []
        for rad in sorted(radicals):
            coef = radicals[rad]
            parts.append(f"sqrt({rad})" if coef == 1 else f"-sqrt({rad})" if coef == -1 else f"{coef}*sqrt({rad})")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def __repr__(self):
        return f"QuadExact({self})"
