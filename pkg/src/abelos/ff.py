"""Small finite fields F_{p^n} and the exact integer helpers used throughout.

Elements are plain Python ints: the element c0 + c1*t + ... + c_{n-1}*t^(n-1)
of F_p[t]/(modulus) is encoded as c0 + c1*p + ... + c_{n-1}*p^(n-1).  So
0..p-1 is the prime subfield, and for p = 2 addition is XOR.

The modulus of F_{p^n} is the lexicographically smallest monic irreducible
polynomial of degree n, where "lexicographically" means smallest integer
encoding of its non-leading coefficients.  This makes every serialized
element reproducible across runs.

Bulk work (point counting, codeword enumeration) goes through the ``v*``
methods, which act on numpy integer arrays using exp/log tables.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import CompositeP, InvalidInput, TooLarge, ZeroInput

FIELD_CAP = 1 << 20
FACTOR_CAP = 1 << 40
# exp/log tables are built lazily, and only for fields up to this size
TABLE_CAP = 1 << 16


def isqrt_floor(x: int) -> int:
    """Largest s with s*s <= x."""
    if x < 0:
        raise InvalidInput(f"isqrt_floor needs x >= 0, got {x}")
    return math.isqrt(x)


def isqrt_ceil(x: int) -> int:
    """Smallest s with s*s >= x."""
    s = isqrt_floor(x)
    return s if s * s == x else s + 1


def trial_factor(x: int) -> list[int]:
    """Prime factors of |x| with multiplicity, ascending."""
    if x == 0:
        raise ZeroInput("cannot factor 0")
    x = abs(x)
    if x > FACTOR_CAP:
        raise TooLarge(f"|x| = {x} exceeds the factorization cap 2^40")
    out = []
    while x % 2 == 0:
        out.append(2)
        x //= 2
    d = 3
    while d * d <= x:
        while x % d == 0:
            out.append(d)
            x //= d
        d += 2
    if x > 1:
        out.append(x)
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return trial_factor(n) == [n]


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p^n; raise if q is not a prime power."""
    if q < 2:
        raise InvalidInput(f"{q} is not a prime power")
    fs = trial_factor(q)
    if fs[0] != fs[-1]:
        raise InvalidInput(f"{q} is not a prime power")
    return fs[0], len(fs)


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except InvalidInput:
        return False
    return True


def prime_powers_up_to(bound: int) -> list[int]:
    return [q for q in range(2, bound + 1) if is_prime_power(q)]


@dataclass(frozen=True)
class PrimePower:
    p: int
    n: int

    @property
    def q(self) -> int:
        return self.p**self.n

    @classmethod
    def of(cls, q: int) -> "PrimePower":
        return cls(*prime_power(q))


# --- polynomials over F_p as coefficient lists, low degree first ---------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pmod(a, f, p):
    a = list(a)
    _trim(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, y in enumerate(f):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return a


def _psub(a, b, p):
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, y in enumerate(b):
        out[i] = (out[i] - y) % p
    return _trim(out)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _frobenius_iterate(f, p, times):
    """x^(p^times) mod f."""
    cur = [0, 1]
    for _ in range(times):
        result, base, e = [1], cur, p
        while e:
            if e & 1:
                result = _pmod(_pmul(result, base, p), f, p)
            base = _pmod(_pmul(base, base, p), f, p)
            e >>= 1
        cur = result
    return cur


def is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic f over F_p."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if _psub(_frobenius_iterate(f, p, n), [0, 1], p):
        return False
    for r in sorted(set(trial_factor(n))):
        g = _psub(_frobenius_iterate(f, p, n // r), [0, 1], p)
        if len(_pgcd(f, g, p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, n: int) -> tuple[int, ...]:
    if n == 1:
        return (0, 1)
    for code in range(p**n):
        low = []
        for _ in range(n):
            code, c = divmod(code, p)
            low.append(c)
        f = low + [1]
        if f[0] != 0 and is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# --- the field ----------------------------------------------------------------

class Field:
    """F_{p^n}. Construct through :func:`make_field`, which caches instances."""

    def __init__(self, p: int, n: int, modulus: tuple[int, ...]):
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = modulus
        self._mod_bits = sum(c << i for i, c in enumerate(modulus)) if p == 2 else None
        self._exp = None
        self._log = None
        self._root_table = None

    def __repr__(self):
        return f"GF({self.p})" if self.n == 1 else f"GF({self.p}^{self.n})"

    def __reduce__(self):
        return (make_field, (self.p, self.n))

    @property
    def prime_power(self) -> PrimePower:
        return PrimePower(self.p, self.n)

    @property
    def characteristic(self) -> int:
        return self.p

    def elements(self) -> range:
        return range(self.q)

    def coords(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n):
            a, c = divmod(a, self.p)
            out.append(c)
        return tuple(out)

    def from_coords(self, coords) -> int:
        if len(coords) > self.n:
            raise InvalidInput(f"too many coordinates for {self}")
        return sum((c % self.p) * self.p**i for i, c in enumerate(coords))

    def const(self, k: int) -> int:
        """Image of the integer k under Z -> F_p."""
        return k % self.p

    def element(self, value) -> int:
        """Coerce an int encoding, a FieldElement or a 'c0+c1*t+...' string."""
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise InvalidInput(f"{value!r} does not belong to {self}")
            return value.value
        if isinstance(value, str):
            return self.parse(value)
        value = int(value)
        if 0 <= value < self.q:
            return value
        if self.n == 1:
            return value % self.p
        raise InvalidInput(f"{value} is not an element encoding of {self}")

    def __call__(self, value) -> "FieldElement":
        return FieldElement(self, self.element(value))

    # scalar arithmetic

    def add(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_coords([x + y for x, y in zip(self.coords(a), self.coords(b))])

    def neg(self, a: int) -> int:
        if self.n == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self.from_coords([-x for x in self.coords(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_poly(self, a: int, b: int) -> int:
        if self.p == 2:
            r = 0
            while b:
                if b & 1:
                    r ^= a
                a <<= 1
                b >>= 1
            for i in range(r.bit_length() - 1, self.n - 1, -1):
                if (r >> i) & 1:
                    r ^= self._mod_bits << (i - self.n)
            return r
        prod = _pmul(list(self.coords(a)), list(self.coords(b)), self.p)
        return self.from_coords(_pmod(prod, list(self.modulus), self.p))

    def mul(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self.q <= TABLE_CAP:
            self._ensure_tables()
            return int(self._exp[self._log[a] + self._log[b]])
        return self._mul_poly(a, b)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if self.n == 1:
            return pow(a, e, self.p)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        if self.n == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def is_square(self, a: int) -> bool:
        if a == 0 or self.p == 2:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def trace(self, a: int) -> int:
        """Absolute trace F_q -> F_p."""
        s, x = 0, a
        for _ in range(self.n):
            s = self.add(s, x)
            x = self.pow(x, self.p)
        return s

    def poly_eval(self, coeffs, x: int) -> int:
        """Horner evaluation; coeffs low degree first."""
        acc = 0
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c)
        return acc

    # serialization

    def format(self, a: int) -> str:
        if self.n == 1:
            return str(a)
        parts = []
        for i, c in enumerate(self.coords(a)):
            parts.append(str(c) if i == 0 else f"{c}*t" if i == 1 else f"{c}*t^{i}")
        return "+".join(parts)

    _TERM = re.compile(r"^(-?\d+)(?:\*?t(?:\^(\d+))?)?$")

    def parse(self, s: str) -> int:
        coords = [0] * self.n
        text = s.replace(" ", "").replace("-", "+-")
        for term in filter(None, text.split("+")):
            if term in ("t", "-t"):
                term = term.replace("t", "1*t")
            elif term.startswith("t^") or term.startswith("-t^"):
                term = term.replace("t", "1*t", 1)
            m = self._TERM.match(term)
            if not m:
                raise InvalidInput(f"cannot parse field element {s!r}")
            coef = int(m.group(1))
            if "t" in term:
                deg = int(m.group(2)) if m.group(2) else 1
            else:
                deg = 0
            if deg >= self.n:
                raise InvalidInput(f"degree {deg} too large in {s!r} for {self}")
            coords[deg] += coef
        return self.from_coords(coords)

    # tables and vectorized arithmetic

    def _ensure_tables(self):
        if self._exp is not None:
            return
        if self.q > TABLE_CAP:
            raise TooLarge(f"{self} is too large for exp/log tables")
        order = self.q - 1
        primes = sorted(set(trial_factor(order))) if order > 1 else []
        mul = (lambda a, b: a * b % self.p) if self.n == 1 else self._mul_poly

        def power(a, e):
            r = 1
            while e:
                if e & 1:
                    r = mul(r, a)
                a = mul(a, a)
                e >>= 1
            return r

        gen = 1
        for g in range(2 if self.q > 2 else 1, self.q):
            if all(power(g, order // r) != 1 for r in primes):
                gen = g
                break
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            log[x] = i
            x = mul(x, gen)
        exp[order:] = exp[:order]
        self._exp, self._log = exp, log

    def vadd(self, a: np.ndarray, b) -> np.ndarray:
        if self.n == 1:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pw = 1
        for _ in range(self.n):
            out += ((a // pw + b // pw) % self.p) * pw
            pw *= self.p
        return out

    def vneg(self, a: np.ndarray) -> np.ndarray:
        if self.n == 1:
            return (-a) % self.p
        if self.p == 2:
            return a.copy()
        out = np.zeros_like(a)
        pw = 1
        for _ in range(self.n):
            out += ((-(a // pw)) % self.p) * pw
            pw *= self.p
        return out

    def vmul(self, a: np.ndarray, b) -> np.ndarray:
        if self.n == 1:
            return (a * b) % self.p
        self._ensure_tables()
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpoly_eval(self, coeffs, xs: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(xs)
        for c in reversed(coeffs):
            acc = self.vadd(self.vmul(acc, xs), c)
        return acc

    def root_count_table(self) -> np.ndarray:
        """table[h, c] = #{y : y^2 + h*y = c}, for bulk counting."""
        if self._root_table is None:
            if self.q > 1 << 10:
                raise TooLarge(f"{self} is too large for a root-count table")
            t = np.zeros((self.q, self.q), dtype=np.int64)
            for h in range(self.q):
                for c in range(self.q):
                    t[h, c] = count_quadratic_roots(self, h, c)
            self._root_table = t
        return self._root_table

    def vcount_quadratic_roots(self, h: np.ndarray, c: np.ndarray) -> np.ndarray:
        """Elementwise count_quadratic_roots over arrays h, c."""
        if self.q <= 1 << 8:
            return self.root_count_table()[h, c]
        self._ensure_tables()
        if self.p == 2:
            mask = 0
            for i in range(self.n):
                if self.trace(self.p**i):
                    mask |= 1 << i
            h2 = self.vmul(h, h)
            inv_h2 = np.where(h2 == 0, 0, self._exp[(-self._log[h2]) % (self.q - 1)])
            z = self.vmul(c, inv_h2) & mask
            parity = np.zeros_like(z)
            for i in range(self.n):
                parity ^= (z >> i) & 1
            return np.where(h == 0, 1, np.where(parity == 0, 2, 0))
        disc = self.vadd(self.vmul(h, h), self.vmul(c, 4 % self.p))
        square = (self._log[disc] % 2) == 0
        return np.where(disc == 0, 1, np.where(square, 2, 0))


@functools.lru_cache(maxsize=None)
def make_field(p: int, n: int = 1) -> Field:
    """F_{p^n} with the smallest monic irreducible modulus."""
    if n < 1:
        raise InvalidInput(f"exponent must be positive, got {n}")
    if p < 2 or p > FIELD_CAP or not is_prime(p):
        raise CompositeP(f"{p} is not prime")
    if p**n > FIELD_CAP:
        raise TooLarge(f"{p}^{n} exceeds the field cap 2^20")
    return Field(p, n, smallest_irreducible(p, n))


def field_of_order(q: int) -> Field:
    return make_field(*prime_power(q))


@functools.lru_cache(maxsize=None)
def _embedding(p: int, n_small: int, n_big: int) -> tuple[int, ...]:
    small, big = make_field(p, n_small), make_field(p, n_big)
    if n_small == 1:
        return tuple(range(p))
    root = next(x for x in big.elements() if big.poly_eval(small.modulus, x) == 0)
    powers = [1]
    for _ in range(n_small - 1):
        powers.append(big.mul(powers[-1], root))
    out = []
    for a in small.elements():
        acc = 0
        for c, pw in zip(small.coords(a), powers):
            acc = big.add(acc, big.mul(c, pw))
        out.append(acc)
    return tuple(out)


def embed(small: Field, big: Field) -> tuple[int, ...]:
    """Field embedding small -> big as a lookup table indexed by element.

    The image of t is the smallest root of small's modulus inside big.
    """
    if small.p != big.p or big.n % small.n:
        raise InvalidInput(f"{small} does not embed in {big}")
    return _embedding(small.p, small.n, big.n)


def count_quadratic_roots(field: Field, h, c) -> int:
    """Number of y in F_q with y^2 + h*y = c."""
    h, c = field.element(h), field.element(c)
    if field.p == 2:
        if h == 0:
            return 1  # squaring is a bijection
        z = field.div(c, field.mul(h, h))
        return 2 if field.trace(z) == 0 else 0
    disc = field.add(field.mul(h, h), field.mul(field.const(4), c))
    if disc == 0:
        return 1
    return 2 if field.is_square(disc) else 0


@dataclass(frozen=True, eq=True)
class FieldElement:
    """Convenience wrapper pairing an int encoding with its field."""

    field: Field
    value: int

    def _coerce(self, other) -> int:
        return self.field.element(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._coerce(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._coerce(other)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.element(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.n, self.value))

    def __repr__(self):
        return self.field.format(self.value)
