"""Elliptic and genus-2 curve models over small finite fields, with exact
point counts over F_q and its extensions.

Both models are written y^2 + h(x) y = f(x).  For an elliptic curve in long
Weierstrass form h = a1 x + a3 and f = x^3 + a2 x^2 + a4 x + a6.  Counts are
exhaustive: every x in the field contributes ``count_quadratic_roots(h(x), f(x))``
affine points, and the points at infinity come from the chart at infinity of
the smooth model.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import CapExceeded, InconsistentCounts, InvalidInput, SingularCurve
from .ff import TABLE_CAP, Field, count_quadratic_roots, embed, make_field
from .isogeny import SurfaceWeilData, is_weil_surface

EXHAUSTIVE_CAP = 1 << 24
CROSS_CHECK_CAP = 1 << 16


# --- polynomials over F_q (int-encoded coefficient lists, low degree first) ---

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(F: Field, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def _padd(F: Field, a, b):
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, y in enumerate(b):
        out[i] = F.add(out[i], y)
    return _trim(out)


def _pscale(F: Field, a, c):
    return _trim([F.mul(x, c) for x in a])


def _pderiv(F: Field, a):
    return _trim([F.mul(F.const(i), a[i]) for i in range(1, len(a))])


def _pmod(F: Field, a, b):
    a = _trim(a)
    inv_lead = F.inv(b[-1])
    while len(a) >= len(b):
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - len(b)
        for i, y in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, y))
        a = _trim(a)
    return a


def _pgcd(F: Field, a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pmod(F, a, b)
    return a


def _coeff(poly, i):
    return poly[i] if i < len(poly) else 0


def _affine_count(F: Field, h, f) -> int:
    """#{(x, y) in F^2 : y^2 + h(x) y = f(x)}."""
    if F.q <= TABLE_CAP:
        xs = np.arange(F.q, dtype=np.int64)
        hv = F.vpoly_eval(h, xs)
        fv = F.vpoly_eval(f, xs)
        return int(F.vcount_quadratic_roots(hv, fv).sum())
    return sum(count_quadratic_roots(F, F.poly_eval(h, x), F.poly_eval(f, x)) for x in F.elements())


def _affine_points(F: Field, h, f) -> list[tuple[int, int]]:
    ys = np.arange(F.q, dtype=np.int64)
    lhs_sq = F.vmul(ys, ys)
    pts = []
    for x in F.elements():
        hx, fx = F.poly_eval(h, x), F.poly_eval(f, x)
        lhs = F.vadd(lhs_sq, F.vmul(ys, hx))
        pts.extend((x, int(y)) for y in ys[lhs == fx])
    return pts


def _check_cap(q: int, d: int) -> None:
    if q**d > EXHAUSTIVE_CAP:
        raise CapExceeded(f"exhaustive count over F_{q}^{d} exceeds 2^24 elements")


# --- elliptic curves -------------------------------------------------------------

@dataclass(frozen=True)
class EllipticCurveModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over ``field``."""

    field: Field
    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    a6: int = 0

    def __post_init__(self):
        F = self.field
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, F.element(getattr(self, name)))
        if self.discriminant == 0:
            raise SingularCurve(f"{self} is singular")

    @classmethod
    def from_coeffs(cls, field: Field, coeffs) -> "EllipticCurveModel":
        """Five long-Weierstrass coefficients, or two (a4, a6) for short form."""
        coeffs = list(coeffs)
        if len(coeffs) == 2:
            return cls(field, 0, 0, 0, coeffs[0], coeffs[1])
        if len(coeffs) != 5:
            raise InvalidInput("expected [a1, a2, a3, a4, a6] or [a4, a6]")
        return cls(field, *coeffs)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def q(self) -> int:
        return self.field.q

    def b_invariants(self):
        F, c = self.field, self.field.const
        a1, a2, a3, a4, a6 = self.coeffs
        mul, add, sub = F.mul, F.add, F.sub
        b2 = add(mul(a1, a1), mul(c(4), a2))
        b4 = add(mul(c(2), a4), mul(a1, a3))
        b6 = add(mul(a3, a3), mul(c(4), a6))
        b8 = sub(
            add(add(mul(mul(a1, a1), a6), mul(c(4), mul(a2, a6))), mul(a2, mul(a3, a3))),
            add(mul(a1, mul(a3, a4)), mul(a4, a4)),
        )
        return b2, b4, b6, b8

    @property
    def discriminant(self) -> int:
        F, c = self.field, self.field.const
        b2, b4, b6, b8 = self.b_invariants()
        mul = F.mul
        terms = [
            F.neg(mul(mul(b2, b2), b8)),
            F.neg(mul(c(8), mul(b4, mul(b4, b4)))),
            F.neg(mul(c(27), mul(b6, b6))),
            mul(c(9), mul(b2, mul(b4, b6))),
        ]
        acc = 0
        for t in terms:
            acc = F.add(acc, t)
        return acc

    @property
    def h_poly(self):
        return [self.a3, self.a1]

    @property
    def f_poly(self):
        return [self.a6, self.a4, self.a2, 1]

    def base_extend(self, d: int) -> "EllipticCurveModel":
        if d == 1:
            return self
        F = self.field
        big = make_field(F.p, F.n * d)
        table = embed(F, big)
        return EllipticCurveModel(big, *(table[a] for a in self.coeffs))

    def affine_points(self) -> list[tuple[int, int]]:
        return _affine_points(self.field, self.h_poly, self.f_poly)

    def to_json(self) -> dict:
        return {"p": self.field.p, "n": self.field.n, "model": "weierstrass", "a": list(self.coeffs)}

    def __repr__(self):
        fmt = self.field.format
        return f"E[{', '.join(fmt(a) for a in self.coeffs)}]/{self.field!r}"


def all_elliptic_curves(field: Field):
    """Every nonsingular long-Weierstrass model over ``field`` (q^5 tuples)."""
    for coeffs in itertools.product(field.elements(), repeat=5):
        try:
            yield EllipticCurveModel(field, *coeffs)
        except SingularCurve:
            continue


def _power_sums(t: int, q: int, d: int) -> int:
    """s_d for Frobenius roots of x^2 - t x + q."""
    s_prev, s = 2, t
    for _ in range(d - 1):
        s_prev, s = s, t * s - q * s_prev
    return s


def count_points_elliptic(E: EllipticCurveModel, d: int = 1, mode: str = "auto") -> int:
    """#E(F_{q^d}).

    ``mode`` is ``exhaustive`` (loop over F_{q^d}), ``recurrence`` (count over
    F_q then lift by power sums), ``check`` (both, must agree; only allowed when
    q^d <= 2^16), or ``auto`` (exhaustive for d = 1, recurrence above).
    """
    if d < 1:
        raise InvalidInput("extension degree must be >= 1")
    q = E.q
    if mode == "auto":
        mode = "exhaustive" if d == 1 else "recurrence"
    if mode == "exhaustive":
        _check_cap(q, d)
        big = E.base_extend(d)
        return 1 + _affine_count(big.field, big.h_poly, big.f_poly)
    if mode == "recurrence":
        t = q + 1 - count_points_elliptic(E, 1, "exhaustive")
        return q**d + 1 - _power_sums(t, q, d)
    if mode == "check":
        if q**d > CROSS_CHECK_CAP:
            raise CapExceeded("cross-check mode is limited to q^d <= 2^16")
        a = count_points_elliptic(E, d, "exhaustive")
        b = count_points_elliptic(E, d, "recurrence")
        if a != b:
            raise InconsistentCounts(f"exhaustive {a} != recurrence {b} for {E} over degree {d}")
        return a
    raise InvalidInput(f"unknown counting mode {mode!r}")


def elliptic_trace(E: EllipticCurveModel) -> int:
    return E.q + 1 - count_points_elliptic(E, 1)


def quadratic_twist(E: EllipticCurveModel, D) -> EllipticCurveModel:
    """Twist by D (odd characteristic): y^2 = x^3 + D A2 x^2 + D^2 A4 x + D^3 A6."""
    F = E.field
    if F.p == 2:
        raise InvalidInput("quadratic_twist is implemented for odd characteristic only")
    D = F.element(D)
    if D == 0:
        raise InvalidInput("twist parameter must be nonzero")
    b2, b4, b6, _ = E.b_invariants()
    A2 = F.div(b2, F.const(4))
    A4 = F.div(b4, F.const(2))
    A6 = F.div(b6, F.const(4))
    D2 = F.mul(D, D)
    return EllipticCurveModel(F, 0, F.mul(D, A2), 0, F.mul(D2, A4), F.mul(F.mul(D2, D), A6))


# --- genus 2 -----------------------------------------------------------------------

@dataclass(frozen=True)
class Genus2CurveModel:
    """y^2 + h(x) y = f(x) with deg h <= 3 and deg f <= 6, smooth of genus 2."""

    field: Field
    f: tuple
    h: tuple = ()

    def __post_init__(self):
        F = self.field
        f = tuple(_trim([F.element(c) for c in self.f]))
        h = tuple(_trim([F.element(c) for c in self.h]))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "h", h)
        if len(f) > 7 or len(h) > 4:
            raise InvalidInput("genus-2 model needs deg f <= 6 and deg h <= 3")
        if max(len(f) - 1, 2 * (len(h) - 1)) not in (5, 6):
            raise InvalidInput("genus-2 model needs max(deg f, 2 deg h) in {5, 6}")
        self._check_smooth()

    def _check_smooth(self):
        F, f, h = self.field, list(self.f), list(self.h)
        if F.p == 2:
            if not h:
                raise SingularCurve("y^2 = f(x) is never smooth in characteristic 2")
            dh, df = _pderiv(F, h), _pderiv(F, f)
            crit = _padd(F, _pmul(F, _pmul(F, dh, dh), f), _pmul(F, df, df))
            if len(_pgcd(F, h, crit)) != 1:
                raise SingularCurve(f"{self} has an affine singular point")
            h3, h2, f6, f5 = _coeff(h, 3), _coeff(h, 2), _coeff(f, 6), _coeff(f, 5)
            if h3 == 0 and F.mul(F.mul(h2, h2), f6) == F.mul(f5, f5):
                raise SingularCurve(f"{self} is singular at infinity")
            return
        g = _padd(F, _pmul(F, h, h), _pscale(F, f, F.const(4)))
        if len(g) - 1 not in (5, 6):
            raise SingularCurve(f"{self}: h^2 + 4f must have degree 5 or 6")
        if len(_pgcd(F, g, _pderiv(F, g))) != 1:
            raise SingularCurve(f"{self}: h^2 + 4f has a repeated root")

    @property
    def q(self) -> int:
        return self.field.q

    def base_extend(self, d: int) -> "Genus2CurveModel":
        if d == 1:
            return self
        F = self.field
        big = make_field(F.p, F.n * d)
        table = embed(F, big)
        return Genus2CurveModel(big, tuple(table[c] for c in self.f), tuple(table[c] for c in self.h))

    def points_at_infinity(self) -> int:
        return count_quadratic_roots(self.field, _coeff(self.h, 3), _coeff(self.f, 6))

    def to_json(self) -> dict:
        return {"p": self.field.p, "n": self.field.n, "model": "genus2", "f": list(self.f), "h": list(self.h)}

    def __repr__(self):
        return f"C[f={list(self.f)}, h={list(self.h)}]/{self.field!r}"


def count_points_genus2(C: Genus2CurveModel, d: int = 1) -> int:
    """#C(F_{q^d}) on the smooth projective model, by exhaustive enumeration."""
    if d < 1:
        raise InvalidInput("extension degree must be >= 1")
    _check_cap(C.q, d)
    big = C.base_extend(d)
    return _affine_count(big.field, list(big.h), list(big.f)) + big.points_at_infinity()


def weil_data_from_counts(q: int, N1: int, N2: int) -> SurfaceWeilData:
    """Weil data (q, t1, t2) of Jac(C) from #C(F_q) and #C(F_{q^2})."""
    t1 = q + 1 - N1
    s2 = q * q + 1 - N2
    if (t1 * t1 - s2) % 2:
        raise InconsistentCounts(f"counts ({N1}, {N2}) over q={q} give a half-integral a2")
    t2 = (t1 * t1 - s2) // 2
    if not is_weil_surface(q, t1, t2):
        raise InconsistentCounts(f"counts ({N1}, {N2}) over q={q} give an invalid Weil polynomial")
    return SurfaceWeilData(q, t1, t2)


def jacobian_order(q: int, N1: int, N2: int) -> int:
    """#Jac(C)(F_q) = (N2 + N1^2)/2 - q."""
    return (N2 + N1 * N1) // 2 - q


@dataclass
class CurveCountReport:
    q: int
    genus: int
    counts: dict = dc_field(default_factory=dict)
    traces: dict = dc_field(default_factory=dict)
    zeta_numerator: list = dc_field(default_factory=list)
    weil: SurfaceWeilData | None = None
    jacobian_order: int | None = None

    @property
    def weil_bound_ok(self) -> bool:
        g = self.genus
        return all((self.q**d + 1 - N) ** 2 <= 4 * g * g * self.q**d for d, N in self.counts.items())

    def to_json(self) -> dict:
        out = {
            "q": self.q,
            "genus": self.genus,
            "counts": {str(d): n for d, n in sorted(self.counts.items())},
            "traces": {str(d): t for d, t in sorted(self.traces.items())},
            "zeta_numerator": self.zeta_numerator,
            "weil_bound_ok": self.weil_bound_ok,
        }
        if self.weil is not None:
            out["weil"] = {"q": self.weil.q, "t1": self.weil.t1, "t2": self.weil.t2}
            out["jacobian_order"] = self.jacobian_order
        return out


def count_report(curve, degrees=(1, 2)) -> CurveCountReport:
    """Counts, traces and zeta numerator (coefficients low degree first)."""
    q = curve.q
    if isinstance(curve, EllipticCurveModel):
        rep = CurveCountReport(q, 1)
        for d in degrees:
            rep.counts[d] = count_points_elliptic(curve, d)
            rep.traces[d] = q**d + 1 - rep.counts[d]
        t = q + 1 - count_points_elliptic(curve, 1)
        rep.zeta_numerator = [1, -t, q]
        return rep
    rep = CurveCountReport(q, 2)
    for d in sorted(set(degrees) | {1, 2}):
        rep.counts[d] = count_points_genus2(curve, d)
        rep.traces[d] = q**d + 1 - rep.counts[d]
    W = weil_data_from_counts(q, rep.counts[1], rep.counts[2])
    rep.weil = W
    rep.jacobian_order = jacobian_order(q, rep.counts[1], rep.counts[2])
    rep.zeta_numerator = [1, -W.t1, W.t2, -q * W.t1, q * q]
    return rep


def parse_curve(desc) -> EllipticCurveModel | Genus2CurveModel:
    """Build a curve from its JSON description (dict or JSON text)."""
    if isinstance(desc, str):
        desc = json.loads(desc)
    try:
        F = make_field(int(desc["p"]), int(desc.get("n", 1)))
        model = desc.get("model", "weierstrass")
        if model == "weierstrass":
            return EllipticCurveModel.from_coeffs(F, [F.element(a) for a in desc["a"]])
        if model == "genus2":
            return Genus2CurveModel(F, tuple(desc["f"]), tuple(desc.get("h", ())))
    except KeyError as exc:
        raise InvalidInput(f"curve description is missing {exc}") from None
    raise InvalidInput(f"unknown curve model {model!r}")
