"""Explicit evaluation codes on a product of elliptic curves E1 x E2.

The divisor is rH with H = E1 x {O2} + {O1} x E2, so L(rH) = L(rO1) (x) L(rO2)
has the r^2 products of monomials x^i y^j (2i + 3j <= r) as a basis.  The
punctured code evaluates at every pair of affine points; the full code also
evaluates on the support of H after trivializing by t^r, t = x/y the
uniformizer at O.

Exact minimum distances come from enumerating all q^k messages, which is the
ground truth the bounds are checked against.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundInput, bound_general, code_dimension, zero_count_cap
from .curves import EllipticCurveModel, count_points_elliptic
from .errors import BoundViolation, EnumerationCapExceeded, InvalidInput, PointCapExceeded
from .ff import Field

DEFAULT_MAX_ENUM = 10**7
POINT_CAP = 1 << 16
INNER_ROWS = 1 << 15

PUNCTURED = "punctured"
FULL = "full"
INFINITY = "O"


def max_enum() -> int:
    raw = os.environ.get("ABELOS_MAX_ENUM")
    return int(raw) if raw else DEFAULT_MAX_ENUM


# --- Riemann-Roch basis and expansions at O ------------------------------------

@dataclass(frozen=True)
class RRBasisElliptic:
    curve: EllipticCurveModel
    r: int
    monomials: tuple[tuple[int, int], ...]  # (i, j) for x^i y^j, by increasing pole order

    @property
    def pole_orders(self) -> tuple[int, ...]:
        return tuple(2 * i + 3 * j for i, j in self.monomials)

    def labels(self) -> list[str]:
        out = []
        for i, j in self.monomials:
            parts = ([f"x^{i}" if i > 1 else "x"] if i else []) + (["y"] if j else [])
            out.append("*".join(parts) or "1")
        return out


def rr_basis_elliptic(E: EllipticCurveModel, r: int) -> RRBasisElliptic:
    if r < 1:
        raise InvalidInput(f"r = {r} must be >= 1")
    mons = [(i, j) for j in (0, 1) for i in range(r // 2 + 1) if 2 * i + 3 * j <= r]
    mons.sort(key=lambda m: 2 * m[0] + 3 * m[1])
    return RRBasisElliptic(E, r, tuple(mons))


def _series_mul(F: Field, a, b, prec: int):
    out = [0] * prec
    for i, ai in enumerate(a[:prec]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: prec - i]):
            if bj:
                out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return out


def _series_inv(F: Field, a, prec: int):
    if a[0] == 0:
        raise InvalidInput("series with zero constant term is not invertible")
    inv0 = F.inv(a[0])
    out = [inv0] + [0] * (prec - 1)
    for n in range(1, prec):
        acc = 0
        for k in range(1, n + 1):
            if k < len(a) and a[k]:
                acc = F.add(acc, F.mul(a[k], out[n - k]))
        out[n] = F.neg(F.mul(acc, inv0))
    return out


def expansion_at_infinity(E: EllipticCurveModel, prec: int):
    """u = w / t^3 to ``prec`` terms, where w = 1/y and t = x/y.

    w solves w = t^3 + a2 t^2 w + a4 t w^2 + a6 w^3 - a1 t w - a3 w^2, so
    x = t^-2 / u and y = t^-3 / u.
    """
    F = E.field
    a1, a2, a3, a4, a6 = E.coeffs
    P = prec + 3
    w = [0] * P
    for _ in range(P):
        w2 = _series_mul(F, w, w, P)
        w3 = _series_mul(F, w2, w, P)
        new = [0] * P
        new[3] = 1

        def acc(series, shift, c):
            if c == 0:
                return
            for i in range(P - shift):
                if series[i]:
                    new[i + shift] = F.add(new[i + shift], F.mul(c, series[i]))

        acc(w, 2, a2)
        acc(w2, 1, a4)
        acc(w3, 0, a6)
        acc(w, 1, F.neg(a1))
        acc(w2, 0, F.neg(a3))
        if new == w:
            break
        w = new
    return w[3 : 3 + prec]


def laurent_leading_coeff(E: EllipticCurveModel, monomial: tuple[int, int], r: int) -> int:
    """Coefficient of t^0 in t^r x^i y^j at O (0 when the pole order is below r)."""
    i, j = monomial
    order = 2 * i + 3 * j
    if order > r:
        raise InvalidInput(f"x^{i} y^{j} has pole order {order} > r = {r}")
    F = E.field
    prec = r + 1
    u_inv = _series_inv(F, expansion_at_infinity(E, prec), prec)
    # t^r x^i y^j = t^(r - order) * u^-(i+j)
    series = [1] + [0] * (prec - 1)
    for _ in range(i + j):
        series = _series_mul(F, series, u_inv, prec)
    shift = r - order
    return series[0] if shift == 0 else 0


def _basis_values(basis: RRBasisElliptic, points, with_infinity: bool) -> np.ndarray:
    F = basis.curve.field
    cols = []
    for x, y in points:
        cols.append([F.mul(F.pow(x, i), F.pow(y, j)) for i, j in basis.monomials])
    if with_infinity:
        cols.append([laurent_leading_coeff(basis.curve, m, basis.r) for m in basis.monomials])
    return np.array(cols, dtype=np.int64).T.reshape(len(basis.monomials), len(cols))


# --- codes -----------------------------------------------------------------------

@dataclass
class ProductSurfaceCode:
    E1: EllipticCurveModel
    E2: EllipticCurveModel
    r: int
    mode: str
    points: list
    generator: np.ndarray  # k x n over F_q, rows g_a (x) h_b
    row_labels: list = field(default_factory=list)

    H2 = 2

    @property
    def field(self) -> Field:
        return self.E1.field

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def num_rows(self) -> int:
        return self.generator.shape[0]

    @property
    def surface_points(self) -> int:
        return count_points_elliptic(self.E1) * count_points_elliptic(self.E2)

    @property
    def trace(self) -> int:
        return (self.q + 1 - count_points_elliptic(self.E1)) + (self.q + 1 - count_points_elliptic(self.E2))

    def permuted(self, seed: int) -> "ProductSurfaceCode":
        perm = np.random.default_rng(seed).permutation(self.n)
        return ProductSurfaceCode(
            self.E1, self.E2, self.r, self.mode, [self.points[i] for i in perm], self.generator[:, perm], self.row_labels
        )

    def format_generator(self) -> str:
        fmt = self.field.format
        return "\n".join(" ".join(fmt(int(v)) for v in row) for row in self.generator)


def build_code(E1: EllipticCurveModel, E2: EllipticCurveModel, r: int, mode: str = PUNCTURED) -> ProductSurfaceCode:
    if E1.field is not E2.field:
        raise InvalidInput("both curves must be defined over the same field")
    if r < 3:
        raise InvalidInput(f"r = {r} < 3 is not known to make rH very ample")
    mode = mode.lower()
    if mode not in (PUNCTURED, FULL):
        raise InvalidInput(f"unknown mode {mode!r}")
    F = E1.field
    full = mode == FULL
    pts1, pts2 = E1.affine_points(), E2.affine_points()
    n = (len(pts1) + full) * (len(pts2) + full)
    if n > POINT_CAP:
        raise PointCapExceeded(f"{n} evaluation points exceed the cap {POINT_CAP}")
    b1, b2 = rr_basis_elliptic(E1, r), rr_basis_elliptic(E2, r)
    v1 = _basis_values(b1, pts1, full)  # r x n1
    v2 = _basis_values(b2, pts2, full)
    labels1, labels2 = b1.labels(), b2.labels()
    names1 = list(pts1) + ([INFINITY] if full else [])
    names2 = list(pts2) + ([INFINITY] if full else [])
    points = [(P1, P2) for P1 in names1 for P2 in names2]
    rows, row_labels = [], []
    for a in range(v1.shape[0]):
        for b in range(v2.shape[0]):
            rows.append(F.vmul(v1[a][:, None], v2[b][None, :]).reshape(-1))
            row_labels.append(f"{labels1[a]}(x){labels2[b]}")
    G = np.array(rows, dtype=np.int64).reshape(len(rows), n)
    return ProductSurfaceCode(E1, E2, r, mode, points, G, row_labels)


def rank(F: Field, M: np.ndarray) -> int:
    """Row rank over F_q by Gaussian elimination."""
    A = [list(map(int, row)) for row in M]
    rows, cols = len(A), (len(A[0]) if A else 0)
    rk = 0
    for c in range(cols):
        piv = next((i for i in range(rk, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[rk], A[piv] = A[piv], A[rk]
        inv = F.inv(A[rk][c])
        A[rk] = [F.mul(inv, v) for v in A[rk]]
        for i in range(rows):
            if i != rk and A[i][c]:
                f = A[i][c]
                A[i] = [F.sub(v, F.mul(f, w)) for v, w in zip(A[i], A[rk])]
        rk += 1
        if rk == rows:
            break
    return rk


def _span_table(F: Field, rows: np.ndarray) -> np.ndarray:
    """All F_q-combinations of ``rows``; row index = sum c_i q^(s-1-i) for coefficients c_i."""
    n = rows.shape[1] if rows.ndim == 2 else 0
    table = np.zeros((1, n), dtype=np.int64)
    for g in rows:
        scaled = [F.vmul(np.full(n, c, dtype=np.int64), g) for c in range(F.q)]
        table = np.concatenate([F.vadd(table, s[None, :]) for s in scaled], axis=0)
    return table


@dataclass
class CodeMeasurement:
    n: int
    num_rows: int
    rank: int
    exact: bool
    d: int | None = None
    max_nf: int | None = None
    histogram: dict = field(default_factory=dict)
    codewords: int = 0
    kernel_messages: int = 0
    injectivity_log: list = field(default_factory=list)

    @property
    def injective(self) -> bool:
        return self.rank == self.num_rows

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.rank,
            "exact": self.exact,
            "d_exact": self.d,
            "max_nf": self.max_nf,
            "codewords": self.codewords,
            "injective": self.injective,
            "injectivity_log": self.injectivity_log,
            "histogram": {str(w): c for w, c in sorted(self.histogram.items())},
        }


def measure(code: ProductSurfaceCode, exact: bool = True, cap: int | None = None) -> CodeMeasurement:
    """Rank, and with ``exact`` the minimum distance and max N(f) by enumerating
    every nonzero message.  N(f) counts zero coordinates of ev(f) for f != 0, so
    a nonzero f in the kernel has N(f) = n and is logged as an injectivity failure."""
    F, G = code.field, code.generator
    k, n = G.shape
    rk = rank(F, G)
    out = CodeMeasurement(n=n, num_rows=k, rank=rk, exact=False)
    if rk < k:
        out.injectivity_log.append(
            f"evaluation map not injective: rank {rk} < {k}; {F.q ** (k - rk) - 1} nonzero sections vanish at every point"
        )
    if not exact:
        return out
    cap = max_enum() if cap is None else cap
    total = F.q**k
    if total > cap:
        err = EnumerationCapExceeded(f"{total} messages exceed the enumeration cap {cap}")
        err.measurement = out
        raise err
    s = 0
    while s < k and F.q ** (s + 1) <= INNER_ROWS:
        s += 1
    inner = _span_table(F, G[k - s :])
    outer = _span_table(F, G[: k - s])
    hist = np.zeros(n + 1, dtype=np.int64)
    for idx, prefix in enumerate(outer):
        words = F.vadd(inner, prefix[None, :])
        weights = np.count_nonzero(words, axis=1)
        if idx == 0:
            weights = weights[1:]
        hist += np.bincount(weights, minlength=n + 1)
    out.exact = True
    out.codewords = int(hist.sum())
    out.kernel_messages = int(hist[0])
    out.histogram = {w: int(c) for w, c in enumerate(hist) if c}
    nonzero_weights = [w for w in out.histogram if w > 0]
    out.max_nf = n - min(out.histogram)
    out.d = min(nonzero_weights) if nonzero_weights else None
    if out.kernel_messages == 0:
        assert out.d == n - out.max_nf
    return out


@dataclass
class LabReport:
    n: int
    k: int
    d_exact: int | None
    max_nf: int | None
    bound_general: int
    code_bound: int
    nf_cap: int
    vacuous: bool
    checks: dict

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "d_exact": self.d_exact,
            "max_nf": self.max_nf,
            "bound_general": self.bound_general,
            "code_bound": self.code_bound,
            "nf_cap": self.nf_cap,
            "vacuous": self.vacuous,
            "checks": self.checks,
        }


def check_against_bounds(code: ProductSurfaceCode, meas: CodeMeasurement) -> LabReport:
    """Compare the measured code with the general bound; BoundViolation on any failure.

    The bound is stated for all #A points; for a punctured code the same
    zero-count cap gives d >= n - cap with n the punctured length.
    """
    inp = BoundInput(code.q, code.trace, code.surface_points, code.H2, code.r)
    general = bound_general(inp)
    cap = zero_count_cap(inp)
    code_bound = meas.n - cap
    checks = {}
    checks["dim"] = "ok" if meas.injective and meas.rank == code_dimension(code.r, code.H2) else "injectivity-failure"
    if meas.exact:
        if meas.max_nf > cap:
            raise BoundViolation(f"max N(f) = {meas.max_nf} exceeds the cap {cap} on {code.E1} x {code.E2}")
        checks["nf_cap"] = "ok"
        if code_bound > 0 and (meas.d is None or meas.d < code_bound or not meas.injective):
            raise BoundViolation(f"d = {meas.d} below n - cap = {code_bound} on {code.E1} x {code.E2}")
        checks["dist"] = "ok" if code_bound > 0 else "vacuous"
        if meas.injective and meas.d != meas.n - meas.max_nf:
            raise BoundViolation(f"d = {meas.d} != n - max N(f) = {meas.n - meas.max_nf}")
    else:
        checks["nf_cap"] = checks["dist"] = "not-measured"
    return LabReport(
        n=meas.n,
        k=meas.rank,
        d_exact=meas.d,
        max_nf=meas.max_nf,
        bound_general=general.d_lower,
        code_bound=code_bound,
        nf_cap=cap,
        vacuous=general.vacuous,
        checks=checks,
    )


def run_lab(E1: EllipticCurveModel, E2: EllipticCurveModel, r: int = 3, mode: str = PUNCTURED, exact: bool = True):
    code = build_code(E1, E2, r, mode)
    meas = measure(code, exact=exact)
    return code, meas, check_against_bounds(code, meas)


__all__ = [
    "RRBasisElliptic",
    "rr_basis_elliptic",
    "expansion_at_infinity",
    "laurent_leading_coeff",
    "ProductSurfaceCode",
    "build_code",
    "rank",
    "CodeMeasurement",
    "measure",
    "LabReport",
    "check_against_bounds",
    "run_lab",
]
