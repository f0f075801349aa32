"""Parameters of evaluation codes C(A, rH) on an abelian surface A over F_q.

Length n = #A(F_q), dimension k = r^2 H^2 / 2, and two lower bounds on the
minimum distance:

* the general bound, valid on every abelian surface,
  d >= #A - (r H^2 / e)(q + 1 - Tr + m) - r^2 m H^2 / 2;
* the genus-aware bound, valid when the surface has no absolutely
  irreducible curve of arithmetic genus <= ell,
  d >= #A - max(floor(R)(ell - 1), phi(1), phi(floor(R / sqrt(ell)))),
  with R = r sqrt(H^2/2) and phi the quadratic-in-alpha objective below.

Here m = floor(2 sqrt(q)).  Everything that reaches a reported bound is
computed with integers or :class:`QuadExact`.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

from .errors import InvalidInput, OddH2, OutsidePolygon, UnlicensedEll, WrongSpecialization
from .ff import is_prime, is_prime_power, isqrt_ceil, isqrt_floor
from .isogeny import ClassificationReport, SurfaceWeilData, point_count_surface
from .quadexact import QuadExact


class Theorem(str, enum.Enum):
    GENERAL = "General"
    SIMPLE = "Simple-ell"
    HALOUI = "Haloui"
    VACUOUS = "Vacuous"


class Objective(str, enum.Enum):
    THEOREM_PHI = "TheoremPhi"
    SHARPENED = "SharpenedEq13"


def weil_m(q: int) -> int:
    """floor(2 sqrt(q)), exactly."""
    return isqrt_floor(4 * q)


def _check_h2(H2: int) -> None:
    if H2 % 2:
        raise OddH2(f"H^2 = {H2} must be even on an abelian surface")
    if H2 < 2:
        raise InvalidInput(f"H^2 = {H2} must be >= 2 for an ample H")


def code_dimension(r: int, H2: int) -> int:
    """dim L(rH) = r^2 H^2 / 2."""
    if H2 % 2:
        raise OddH2(f"H^2 = {H2} must be even")
    return r * r * H2 // 2


def relevance_threshold(H2: int) -> int:
    """ceil(4 (sqrt(H^2) + 1)^2) = 4 H^2 + 4 + ceil(8 sqrt(H^2))."""
    _check_h2(H2)
    return 4 * H2 + 4 + isqrt_ceil(64 * H2)


@dataclass(frozen=True)
class BoundInput:
    q: int
    t1: int
    num_points: int
    H2: int
    r: int
    ell: int = 1
    galois_degree: int = 1
    license: ClassificationReport | None = None
    unsafe: bool = False

    def __post_init__(self):
        if not is_prime_power(self.q):
            raise InvalidInput(f"q = {self.q} is not a prime power")
        if self.t1 * self.t1 > 16 * self.q:
            raise InvalidInput(f"|Tr(A)| = {abs(self.t1)} exceeds 4 sqrt(q)")
        _check_h2(self.H2)
        if self.r < 3:
            raise InvalidInput(f"r = {self.r} < 3 is not known to make rH very ample")
        if self.ell < 1:
            raise InvalidInput(f"ell = {self.ell} must be >= 1")
        e = self.galois_degree
        if e < 1 or (e > 1 and not is_prime(e)):
            raise InvalidInput(f"Galois degree e = {e} must be 1 or a prime")
        if self.num_points < 1:
            raise InvalidInput("#A(F_q) must be positive")
        lic = self.license
        if lic is not None:
            W = lic.weil
            if (W.q, W.t1) != (self.q, self.t1) or point_count_surface(W) != self.num_points:
                raise InvalidInput(f"classification of {W} does not match this input")

    @classmethod
    def from_weil(cls, W: SurfaceWeilData, H2: int, r: int, **kw) -> "BoundInput":
        return cls(W.q, W.t1, point_count_surface(W), H2, r, **kw)

    @property
    def m(self) -> int:
        return weil_m(self.q)

    @property
    def n(self) -> int:
        return self.num_points

    @property
    def k(self) -> int:
        return code_dimension(self.r, self.H2)

    def quad(self, A=0, B=0, C=0, D=0) -> QuadExact:
        """A + B sqrt(ell) + C sqrt(H^2/2) + D sqrt(ell H^2/2)."""
        return QuadExact(self.ell, self.H2 // 2, A, B, C, D)

    @property
    def R(self) -> QuadExact:
        """r sqrt(H^2/2)."""
        return self.quad(C=self.r)

    @property
    def floor_R(self) -> int:
        return isqrt_floor(self.r * self.r * self.H2 // 2)

    @property
    def floor_R_over_sqrt_ell(self) -> int:
        """floor(r sqrt(H^2 / (2 ell))) via isqrt(floor(r^2 H^2 / (2 ell)))."""
        return isqrt_floor(self.r * self.r * self.H2 // (2 * self.ell))

    def with_ell(self, ell: int) -> "BoundInput":
        return dataclasses.replace(self, ell=ell)


@dataclass
class BoundResult:
    n: int
    k: int
    d_lower: int
    theorem: Theorem
    relevance_B: int
    candidates: list = field(default_factory=list)
    winner: str | None = None
    max_zero_count: object = None
    unsafe: bool = False

    @property
    def vacuous(self) -> bool:
        return self.d_lower <= 0

    @property
    def injectivity_ok(self) -> bool:
        """d_lower >= 1 forces max N(f) < #A, so evaluation is injective."""
        return self.d_lower >= 1

    @property
    def relevant(self) -> bool:
        return not self.vacuous

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "d_lower": self.d_lower,
            "theorem": self.theorem.value,
            "candidates": [
                {"label": lab, "exact": str(v), "value": _decimal(v)} for lab, v in self.candidates
            ],
            "winner": self.winner,
            "vacuous": self.vacuous,
            "injectivity_ok": self.injectivity_ok,
            "relevance_B": self.relevance_B,
        }
        if self.unsafe:
            out["watermark"] = "UNSAFE: ell not licensed by any classification"
        return out


def _decimal(v) -> str:
    return v.decimal(6) if isinstance(v, QuadExact) else str(v)


def zero_count_cap(inp: BoundInput) -> int:
    """Upper bound on N(f) for f in L(rH) valid on every abelian surface."""
    q, t1, m, H2, r = inp.q, inp.t1, inp.m, inp.H2, inp.r
    components = (r * H2) // inp.galois_degree
    return components * (q + 1 - t1 + m) + r * r * m * H2 // 2


def bound_general(inp: BoundInput) -> BoundResult:
    cap = zero_count_cap(inp)
    d = inp.num_points - cap
    theorem = Theorem.GENERAL if d > 0 else Theorem.VACUOUS
    return BoundResult(
        n=inp.n,
        k=inp.k,
        d_lower=d,
        theorem=theorem,
        relevance_B=relevance_threshold(inp.H2),
        candidates=[("zero_count_cap", cap)],
        winner="zero_count_cap",
        max_zero_count=cap,
    )


@dataclass(frozen=True)
class PhiEvaluation:
    x: object
    alpha: QuadExact
    value: QuadExact


def _objective(inp: BoundInput, k1, k2=0, sharpened: bool = False) -> tuple[QuadExact, QuadExact]:
    """(alpha, value) of the k1 > 0 branch of the zero-count objective."""
    ell, m = inp.ell, inp.m
    sqrt_ell = inp.quad(B=1)
    R = inp.R
    alpha = R - sqrt_ell * k1 - k2
    per_component = (ell - 1) * (m - sqrt_ell) + (inp.q + 1 - inp.t1)
    value = alpha * alpha * m + sqrt_ell * alpha * (2 * m) + per_component * k1 + R * (ell - 1)
    if sharpened:
        value = value - alpha * (ell - 1)
    return alpha, value


def phi(x, inp: BoundInput) -> PhiEvaluation:
    """phi(x) = m a^2 + 2 m sqrt(ell) a + x (q + 1 - Tr + (ell-1)(m - sqrt(ell))) + R (ell - 1)
    with a = R - x sqrt(ell); requires (x, 0) in the component polygon."""
    alpha, value = _objective(inp, x)
    if x < 1 or alpha.sign() < 0:
        raise OutsidePolygon(f"(x, 0) = ({x}, 0) lies outside the component polygon")
    return PhiEvaluation(x, alpha, value)


def closed_form_candidates(inp: BoundInput) -> list[tuple[str, object]]:
    ell = inp.ell
    cands: list[tuple[str, object]] = [("floor(R)*(ell-1)", inp.quad(inp.floor_R * (ell - 1)))]
    x_right = inp.floor_R_over_sqrt_ell
    if x_right >= 1:
        cands.append(("phi(1)", phi(1, inp).value))
        cands.append((f"phi({x_right})", phi(x_right, inp).value))
    return cands


def _argmax(cands):
    best = cands[0]
    for c in cands[1:]:
        if c[1] > best[1]:
            best = c
    return best


def closed_form_max(inp: BoundInput) -> QuadExact:
    return _argmax(closed_form_candidates(inp))[1]


def _require_license(inp: BoundInput) -> None:
    if inp.unsafe:
        return
    if inp.license is None or not inp.license.grants(inp.ell):
        got = "no classification" if inp.license is None else f"ell_max = {inp.license.ell_max}"
        raise UnlicensedEll(f"ell = {inp.ell} is not licensed ({got})")


def bound_simple(inp: BoundInput, sharpened: bool = False) -> BoundResult:
    """Genus-aware bound; needs a classification granting ``inp.ell`` unless unsafe.

    With ``sharpened`` the max is taken by brute force over the polygon with
    the extra -alpha (ell - 1) term kept.
    """
    _require_license(inp)
    if sharpened:
        pm = polygon_max_bruteforce(inp, Objective.SHARPENED)
        cands = [(f"sharpened{pm.argmax}", pm.value)]
        winner, M = cands[0]
    else:
        cands = closed_form_candidates(inp)
        winner, M = _argmax(cands)
    d = inp.num_points - M.floor()  # = ceil(#A - M)
    return BoundResult(
        n=inp.n,
        k=inp.k,
        d_lower=d,
        theorem=Theorem.SIMPLE if d > 0 else Theorem.VACUOUS,
        relevance_B=relevance_threshold(inp.H2),
        candidates=cands,
        winner=winner,
        max_zero_count=M,
        unsafe=inp.unsafe,
    )


def haloui_formula(q: int, t1: int, num_points: int, r: int) -> tuple[int, int]:
    """(d_lower, branch) of the piecewise bound for H^2 = 2, ell = 1."""
    m = weil_m(q)
    c = q + 1 - t1
    if r * m <= c - m:
        return num_points - r * c, 1
    return num_points - (c - m) - m * r * r, 2


def bound_haloui(inp: BoundInput) -> BoundResult:
    if inp.H2 != 2 or inp.ell != 1:
        raise WrongSpecialization("the piecewise bound needs H^2 = 2 and ell = 1")
    d, branch = haloui_formula(inp.q, inp.t1, inp.num_points, inp.r)
    curve_points = inp.q + 1 - inp.t1
    m = inp.m
    jac = {
        "curve_points": curve_points,
        "branch": branch,
        "form": (
            f"#Jac - r*#C = {inp.num_points} - {inp.r}*{curve_points}"
            if branch == 1
            else f"#Jac - #C - m(r^2-1) = {inp.num_points} - {curve_points} - {m}*{inp.r * inp.r - 1}"
        ),
    }
    res = BoundResult(
        n=inp.n,
        k=inp.k,
        d_lower=d,
        theorem=Theorem.HALOUI if d > 0 else Theorem.VACUOUS,
        relevance_B=relevance_threshold(inp.H2),
        candidates=[(f"branch{branch}", inp.num_points - d)],
        winner=f"branch{branch}",
        max_zero_count=inp.num_points - d,
    )
    res.jacobian_form = jac
    return res


def weakened_max(inp: BoundInput) -> QuadExact:
    """max(phi(1), phi(R / sqrt(ell))) with the integer part dropped (ell = 1 case
    of the comparison with the piecewise bound)."""
    x_real = inp.quad(D=inp.r) / inp.ell  # R / sqrt(ell) = r sqrt(ell H^2/2) / ell
    return max(phi(1, inp).value, phi(x_real, inp).value)


@dataclass(frozen=True)
class PolygonMax:
    value: QuadExact
    argmax: tuple[int, int]
    points: int


def polygon_points(inp: BoundInput):
    """Integer (k1, k2) with k1, k2 >= 0, k1 + k2 >= 1, sqrt(ell) k1 + k2 <= R."""
    R, sqrt_ell = inp.R, inp.quad(B=1)
    for k1 in range(0, inp.floor_R_over_sqrt_ell + 1):
        k2_max = (R - sqrt_ell * k1).floor()
        for k2 in range(0 if k1 else 1, k2_max + 1):
            yield k1, k2


def _objective_float(inp: BoundInput, k1: int, k2: int, sharpened: bool) -> float:
    ell, m = inp.ell, inp.m
    if k1 == 0:
        return float(k2 * (ell - 1))
    s = math.sqrt(ell)
    R = inp.r * math.sqrt(inp.H2 / 2)
    alpha = R - s * k1 - k2
    val = m * alpha * alpha + 2 * m * s * alpha + k1 * (inp.q + 1 - inp.t1 + (ell - 1) * (m - s)) + R * (ell - 1)
    return val - alpha * (ell - 1) if sharpened else val


def _objective_exact(inp: BoundInput, k1: int, k2: int, sharpened: bool) -> QuadExact:
    if k1 == 0:
        return inp.quad(k2 * (inp.ell - 1))
    return _objective(inp, k1, k2, sharpened)[1]


def polygon_max_bruteforce(inp: BoundInput, objective: Objective | str = Objective.THEOREM_PHI) -> PolygonMax:
    """Exact max of the zero-count objective over every lattice point of the polygon.

    Each point is scored in floating point first; every point within a safe
    margin of the float maximum is then rescored exactly, so the result does
    not depend on rounding.
    """
    sharpened = Objective(objective) is Objective.SHARPENED
    pts = list(polygon_points(inp))
    scores = [_objective_float(inp, k1, k2, sharpened) for k1, k2 in pts]
    top = max(scores)
    margin = 1e-6 * (1.0 + abs(top))
    best, arg = None, None
    for (k1, k2), sc in zip(pts, scores):
        if sc < top - margin:
            continue
        val = _objective_exact(inp, k1, k2, sharpened)
        if best is None or val > best:
            best, arg = val, (k1, k2)
    return PolygonMax(best, arg, len(pts))


@dataclass
class EllComparison:
    general: BoundResult
    rows: list = field(default_factory=list)  # (ell, BoundResult, licensed)

    @property
    def dominant_ell(self) -> int | None:
        if not self.rows:
            return None
        return max(self.rows, key=lambda row: (row[1].d_lower, -row[0]))[0]

    def to_json(self) -> dict:
        return {
            "d_general": self.general.d_lower,
            "rows": [
                {"ell": ell, "d_lower": res.d_lower, "licensed": lic, "winner": res.winner}
                for ell, res, lic in self.rows
            ],
            "dominant_ell": self.dominant_ell,
        }


def compare_ell(inp: BoundInput, ells, allow_hypothetical: bool = False) -> EllComparison:
    """bound_simple at each ell next to the general bound."""
    out = EllComparison(bound_general(inp))
    for ell in ells:
        licensed = inp.license is not None and inp.license.grants(ell)
        if not licensed and not (allow_hypothetical or inp.unsafe):
            raise UnlicensedEll(f"ell = {ell} is not licensed; pass allow_hypothetical to compare anyway")
        res = bound_simple(dataclasses.replace(inp, ell=ell, unsafe=not licensed))
        out.rows.append((ell, res, licensed))
    return out
