"""Acceptance checks, shared by ``abelos verify`` and the test suite.

Each check returns a :class:`CheckResult`; none of them raises on failure.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import mpmath

from .bounds import (
    BoundInput,
    Objective,
    bound_general,
    bound_haloui,
    bound_simple,
    closed_form_max,
    phi,
    polygon_max_bruteforce,
    weakened_max,
)
from .curves import (
    Genus2CurveModel,
    all_elliptic_curves,
    count_points_elliptic,
    count_points_genus2,
    jacobian_order,
    weil_data_from_counts,
)
from .errors import AbelosError
from .ff import isqrt_floor, make_field, prime_power, prime_powers_up_to
from .isogeny import (
    SurfaceWeilData,
    WeilRestrictionMeta,
    classify_no_low_genus,
    deuring_trace_exists,
    is_weil_surface,
    point_count_surface,
    weil_restriction,
)
from .productlab import run_lab
from .quadexact import QuadExact

LAB_SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.seconds:.1f}s): {self.detail}"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": round(self.seconds, 3)}


def _timed(name: str, budget: float):
    def wrap(fn):
        def run(*args, **kw) -> CheckResult:
            t0 = time.perf_counter()
            try:
                passed, detail, data = fn(*args, **kw)
            except AbelosError as exc:
                passed, detail, data = False, f"{type(exc).__name__}: {exc}", {}
            elapsed = time.perf_counter() - t0
            if elapsed > budget:
                passed = False
                detail += f"; exceeded time budget {budget:.0f}s"
            return CheckResult(name, passed, detail, elapsed, data)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def representative_surfaces(q: int):
    """One valid (q, t1, t2) per admissible trace t1; the smallest valid t2."""
    bound = isqrt_floor(16 * q)
    for t1 in range(-bound, bound + 1):
        for t2 in range(-2 * q, 6 * q + 1):
            if is_weil_surface(q, t1, t2):
                yield SurfaceWeilData(q, t1, t2)
                break


@_timed("1 piecewise bound equals the unfloored H^2=2, ell=1 bound", 30)
def check_haloui_coincidence(max_q: int = 64):
    cells = mismatches = 0
    first = None
    for q in prime_powers_up_to(max_q):
        for W in representative_surfaces(q):
            for r in range(3, 11):
                inp = BoundInput.from_weil(W, 2, r)
                lhs = bound_haloui(inp).d_lower
                M = weakened_max(inp)
                rhs = inp.num_points - M.floor()
                cells += 1
                if not M.is_rational() or lhs != rhs:
                    mismatches += 1
                    first = first or (W, r, lhs, str(M))
    detail = f"{cells} cells, {mismatches} mismatches" + (f"; first {first}" if first else "")
    return mismatches == 0, detail, {"cells": cells}


GRID_Q = (4, 5, 7, 8, 9, 13, 16, 25)


@_timed("2 closed-form max dominates the lattice-point max", 120)
def check_polygon_soundness():
    cells = equal = unsound = sharp_bad = 0
    gaps = []
    for q in GRID_Q:
        for W in representative_surfaces(q):
            for H2 in (2, 4, 6):
                for r in range(3, 9):
                    for ell in (1, 2, 3):
                        inp = BoundInput.from_weil(W, H2, r, ell=ell, unsafe=True)
                        closed = closed_form_max(inp)
                        brute = polygon_max_bruteforce(inp, Objective.THEOREM_PHI).value
                        sharp = polygon_max_bruteforce(inp, Objective.SHARPENED).value
                        cells += 1
                        if closed < brute:
                            unsound += 1
                        elif closed == brute:
                            equal += 1
                        elif len(gaps) < 5:
                            gaps.append((q, W.t1, H2, r, ell, str(closed - brute)))
                        if sharp > brute:
                            sharp_bad += 1
    rate = equal / cells if cells else 0.0
    detail = (
        f"{cells} cells; closed < brute in {unsound}; sharpened > theorem in {sharp_bad}; "
        f"equality rate {equal}/{cells} = {rate:.4f}"
    )
    return unsound == 0 and sharp_bad == 0, detail, {"cells": cells, "equal": equal, "gaps": gaps}


def _interval_phi(q: int, t1: int, H2: int, r: int, ell: int, x: int):
    """phi(x) evaluated in 50-digit interval arithmetic, independent of QuadExact."""
    iv = mpmath.iv
    with mpmath.workdps(50):
        old = iv.dps
        iv.dps = 50
        try:
            m = isqrt_floor(4 * q)
            s = iv.sqrt(iv.mpf(ell))
            R = r * iv.sqrt(iv.mpf(H2) / 2)
            alpha = R - x * s
            return m * alpha**2 + 2 * m * s * alpha + x * (q + 1 - t1 + (ell - 1) * (m - s)) + R * (ell - 1)
        finally:
            iv.dps = old


def _interval_floor(x) -> int | None:
    lo, hi = mpmath.floor(x.a), mpmath.floor(x.b)
    return int(lo) if lo == hi else None


@_timed("3 worked q=16 instance", 30)
def check_worked_instance():
    W = weil_restriction(16, 31)
    cls = classify_no_low_genus(W, WeilRestrictionMeta(2, 16, 31))
    inp1 = BoundInput.from_weil(W, 2, 3, license=cls)
    inp2 = inp1.with_ell(2)
    got = {
        "n": inp1.n,
        "k": inp1.k,
        "d_general": bound_general(inp1).d_lower,
        "d_simple_1": bound_simple(inp1).d_lower,
        "d_simple_2": bound_simple(inp2).d_lower,
    }
    phi1 = phi(1, inp2).value
    expect = {"n": 226, "k": 9, "d_general": 4, "d_simple_1": 145, "d_simple_2": 144}
    problems = [f"{k}={got[k]} (want {v})" for k, v in expect.items() if got[k] != v]
    if phi1 != QuadExact(2, 1, 84, -1):
        problems.append(f"phi(1)|ell=2 = {phi1}")

    # second route: interval arithmetic on the same formulas
    N = 226
    for ell, want in ((1, 145), (2, 144)):
        cands = [_interval_phi(16, 0, 2, 3, ell, x) for x in (1, isqrt_floor(9 // ell))]
        cands.append(mpmath.iv.mpf(3 * (ell - 1)))
        top = max(cands, key=lambda c: c.b)
        fl = _interval_floor(top)
        if fl is None or any(c.b > top.a and c is not top for c in cands):
            problems.append(f"interval route ambiguous at ell={ell}")
        elif N - fl != want:
            problems.append(f"interval route d_simple(ell={ell}) = {N - fl}")
    # the exact value's 45-digit bracket must meet the 50-digit interval
    box = _interval_phi(16, 0, 2, 3, 2, 1)
    scale = 10**45
    lo = (phi1 * scale).floor()
    with mpmath.workdps(60):
        lo_m, hi_m = mpmath.mpf(lo) / scale, mpmath.mpf(lo + 1) / scale
        a, b = mpmath.mpf(box.a), mpmath.mpf(box.b)
        if b < lo_m or a > hi_m or b - a > mpmath.mpf(10) ** -40:
            problems.append("interval phi(1) disagrees with the exact 84 - sqrt(2)")
    detail = "n=226 k=9 d_general=4 d_simple(1)=145 d_simple(2)=144 phi(1)=84-sqrt(2)" if not problems else "; ".join(problems)
    return not problems, detail, got


def lab_pairs(per_field: int = 10, seed: int = LAB_SEED):
    """Seeded sample of curve pairs from the full list of curves over F_3 and F_5."""
    rng = random.Random(seed)
    pairs = []
    for p in (3, 5):
        curves = list(all_elliptic_curves(make_field(p)))
        for _ in range(per_field):
            pairs.append((rng.choice(curves), rng.choice(curves)))
    return pairs


@_timed("4 product-code ground truth", 600)
def check_lab(per_field: int = 10, seed: int = LAB_SEED):
    runs, failures, logs = 0, [], []
    for E1, E2 in lab_pairs(per_field, seed):
        code, meas, rep = run_lab(E1, E2, 3, "punctured", exact=True)
        runs += 1
        logs.extend(meas.injectivity_log)
        if meas.rank != 9 and not meas.injectivity_log:
            failures.append(f"{E1} x {E2}: rank {meas.rank} without log")
        if meas.injective and meas.d != meas.n - meas.max_nf:
            failures.append(f"{E1} x {E2}: d != n - max N(f)")
        if meas.max_nf > rep.nf_cap:
            failures.append(f"{E1} x {E2}: max N(f) {meas.max_nf} > cap {rep.nf_cap}")
    detail = f"{runs} pairs, {len(logs)} injectivity logs, {len(failures)} failures"
    if failures:
        detail += "; " + failures[0]
    return not failures, detail, {"runs": runs, "injectivity_logs": logs}


@_timed("5 point-count invariants", 120)
def check_counting():
    curves = hasse_bad = mismatch = 0
    for q in (2, 3, 4, 5, 7, 8):
        p, n = prime_power(q)
        for E in all_elliptic_curves(make_field(p, n)):
            curves += 1
            N1 = count_points_elliptic(E, 1)
            if (q + 1 - N1) ** 2 > 4 * q:
                hasse_bad += 1
            if count_points_elliptic(E, 2, "exhaustive") != count_points_elliptic(E, 2, "recurrence"):
                mismatch += 1
    F7 = make_field(7)
    C = Genus2CurveModel(F7, [1, 0, 0, 0, 0, 1])
    N1, N2 = count_points_genus2(C, 1), count_points_genus2(C, 2)
    W = weil_data_from_counts(7, N1, N2)
    jac = jacobian_order(7, N1, N2)
    genus2_ok = (N1, N2, W.t1, W.t2, jac) == (8, 50, 0, 0, 50)
    passed = hasse_bad == 0 and mismatch == 0 and genus2_ok
    detail = (
        f"{curves} curves, Hasse failures {hasse_bad}, F_q^2 mismatches {mismatch}; "
        f"y^2=x^5+1/F_7: (N1,N2)=({N1},{N2}) (t1,t2)=({W.t1},{W.t2}) #Jac={jac}"
    )
    return passed, detail, {"curves": curves}


CLASSIFICATION_INSTANCES = (
    # (p, q, trE, expected case)
    (2, 2, 3, 1),
    (2, 4, 7, 1),
    (3, 3, 4, 2),
    (3, 9, 9, 3),
    (11, 121, 121, 3),
    (2, 2, 2, 4),
    (2, 8, 8, 4),
    (2, 2, 4, 5),
    (3, 3, 6, 5),
)


@_timed("6 classification conformance", 5)
def check_classification():
    problems = []
    for p, q, trE, case in CLASSIFICATION_INSTANCES:
        W = weil_restriction(q, trE)
        rep = classify_no_low_genus(W, WeilRestrictionMeta(p, q, trE))
        if rep.ell_max != 2 or rep.case != case:
            problems.append(f"(p={p}, q={q}, trE={trE}): ell_max={rep.ell_max} rule={rep.rule}")
        if not deuring_trace_exists(p, q * q, trE):
            problems.append(f"no curve over F_{q * q} with trace {trE}")
    npp = classify_no_low_genus(SurfaceWeilData(7, 0, -7))
    if not (npp.npp and npp.ell_max == 2):
        problems.append(f"(7,0,-7): {npp.to_json()}")
    plain = classify_no_low_genus(SurfaceWeilData(16, 0, -32))
    if plain.ell_max >= 2:
        problems.append(f"(16,0,-32) granted ell_max={plain.ell_max}")
    detail = f"{len(CLASSIFICATION_INSTANCES)} restriction cases + NPP + negative control"
    return not problems, detail + ("" if not problems else "; " + "; ".join(problems)), {}


@_timed("7 Weil-restriction identities", 10)
def check_weil_restriction(max_q: int = 1 << 10):
    checked = bad = 0
    for q in prime_powers_up_to(max_q):
        for trE in range(-2 * q, 2 * q + 1):
            W = weil_restriction(q, trE)
            checked += 1
            if W.t1 != 0 or point_count_surface(W) != q * q + 1 - trE:
                bad += 1
    return bad == 0, f"{checked} (q, trE) pairs, {bad} failures", {"checked": checked}


SUITES = {
    "all": (
        check_haloui_coincidence,
        check_polygon_soundness,
        check_worked_instance,
        check_lab,
        check_counting,
        check_classification,
        check_weil_restriction,
    ),
    "lab-only": (check_lab,),
    "fast": (check_worked_instance, check_classification),
}


def run_suite(name: str = "all", echo=None) -> list[CheckResult]:
    results = []
    for check in SUITES[name]:
        res = check()
        if echo:
            echo(res.line())
        results.append(res)
    return results


__all__ = ["CheckResult", "SUITES", "run_suite"]
