import pytest
import sympy
from hypothesis import given, strategies as st

from abelos.errors import InvalidWeilData, TraceOutOfRange
from abelos.ff import isqrt_floor, prime_power
from abelos.isogeny import (
    Simplicity,
    SignConvention,
    SurfaceWeilData,
    WeilRestrictionMeta,
    all_weil_surfaces,
    classify_no_low_genus,
    deuring_trace_exists,
    is_npp,
    is_simple_sufficient,
    is_weil_surface,
    point_count_surface,
    restriction_case,
    validate_weil_surface,
    weil_restriction,
)

SWEEP_Q = (2, 3, 4, 5, 7, 8, 9)


def test_point_count_examples():
    assert point_count_surface(SurfaceWeilData(16, 0, -31)) == 226
    assert point_count_surface(SurfaceWeilData(7, 0, 0)) == 50
    for q in SWEEP_Q:
        assert point_count_surface(SurfaceWeilData(q, 0, 0)) == q * q + 1
    with pytest.raises(InvalidWeilData):
        point_count_surface(SurfaceWeilData(4, 9, 0))


def test_validate_examples():
    assert validate_weil_surface(7, 0, 0)
    assert not validate_weil_surface(4, 9, 0)
    assert validate_weil_surface(16, 0, -31)


@pytest.mark.parametrize("q", SWEEP_Q + (16, 25))
def test_exact_and_numeric_validity_agree(q):
    bound = isqrt_floor(16 * q) + 2
    for t1 in range(-bound, bound + 1):
        for t2 in range(-3 * q, 7 * q + 1):
            assert is_weil_surface(q, t1, t2) == validate_weil_surface(q, t1, t2), (q, t1, t2)


def test_npp_examples():
    assert is_npp(SurfaceWeilData(7, 0, -7))
    assert not is_npp(SurfaceWeilData(5, 0, -5))
    assert not is_npp(SurfaceWeilData(7, 0, 7))


def test_weil_restriction_examples():
    W = weil_restriction(16, 31)
    assert W == SurfaceWeilData(16, 0, -31) and point_count_surface(W) == 226
    assert weil_restriction(5, 0) == SurfaceWeilData(5, 0, 0)
    assert weil_restriction(3, 6) == SurfaceWeilData(3, 0, -6)
    with pytest.raises(TraceOutOfRange):
        weil_restriction(4, 9)


def test_deuring_examples():
    assert deuring_trace_exists(2, 16, 7)
    assert deuring_trace_exists(2, 256, 31)
    assert not deuring_trace_exists(7, 49, 7)
    assert deuring_trace_exists(7, 49, 14)


def test_classification_examples():
    rep = classify_no_low_genus(weil_restriction(16, 31), WeilRestrictionMeta(2, 16, 31))
    assert (rep.ell_max, rep.rule, rep.case) == (2, "prop45-case-1", 1)
    rep = classify_no_low_genus(SurfaceWeilData(7, 0, -7))
    assert (rep.ell_max, rep.rule) == (2, "npp")
    rep = classify_no_low_genus(weil_restriction(16, 32), WeilRestrictionMeta(2, 16, 32))
    assert rep.ell_max < 2 and rep.case is None and not rep.npp
    assert rep.to_json() == {
        "q": 16, "t1": 0, "t2": -32, "valid": True, "simple": rep.simplicity.value,
        "npp": False, "ell_max": rep.ell_max, "rule": rep.rule,
    }


def test_sign_corrected_nine_examples():
    # t^4 - 9t^2 + 81 is irreducible; the product (t^2-3t+9)(t^2+3t+9) has t2 = +9
    assert is_simple_sufficient(SurfaceWeilData(9, 0, -9)) is Simplicity.SIMPLE
    assert is_simple_sufficient(SurfaceWeilData(9, 0, 9)) is Simplicity.NOT_SIMPLE
    assert classify_no_low_genus(SurfaceWeilData(9, 0, 9)).ell_max == 0
    assert classify_no_low_genus(SurfaceWeilData(9, 0, -9)).ell_max == 1
    assert classify_no_low_genus(weil_restriction(9, 9), WeilRestrictionMeta(3, 9, 9)).rule == "prop45-case-3"


def test_provenance_must_match():
    with pytest.raises(InvalidWeilData):
        classify_no_low_genus(SurfaceWeilData(16, 0, -31), WeilRestrictionMeta(2, 16, 30))


def test_restriction_cases():
    assert restriction_case(WeilRestrictionMeta(2, 4, 7)) == 1
    assert restriction_case(WeilRestrictionMeta(3, 3, 4)) == 2
    assert restriction_case(WeilRestrictionMeta(2, 4, 6)) is None  # p = 2 excluded from case 2
    assert restriction_case(WeilRestrictionMeta(11, 121, 121)) == 3
    assert restriction_case(WeilRestrictionMeta(7, 49, 49)) is None  # 7 is not 11 mod 12
    assert restriction_case(WeilRestrictionMeta(3, 27, 27)) is None  # 27 is not a square
    assert restriction_case(WeilRestrictionMeta(2, 8, 8)) == 4
    assert restriction_case(WeilRestrictionMeta(2, 16, 16)) is None  # 16 is a square
    assert restriction_case(WeilRestrictionMeta(3, 3, 6)) == 5
    assert restriction_case(WeilRestrictionMeta(5, 5, 10)) is None


def _sympy_simple(W):
    t = sympy.symbols("t")
    q, t1, t2 = W.q, W.t1, W.t2
    _, factors = sympy.factor_list(t**4 - t1 * t**3 + t2 * t**2 - q * t1 * t + q * q)
    return len(factors) == 1 and factors[0][1] == 1


@pytest.mark.parametrize("q", (2, 3, 4, 5, 7, 9))
def test_simplicity_against_sympy_factorization(q):
    for W in all_weil_surfaces(q):
        verdict = is_simple_sufficient(W)
        irreducible = _sympy_simple(W)
        assert (verdict is Simplicity.SIMPLE) == irreducible, W


@pytest.mark.parametrize("q", SWEEP_Q)
def test_surface_sweep_invariants(q):
    for W in all_weil_surfaces(q):
        N = point_count_surface(W)
        assert N > 0
        # Jacobian identity: (N2 + N1^2)/2 - q with the curve counts implied by W
        N1 = q + 1 - W.t1
        N2 = q * q + 1 - (W.t1 * W.t1 - 2 * W.t2)
        assert (N2 + N1 * N1) % 2 == 0 and (N2 + N1 * N1) // 2 - q == N
        rep = classify_no_low_genus(W)
        if rep.simplicity is Simplicity.NOT_SIMPLE:
            assert rep.ell_max == 0
        if rep.ell_max == 1:
            assert rep.simplicity is Simplicity.SIMPLE


@pytest.mark.parametrize("q", (2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 121))
def test_restriction_grants_never_reach_non_simple(q):
    p, _ = prime_power(q)
    for trE in range(-2 * q, 2 * q + 1):
        meta = WeilRestrictionMeta(p, q, trE)
        rep = classify_no_low_genus(weil_restriction(q, trE), meta)
        if rep.ell_max == 2:
            assert rep.simplicity is not Simplicity.NOT_SIMPLE, (q, trE)


@given(st.integers(-50, 50), st.integers(-500, 500))
def test_sign_convention_round_trip(t1, t2):
    assert SignConvention.from_hnr(*SignConvention.to_hnr(t1, t2)) == (t1, t2)


@given(st.sampled_from(SWEEP_Q + (16, 25)), st.data())
def test_products_of_elliptic_classes_are_not_simple(q, data):
    m = isqrt_floor(4 * q)
    ta = data.draw(st.integers(-m, m))
    tb = data.draw(st.integers(-m, m))
    W = SurfaceWeilData(q, ta + tb, ta * tb + 2 * q)
    assert W.valid
    assert is_simple_sufficient(W) is Simplicity.NOT_SIMPLE
