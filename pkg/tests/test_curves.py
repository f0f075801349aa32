import itertools
import random

import pytest
from hypothesis import given, strategies as st

from abelos.curves import (
    EllipticCurveModel,
    Genus2CurveModel,
    all_elliptic_curves,
    count_points_elliptic,
    count_points_genus2,
    count_report,
    elliptic_trace,
    jacobian_order,
    parse_curve,
    quadratic_twist,
    weil_data_from_counts,
)
from abelos.errors import InconsistentCounts, SingularCurve
from abelos.ff import make_field
from abelos.isogeny import is_weil_surface, point_count_surface, validate_weil_surface


def naive_affine(F, h, f):
    """Loop over every (x, y) pair; shares nothing with the library's fiber counting."""
    n = 0
    for x in F.elements():
        hx, fx = F.poly_eval(h, x), F.poly_eval(f, x)
        for y in F.elements():
            if F.add(F.mul(y, y), F.mul(hx, y)) == fx:
                n += 1
    return n


def naive_infinity_genus2(F, h, f):
    """Points with X = 0 on the chart Y^2 + X^3 h(1/X) Y = X^6 f(1/X)."""
    h3 = h[3] if len(h) > 3 else 0
    f6 = f[6] if len(f) > 6 else 0
    return sum(1 for y in F.elements() if F.add(F.mul(y, y), F.mul(h3, y)) == f6)


def test_elliptic_examples():
    F = make_field(5)
    E = EllipticCurveModel(F, 0, 0, 0, 1, 1)
    assert count_points_elliptic(E) == 9
    assert elliptic_trace(E) == -3
    assert count_points_elliptic(E, 2, "exhaustive") == 27
    assert count_points_elliptic(E, 2, "recurrence") == 27
    assert count_points_elliptic(E, 2, "check") == 27


def test_singular_models_rejected():
    with pytest.raises(SingularCurve):
        EllipticCurveModel(make_field(5), 0, 0, 0, 0, 0)
    with pytest.raises(SingularCurve):
        Genus2CurveModel(make_field(7), [0, 0, 0, 0, 0, 1])  # y^2 = x^5
    with pytest.raises(SingularCurve):
        Genus2CurveModel(make_field(2), [1, 0, 0, 0, 0, 1])  # h = 0 in characteristic 2


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2), (5, 1)])
def test_elliptic_counts_match_naive_oracle(p, n):
    F = make_field(p, n)
    rng = random.Random(p * 10 + n)
    curves = list(all_elliptic_curves(F))
    for E in rng.sample(curves, min(40, len(curves))):
        assert count_points_elliptic(E) == 1 + naive_affine(F, E.h_poly, E.f_poly)


@pytest.mark.parametrize("q", [5, 7])
def test_twist_negates_trace(q):
    F = make_field(q)
    nonsquare = next(a for a in range(1, q) if not F.is_square(a))
    for a4, a6 in itertools.product(range(q), repeat=2):
        try:
            E = EllipticCurveModel(F, 0, 0, 0, a4, a6)
        except SingularCurve:
            continue
        assert elliptic_trace(quadratic_twist(E, nonsquare)) == -elliptic_trace(E)


def test_genus2_example():
    C = Genus2CurveModel(make_field(7), [1, 0, 0, 0, 0, 1])
    assert count_points_genus2(C, 1) == 8
    assert count_points_genus2(C, 2) == 50
    W = weil_data_from_counts(7, 8, 50)
    assert (W.q, W.t1, W.t2) == (7, 0, 0)
    assert jacobian_order(7, 8, 50) == 50 == point_count_surface(W)


def test_weil_data_from_counts_examples():
    for q in (2, 3, 5, 7, 9):
        W = weil_data_from_counts(q, q + 1, q * q + 1)
        assert (W.t1, W.t2) == (0, 0)
    W = weil_data_from_counts(5, 9, 27)
    assert (W.t1, W.t2) == (-3, 5)
    with pytest.raises(InconsistentCounts):
        weil_data_from_counts(5, 9, 28)  # odd middle coefficient
    with pytest.raises(InconsistentCounts):
        weil_data_from_counts(5, 0, 200)  # integral, but a2 = 105 is no surface datum


def _random_genus2(F, rng, with_h):
    while True:
        deg = rng.choice([5, 6])
        f = [rng.randrange(F.q) for _ in range(deg)] + [rng.randrange(1, F.q)]
        h = [rng.randrange(F.q) for _ in range(rng.randint(1, 4))] if with_h else []
        try:
            return Genus2CurveModel(F, f, h)
        except SingularCurve:
            continue


@pytest.mark.parametrize("p,n,with_h", [(3, 1, False), (5, 1, False), (7, 1, True), (2, 1, True), (2, 2, True), (3, 2, False)])
def test_genus2_counts_match_naive_oracle(p, n, with_h):
    F = make_field(p, n)
    rng = random.Random(1000 * p + n)
    for _ in range(8):
        C = _random_genus2(F, rng, with_h)
        want = naive_affine(F, list(C.h), list(C.f)) + naive_infinity_genus2(F, list(C.h), list(C.f))
        assert count_points_genus2(C, 1) == want


def test_characteristic_two_degree_five_has_two_points_at_infinity():
    # deg h = 3 in characteristic 2: the chart at infinity is Y^2 + Y = 0
    F = make_field(2)
    found = 0
    for low in itertools.product(range(2), repeat=5):
        for h in ([1, 0, 0, 1], [0, 1, 0, 1], [1, 1, 1, 1]):
            try:
                C = Genus2CurveModel(F, list(low) + [1], h)
            except SingularCurve:
                continue
            found += 1
            assert C.points_at_infinity() == 2
            assert count_points_genus2(C) == naive_affine(F, h, list(low) + [1]) + 2
    assert found > 0


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (5, 1), (2, 2)])
def test_genus2_weil_data_is_valid(p, n):
    F = make_field(p, n)
    rng = random.Random(p + 31 * n)
    for _ in range(6):
        C = _random_genus2(F, rng, p == 2)
        rep = count_report(C)
        W = rep.weil
        assert rep.weil_bound_ok
        assert validate_weil_surface(W.q, W.t1, W.t2)
        assert is_weil_surface(W.q, W.t1, W.t2)
        assert rep.jacobian_order == point_count_surface(W)


def test_parse_curve_formats():
    E = parse_curve('{"p":5,"n":1,"model":"weierstrass","a":[0,0,0,1,1]}')
    assert count_points_elliptic(E) == 9
    assert parse_curve({"p": 5, "a": [1, 1]}) == E
    C = parse_curve({"p": 7, "model": "genus2", "f": [1, 0, 0, 0, 0, 1]})
    assert count_points_genus2(C) == 8
    F4 = parse_curve({"p": 2, "n": 2, "a": [1, 0, 0, 0, "t"]})
    assert F4.field.q == 4


@given(st.integers(min_value=0, max_value=4), st.integers(min_value=0, max_value=4))
def test_hasse_bound_over_f5(a4, a6):
    try:
        E = EllipticCurveModel(make_field(5), 0, 0, 0, a4, a6)
    except SingularCurve:
        return
    t = elliptic_trace(E)
    assert t * t <= 20
