import random

import numpy as np
import pytest

from abelos.curves import EllipticCurveModel, all_elliptic_curves, count_points_elliptic
from abelos.errors import EnumerationCapExceeded, InvalidInput
from abelos.ff import make_field
from abelos.productlab import (
    ProductSurfaceCode,
    build_code,
    check_against_bounds,
    expansion_at_infinity,
    laurent_leading_coeff,
    measure,
    rank,
    rr_basis_elliptic,
    run_lab,
)


@pytest.fixture(scope="module")
def E5():
    return EllipticCurveModel(make_field(5), 0, 0, 0, 1, 1)


@pytest.fixture(scope="module")
def punctured5(E5):
    code = build_code(E5, E5, 3, "punctured")
    return code, measure(code)


def test_rr_basis_examples(E5):
    assert rr_basis_elliptic(E5, 3).labels() == ["1", "x", "y"]
    assert rr_basis_elliptic(E5, 3).pole_orders == (0, 2, 3)
    assert rr_basis_elliptic(E5, 5).labels() == ["1", "x", "y", "x^2", "x*y"]
    assert rr_basis_elliptic(E5, 2).labels() == ["1", "x"]
    assert rr_basis_elliptic(E5, 1).labels() == ["1"]
    for r in range(1, 15):
        b = rr_basis_elliptic(E5, r)
        assert len(b.monomials) == r
        assert len(set(b.pole_orders)) == r


def test_laurent_examples(E5):
    assert laurent_leading_coeff(E5, (0, 1), 3) == 1
    assert laurent_leading_coeff(E5, (1, 0), 3) == 0
    assert laurent_leading_coeff(E5, (1, 0), 2) == 1
    with pytest.raises(InvalidInput):
        laurent_leading_coeff(E5, (0, 1), 2)


def _series_satisfies_curve(E, prec):
    """w = t^3 u must satisfy w + a1 t w + a3 w^2 = t^3 + a2 t^2 w + a4 t w^2 + a6 w^3."""
    F = E.field
    P = prec + 3
    u = expansion_at_infinity(E, prec)
    w = [0, 0, 0] + u

    def mul(a, b):
        out = [0] * P
        for i, x in enumerate(a[:P]):
            for j, y in enumerate(b[: P - i]):
                out[i + j] = F.add(out[i + j], F.mul(x, y))
        return out

    def shift(a, k, c):
        out = [0] * P
        for i in range(P - k):
            out[i + k] = F.mul(c, a[i])
        return out

    def add(*terms):
        out = [0] * P
        for t in terms:
            out = [F.add(x, y) for x, y in zip(out, t)]
        return out

    a1, a2, a3, a4, a6 = E.coeffs
    w2 = mul(w, w)
    w3 = mul(w2, w)
    t3 = [0, 0, 0, 1] + [0] * (P - 4)
    lhs = add(w[:P], shift(w, 1, a1), shift(w2, 0, a3))
    rhs = add(t3, shift(w, 2, a2), shift(w2, 1, a4), shift(w3, 0, a6))
    return lhs == rhs


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2), (5, 1)])
def test_expansion_solves_weierstrass_equation(p, n):
    rng = random.Random(p + n)
    curves = list(all_elliptic_curves(make_field(p, n)))
    for E in rng.sample(curves, 10):
        assert _series_satisfies_curve(E, 8)
        for r in range(3, 7):
            for mono in rr_basis_elliptic(E, r).monomials:
                lead = laurent_leading_coeff(E, mono, r)
                assert lead == (1 if 2 * mono[0] + 3 * mono[1] == r else 0)


def test_build_code_examples(E5, punctured5):
    code, meas = punctured5
    assert code.n == 64 == 81 - 17
    assert code.num_rows == 9 and meas.rank == 9
    full = build_code(E5, E5, 3, "full")
    assert full.n == 81
    corner = full.generator[:, full.points.index(("O", "O"))]
    assert [i for i, v in enumerate(corner) if v] == [full.row_labels.index("y(x)y")]
    # the constant function has no zero on the punctured points
    assert np.all(code.generator[code.row_labels.index("1(x)1")] == 1)


def test_measure_q5(punctured5):
    code, meas = punctured5
    assert meas.exact and meas.codewords == 5**9 - 1
    assert meas.d == meas.n - meas.max_nf
    assert 0 <= meas.max_nf and meas.d <= meas.n
    assert sum(meas.histogram.values()) == 5**9 - 1


def test_enumeration_cap(E5, monkeypatch):
    code = build_code(E5, E5, 3)
    monkeypatch.setenv("ABELOS_MAX_ENUM", "1000")
    with pytest.raises(EnumerationCapExceeded) as info:
        measure(code)
    assert info.value.measurement.rank == 9
    assert measure(code, exact=False).rank == 9


def test_check_against_bounds_example(E5, punctured5):
    code, meas = punctured5
    assert code.trace == -6 and code.surface_points == 81 == count_points_elliptic(E5) ** 2
    rep = check_against_bounds(code, meas)
    assert rep.bound_general == -51 and rep.vacuous
    assert rep.nf_cap == 132
    assert rep.checks == {"dim": "ok", "nf_cap": "ok", "dist": "vacuous"}


def test_brute_force_distance_oracle():
    """Small F_3 code: minimum distance by a plain Python loop over messages."""
    F = make_field(3)
    curves = [E for E in all_elliptic_curves(F) if count_points_elliptic(E) >= 6][:2]
    code = build_code(curves[0], curves[-1], 3)
    meas = measure(code)
    G = code.generator
    k, n = G.shape
    best, worst_zeros = n, 0
    for idx in range(1, 3**k):
        msg = [(idx // 3**i) % 3 for i in range(k)]
        word = (np.array(msg) @ G) % 3
        w = int(np.count_nonzero(word))
        worst_zeros = max(worst_zeros, n - w)
        if w:
            best = min(best, w)
    assert meas.max_nf == worst_zeros
    assert meas.d == best


def test_full_and_punctured_monotone(E5):
    E2 = EllipticCurveModel(make_field(5), 0, 0, 0, 2, 1)
    p_code = build_code(E5, E2, 3, "punctured")
    f_code = build_code(E5, E2, 3, "full")
    pm, fm = measure(p_code), measure(f_code)
    support = f_code.n - p_code.n
    assert fm.rank >= pm.rank
    assert fm.d >= pm.d - support
    assert fm.d >= pm.d  # extra coordinates never lower a weight
    check_against_bounds(f_code, fm)


def test_permutation_and_scaling_invariance(E5):
    code = build_code(E5, E5, 3)
    base = measure(code)
    shuffled = measure(code.permuted(seed=7))
    assert (shuffled.n, shuffled.rank, shuffled.d, shuffled.max_nf) == (base.n, base.rank, base.d, base.max_nf)
    F = code.field
    G = code.generator.copy()
    G[4] = F.vmul(G[4], 3)
    scaled = ProductSurfaceCode(code.E1, code.E2, 3, code.mode, code.points, G)
    sm = measure(scaled)
    assert (sm.rank, sm.d, sm.max_nf) == (base.rank, base.d, base.max_nf)


@pytest.mark.parametrize("p,n", [(3, 1), (2, 2), (5, 1)])
def test_rank_sweep_logs_every_injectivity_failure(p, n):
    F = make_field(p, n)
    rng = random.Random(99 + p)
    curves = rng.sample(list(all_elliptic_curves(F)), 12)
    # rank of a tensor product of evaluation maps is the product of the factor ranks
    factor = {}
    for E in curves:
        n_aff = len(E.affine_points())
        if n_aff == 0:  # #E = 1: nothing to evaluate at
            factor[E] = 0
            continue
        vals = build_code(E, E, 3).generator
        factor[E] = rank(F, vals[[0, 3, 6]][:, ::n_aff])  # g_a (x) 1 at (P, P0)
    for E1 in curves:
        for E2 in curves[:4]:
            code = build_code(E1, E2, 3)
            meas = measure(code, exact=False)
            assert meas.rank == factor[E1] * factor[E2]
            if meas.rank != 9:
                assert meas.injectivity_log
            else:
                assert not meas.injectivity_log


def test_lab_rejects_small_r(E5):
    with pytest.raises(InvalidInput):
        build_code(E5, E5, 2)


def test_run_lab_over_f4():
    F = make_field(2, 2)
    curves = [E for E in all_elliptic_curves(F) if count_points_elliptic(E) >= 7]
    code, meas, rep = run_lab(curves[0], curves[1], 3)
    assert rep.checks["nf_cap"] == "ok"
    assert meas.injective
