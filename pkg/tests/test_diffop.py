from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conebranch.diffop import (DiffOp, bessel_e_component, build_dpi, build_dpi_direct, build_dpi_f_coordinates,
                               build_psi_pi, dpi_eigenvalue, euler, laplacian)
from conebranch.errors import DimensionError
from conebranch.jordan import build_algebra
from conebranch.poly import MultiPoly, monomials, monomials_upto
from conebranch.surd import Surd

from conftest import scalar_rep

ALGS = [("spin", 2), ("spin", 3), ("spin", 4), ("sym", 2), ("sym", 3), ("herm", 2)]


@pytest.fixture(scope="module", params=ALGS, ids=lambda c: f"{c[0]}{c[1]}")
def alg(request):
    return build_algebra(*request.param)


def v(m, i):
    return MultiPoly.var(m, i)


def test_euler_and_laplacian_examples():
    P = v(2, 0) ** 2 * v(2, 1)
    assert euler(2)(P) == P.scale(3)
    assert laplacian(2)(v(2, 0) ** 2 + v(2, 1) ** 2) == MultiPoly.constant(2, 4)


def test_dpi_spin2_form(spin2):
    for lam in (3, 4, Fraction(5, 2)):
        rep = scalar_rep(spin2, lam)
        D = build_dpi(spin2, rep)
        want = DiffOp.from_terms(1, 1, [(2, (2,), (0,)), (-1, (2,), (2,)), (-rep.alpha, (1,), (1,))])
        assert D == want
    assert build_dpi(spin2, scalar_rep(spin2, 3)).pretty() == "(2−v₁²)∂₁² − 6v₁∂₁"
    assert build_dpi(spin2, scalar_rep(spin2, 3)).pretty(ascii_only=True) == "(2 - v1^2)*d1^2 - 6*v1*d1"


def test_dpi_kills_constants_and_scales_linears(alg):
    rep = scalar_rep(alg, 3)
    D = build_dpi(alg, rep)
    m = alg.n - 1
    assert D(MultiPoly.constant(m, 1)).is_zero()
    for i in range(m):
        assert D(v(m, i)) == v(m, i).scale(-rep.alpha)


def test_psi_spin2_vanishes(spin2):
    assert build_psi_pi(spin2, scalar_rep(spin2, 3)).is_zero()


def test_psi_scalar_has_no_first_order(alg):
    psi = build_psi_pi(alg, scalar_rep(alg, 4))
    assert psi.part_of_order(1).is_zero()
    assert psi.part_of_order(0).is_zero()


def test_two_constructions_agree(alg):
    rep = scalar_rep(alg, 4)
    assert build_dpi(alg, rep) == build_dpi_direct(alg, rep)
    D1, D2 = build_dpi(alg, rep), build_dpi_direct(alg, rep)
    for e in monomials_upto(alg.n - 1, 3 if alg.n > 4 else 4):
        P = MultiPoly.monomial(alg.n - 1, e)
        assert D1(P) == D2(P)


def test_top_degree_eigenvalue(alg):
    rep = scalar_rep(alg, 3)
    D = build_dpi(alg, rep)
    m = alg.n - 1
    for k in range(4):
        for e in monomials(m, k):
            P = MultiPoly.monomial(m, e)
            assert D(P).homogeneous_part(k) == P.scale(dpi_eigenvalue(k, rep.alpha))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_f_coordinates_match(n):
    A = build_algebra("spin", n)
    rep = scalar_rep(A, 3)
    m = n - 1
    D, Df = build_dpi(A, rep), build_dpi_f_coordinates(A, rep)
    s2 = Surd.sqrt(2)
    images = [MultiPoly.monomial(m, tuple(int(j == i) for j in range(m)), s2) for i in range(m)]
    rng = np.random.default_rng(n)
    pts_x = rng.uniform(-0.5, 0.5, (50, m))
    for e in monomials_upto(m, 3):
        P = MultiPoly.monomial(m, e, Fraction(int(rng.integers(1, 5))))
        # Q(x) = P(sqrt2 x) so that (D_f Q)(x) = (D P)(sqrt2 x)
        lhs = Df(P.substitute(images))
        rhs = D(P).substitute(images)
        assert lhs == rhs
        assert np.allclose(lhs.evaluate_many(pts_x), D(P).evaluate_many(np.sqrt(2) * pts_x))


def test_f_coordinates_rejects_matrix_family(sym2):
    with pytest.raises(ValueError):
        build_dpi_f_coordinates(sym2, scalar_rep(sym2, 3))


def test_bessel_examples(spin2):
    rep = scalar_rep(spin2, 3)
    B = bessel_e_component(spin2, rep)
    assert B(MultiPoly.constant(2, 1)).is_zero()
    # (x|e) = sqrt2 x_0 in orthonormal coordinates
    f = MultiPoly.monomial(2, (1, 0), spin2.sqrt_r)
    assert B(f) == MultiPoly.constant(2, rep.alpha)


coefs = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coefs, max_size=4),
       st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coefs, max_size=4), coefs, coefs)
def test_apply_linear(sym2, tp, tq, a, b):
    D = build_dpi(sym2, scalar_rep(sym2, 3))
    P, Q = MultiPoly.from_scalar_terms(2, tp), MultiPoly.from_scalar_terms(2, tq)
    assert D(P.scale(a) + Q.scale(b)) == D(P).scale(a) + D(Q).scale(b)


@settings(max_examples=25, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coefs, max_size=4))
def test_composition_matches_sequential(tp):
    P = MultiPoly.from_scalar_terms(2, tp)
    E, L = euler(2), laplacian(2)
    assert E.compose(L)(P) == E(L(P))
    assert L.compose(E)(P) == L(E(P))


def test_degree_bound(alg):
    D = build_dpi(alg, scalar_rep(alg, 3))
    m = alg.n - 1
    for e in monomials(m, 3):
        assert D(MultiPoly.monomial(m, e)).degree <= 3


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        laplacian(2)(MultiPoly.var(3, 0))


def test_json_roundtrip(sym2):
    D = build_dpi(sym2, scalar_rep(sym2, 3))
    assert DiffOp.from_json(D.to_json(sym2.r), 2, sym2.r) == D
