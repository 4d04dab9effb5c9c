from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conebranch.errors import DimensionError
from conebranch.poly import MultiPoly, falling, monomials, monomials_upto

NV = 3
coefs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
exps = st.tuples(*[st.integers(0, 3)] * NV)


@st.composite
def polys(draw, dim=1):
    terms = draw(st.dictionaries(exps, st.tuples(*[coefs] * dim), max_size=5))
    return MultiPoly(NV, terms, dim)


points = st.lists(st.floats(-2, 2), min_size=NV, max_size=NV)


def test_monomial_counts():
    assert len(monomials(3, 2)) == 6
    assert len(monomials_upto(3, 2)) == 10
    assert falling(5, 2) == 20


def test_wrong_exponent_length():
    with pytest.raises(DimensionError):
        MultiPoly(2, {(1, 2, 3): (1,)})


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(polys(), polys(), points)
def test_evaluation_homomorphism(a, b, x):
    assert float((a * b)(x)[0]) == pytest.approx(float(a(x)[0]) * float(b(x)[0]), rel=1e-9, abs=1e-9)
    assert float((a + b)(x)[0]) == pytest.approx(float(a(x)[0]) + float(b(x)[0]), rel=1e-9, abs=1e-9)


@given(polys(), polys())
def test_leibniz(a, b):
    for i in range(NV):
        assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


@given(polys())
def test_mixed_partials_commute(a):
    assert a.diff(0).diff(1) == a.diff(1).diff(0)
    assert a.diff_multi((1, 1, 0)) == a.diff(0).diff(1)


@given(polys())
@settings(max_examples=30)
def test_evaluate_many_matches_call(a):
    pts = np.random.default_rng(0).uniform(-1, 1, (5, NV))
    many = a.evaluate_many(pts)[:, 0]
    single = [complex(a(list(p))[0]) for p in pts]
    assert np.allclose(many, single)


@given(polys(dim=2))
def test_json_roundtrip(a):
    assert MultiPoly.from_json(a.to_json(), NV) == a or a.is_zero()


@given(polys(), polys())
def test_divmod_exact(a, b):
    if b.is_zero():
        return
    assert (a * b).divmod_exact(b) == a


def test_laplacian_of_square_norm():
    r2 = sum((MultiPoly.var(NV, i) ** 2 for i in range(NV)), MultiPoly.zero(NV))
    assert r2.laplacian() == MultiPoly.constant(NV, 2 * NV)


def test_substitute_linear():
    x, y = MultiPoly.var(2, 0), MultiPoly.var(2, 1)
    p = x * x + y
    q = p.substitute([x + y, x - y])
    assert q == (x + y) * (x + y) + x - y


def test_pretty_forms():
    x = MultiPoly.var(2, 0)
    p = x * x - MultiPoly.constant(2, Fraction(2, 7))
    assert p.pretty() == "−2/7 + v₁²"
    assert p.pretty(ascii_only=True) == "-2/7 + v1^2"


def test_homogeneous_parts():
    x, y = MultiPoly.var(2, 0), MultiPoly.var(2, 1)
    p = x * x + y + MultiPoly.constant(2, 3)
    assert p.degree == 2
    assert not p.is_homogeneous()
    assert p.homogeneous_part(2) == x * x
    assert p.homogeneous_part(0) == MultiPoly.constant(2, 3)
