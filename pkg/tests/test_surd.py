from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conebranch.surd import Surd, exact_sqrt, format_exact, from_json, squarefree_split, to_json

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
radicands = st.sampled_from([1, 2, 3, 5, 6, -1, -2])


@st.composite
def surds(draw):
    terms = {draw(radicands): draw(rationals) for _ in range(draw(st.integers(1, 3)))}
    return Surd.from_terms(terms)


def test_squarefree_split():
    assert squarefree_split(12) == (2, 3)
    assert squarefree_split(18) == (3, 2)
    assert squarefree_split(7) == (1, 7)


def test_sqrt_products():
    assert exact_sqrt(2) * exact_sqrt(3) == exact_sqrt(6)
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(8) == 2 * exact_sqrt(2)
    assert Surd.i() ** 2 == -1


def test_sqrt_values_float():
    assert float(exact_sqrt(6)) == pytest.approx(6 ** 0.5)
    assert complex(Surd.i() * exact_sqrt(2)) == pytest.approx(1j * 2 ** 0.5)


@given(surds(), surds(), surds())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(surds())
def test_inverse(a):
    if a == 0:
        return
    assert a * (1 / a) == 1


@given(surds())
def test_float_consistency(a):
    assert complex(a * a) == pytest.approx(complex(a) ** 2, rel=1e-9, abs=1e-9)


@given(surds())
def test_json_roundtrip(a):
    assert from_json(to_json(a)) == a


def test_format_exact():
    assert format_exact(Fraction(3, 2)) == "3/2"
    assert "sqrt(2)" in format_exact(exact_sqrt(2))
