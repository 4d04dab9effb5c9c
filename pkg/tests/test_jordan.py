from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conebranch.errors import ConfigurationError
from conebranch.jordan import (Family, build_algebra, cone_ops, det, det_many, eigvals_many, frame_check, in_cone_many,
                               inner, jmul, quad_rep, spectral, spectral_map, trace)

CASES = [("spin", 2), ("spin", 3), ("spin", 5), ("sym", 2), ("sym", 3), ("herm", 2)]
DIMS = {("spin", 2): (2, 2, 0), ("spin", 3): (3, 2, 1), ("spin", 5): (5, 2, 3), ("sym", 2): (3, 2, 1),
        ("sym", 3): (6, 3, 1), ("herm", 2): (4, 2, 2)}


@pytest.fixture(scope="module", params=CASES, ids=lambda c: f"{c[0]}{c[1]}")
def alg(request):
    return build_algebra(*request.param)


def test_dimensions(alg):
    n, r, d = DIMS[(alg.family.value, alg.size)]
    assert (alg.n, alg.r, alg.d) == (n, r, d)
    assert alg.n == alg.r + alg.d * alg.r * (alg.r - 1) / 2


def test_unit_and_frame(alg):
    e = alg.identity()
    assert trace(alg, e) == alg.r
    assert det(alg, e) == 1
    assert frame_check(alg)
    for c in alg.frame:
        assert np.all(jmul(alg, c, c) == c)
        assert trace(alg, c) == 1


def test_orthonormal_basis(alg):
    for i in range(alg.n):
        for j in range(alg.n):
            assert inner(alg, alg.unit_vector(i), alg.unit_vector(j)) == (1 if i == j else 0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_jordan_identity_exact(alg, seed):
    rng = np.random.default_rng(seed)
    x, y = alg.random_rational(rng), alg.random_rational(rng)
    x2 = jmul(alg, x, x)
    assert np.all(jmul(alg, x, y) == jmul(alg, y, x))
    assert np.all(jmul(alg, x, jmul(alg, x2, y)) == jmul(alg, x2, jmul(alg, x, y)))
    z = alg.random_rational(rng)
    assert inner(alg, jmul(alg, x, y), z) == inner(alg, x, jmul(alg, y, z))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_quadratic_rep(alg, seed):
    rng = np.random.default_rng(seed)
    x = alg.random_rational(rng)
    assert np.all(quad_rep(alg, x) @ alg.identity() == jmul(alg, x, x))
    xf, yf = rng.standard_normal(alg.n), rng.standard_normal(alg.n)
    lhs = det(alg, quad_rep(alg, yf) @ xf)
    assert lhs == pytest.approx(det(alg, yf) ** 2 * det(alg, xf), rel=1e-9, abs=1e-9)


def test_exact_det_matches_float(alg):
    rng = np.random.default_rng(3)
    for _ in range(5):
        x = alg.random_rational(rng)
        assert float(complex(det(alg, x)).real) == pytest.approx(det_many(alg, x.astype(float)[None, :])[0],
                                                                 rel=1e-9, abs=1e-9)


def test_spectral_sqrt(alg):
    rng = np.random.default_rng(5)
    x = spectral_map(alg, rng.standard_normal((4, alg.n)), np.exp)
    assert np.all(in_cone_many(alg, x))
    for xi in x:
        inside, root = cone_ops(alg, xi)
        assert inside
        assert np.allclose(jmul(alg, root, root), xi, atol=1e-10)
        assert np.allclose(np.sort(spectral(alg, xi)), np.sort(eigvals_many(alg, xi[None, :])[0]))


def test_outside_cone(alg):
    inside, root = cone_ops(alg, -alg.identity().astype(float))
    assert not inside and root is None


def test_family_parse_and_errors():
    assert Family.parse("Spin") is Family.SPIN
    with pytest.raises(ConfigurationError):
        build_algebra("spin", 1)
    with pytest.raises(ConfigurationError):
        build_algebra("octonion", 3)


def test_hash_stable():
    assert build_algebra("sym", 3).hash == build_algebra("sym", 3).hash
    assert build_algebra("sym", 3).hash != build_algebra("sym", 2).hash


def test_canonical_roundtrip(sym3):
    rng = np.random.default_rng(0)
    x = sym3.random_rational(rng)
    assert np.all(sym3.from_canonical(sym3.to_canonical(list(x))) == x)


def test_spin2_determinant(spin2):
    # Spin(2) in orthonormal coordinates: det = (x0^2 - x1^2) / 2
    x = spin2.element([Fraction(3), Fraction(1)])
    assert det(spin2, x) == 4
