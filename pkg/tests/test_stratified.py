import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conebranch.errors import DomainError, SamplingError
from conebranch.jordan import build_algebra, det_many, in_cone_many, trace
from conebranch.poly import MultiPoly
from conebranch.stratified import (L2XPairing, ball_volume, bump, in_x_many, iota, iota_inv, iota_inv_many,
                                   iota_many, load_samples, sample_X, save_samples, unitarity_constant,
                                   verify_jacobian, x_radius)

from conftest import scalar_rep


@pytest.fixture(scope="module", params=[("spin", 2), ("spin", 4), ("sym", 2), ("sym", 3), ("herm", 2)],
                ids=lambda c: f"{c[0]}{c[1]}")
def alg(request):
    return build_algebra(*request.param)


def test_samples_inside_x(alg):
    S = sample_X(alg, 1, 20_000)
    assert S.n_accepted > 0
    assert np.all(in_x_many(alg, S.points))
    assert np.all(np.linalg.norm(S.points, axis=1) <= x_radius(alg) + 1e-12)


def test_same_seed_same_samples(alg):
    a, b = sample_X(alg, 9, 70_000), sample_X(alg, 9, 70_000)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, sample_X(alg, 10, 70_000).points)


def test_volume_rank2_is_ball(spin4):
    S = sample_X(spin4, 3, 10_000)
    assert S.acceptance_rate == 1.0
    assert S.volume()[0] == pytest.approx(ball_volume(3, math.sqrt(2)))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10), st.integers(0, 2 ** 31))
def test_iota_roundtrip(alg, t, seed):
    v = sample_X(alg, seed % 1000, 2_000).points[:3]
    x = iota_many(alg, np.full(3, t), v)
    assert np.all(in_cone_many(alg, x))
    t2, v2 = iota_inv_many(alg, x)
    assert np.allclose(t2, t) and np.allclose(v2, v, atol=1e-9)


def test_iota_trace(alg):
    v = sample_X(alg, 2, 1_000).points[0]
    x = iota(alg, 2.5, v)
    assert trace(alg, x) == pytest.approx(2.5)


def test_iota_domain_errors(spin2):
    with pytest.raises(DomainError):
        iota(spin2, -1.0, np.zeros(1))
    with pytest.raises(DomainError):
        iota_inv(spin2, -spin2.identity().astype(float))


def test_sampling_error_on_tiny_count(spin2):
    with pytest.raises(SamplingError):
        sample_X(spin2, 0, 0)


def test_cache_roundtrip(tmp_path, sym3):
    S = sample_X(sym3, 4, 5_000)
    path = tmp_path / "x.xsmp"
    save_samples(path, S)
    T = load_samples(path, sym3)
    assert np.array_equal(S.points, T.points) and T.count == S.count and T.seed == 4
    assert path.read_bytes()[:4] == b"XSMP"
    with pytest.raises(SamplingError):
        load_samples(path, build_algebra("sym", 2))


def test_pairing_is_hermitian_and_positive(sym2):
    rep = scalar_rep(sym2, 3)
    S = sample_X(sym2, 7, 50_000)
    pair = L2XPairing(sym2, rep, S)
    fs = [MultiPoly.constant(2, 1), MultiPoly.var(2, 0), MultiPoly.var(2, 1) * MultiPoly.var(2, 0)]
    G = pair.gram(fs)
    assert np.allclose(G, G.conj().T)
    assert np.all(np.linalg.eigvalsh(G) > 0)
    val, _ = pair.inner(fs[1], fs[2])
    assert val == pytest.approx(G[1, 2])


def test_jacobian_small(spin2):
    res = verify_jacobian(spin2, bump(spin2), 3, 200_000)
    assert res.rel_err < 3e-2
    assert abs(res.lhs - res.rhs) < 4 * math.hypot(res.lhs_stderr, res.rhs_stderr)


def test_bump_support(sym2):
    f = bump(sym2, 0.5)
    x = np.zeros((2, sym2.n))
    x[0, 0] = math.sqrt(2)
    x[1, 0] = 5.0
    vals = f(x)
    assert vals[0] > 0 and vals[1] == 0


def test_unitarity_constant_positive(spin3):
    assert unitarity_constant(spin3, 6) > 0


def test_delta_matches_det(sym3):
    S = sample_X(sym3, 1, 10_000)
    assert S.ambient().shape == (S.n_accepted, sym3.n)
    assert np.allclose(S.delta, det_many(sym3, S.ambient()))
