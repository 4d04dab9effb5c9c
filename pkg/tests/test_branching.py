import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from conebranch.branching import (Sl2Action, TExpPoly, bessel_identity_check, bessel_identity_exact, holo_apply,
                                  intertwine_check, multiplicity_table, radial_inner, rho_action, sb_apply,
                                  verify_sl2_structure)
from conebranch.errors import ValidationError
from conebranch.jordan import build_algebra
from conebranch.orthopoly import build_Wp
from conebranch.poly import MultiPoly
from conebranch.stratified import L2XPairing, iota_many, sample_X
from conebranch.surd import Surd

from conftest import scalar_rep

I = Surd.i()


def test_table_sym2(sym2):
    lam = Fraction(7, 2)
    table = multiplicity_table(sym2, scalar_rep(sym2, lam), 3)
    row = table.rows[2]
    assert row.mult == 3 and row.lam == 2 * lam + 4
    assert table.rows[0].mult == 1 and table.rows[0].lam == table.alpha


def test_table_spin4_harmonics(spin4):
    table = multiplicity_table(spin4, scalar_rep(spin4, 3), 3)
    assert [r.mult for r in table.rows] == [1, 3, 6, 10]
    assert table.rows[3].harmonics == (3, 1) and table.rows[3].harmonic_dims == (7, 3)
    data = table.to_json()
    assert data["alpha"] == "6/1" and data["rows"][0] == {"p": 0, "lambda": "6", "mult": 1, "harmonics": [0],
                                                          "harmonic_dims": [1]}
    assert table.to_csv().splitlines()[0] == "p,lambda,mult,harmonics,harmonic_dims"


def test_table_rank3_no_harmonics(sym3):
    table = multiplicity_table(sym3, scalar_rep(sym3, 3), 2)
    assert [r.mult for r in table.rows] == [1, 5, 15]
    assert table.rows[1].harmonics is None
    assert sum(r.mult for r in table.rows) == math.comb(5 + 2, 5)


def test_x_generator_on_exp(spin2):
    S = Sl2Action(spin2, scalar_rep(spin2, 3))
    e = TExpPoly.t_only({0: 1}, 1)
    assert S.X(e) == TExpPoly.t_only({1: 1}, 1).scale(-I)


@pytest.mark.parametrize("case", [("spin", 2), ("spin", 3), ("sym", 2)])
def test_sl2_structure(case):
    A = build_algebra(*case)
    reports = verify_sl2_structure(A, scalar_rep(A, 3), t_deg=3, v_deg=3)
    for name in ("comm_HX", "comm_HY", "comm_XY", "casimir_corrected"):
        assert reports[name].passed, reports[name].failures
    # the constant alpha(alpha - 1) leaves a residual -alpha on e^{-t}
    assert not reports["casimir_target"].passed


def test_casimir_on_exp(spin3):
    rep = scalar_rep(spin3, 3)
    S = Sl2Action(spin3, rep)
    e = TExpPoly.t_only({0: 1}, 2)
    a = rep.alpha
    assert S.casimir(e) == e.scale(a * (a - 2))


def test_holo_examples(spin3):
    rep = scalar_rep(spin3, 3)
    e = TExpPoly.t_only({0: 1}, 0)
    assert holo_apply(spin3, rep, e, MultiPoly.constant(2, 1), 0) == TExpPoly.t_only({0: 1}, 2)
    v1 = MultiPoly.var(2, 0)
    h = holo_apply(spin3, rep, {0: 1}, v1, 1)
    rng = np.random.default_rng(0)
    t = rng.uniform(0.5, 3, 8)
    v = sample_X(spin3, 0, 1000).points[:8]
    x = iota_many(spin3, t, v)
    # t v_1 e^{-t} is r times the ambient coordinate x_1, times e^{-tr x}
    tr = np.sqrt(2) * x[:, 0]
    assert np.allclose(h.evaluate(t, v)[:, 0], spin3.r * x[:, 1] * np.exp(-tr))


def test_holo_rejects_v_dependence(spin3):
    rep = scalar_rep(spin3, 3)
    g = TExpPoly.monomial(0, (1, 0), 2)
    with pytest.raises(ValidationError):
        holo_apply(spin3, rep, g, MultiPoly.constant(2, 1), 0)


@pytest.mark.parametrize("case", [("spin", 2), ("sym", 2)])
def test_intertwining(case):
    A = build_algebra(*case)
    rep = scalar_rep(A, 3)
    for p in range(3):
        for P in build_Wp(A, rep, p).polys:
            assert intertwine_check(A, rep, p, P).passed


def test_intertwining_fails_off_wp(spin2):
    # v^2 without its lower-order correction is not in W_2
    rep = scalar_rep(spin2, 3)
    assert not intertwine_check(spin2, rep, 2, MultiPoly.var(1, 0) ** 2, k_max=2).passed


def test_rho_y_matches_stratified_on_constants(spin2):
    rep = scalar_rep(spin2, 3)
    S = Sl2Action(spin2, rep)
    for k in range(4):
        g = TExpPoly.t_only({k: 1}, 1)
        assert S.Y(g) == rho_action(rep.alpha, "Y", g)


def test_bessel_examples(spin3):
    rep = scalar_rep(spin3, 3)
    assert bessel_identity_exact(spin3, rep, MultiPoly.constant(3, 1))
    f = MultiPoly.monomial(3, (1, 0, 0), spin3.sqrt_r)
    assert bessel_identity_exact(spin3, rep, f)
    rng = np.random.default_rng(1)
    pts = (rng.uniform(0.2, 3, 30), sample_X(spin3, 1, 1000).points[:30])
    assert bessel_identity_check(spin3, rep, f, pts) < 1e-12


def test_sb_roundtrip(sym2):
    rep = scalar_rep(sym2, 3)
    S = sample_X(sym2, 8, 100_000)
    pair = L2XPairing(sym2, rep, S)
    for p in range(3):
        P = build_Wp(sym2, rep, p).polys[0]
        norm2 = pair.inner(P, P)[0].real
        res = sb_apply(sym2, rep, holo_apply(sym2, rep, {0: 1}, P, p), P, p, S, pairing=pair)
        assert res.residual < 1e-3
        assert res.fit[0] == pytest.approx(norm2, rel=1e-9)


def test_sb_orthogonal_input_vanishes(spin3):
    rep = scalar_rep(spin3, 3)
    S = sample_X(spin3, 4, 200_000)
    pair = L2XPairing(spin3, rep, S)
    P = build_Wp(spin3, rep, 2).polys[0]
    f = TExpPoly.from_parts({2: 1}, MultiPoly.constant(2, 1))
    res = sb_apply(spin3, rep, f, P, 2, S, pairing=pair)
    scale = pair.norm(P) * pair.norm(MultiPoly.constant(2, 1))
    assert np.max(np.abs(res.values)) < 5e-2 * scale


def test_sb_spin2_quadrature(spin2):
    lam = 3
    rep = scalar_rep(spin2, lam)
    S = sample_X(spin2, 5, 400_000)
    pair = L2XPairing(spin2, rep, S)
    v = MultiPoly.var(1, 0)
    f = TExpPoly.from_parts({1: 1}, v)
    res = sb_apply(spin2, rep, f, v, 1, S, pairing=pair, powers=(0,))
    s = math.sqrt(2)
    gamma_x = quad(lambda u: (1 - u * u / 2) ** (lam - 2), -s, s)[0]
    norm2 = gamma_x * quad(lambda u: u * u * (1 - u * u / 2) ** (lam - 1), -s, s)[0]
    assert res.fit[0] == pytest.approx(norm2, rel=3e-2)


def test_radial_inner_closed_form():
    # int_0^inf t^(lam - 1) e^{-2t} dt = Gamma(lam) / 2^lam
    assert radial_inner(5, {0: 1}, {0: 1}) == pytest.approx(math.gamma(5) / 32)
    assert radial_inner(5, {1: 1}, {0: 1}) == pytest.approx(math.gamma(6) / 64)
