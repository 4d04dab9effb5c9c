import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from conebranch.errors import DimensionError, DivergenceError, IntegrabilityWarning, ValidationError
from conebranch.jordan import build_algebra, det_many, spectral_map
from conebranch.representation import (gamma_alpha, gamma_pi_formula, gamma_pi_standard, gamma_piX_numeric,
                                       lie_consistency_residual, make_matrix_rep, make_scalar_rep, pi_power_many,
                                       rep_from_json)
from conebranch.stratified import sample_X

from conftest import scalar_rep


def _copies(A, lam, k):
    """k copies of the scalar representation, given in matrix form."""
    first = -Fraction(lam) * A.sqrt_r / 2
    M0 = [[first if a == b else 0 for b in range(k)] for a in range(k)]
    zero = [[0] * k for _ in range(k)]
    return make_matrix_rep(A, [M0] + [zero] * (A.n - 1), A.r * Fraction(lam))


def test_scalar_rep_fields(spin2):
    rep = make_scalar_rep(spin2, 3)
    assert rep.alpha == 6 and rep.kind == "scalar" and rep.dim == 1
    assert rep.converges
    assert lie_consistency_residual(spin2, rep) == 0


def test_integrability_warning(spin3):
    with pytest.warns(IntegrabilityWarning):
        make_scalar_rep(spin3, 2)


def test_matrix_rep_schur_violation(spin2):
    with pytest.raises(ValidationError, match="matrix 0"):
        make_matrix_rep(spin2, [[[1, 0], [0, 1]], [[0, 0], [0, 0]]], 6)


def test_matrix_rep_wrong_count(spin3):
    with pytest.raises(DimensionError):
        make_matrix_rep(spin3, [[[1]]], 6)


def test_one_by_one_matrix_is_scalar(sym2):
    rep = _copies(sym2, 3, 1)
    assert rep.kind == "scalar" and rep.lam == 3


def test_json_roundtrip(sym2):
    rep = _copies(sym2, 4, 2)
    assert rep.kind == "matrix"
    again = rep_from_json(sym2, rep.descriptor())
    assert again.dpi_L == rep.dpi_L and again.alpha == rep.alpha
    assert rep_from_json(sym2, make_scalar_rep(sym2, 3).descriptor()).lam == 3


def test_pi_power_scalar_and_matrix_agree(sym2):
    rng = np.random.default_rng(1)
    x = spectral_map(sym2, rng.standard_normal((6, sym2.n)), np.exp)
    scal = pi_power_many(make_scalar_rep(sym2, 3), x, -1.0)
    mat = pi_power_many(_copies(sym2, 3, 2), x, -1.0)
    assert np.allclose(scal, det_many(sym2, x) ** 1.5)
    assert np.allclose(mat, scal[:, None, None] * np.eye(2))


def test_gamma_alpha_pole(spin2):
    with pytest.raises(DivergenceError):
        gamma_alpha(spin2, 2)


def test_gamma_formula_pole_names_factor(sym3):
    # Gamma(lam - n/r - (j-1)d/2) at lam = 2.5: j = 2 hits Gamma(0)
    with pytest.raises(DivergenceError, match="j=2|j = 2"):
        gamma_pi_formula(sym3, Fraction(5, 2))


def test_gamma_standard_spin2_closed_form(spin2):
    # Spin(2) in eigenvalue coordinates has unit Jacobian, so the cone integral
    # splits into (int_0^inf s^(lam-2) e^(-2s) ds)^2
    for lam in (3, 4, Fraction(7, 2)):
        one_d = math.gamma(float(lam) - 1) / 2 ** (float(lam) - 1)
        assert gamma_pi_standard(spin2, lam) == pytest.approx(one_d ** 2)


@pytest.mark.parametrize("case,lam", [(("spin", 2), 3), (("sym", 2), 4), (("herm", 2), 4)])
def test_gamma_factorization_mc(case, lam):
    A = build_algebra(*case)
    rep = scalar_rep(A, lam)
    est = gamma_piX_numeric(A, rep, sample_X(A, 11, 200_000))
    product = gamma_alpha(A, rep.alpha) * float(est.value)
    se = gamma_alpha(A, rep.alpha) * float(est.stderr)
    assert abs(product - gamma_pi_standard(A, lam)) < 4 * se + 1e-12


def test_matrix_gamma_matches_scalar(sym2):
    S = sample_X(sym2, 5, 50_000)
    g1 = gamma_piX_numeric(sym2, make_scalar_rep(sym2, 3), S).value
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrabilityWarning)
        g2 = gamma_piX_numeric(sym2, _copies(sym2, 3, 2), S).value
    assert np.allclose(g2, g1 * np.eye(2))
