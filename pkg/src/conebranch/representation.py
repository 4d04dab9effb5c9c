"""Representations of the structure group L on V_pi and the gamma constants.

A :class:`RepSpec` records the derived representation only through the
matrices ``dpi(L(e_i))`` for the orthonormal basis.  Group elements are never
needed beyond ``pi(P(x))`` for ``x`` in the cone.  Writing ``x = exp(y)``
gives ``P(x) = exp(2 L(y))``, so ``pi(P(x)) = exp(2 dpi(L(log x)))``, which is
what the batched evaluators below compute.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from .errors import DimensionError, DivergenceError, IntegrabilityWarning, ValidationError
from .jordan import JordanAlgebra, det_many, mult_operator, spectral_map
from .surd import Surd, from_json, to_json

POLE_TOL = 1e-9


def _exact(x):
    if isinstance(x, (Fraction, Surd)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (str, list, dict)):
        return from_json(x)
    raise ValidationError(f"representation data must be exact, got {type(x).__name__}")


@dataclass(frozen=True)
class RepSpec:
    """Derived data of pi: ``dpi_L[i]`` is the matrix of dpi(L(e_i))."""

    algebra: JordanAlgebra
    kind: str
    dim: int
    alpha: Fraction
    omega: Fraction
    dpi_L: tuple
    weights: tuple
    lam: Fraction | None = None

    @property
    def nu(self) -> Fraction:
        """The scalar by which dpi(L(e)) acts."""
        return -self.alpha / 2

    @property
    def converges(self) -> bool:
        A = self.algebra
        return self.omega > Fraction(2 * A.n, A.r) - 1

    def endo(self, i: int) -> tuple:
        return self.dpi_L[i]

    def dpi_float(self) -> np.ndarray:
        """Array of shape (n, dim, dim)."""
        return np.array([[[complex(a) for a in row] for row in M] for M in self.dpi_L])

    def identity(self) -> tuple:
        return tuple(tuple(Fraction(int(a == b)) for b in range(self.dim)) for a in range(self.dim))

    def descriptor(self) -> dict:
        r = self.algebra.r
        if self.kind == "scalar":
            return {"kind": "scalar", "lambda": f"{self.lam.numerator}/{self.lam.denominator}"}
        return {
            "kind": "matrix",
            "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
            "dpi": [[[to_json(a, r) for a in row] for row in M] for M in self.dpi_L],
        }

    @property
    def label(self) -> str:
        if self.kind == "scalar":
            return f"scalar(lambda={self.lam})"
        return f"matrix(dim={self.dim}, alpha={self.alpha})"


def _warn_if_divergent(A: JordanAlgebra, omega: Fraction):
    bound = Fraction(2 * A.n, A.r) - 1
    if omega <= bound:
        warnings.warn(f"omega = {omega} <= 2n/r - 1 = {bound}: the L2 model is not defined by a convergent integral",
                      IntegrabilityWarning, stacklevel=3)


def make_scalar_rep(A: JordanAlgebra, lam) -> RepSpec:
    """The scalar representation with all weights equal to ``lam`` (alpha = r*lam)."""
    lam = Fraction(lam)
    _warn_if_divergent(A, lam)
    first = -lam * A.sqrt_r / 2
    mats = [((first,),)] + [((Fraction(0),),) for _ in range(A.n - 1)]
    return RepSpec(A, "scalar", 1, A.r * lam, lam, tuple(mats), (lam,) * A.r, lam)


def make_matrix_rep(A: JordanAlgebra, matrices, alpha, omega=None) -> RepSpec:
    """Validate user-supplied dpi(L(e_i)) matrices; ``omega`` defaults to alpha/r."""
    alpha = Fraction(alpha)
    mats = list(matrices)
    if len(mats) != A.n:
        raise DimensionError(f"{A.name} needs {A.n} matrices, got {len(mats)}")
    size = len(mats[0])
    clean = []
    for idx, M in enumerate(mats):
        if len(M) != size or any(len(row) != size for row in M):
            raise DimensionError(f"matrix {idx} is not {size}x{size}")
        clean.append(tuple(tuple(_exact(a) for a in row) for row in M))
    target = -alpha / 2
    scaled = [[A.sqrt_r * a for a in row] for row in clean[0]]
    for a in range(size):
        for b in range(size):
            want = target if a == b else Fraction(0)
            if scaled[a][b] != want:
                raise ValidationError(
                    f"matrix 0 violates dpi(L(e)) = -alpha/2 * I: sqrt(r)*M0[{a}][{b}] = {scaled[a][b]}, expected {want}")
    omega = alpha / A.r if omega is None else Fraction(omega)
    _warn_if_divergent(A, omega)
    if size == 1:
        lam = alpha / A.r
        if all(M[0][0] == 0 for M in clean[1:]):
            return RepSpec(A, "scalar", 1, alpha, lam, tuple(clean), (lam,) * A.r, lam)
    return RepSpec(A, "matrix", size, alpha, omega, tuple(clean), (omega,) * A.r, None)


def rep_from_json(A: JordanAlgebra, data: dict) -> RepSpec:
    kind = data.get("kind")
    if kind == "scalar":
        return make_scalar_rep(A, Fraction(data["lambda"]))
    if kind == "matrix":
        mats = [[[from_json(a, A.r) for a in row] for row in M] for M in data["dpi"]]
        return make_matrix_rep(A, mats, Fraction(data["alpha"]), data.get("omega"))
    raise ValidationError(f"unknown representation kind {kind!r}")


def lie_consistency_residual(A: JordanAlgebra, rep: RepSpec) -> int:
    """Count violations of [[M_a, M_b], M_c] = M_{[L(a),L(b)] c} over basis triples.

    The inner commutator [L(a), L(b)] is a derivation, so this is the condition
    for the matrices to extend to a Lie algebra representation of the
    structure algebra.
    """
    n, k = A.n, rep.dim
    M = [np.array(m, dtype=object) for m in rep.dpi_L]
    L = [mult_operator(A, A.unit_vector(i)) for i in range(n)]
    bad = 0
    for a in range(n):
        for b in range(a + 1, n):
            D = L[a] @ L[b] - L[b] @ L[a]
            Mab = M[a] @ M[b] - M[b] @ M[a]
            for c in range(n):
                lhs = Mab @ M[c] - M[c] @ Mab
                col = D[:, c]
                rhs = sum((col[j] * M[j] for j in range(n) if col[j]), np.zeros((k, k), dtype=object))
                bad += int(not np.all(lhs == rhs))
    return bad


# group action on cone points ------------------------------------------------

def dpi_of_L_many(rep: RepSpec, coords: np.ndarray) -> np.ndarray:
    """dpi(L(y)) for a stack of coordinate vectors y, shape (N, k, k)."""
    return np.einsum("pi,iab->pab", np.asarray(coords, dtype=float), rep.dpi_float())


def pi_power_many(rep: RepSpec, coords: np.ndarray, s: float) -> np.ndarray:
    """exp(s * dpi(L(log x))) for cone points x.

    ``s = 2`` gives pi(P(x)) (that is pi(x)), ``s = -1`` gives
    pi(x^{1/2})^{-1}, ``s = -2`` gives pi(x)^{-1}.  The scalar kind returns an
    array of shape (N,) equal to Delta(x)^{-s*lam/2}; the matrix kind (N, k, k).
    """
    A = rep.algebra
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    if rep.kind == "scalar":
        return det_many(A, coords) ** (-s * float(rep.lam) / 2)
    logs = spectral_map(A, coords, np.log)
    mats = s * dpi_of_L_many(rep, logs)
    out = expm(mats)
    if not np.any(np.iscomplex(out)):
        out = out.real
    return out


# gamma constants --------------------------------------------------------------

def gamma_alpha(A: JordanAlgebra, alpha) -> float:
    """Gamma(alpha - n) / (r^(alpha - n - 1/2) 2^(alpha - n)), the radial factor of Gamma_pi."""
    a = float(alpha) - A.n
    if a <= POLE_TOL:
        raise DivergenceError(f"gamma_alpha needs alpha > n = {A.n}, got alpha = {alpha}")
    return math.exp(math.lgamma(a) - (a - 0.5) * math.log(A.r) - a * math.log(2.0))


def _gamma_arguments(A: JordanAlgebra, lam) -> list[float]:
    lam = float(lam)
    d = float(A.d)
    return [lam - A.n / A.r - (j - 1) * d / 2 for j in range(1, A.r + 1)]


def _checked_log_gamma_sum(A: JordanAlgebra, lam) -> float:
    total = 0.0
    for j, arg in enumerate(_gamma_arguments(A, lam), start=1):
        if arg <= POLE_TOL:
            raise DivergenceError(f"gamma argument for j = {j} is {arg:.6g} (pole or non-positive)")
        total += math.lgamma(arg)
    return total


def gamma_pi_formula(A: JordanAlgebra, lam) -> float:
    """2^(-r) pi^(r(r-1)d/4) prod_j Gamma(lam - n/r - (j-1)d/2) (the short product form)."""
    log = _checked_log_gamma_sum(A, lam)
    log += -A.r * math.log(2.0) + A.r * (A.r - 1) * float(A.d) / 4 * math.log(math.pi)
    return math.exp(log)


def gamma_pi_standard(A: JordanAlgebra, lam) -> float:
    """int_Omega e^(-2 tr u) Delta(u)^(lam - 2n/r) du via the cone gamma function.

    Equals 2^(n - r lam) (2 pi)^((n - r)/2) prod_j Gamma(lam - n/r - (j-1)d/2).
    """
    log = _checked_log_gamma_sum(A, lam)
    log += (A.n - A.r * float(lam)) * math.log(2.0) + (A.n - A.r) / 2 * math.log(2 * math.pi)
    return math.exp(log)


@dataclass(frozen=True)
class MCEstimate:
    value: np.ndarray | float
    stderr: np.ndarray | float
    n_samples: int


def gamma_piX_numeric(A: JordanAlgebra, rep: RepSpec, samples) -> MCEstimate:
    """Monte-Carlo value of int_X pi(e+v)^(-1) Delta(e+v)^(-2n/r) dv."""
    if not rep.converges:
        warnings.warn("Gamma_{pi,X} integrand is not integrable for this representation", IntegrabilityWarning,
                      stacklevel=2)
    amb = samples.ambient()
    weight = det_many(A, amb) ** (-2 * A.n / A.r)
    twist = pi_power_many(rep, amb, -2.0)
    if rep.kind == "scalar":
        h = twist * weight
    else:
        h = twist * weight[:, None, None]
    value, err = samples.integrate(h)
    return MCEstimate(value, err, samples.n_proposed)
