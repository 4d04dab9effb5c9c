"""Eigenspaces W_p of D_pi, harmonic decomposition and reproducing kernels.

Exact route: every homogeneous ``Q`` of degree ``p`` lifts uniquely to an
eigenpolynomial ``P = P_p + P_{p-1} + ... + P_0`` with ``P_p = Q``; the
homogeneous pieces solve

    (i - p)(i + p + alpha - 1) P_i = r Lap P_{i+2} + Psi P_{i+1}

downward from ``i = p - 1``.  Numerical route: Gram-Schmidt of the degree-p
monomials against all lower degrees in the Monte-Carlo L2_pi(X) pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .diffop import DiffOp, build_dpi, build_psi_pi, dpi_eigenvalue, laplacian
from .errors import ResonanceError, SamplingError, ValidationError
from .jordan import JordanAlgebra
from .poly import MultiPoly, monomials, norm_squared_poly, product_basis
from .representation import RepSpec
from .stratified import L2XPairing, SampleSet

COND_LIMIT = 1e8


@lru_cache(maxsize=64)
def _operators(A: JordanAlgebra, rep: RepSpec) -> tuple[DiffOp, DiffOp, DiffOp]:
    m = A.n - 1
    return (laplacian(m, rep.dim).scale(Fraction(A.r)), build_psi_pi(A, rep), build_dpi(A, rep))


def lift(A: JordanAlgebra, rep: RepSpec, Q: MultiPoly) -> MultiPoly:
    """The eigenpolynomial of D_pi whose top homogeneous part is ``Q``."""
    if Q.is_zero():
        return Q
    if not Q.is_homogeneous():
        raise ValidationError("lift needs a homogeneous polynomial")
    if Q.nvars != A.n - 1 or Q.dim != rep.dim:
        raise ValidationError(f"expected a polynomial in {A.n - 1} variables with {rep.dim} components")
    rlap, psi, _ = _operators(A, rep)
    p = Q.degree
    alpha = rep.alpha
    pieces = {p: Q, p + 1: MultiPoly.zero(Q.nvars, Q.dim)}
    total = Q
    for i in range(p - 1, -1, -1):
        denom = (i - p) * (i + p + alpha - 1)
        if denom == 0:
            raise ResonanceError(i, f"recursion denominator vanishes at i = {i} for alpha = {alpha}, p = {p}")
        num = rlap(pieces[i + 2]) + psi(pieces[i + 1])
        pieces[i] = num.scale(1 / Fraction(denom))
        total = total + pieces[i]
    return total


@dataclass(frozen=True)
class OrthoBasis:
    p: int
    rep: RepSpec
    polys: tuple
    provenance: str
    tops: tuple = field(default=(), repr=False)

    @property
    def eigenvalue(self) -> Fraction:
        return dpi_eigenvalue(self.p, self.rep.alpha)

    def __len__(self):
        return len(self.polys)

    def to_json(self) -> dict:
        lam = self.eigenvalue
        r = self.rep.algebra.r
        return {
            "p": self.p,
            "alpha": f"{self.rep.alpha.numerator}/{self.rep.alpha.denominator}",
            "eigenvalue": f"{lam.numerator}/{lam.denominator}",
            "provenance": self.provenance,
            "dimension": len(self.polys),
            "polys": [P.to_json(r) for P in self.polys],
        }


def wp_dimension(A: JordanAlgebra, rep: RepSpec, p: int) -> int:
    return comb(A.n + p - 2, A.n - 2) * rep.dim


def build_Wp(A: JordanAlgebra, rep: RepSpec, p: int) -> OrthoBasis:
    """Lift the monomial basis of Pol_p(X, V_pi); every output is checked against D_pi exactly."""
    if p < 0:
        raise ValidationError("p must be non-negative")
    D = _operators(A, rep)[2]
    lam = dpi_eigenvalue(p, rep.alpha)
    tops = product_basis(A.n - 1, p, rep.dim)
    polys = []
    for Q in tops:
        P = lift(A, rep, Q)
        if not (D(P) - P.scale(lam)).is_zero():
            raise ValidationError(f"eigen-equation fails for the lift of {Q.pretty(ascii_only=True)}")
        polys.append(P)
    return OrthoBasis(p, rep, tuple(polys), "recursion", tuple(tops))


def eigen_residual(A: JordanAlgebra, rep: RepSpec, P: MultiPoly, p: int) -> MultiPoly:
    D = _operators(A, rep)[2]
    return D(P) - P.scale(dpi_eigenvalue(p, rep.alpha))


def _coef_matrix(polys, exps) -> np.ndarray:
    """Float coefficients (rows = polys) over the listed exponent/component slots."""
    out = np.zeros((len(polys), len(exps)), dtype=complex)
    for a, P in enumerate(polys):
        for b, (e, comp) in enumerate(exps):
            v = P.terms.get(e)
            if v is not None:
                out[a, b] = complex(v[comp])
    return out


def gram_schmidt_Wp(A: JordanAlgebra, rep: RepSpec, p: int, samples: SampleSet,
                    pairing: L2XPairing | None = None) -> OrthoBasis:
    """Degree-p monomials minus their L2_pi(X) projection onto Pol_{<p}, from samples."""
    pairing = pairing or L2XPairing(A, rep, samples)
    m, dim = A.n - 1, rep.dim
    tops = product_basis(m, p, dim)
    if p == 0:
        return OrthoBasis(0, rep, tuple(tops), "gram_schmidt", tuple(tops))
    low = [q for k in range(p) for q in product_basis(m, k, dim)]
    G_low = pairing.gram(low)
    cond = np.linalg.cond(G_low)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SamplingError(f"Gram matrix condition number {cond:.3g} exceeds {COND_LIMIT:.0e}")
    cross = pairing.gram(low, tops)
    coefs = np.linalg.solve(G_low, cross)
    real = not np.iscomplexobj(coefs)
    polys = []
    for b, Q in enumerate(tops):
        P = Q.to_float()
        for a, q in enumerate(low):
            c = coefs[a, b]
            P = P - q.to_float().scale(float(c) if real else complex(c))
        polys.append(P)
    return OrthoBasis(p, rep, tuple(polys), "gram_schmidt", tuple(tops))


def span_agreement(pairing: L2XPairing, first, second) -> np.ndarray:
    """Cosines of the principal angles between two spans in the sampled pairing."""
    G1, G2 = pairing.gram(first), pairing.gram(second)
    C = pairing.gram(first, second)
    W1 = np.linalg.inv(np.linalg.cholesky(G1))
    W2 = np.linalg.inv(np.linalg.cholesky(G2))
    M = W1 @ C @ W2.conj().T
    return np.linalg.svd(M, compute_uv=False)


# harmonic analysis (rank 2) -----------------------------------------------------

def harmonic_dimension(m: int, k: int) -> int:
    """dim of degree-k harmonic polynomials in m variables."""
    def c(a, b):
        return comb(a, b) if a >= 0 and b >= 0 else 0

    if k < 0:
        return 0
    return c(m + k - 1, m - 1) - c(m + k - 3, m - 1)


def harmonic_projection(P: MultiPoly) -> MultiPoly:
    """Harmonic part of a homogeneous polynomial by iterated Laplacians."""
    m, p = P.nvars, P.degree
    if P.is_zero():
        return P
    r2 = norm_squared_poly(m)
    out = P
    lap = P
    power = MultiPoly.constant(m, 1)
    coef = Fraction(1)
    for k in range(1, p // 2 + 1):
        lap = lap.laplacian()
        if lap.is_zero():
            break
        power = power * r2
        coef = -coef / (2 * k * (m + 2 * p - 2 * k - 2))
        out = out + (power * lap).scale(coef)
    return out


def harmonic_decompose(P: MultiPoly, nvars: int | None = None) -> list[tuple[int, MultiPoly]]:
    """Write P = sum_j |v|^{2j} h_{p-2j} with harmonic h; zero pieces are omitted."""
    if nvars is not None and nvars != P.nvars:
        raise ValidationError(f"polynomial has {P.nvars} variables, expected {nvars}")
    if P.dim != 1:
        raise ValidationError("harmonic_decompose needs a scalar polynomial")
    if not P.is_homogeneous():
        raise ValidationError("harmonic_decompose needs a homogeneous polynomial")
    r2 = norm_squared_poly(P.nvars)
    out, rest, j = [], P, 0
    while not rest.is_zero():
        h = harmonic_projection(rest)
        if not h.is_zero():
            out.append((j, h))
        rest = (rest - h).divmod_exact(r2)
        j += 1
    return out


def _independent(polys: list[MultiPoly]) -> list[MultiPoly]:
    """Greedy exact selection of a linearly independent subset."""
    chosen, rows, pivots = [], [], []
    keys = sorted({e for P in polys for e in P.terms})
    for P in polys:
        vec = [P.terms.get(e, (Fraction(0),))[0] for e in keys]
        for row, piv in zip(rows, pivots):
            if vec[piv]:
                f = vec[piv] / row[piv]
                vec = [a - f * b for a, b in zip(vec, row)]
        nz = next((i for i, a in enumerate(vec) if a), None)
        if nz is not None:
            rows.append(vec)
            pivots.append(nz)
            chosen.append(P)
    return chosen


def harmonic_basis(m: int, k: int) -> list[MultiPoly]:
    projs = [harmonic_projection(MultiPoly.monomial(m, e)) for e in monomials(m, k)]
    basis = _independent([h for h in projs if not h.is_zero()])
    if len(basis) != harmonic_dimension(m, k):
        raise ValidationError("harmonic basis has the wrong dimension")
    return basis


def harmonic_piece_basis(A: JordanAlgebra, rep: RepSpec, p: int, j: int) -> list[MultiPoly]:
    """Lifts of |v|^{2j} H_{p-2j}: the summand F_p^j of W_p."""
    if rep.dim != 1 or A.r != 2:
        raise ValidationError("harmonic pieces are built for rank-2 algebras with scalar representations")
    if not 0 <= 2 * j <= p:
        raise ValidationError(f"need 0 <= j <= p/2, got j = {j}")
    m = A.n - 1
    r2j = norm_squared_poly(m) ** j
    return [lift(A, rep, r2j * h) for h in harmonic_basis(m, p - 2 * j)]


@dataclass
class KernelRank2:
    """K(u, v) = sum_a P_a(u) P_a(v) over an orthonormal basis of F_p^j."""

    p: int
    j: int
    basis: list
    gram_inverse: np.ndarray

    def features(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.stack([P.evaluate_many(points)[:, 0] for P in self.basis], axis=1)

    def __call__(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Kernel values at paired rows of ``u`` and ``v``."""
        Fu, Fv = self.features(u), self.features(v)
        return np.einsum("pa,ab,pb->p", Fu, self.gram_inverse, np.conj(Fv))

    def section(self, v: np.ndarray):
        """The function u -> K(u, v) for a single point v."""
        coef = self.gram_inverse @ np.conj(self.features(np.asarray(v)[None, :])[0])

        def f(points: np.ndarray) -> np.ndarray:
            return self.features(points) @ coef

        return f


def kernel_rank2(A: JordanAlgebra, rep: RepSpec, p: int, j: int, samples: SampleSet,
                 pairing: L2XPairing | None = None) -> KernelRank2:
    pairing = pairing or L2XPairing(A, rep, samples)
    basis = harmonic_piece_basis(A, rep, p, j)
    G = pairing.gram(basis)
    return KernelRank2(p, j, basis, np.linalg.inv(G))


# classical oracle ---------------------------------------------------------------------

def gegenbauer_coefficients(p: int, mu: Fraction) -> list[Fraction]:
    """Coefficients (ascending powers) of C_p^mu from the three-term recurrence."""
    prev, cur = [Fraction(1)], [Fraction(0), 2 * mu]
    if p == 0:
        return prev
    for k in range(2, p + 1):
        nxt = [Fraction(0)] * (k + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] += 2 * (k + mu - 1) * c / k
        for i, c in enumerate(prev):
            nxt[i] -= (k + 2 * mu - 2) * c / k
        prev, cur = cur, nxt
    return cur


def gegenbauer_scaled(p: int, alpha) -> MultiPoly:
    """2^{p/2} times the monic C_p^{(alpha-1)/2} evaluated at v / sqrt 2, as a polynomial in v."""
    mu = (Fraction(alpha) - 1) / 2
    coefs = gegenbauer_coefficients(p, mu)
    lead = coefs[p]
    if lead == 0:
        raise ValidationError("degenerate Gegenbauer parameter")
    terms = {}
    for k in range(p + 1):
        c = coefs[k] / lead
        if c:
            # x^k = 2^{-k/2} v^k, then multiply by 2^{p/2}; p - k is even
            terms[(k,)] = c * Fraction(2) ** ((p - k) // 2)
    return MultiPoly.from_scalar_terms(1, terms)
