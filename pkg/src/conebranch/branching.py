"""Branching tables, symmetry-breaking/holographic operators and sl2 identities.

K-finite vectors in stratified coordinates are ``Q(t, v) e^{-t}``; a
:class:`TExpPoly` stores ``Q`` as a :class:`MultiPoly` whose variable 0 is
``t`` (Laurent exponents allowed) and whose remaining variables are the
X-coordinates.

The sl2 triple acting on them is

    X = -i t,    H = 2 t d_t + alpha,    Y = -i (t d_t^2 + alpha d_t + t^{-1} D_pi),

normalised so that [H, X] = 2X, [H, Y] = -2Y and [X, Y] = H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .diffop import DiffOp, bessel_e_component, dpi_eigenvalue
from .errors import ValidationError
from .jordan import JordanAlgebra
from .orthopoly import _operators, build_Wp, harmonic_dimension
from .poly import MultiPoly, monomials_upto
from .representation import RepSpec, gamma_alpha, gamma_piX_numeric
from .stratified import L2XPairing, SampleSet, iota_many, sample_X, unitarity_constant
from .surd import Surd, frac_str

I_UNIT = Surd.i()


# branching tables -----------------------------------------------------------------

@dataclass(frozen=True)
class BranchRow:
    p: int
    lam: Fraction
    mult: int
    harmonics: tuple | None = None
    harmonic_dims: tuple | None = None


@dataclass(frozen=True)
class BranchingTable:
    algebra: str
    rep: str
    alpha: Fraction
    rows: tuple

    def to_json(self) -> dict:
        rows = []
        for row in self.rows:
            item = {"p": row.p, "lambda": str(row.lam), "mult": row.mult}
            if row.harmonics is not None:
                item["harmonics"] = list(row.harmonics)
                item["harmonic_dims"] = list(row.harmonic_dims)
            rows.append(item)
        return {"algebra": self.algebra, "rep": self.rep, "alpha": frac_str(self.alpha), "rows": rows}

    def to_csv(self) -> str:
        has_h = any(row.harmonics is not None for row in self.rows)
        head = "p,lambda,mult" + (",harmonics,harmonic_dims" if has_h else "")
        lines = [head]
        for row in self.rows:
            line = f"{row.p},{row.lam},{row.mult}"
            if has_h:
                line += "," + ";".join(map(str, row.harmonics)) + "," + ";".join(map(str, row.harmonic_dims))
            lines.append(line)
        return "\n".join(lines) + "\n"


def multiplicity_table(A: JordanAlgebra, rep: RepSpec, p_max: int) -> BranchingTable:
    """Rows p = 0..p_max: rho_{alpha+2p} occurs C(n+p-2, n-2) * dim V_pi times."""
    if p_max < 0:
        raise ValidationError("p_max must be non-negative")
    m = A.n - 1
    harmonic = A.r == 2 and rep.kind == "scalar"
    rows = []
    for p in range(p_max + 1):
        mult = comb(A.n + p - 2, A.n - 2) * rep.dim
        if harmonic:
            degs = tuple(p - 2 * j for j in range(p // 2 + 1))
            rows.append(BranchRow(p, rep.alpha + 2 * p, mult, degs, tuple(harmonic_dimension(m, k) for k in degs)))
        else:
            rows.append(BranchRow(p, rep.alpha + 2 * p, mult))
    return BranchingTable(A.name, rep.label, rep.alpha, tuple(rows))


# K-finite vectors ----------------------------------------------------------------------

class TExpPoly:
    """Q(t, v) e^{-t} with Q a (Laurent in t) polynomial; variable 0 is t."""

    __slots__ = ("poly",)

    def __init__(self, poly: MultiPoly):
        self.poly = poly

    @classmethod
    def from_parts(cls, t_coeffs: dict, v_poly: MultiPoly) -> "TExpPoly":
        """(sum_k t_coeffs[k] t^k) * v_poly(v) e^{-t}."""
        m = v_poly.nvars
        g = MultiPoly(m + 1, {(k,) + (0,) * m: (c,) for k, c in t_coeffs.items()})
        return cls(g * v_poly.pad_vars(before=1))

    @classmethod
    def t_only(cls, t_coeffs: dict, nvars_v: int = 0, dim: int = 1) -> "TExpPoly":
        return cls.from_parts(t_coeffs, MultiPoly.constant(nvars_v, 1, dim) if dim == 1 else
                              MultiPoly(nvars_v, {(0,) * nvars_v: tuple(Fraction(1) for _ in range(dim))}, dim))

    @classmethod
    def monomial(cls, k: int, exp, nvars_v: int, dim: int = 1, comp: int = 0) -> "TExpPoly":
        return cls(MultiPoly.monomial(nvars_v + 1, (k,) + tuple(exp), 1, dim, comp))

    @property
    def nvars_v(self) -> int:
        return self.poly.nvars - 1

    @property
    def dim(self) -> int:
        return self.poly.dim

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __add__(self, other: "TExpPoly") -> "TExpPoly":
        return TExpPoly(self.poly + other.poly)

    def __sub__(self, other: "TExpPoly") -> "TExpPoly":
        return TExpPoly(self.poly - other.poly)

    def __neg__(self) -> "TExpPoly":
        return TExpPoly(-self.poly)

    def scale(self, c) -> "TExpPoly":
        return TExpPoly(self.poly.scale(c))

    def __eq__(self, other):
        return isinstance(other, TExpPoly) and self.poly == other.poly

    __hash__ = None

    def times_t(self, k: int = 1) -> "TExpPoly":
        shift = (k,) + (0,) * self.nvars_v
        return TExpPoly(MultiPoly._raw(self.poly.nvars, self.dim,
                                       {tuple(a + b for a, b in zip(e, shift)): v for e, v in self.poly.terms.items()}))

    def times_poly(self, P: MultiPoly) -> "TExpPoly":
        """Multiply by a scalar polynomial in (t, v)."""
        return TExpPoly(self.poly * P)

    def d_t(self) -> "TExpPoly":
        """t-derivative of the full function: (Q_t - Q) e^{-t}."""
        return TExpPoly(self.poly.diff(0) - self.poly)

    def apply_v(self, op: DiffOp) -> "TExpPoly":
        return TExpPoly(op.pad_vars(before=1).apply(self.poly))

    def t_degree_range(self) -> tuple[int, int]:
        ks = [e[0] for e in self.poly.terms]
        return (min(ks), max(ks)) if ks else (0, 0)

    def t_slices(self) -> dict[int, MultiPoly]:
        """{k: Q_k(v)} with Q = sum_k t^k Q_k."""
        out: dict[int, dict] = {}
        for e, v in self.poly.terms.items():
            out.setdefault(e[0], {})[e[1:]] = v
        return {k: MultiPoly(self.nvars_v, terms, self.dim) for k, terms in sorted(out.items())}

    def evaluate(self, t: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Values at paired (t, v) rows, including e^{-t}; shape (N, dim)."""
        t = np.asarray(t, dtype=float)
        pts = np.column_stack([t, np.atleast_2d(v)])
        return self.poly.evaluate_many(pts) * np.exp(-t)[:, None]

    def pretty(self, ascii_only: bool = False) -> str:
        names = ["t"] + [f"v{i}" if ascii_only else f"v{str(i).translate(str.maketrans('0123456789', '₀₁₂₃₄₅₆₇₈₉'))}"
                         for i in range(1, self.nvars_v + 1)]
        body = self.poly.pretty(names, ascii_only)
        return f"({body})*exp(-t)" if ascii_only else f"({body})·e^(−t)"

    def __repr__(self):
        return f"TExpPoly({self.pretty(ascii_only=True)})"


# sl2 generators ------------------------------------------------------------------------------

def radial_bessel(alpha, f: TExpPoly) -> TExpPoly:
    """t f'' + alpha f' in the t variable."""
    f1 = f.d_t()
    return f1.d_t().times_t(1) + f1.scale(Fraction(alpha))


def gen_X(f: TExpPoly) -> TExpPoly:
    return f.times_t(1).scale(-I_UNIT)


def gen_H(alpha, f: TExpPoly) -> TExpPoly:
    return f.d_t().times_t(1).scale(Fraction(2)) + f.scale(Fraction(alpha))


class Sl2Action:
    """The stratified sl2 triple for (A, rep)."""

    def __init__(self, A: JordanAlgebra, rep: RepSpec):
        self.A, self.rep = A, rep
        self.alpha = rep.alpha
        self.D = _operators(A, rep)[2]

    def X(self, f: TExpPoly) -> TExpPoly:
        return gen_X(f)

    def H(self, f: TExpPoly) -> TExpPoly:
        return gen_H(self.alpha, f)

    def nbar(self, f: TExpPoly) -> TExpPoly:
        """i (B_alpha + t^{-1} D_pi), the n-bar action in the stratified model."""
        return (radial_bessel(self.alpha, f) + f.apply_v(self.D).times_t(-1)).scale(I_UNIT)

    def Y(self, f: TExpPoly) -> TExpPoly:
        """-nbar: the member of the triple with [X, Y] = H."""
        return -self.nbar(f)

    def D_pi(self, f: TExpPoly) -> TExpPoly:
        return f.apply_v(self.D)

    def casimir(self, f: TExpPoly) -> TExpPoly:
        """H^2 + 2H + 4YX."""
        Hf = self.H(f)
        return self.H(Hf) + Hf.scale(Fraction(2)) + self.Y(self.X(f)).scale(Fraction(4))


def rho_action(lam, gen: str, g: TExpPoly) -> TExpPoly:
    """d rho_lam on functions of t: X = -i t, H = 2t d_t + lam, Y = -i (t d_t^2 + lam d_t)."""
    if gen == "X":
        return gen_X(g)
    if gen == "H":
        return gen_H(lam, g)
    if gen == "Y":
        return radial_bessel(lam, g).scale(-I_UNIT)
    raise ValueError(f"unknown generator {gen!r}")


def spanning_set(A: JordanAlgebra, rep: RepSpec, t_deg: int = 5, v_deg: int = 4) -> list[TExpPoly]:
    m = A.n - 1
    return [TExpPoly.monomial(k, exp, m, rep.dim, comp)
            for k in range(t_deg + 1) for exp in monomials_upto(m, v_deg) for comp in range(rep.dim)]


@dataclass
class CheckReport:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)


def verify_sl2_structure(A: JordanAlgebra, rep: RepSpec, t_deg: int = 5, v_deg: int = 4) -> dict[str, CheckReport]:
    """Exact commutator and Casimir checks on t^k v^beta e^{-t}.

    The Casimir is compared with two constants: the target alpha(alpha-1)
    and alpha(alpha-2), which is what the triple above satisfies (on a
    summand rho_lam it acts by lam(lam - 2)).
    """
    S = Sl2Action(A, rep)
    alpha = rep.alpha
    candidates = {"casimir_target": alpha * (alpha - 1), "casimir_corrected": alpha * (alpha - 2)}
    reports = {name: CheckReport(name, True) for name in
               ("comm_HX", "comm_HY", "comm_XY", *candidates)}
    counts = {name: 0 for name in reports}
    residual_max = {name: Fraction(0) for name in reports}
    spanning = spanning_set(A, rep, t_deg, v_deg)
    for f in spanning:
        Xf, Yf, Hf = S.X(f), S.Y(f), S.H(f)
        checks = {
            "comm_HX": S.H(Xf) - S.X(Hf) - Xf.scale(Fraction(2)),
            "comm_HY": S.H(Yf) - S.Y(Hf) + Yf.scale(Fraction(2)),
            "comm_XY": S.X(Yf) - S.Y(Xf) - Hf,
        }
        cas = S.casimir(f)
        four_d = S.D_pi(f).scale(Fraction(4))
        for name, const in candidates.items():
            checks[name] = cas - (f.scale(const) - four_d)
        for name, res in checks.items():
            counts[name] += 1
            if not res.is_zero():
                rep_ = reports[name]
                rep_.passed = False
                size = max(abs(complex(c)) for vec in res.poly.terms.values() for c in vec)
                residual_max[name] = max(residual_max[name], Fraction(size).limit_denominator(10 ** 12))
                if len(rep_.failures) < 3:
                    rep_.failures.append({"input": f.pretty(ascii_only=True), "residual": res.pretty(ascii_only=True)})
    for name, rep_ in reports.items():
        rep_.metrics = {"checked": counts[name], "max_abs_residual_coefficient": float(residual_max[name])}
        if name in candidates:
            c = candidates[name]
            rep_.metrics["constant"] = frac_str(c)
    return reports


# symmetry breaking / holographic operators ------------------------------------------------------

def holo_apply(A: JordanAlgebra, rep: RepSpec, g: TExpPoly | dict, P: MultiPoly, p: int) -> TExpPoly:
    """t^p g(t) P(v) e^{-t}-form; g is a TExpPoly in t only or a dict {k: coefficient of t^k}."""
    m = A.n - 1
    if isinstance(g, dict):
        coeffs = g
    else:
        if any(any(e[1:]) for e in g.poly.terms):
            raise ValidationError("g must depend on t only")
        coeffs = {e[0]: v[0] for e, v in g.poly.terms.items()}
    if P.nvars != m:
        raise ValidationError(f"P must be a polynomial in {m} variables")
    return TExpPoly.from_parts({k + p: c for k, c in coeffs.items()}, P)


@dataclass(frozen=True)
class SBResult:
    t: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    powers: tuple
    fit: np.ndarray
    residual: float
    coefficients: dict


def default_t_grid(alpha) -> np.ndarray:
    a = float(alpha)
    return np.geomspace(4 * a / 1000, 4 * a, 32)


def sb_coefficients(pairing: L2XPairing, f: TExpPoly, P: MultiPoly, p: int) -> dict[int, tuple]:
    """phi(P) f = e^{-t} sum_k c_k t^(k-p): returns {k - p: (c_k, stderr)}."""
    out = {}
    for k, Qk in f.t_slices().items():
        val, err = pairing.inner(Qk, P)
        out[k - p] = (complex(val), float(np.abs(err)))
    return out


def sb_apply(A: JordanAlgebra, rep: RepSpec, f: TExpPoly, P: MultiPoly, p: int, samples: SampleSet,
             t_grid: np.ndarray | None = None, pairing: L2XPairing | None = None,
             powers: tuple | None = None) -> SBResult:
    """Evaluate t^{-p} <f(t, .), P>_{L2_pi(X)} on a t-grid and fit it in span{t^k e^{-t}}."""
    pairing = pairing or L2XPairing(A, rep, samples)
    t = default_t_grid(rep.alpha) if t_grid is None else np.asarray(t_grid, dtype=float)
    coefs = sb_coefficients(pairing, f, P, p)
    vals = np.zeros(t.shape, dtype=complex)
    var = np.zeros(t.shape)
    for k, (c, se) in coefs.items():
        vals += c * t ** k * np.exp(-t)
        var += (se * t ** k * np.exp(-t)) ** 2
    if powers is None:
        lo, hi = f.t_degree_range()
        powers = tuple(range(lo - p, hi - p + 1))
    basis = np.stack([t ** k * np.exp(-t) for k in powers], axis=1)
    fit, *_ = np.linalg.lstsq(basis, vals, rcond=None)
    scale = max(np.linalg.norm(vals), 1e-300)
    residual = float(np.linalg.norm(basis @ fit - vals) / scale) if np.linalg.norm(vals) else 0.0
    if not np.any(np.iscomplex(vals)):
        vals, fit = vals.real, fit.real
    return SBResult(t, vals, np.sqrt(var), tuple(powers), fit, residual, coefs)


def radial_inner(lam, f: dict, g: dict) -> complex:
    """int_0^inf f(t) conj(g(t)) t^(lam-1) dt for f, g given as {k: c} meaning sum c t^k e^{-t}."""
    lam = float(lam)
    total = 0j
    for k, a in f.items():
        for j, b in g.items():
            s = lam + k + j
            if s <= 0:
                raise ValidationError("radial integral diverges")
            total += complex(a) * np.conj(complex(b)) * math.exp(math.lgamma(s) - s * math.log(2.0))
    return total


@dataclass(frozen=True)
class AdjointResult:
    p: int
    left: complex
    left_stderr: float
    right: complex
    right_stderr: float
    ratio: float


def cone_pairing_mc(A: JordanAlgebra, rep: RepSpec, f: TExpPoly, h: TExpPoly, seed: int, count: int):
    """<F, G> in L2_pi(cone) for F = f o iota^{-1}, G = h o iota^{-1}, by a joint (t, v) Monte-Carlo.

    t is drawn from a Gamma(alpha + k, 1/2) law, with k the combined top
    t-degree of f and h so the proposal follows the integrand, and v uniformly
    on X.  The cone measure is recovered through the stratified Jacobian
    r^(1/2-n) t^(n-1), and Gamma_pi = Gamma_alpha * Gamma_{pi,X} is estimated
    on the same v-samples.
    """
    n, r = A.n, A.r
    shape = float(rep.alpha) + max(f.t_degree_range()[1] + h.t_degree_range()[1], 0)
    S = sample_X(A, seed, count)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(7, 0)))
    t = rng.gamma(shape, 0.5, S.n_accepted)
    log_q = (shape - 1) * np.log(t) - 2 * t + shape * math.log(2.0) - math.lgamma(shape)
    x = iota_many(A, t, S.points)
    from .jordan import det_many

    delta_u = det_many(A, x)
    F, G = f.evaluate(t, S.points), h.evaluate(t, S.points)
    gamma_pi = gamma_alpha(A, rep.alpha) * gamma_piX_numeric(A, rep, S).value
    jac = r ** (0.5 - n) * t ** (n - 1)
    if rep.kind != "scalar":
        raise ValidationError("cone pairing implemented for scalar representations")
    w = gamma_pi * delta_u ** (float(rep.lam) - n / r) * jac * np.exp(-log_q)
    vals = F[:, 0] * np.conj(G[:, 0]) * w
    val, err = S.integrate(vals)
    return complex(val), float(np.abs(err))


def adjointness_check(A: JordanAlgebra, rep: RepSpec, p: int, f: TExpPoly, g: dict, P: MultiPoly,
                      pairing: L2XPairing, seed: int, count: int) -> AdjointResult:
    """Compare <phi f, g>_{L2_{alpha+2p}} with <f, Phi g>_{L2_pi(cone)}."""
    coefs = sb_coefficients(pairing, f, P, p)
    left = radial_inner(rep.alpha + 2 * p, {k: c for k, (c, _) in coefs.items()}, g)
    left_se = sum(se * abs(radial_inner(rep.alpha + 2 * p, {k: 1.0}, g)) for k, (_, se) in coefs.items())
    right, right_se = cone_pairing_mc(A, rep, f, holo_apply(A, rep, g, P, p), seed, count)
    ratio = float(np.real(right / left))
    return AdjointResult(p, left, left_se, right, right_se, ratio)


# structural checks ------------------------------------------------------------------------------

def intertwine_check(A: JordanAlgebra, rep: RepSpec, p: int, P: MultiPoly, k_max: int = 5) -> CheckReport:
    """Phi_p(P) o d rho_{alpha+2p}(T) == dS(T) o Phi_p(P) on t^k e^{-t}, all three generators."""
    S = Sl2Action(A, rep)
    lam = rep.alpha + 2 * p
    failures = []
    gens = {"X": S.X, "H": S.H, "Y": S.Y}
    for k in range(k_max + 1):
        g = TExpPoly.t_only({k: Fraction(1)})
        image = holo_apply(A, rep, g, P, p)
        for name, act in gens.items():
            lhs_g = rho_action(lam, name, g)
            lhs = holo_apply(A, rep, lhs_g, P, p)
            rhs = act(image)
            if not (lhs - rhs).is_zero():
                failures.append({"generator": name, "k": k})
    return CheckReport(f"intertwine_p{p}", not failures, {"checked": 3 * (k_max + 1)}, failures)


def stratify_poly(A: JordanAlgebra, f: MultiPoly) -> MultiPoly:
    """f o iota as a polynomial in (t, v_1, ..., v_{n-1})."""
    n, r = A.n, A.r
    images = [MultiPoly.monomial(n, (1,) + (0,) * (n - 1), 1 / A.sqrt_r)]
    for i in range(1, n):
        exp = [0] * n
        exp[0], exp[i] = 1, 1
        images.append(MultiPoly.monomial(n, tuple(exp), Fraction(1, r)))
    return f.substitute(images)


def bessel_identity_check(A: JordanAlgebra, rep: RepSpec, f: MultiPoly, points) -> float:
    """Max relative error between (e|B_pi) f at iota(t, v) and (B_alpha + t^{-1} D_pi)(f o iota).

    ``points`` is a pair (t array, v array).  Both sides are built
    symbolically and then evaluated in floating point.
    """
    t, v = points
    t = np.asarray(t, dtype=float)
    v = np.atleast_2d(v)
    bessel = bessel_e_component(A, rep)
    lhs = bessel.apply(f).evaluate_many(iota_many(A, t, v))
    F = stratify_poly(A, f)
    D = _operators(A, rep)[2].pad_vars(before=1)
    F_t = F.diff(0)
    radial = (F_t.diff(0) * MultiPoly.monomial(F.nvars, (1,) + (0,) * (F.nvars - 1))) + F_t.scale(rep.alpha)
    dv = D.apply(F)
    shifted = MultiPoly._raw(dv.nvars, dv.dim, {(e[0] - 1,) + e[1:]: c for e, c in dv.terms.items()})
    rhs = (radial + shifted).evaluate_many(np.column_stack([t, v]))
    diff = np.abs(lhs - rhs).max(axis=1)
    scale = np.maximum(np.abs(lhs).max(axis=1), np.abs(rhs).max(axis=1))
    floor = 1e-12 * max(float(scale.max(initial=0.0)), 1e-300)
    rel = diff / np.maximum(scale, floor)
    return float(rel.max(initial=0.0))


def bessel_identity_exact(A: JordanAlgebra, rep: RepSpec, f: MultiPoly) -> bool:
    """The same identity as polynomials in (t, v), exactly."""
    n = A.n
    bessel = bessel_e_component(A, rep)
    lhs = stratify_poly(A, bessel.apply(f))
    F = stratify_poly(A, f)
    D = _operators(A, rep)[2].pad_vars(before=1)
    F_t = F.diff(0)
    radial = (F_t.diff(0) * MultiPoly.monomial(n, (1,) + (0,) * (n - 1))) + F_t.scale(rep.alpha)
    dv = D.apply(F)
    shifted = MultiPoly._raw(dv.nvars, dv.dim, {(e[0] - 1,) + e[1:]: c for e, c in dv.terms.items()})
    return lhs == radial + shifted


def wp_first(A: JordanAlgebra, rep: RepSpec, p: int) -> MultiPoly:
    return build_Wp(A, rep, p).polys[0]


__all__ = [
    "BranchingTable", "BranchRow", "TExpPoly", "Sl2Action", "CheckReport", "SBResult", "AdjointResult",
    "multiplicity_table", "verify_sl2_structure", "holo_apply", "sb_apply", "sb_coefficients",
    "adjointness_check", "cone_pairing_mc", "intertwine_check", "bessel_identity_check",
    "bessel_identity_exact", "stratify_poly", "radial_inner", "rho_action", "default_t_grid",
    "unitarity_constant", "dpi_eigenvalue", "wp_first",
]
