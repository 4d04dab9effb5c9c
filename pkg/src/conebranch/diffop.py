"""Differential operators with polynomial coefficients and endomorphism values.

A :class:`DiffOp` is stored as ``{(derivative multi-index, coefficient
exponent): endomorphism matrix}``; the term ``(beta, a) -> M`` acts by
``P -> v^a * M (d^beta P)``.  Endomorphisms multiply coefficient vectors on
the left.

The X-operators use variables ``v_1, ..., v_{n-1}`` (the coordinates along
``e_1, ..., e_{n-1}``); the ambient Bessel component uses ``x_0, ..., x_{n-1}``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .errors import DimensionError
from .jordan import Family, JordanAlgebra, quad_rep
from .poly import MultiPoly, format_scalar_poly, var_names
from .representation import RepSpec
from .surd import Surd, from_json, to_json

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _mat_identity(dim: int) -> tuple:
    return tuple(tuple(Fraction(int(a == b)) for b in range(dim)) for a in range(dim))


def _mat_scale(c, M) -> tuple:
    return tuple(tuple(c * x for x in row) for row in M)


def _mat_add(M, N) -> tuple:
    return tuple(tuple(x + y for x, y in zip(a, b)) for a, b in zip(M, N))


def _mat_mul(M, N) -> tuple:
    k = len(N)
    return tuple(tuple(sum((M[a][c] * N[c][b] for c in range(k) if M[a][c] and N[c][b]), Fraction(0))
                       for b in range(len(N[0]))) for a in range(len(M)))


def _mat_nonzero(M) -> bool:
    return any(any(row) for row in M)


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


class DiffOp:
    """Finite sum of ``coefficient monomial * d^beta * endomorphism`` terms."""

    __slots__ = ("nvars", "dim", "terms")

    def __init__(self, nvars: int, dim: int = 1, terms: dict | None = None):
        self.nvars, self.dim = nvars, dim
        self.terms: dict[tuple, tuple] = {}
        for key, M in (terms or {}).items():
            self._accumulate(key, M)

    def _accumulate(self, key, M):
        deriv, exp = key
        if len(deriv) != self.nvars or len(exp) != self.nvars:
            raise DimensionError("multi-index length does not match the number of variables")
        if len(M) != self.dim:
            raise DimensionError("endomorphism size does not match the value space")
        old = self.terms.get(key)
        new = M if old is None else _mat_add(old, M)
        if _mat_nonzero(new):
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    # construction -----------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, dim: int = 1) -> "DiffOp":
        return cls(nvars, dim)

    @classmethod
    def identity(cls, nvars: int, dim: int = 1) -> "DiffOp":
        z = (0,) * nvars
        return cls(nvars, dim, {(z, z): _mat_identity(dim)})

    @classmethod
    def from_terms(cls, nvars: int, dim: int, items) -> "DiffOp":
        """Build from (coefficient, deriv, exp[, endo]) tuples; endo defaults to the identity."""
        op = cls(nvars, dim)
        ident = _mat_identity(dim)
        for item in items:
            coef, deriv, exp = item[:3]
            endo = item[3] if len(item) > 3 else ident
            if coef:
                op._accumulate((tuple(deriv), tuple(exp)), _mat_scale(coef, endo))
        return op

    @classmethod
    def multiplication(cls, P: MultiPoly, dim: int = 1) -> "DiffOp":
        """Multiplication by a scalar polynomial."""
        z = (0,) * P.nvars
        return cls.from_terms(P.nvars, dim, [(c, z, e) for e, (c,) in P.terms.items()])

    @classmethod
    def partial(cls, nvars: int, i: int, k: int = 1, dim: int = 1) -> "DiffOp":
        z = (0,) * nvars
        beta = tuple(k if j == i else 0 for j in range(nvars))
        return cls(nvars, dim, {(beta, z): _mat_identity(dim)})

    # inspection -------------------------------------------------------------
    @property
    def order(self) -> int:
        return max((sum(b) for b, _ in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def terms_list(self) -> list:
        """Sorted (deriv, exp, endo) triples: highest derivative order first."""
        return [(b, a, M) for (b, a), M in sorted(self.terms.items(), key=_term_key)]

    def part_of_order(self, k: int) -> "DiffOp":
        return DiffOp(self.nvars, self.dim, {key: M for key, M in self.terms.items() if sum(key[0]) == k})

    # algebra ----------------------------------------------------------------
    def _check(self, other: "DiffOp"):
        if (self.nvars, self.dim) != (other.nvars, other.dim):
            raise DimensionError("operators act on different spaces")

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check(other)
        out = DiffOp(self.nvars, self.dim, self.terms)
        for key, M in other.terms.items():
            out._accumulate(key, M)
        return out

    def __neg__(self) -> "DiffOp":
        return self.scale(Fraction(-1))

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def scale(self, c) -> "DiffOp":
        return DiffOp(self.nvars, self.dim, {k: _mat_scale(c, M) for k, M in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return self.compose(other)
        return self.scale(other)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other)

    def compose(self, other: "DiffOp") -> "DiffOp":
        """self o other, expanded by the Leibniz rule."""
        self._check(other)
        out = DiffOp(self.nvars, self.dim)
        for (beta, a), M in self.terms.items():
            for (gamma, b), N in other.terms.items():
                MN = _mat_mul(M, N)
                if not _mat_nonzero(MN):
                    continue
                for kappa in np.ndindex(*(x + 1 for x in beta)):
                    c = 1
                    for kb, bb, ex in zip(kappa, beta, b):
                        if kb:
                            c *= comb(bb, kb)
                            f = 1
                            for j in range(kb):
                                f *= ex - j
                            c *= f
                            if not c:
                                break
                    if not c:
                        continue
                    exp = tuple(x + y - k for x, y, k in zip(a, b, kappa))
                    deriv = tuple(bb - kb + g for bb, kb, g in zip(beta, kappa, gamma))
                    out._accumulate((deriv, exp), _mat_scale(c, MN))
        return out

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self.nvars, self.dim) == (other.nvars, other.dim) and (self - other).is_zero()

    __hash__ = None

    def pad_vars(self, before: int = 0, after: int = 0) -> "DiffOp":
        z0, z1 = (0,) * before, (0,) * after
        return DiffOp(self.nvars + before + after, self.dim,
                      {(z0 + b + z1, z0 + a + z1): M for (b, a), M in self.terms.items()})

    # application --------------------------------------------------------------
    def __call__(self, P: MultiPoly) -> MultiPoly:
        return self.apply(P)

    def apply(self, P: MultiPoly) -> MultiPoly:
        if P.nvars != self.nvars:
            raise DimensionError(f"operator in {self.nvars} variables applied to polynomial in {P.nvars}")
        if P.dim != self.dim:
            if P.dim == 1 and self.dim > 1:
                raise DimensionError("scalar polynomial passed to a vector-valued operator")
            raise DimensionError(f"operator on {self.dim}-vectors applied to {P.dim}-vectors")
        by_deriv: dict[tuple, list] = {}
        for (beta, a), M in self.terms.items():
            by_deriv.setdefault(beta, []).append((a, M))
        acc: dict[tuple, list] = {}
        for beta, items in by_deriv.items():
            dP = P.diff_multi(beta)
            if dP.is_zero():
                continue
            for a, M in items:
                for e, vec in dP.terms.items():
                    out_e = _add_exp(a, e)
                    row = acc.setdefault(out_e, [Fraction(0)] * self.dim)
                    for i in range(self.dim):
                        s = Fraction(0)
                        for j in range(self.dim):
                            if M[i][j] and vec[j]:
                                s = s + M[i][j] * vec[j]
                        if s:
                            row[i] = row[i] + s
        return MultiPoly(self.nvars, {e: tuple(v) for e, v in acc.items()}, self.dim)

    def evaluate_many(self, f_derivs, points: np.ndarray) -> np.ndarray:
        """Numerically apply to a function given by ``f_derivs(beta, points)`` (array (N, dim))."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        total = np.zeros((points.shape[0], self.dim), dtype=complex)
        cache: dict[tuple, np.ndarray] = {}
        for (beta, a), M in self.terms.items():
            if beta not in cache:
                cache[beta] = np.asarray(f_derivs(beta, points))
            mono = np.prod(points ** np.array(a, dtype=float), axis=1)
            Mf = np.array([[complex(x) for x in row] for row in M])
            total += mono[:, None] * (cache[beta] @ Mf.T)
        return total

    # display / serialization ---------------------------------------------------
    def pretty(self, names: Sequence[str] | None = None, ascii_only: bool = False, start: int = 1) -> str:
        names = list(names) if names is not None else var_names(self.nvars, ascii_only=ascii_only, start=start)
        minus = "-" if ascii_only else "−"
        groups: dict[tuple, dict] = {}
        for (beta, a), M in self.terms.items():
            groups.setdefault(beta, {})[a] = M
        order = sorted(groups, key=lambda b: (-sum(b), tuple(-x for x in b)))
        pieces = []
        for beta in order:
            dstr = _deriv_str(beta, start, ascii_only)
            items = groups[beta]
            if self.dim == 1:
                poly = {a: M[0][0] for a, M in items.items()}
                body = format_scalar_poly(poly, self.nvars, names, ascii_only)
                neg = False
                if len(poly) > 1:
                    inner = body if ascii_only else body.replace(" ", "")
                    body = f"({inner})"
                elif body.startswith(minus):
                    neg, body = True, body[len(minus):]
                if body == "1" and dstr:
                    body = ""
                sep = "*" if ascii_only and body and dstr else ""
                pieces.append((neg, body + sep + dstr if (body or dstr) else "1"))
            else:
                for a, M in sorted(items.items(), key=lambda kv: tuple(-x for x in kv[0])):
                    mono = format_scalar_poly({a: Fraction(1)}, self.nvars, names, ascii_only)
                    mat = "[" + "; ".join(" ".join(_entry_str(x) for x in row) for row in M) + "]"
                    mono = "" if mono == "1" else mono
                    pieces.append((False, "*".join(p for p in (mat, mono, dstr) if p) if ascii_only
                                   else "·".join(p for p in (mat, mono + dstr) if p)))
        if not pieces:
            return "0"
        out = (minus if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (f" {minus} " if neg else " + ") + body
        return out

    def __repr__(self):
        return f"DiffOp({self.pretty(ascii_only=True)})"

    def to_json(self, r: int | None = None) -> list[dict]:
        return [{"deriv": list(b), "exp": list(a), "endo": [[to_json(x, r) for x in row] for row in M]}
                for b, a, M in self.terms_list()]

    @classmethod
    def from_json(cls, data, nvars: int, r: int | None = None) -> "DiffOp":
        data = list(data)
        dim = len(data[0]["endo"]) if data else 1
        return cls(nvars, dim, {(tuple(d["deriv"]), tuple(d["exp"])):
                                tuple(tuple(from_json(x, r) for x in row) for row in d["endo"]) for d in data})


def _term_key(item):
    (beta, a), _ = item
    return (-sum(beta), tuple(-x for x in beta), sum(a), tuple(-x for x in a))


def _entry_str(x) -> str:
    from .surd import format_exact

    return format_exact(x)


def _deriv_str(beta, start: int, ascii_only: bool) -> str:
    parts = []
    for i, k in enumerate(beta):
        if not k:
            continue
        if ascii_only:
            parts.append(f"d{i + start}" + (f"^{k}" if k > 1 else ""))
        else:
            parts.append("∂" + str(i + start).translate(_SUB) + (str(k).translate(_SUP) if k > 1 else ""))
    return ("*" if ascii_only else "").join(parts)


# standard operators ------------------------------------------------------------

def _unit(nvars: int, *idx: int) -> tuple:
    out = [0] * nvars
    for i in idx:
        out[i] += 1
    return tuple(out)


def laplacian(nvars: int, dim: int = 1) -> DiffOp:
    z = (0,) * nvars
    return DiffOp.from_terms(nvars, dim, [(Fraction(1), _unit(nvars, i, i), z) for i in range(nvars)])


def euler(nvars: int, dim: int = 1) -> DiffOp:
    return DiffOp.from_terms(nvars, dim, [(Fraction(1), _unit(nvars, i), _unit(nvars, i)) for i in range(nvars)])


def _x_vars(A: JordanAlgebra) -> int:
    return A.n - 1


def build_psi_pi(A: JordanAlgebra, rep: RepSpec) -> DiffOp:
    """sum_ij r (e_i e_j | v) d_i d_j - 2r sum_i dpi(L(e_i)) d_i over the X-coordinates."""
    m, dim, r = _x_vars(A), rep.dim, A.r
    c = A.structure_constants
    z = (0,) * m
    items = []
    for i in range(1, A.n):
        for j in range(1, A.n):
            for k in range(1, A.n):
                if c[i, j, k]:
                    items.append((r * c[i, j, k], _unit(m, i - 1, j - 1), _unit(m, k - 1)))
    op = DiffOp.from_terms(m, dim, items)
    first = [(Fraction(-2 * r), _unit(m, i - 1), z, rep.endo(i)) for i in range(1, A.n)]
    return op + DiffOp.from_terms(m, dim, first)


def build_dpi_direct(A: JordanAlgebra, rep: RepSpec) -> DiffOp:
    """Termwise form r sum d_i^2 + sum (r(e_i e_j|v) - v_i v_j) d_i d_j - alpha E - 2r sum dpi(L(e_i)) d_i."""
    m, dim, r = _x_vars(A), rep.dim, A.r
    z = (0,) * m
    items = [(Fraction(r), _unit(m, i, i), z) for i in range(m)]
    items += [(Fraction(-1), _unit(m, i, j), _unit(m, i, j)) for i in range(m) for j in range(m)]
    items += [(-rep.alpha, _unit(m, i), _unit(m, i)) for i in range(m)]
    return DiffOp.from_terms(m, dim, items) + build_psi_pi(A, rep)


def build_dpi(A: JordanAlgebra, rep: RepSpec) -> DiffOp:
    """r Laplacian + Psi_pi - E (E + alpha - 1), assembled by composition."""
    m, dim = _x_vars(A), rep.dim
    E = euler(m, dim)
    shifted = E + DiffOp.identity(m, dim).scale(rep.alpha - 1)
    return laplacian(m, dim).scale(Fraction(A.r)) + build_psi_pi(A, rep) - E.compose(shifted)


def build_dpi_f_coordinates(A: JordanAlgebra, rep: RepSpec) -> DiffOp:
    """Spin factors only: the operator in the coordinates x_i of v = sum x_i f_i.

    sum d_i^2 - sum x_i x_j d_i d_j - alpha sum x_i d_i - 2 sum dpi(L(f_i)) d_i,
    with dpi(L(f_i)) = sqrt(2) dpi(L(e_i)).
    """
    if A.family is not Family.SPIN:
        raise ValueError("f-coordinates are defined for spin factors only")
    m, dim = _x_vars(A), rep.dim
    z = (0,) * m
    s2 = Surd.sqrt(2)
    items = [(Fraction(1), _unit(m, i, i), z) for i in range(m)]
    items += [(Fraction(-1), _unit(m, i, j), _unit(m, i, j)) for i in range(m) for j in range(m)]
    items += [(-rep.alpha, _unit(m, i), _unit(m, i)) for i in range(m)]
    items += [(-2 * s2, _unit(m, i - 1), z, rep.endo(i)) for i in range(1, A.n)]
    return DiffOp.from_terms(m, dim, items)


def bessel_e_component(A: JordanAlgebra, rep: RepSpec) -> DiffOp:
    """(e | B_pi) in the ambient coordinates x_0, ..., x_{n-1}.

    sum_ij (e | P(e_i, e_j) x) d_i d_j - 2 sum_i dpi(e box e_i) d_i, where
    e box e_i = L(e_i).
    """
    n, dim = A.n, rep.dim
    z = (0,) * n
    e = A.identity()
    items = []
    for i in range(n):
        for j in range(i, n):
            row = e @ quad_rep(A, A.unit_vector(i), A.unit_vector(j))
            mult = 1 if i == j else 2
            for k in range(n):
                if row[k]:
                    items.append((mult * row[k], _unit(n, i, j), _unit(n, k)))
    items += [(Fraction(-2), _unit(n, i), z, rep.endo(i)) for i in range(n)]
    return DiffOp.from_terms(n, dim, items)


def dpi_eigenvalue(p: int, alpha) -> Fraction:
    return Fraction(-p) * (p + Fraction(alpha) - 1)
