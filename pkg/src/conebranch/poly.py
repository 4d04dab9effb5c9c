"""Sparse multivariate polynomials with vector values.

``MultiPoly`` stores ``{exponent tuple: coefficient vector}``.  Coefficients are
exact scalars (``Fraction`` / :class:`~conebranch.surd.Surd`) for the symbolic
layer, but any numeric type works, so the numerical Gram-Schmidt output reuses
the same container with float coefficients.  Exponents may be negative;
:mod:`conebranch.branching` uses that for Laurent terms in ``t``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError
from .surd import Surd, from_json, to_json

Exp = tuple[int, ...]

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def _is_zero(c) -> bool:
    return not c


def falling(k: int, m: int) -> int:
    """k (k-1) ... (k-m+1)."""
    out = 1
    for j in range(m):
        out *= k - j
    return out


def monomials(nvars: int, degree: int) -> list[Exp]:
    """All exponents of total degree ``degree``, in descending lex order."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out


def monomials_upto(nvars: int, degree: int) -> list[Exp]:
    return [m for d in range(degree + 1) for m in monomials(nvars, d)]


class MultiPoly:
    """Polynomial in ``nvars`` variables with values in a ``dim``-dimensional space."""

    __slots__ = ("nvars", "dim", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exp, Sequence] | None = None, dim: int = 1):
        self.nvars = nvars
        self.dim = dim
        clean: dict[Exp, tuple] = {}
        for exp, vec in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise DimensionError(f"exponent {exp} has wrong length for {nvars} variables")
            if not isinstance(vec, (tuple, list)):
                vec = (vec,)
            if len(vec) != dim:
                raise DimensionError(f"coefficient vector of length {len(vec)}, expected {dim}")
            vec = tuple(vec)
            if any(vec):
                clean[exp] = vec
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, dim: int, terms: dict[Exp, tuple]) -> "MultiPoly":
        out = object.__new__(cls)
        out.nvars, out.dim = nvars, dim
        out.terms = {k: v for k, v in terms.items() if any(v)}
        return out

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, dim: int = 1) -> "MultiPoly":
        return cls._raw(nvars, dim, {})

    @classmethod
    def constant(cls, nvars: int, value=1, dim: int = 1, comp: int | None = None) -> "MultiPoly":
        return cls.monomial(nvars, (0,) * nvars, value, dim, comp)

    @classmethod
    def monomial(cls, nvars: int, exp: Exp, coef=1, dim: int = 1, comp: int | None = None) -> "MultiPoly":
        if isinstance(coef, (tuple, list)):
            vec = tuple(coef)
        else:
            c = Fraction(coef) if isinstance(coef, int) else coef
            vec = tuple(c if j == (comp or 0) else Fraction(0) for j in range(dim))
        return cls(nvars, {tuple(exp): vec}, dim)

    @classmethod
    def var(cls, nvars: int, i: int, coef=1) -> "MultiPoly":
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return cls.monomial(nvars, exp, coef)

    @classmethod
    def from_scalar_terms(cls, nvars: int, terms: Mapping[Exp, object]) -> "MultiPoly":
        return cls(nvars, {k: (v,) for k, v in terms.items()}, 1)

    # inspection -------------------------------------------------------------
    @property
    def degree(self) -> int:
        """Maximal total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_part(self, k: int) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, self.dim, {e: v for e, v in self.terms.items() if sum(e) == k})

    def scalar_terms(self) -> dict[Exp, object]:
        if self.dim != 1:
            raise DimensionError("scalar_terms needs a scalar-valued polynomial")
        return {e: v[0] for e, v in self.terms.items()}

    def component(self, j: int) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, 1, {e: (v[j],) for e, v in self.terms.items()})

    @classmethod
    def from_components(cls, comps: Sequence["MultiPoly"]) -> "MultiPoly":
        nvars, dim = comps[0].nvars, len(comps)
        terms: dict[Exp, list] = {}
        for j, c in enumerate(comps):
            for e, v in c.terms.items():
                terms.setdefault(e, [Fraction(0)] * dim)[j] = v[0]
        return cls(nvars, {e: tuple(v) for e, v in terms.items()}, dim)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise DimensionError(f"{self.nvars} vs {other.nvars} variables")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            return self + MultiPoly.constant(self.nvars, other, self.dim) if self.dim == 1 else NotImplemented
        self._check(other)
        if self.dim != other.dim:
            raise DimensionError(f"value dimension {self.dim} vs {other.dim}")
        t = dict(self.terms)
        for e, v in other.terms.items():
            if e in t:
                t[e] = tuple(a + b for a, b in zip(t[e], v))
            else:
                t[e] = v
        return MultiPoly._raw(self.nvars, self.dim, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, self.dim, {e: tuple(-a for a in v) for e, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MultiPoly":
        if _is_zero(c):
            return MultiPoly.zero(self.nvars, self.dim)
        return MultiPoly._raw(self.nvars, self.dim, {e: tuple(c * a for a in v) for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        if self.dim == 1:
            left, right, dim = other, self, other.dim
        elif other.dim == 1:
            left, right, dim = self, other, self.dim
        else:
            raise DimensionError("product of two vector-valued polynomials is undefined")
        t: dict[Exp, list] = {}
        for e1, v1 in left.terms.items():
            for e2, (c,) in right.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc = t.get(e)
                if acc is None:
                    t[e] = [c * a for a in v1]
                else:
                    for j, a in enumerate(v1):
                        acc[j] = acc[j] + c * a
        return MultiPoly._raw(self.nvars, dim, {e: tuple(v) for e, v in t.items()})

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(1 / Fraction(c) if isinstance(c, int) else 1 / c)

    def __pow__(self, k: int) -> "MultiPoly":
        out = MultiPoly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            if self.dim == 1:
                return self == MultiPoly.constant(self.nvars, other)
            return NotImplemented
        return (self.nvars, self.dim) == (other.nvars, other.dim) and (self - other).is_zero()

    __hash__ = None  # mutable-looking container; compare by value only

    def apply_matrix(self, M: Sequence[Sequence]) -> "MultiPoly":
        """Left-multiply every coefficient vector by the ``dim x dim`` matrix ``M``."""
        out_dim = len(M)
        t = {}
        for e, v in self.terms.items():
            t[e] = tuple(sum((M[a][b] * v[b] for b in range(self.dim) if v[b]), Fraction(0)) for a in range(out_dim))
        return MultiPoly._raw(self.nvars, out_dim, t)

    def conjugate(self) -> "MultiPoly":
        def conj(c):
            return c.conjugate() if hasattr(c, "conjugate") else c

        return MultiPoly._raw(self.nvars, self.dim, {e: tuple(conj(a) for a in v) for e, v in self.terms.items()})

    # calculus ---------------------------------------------------------------
    def diff(self, i: int, k: int = 1) -> "MultiPoly":
        t: dict[Exp, tuple] = {}
        for e, v in self.terms.items():
            f = falling(e[i], k)
            if f:
                ne = e[:i] + (e[i] - k,) + e[i + 1:]
                t[ne] = tuple(f * a for a in v)
        return MultiPoly._raw(self.nvars, self.dim, t)

    def diff_multi(self, beta: Exp) -> "MultiPoly":
        t: dict[Exp, tuple] = {}
        for e, v in self.terms.items():
            f = 1
            for a, b in zip(e, beta):
                if b:
                    f *= falling(a, b)
                    if not f:
                        break
            if f:
                t[tuple(a - b for a, b in zip(e, beta))] = tuple(f * c for c in v)
        return MultiPoly._raw(self.nvars, self.dim, t)

    def laplacian(self) -> "MultiPoly":
        out = MultiPoly.zero(self.nvars, self.dim)
        for i in range(self.nvars):
            out = out + self.diff(i, 2)
        return out

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose with the polynomial map ``x_i -> images[i]`` (scalar-valued images)."""
        if len(images) != self.nvars:
            raise DimensionError("need one image per variable")
        m = images[0].nvars
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.constant(m, 1)} for _ in images]

        def power(i: int, k: int) -> MultiPoly:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        out = MultiPoly.zero(m, self.dim)
        for e, v in self.terms.items():
            mono = MultiPoly.constant(m, 1)
            for i, k in enumerate(e):
                if k:
                    mono = mono * power(i, k)
            out = out + MultiPoly._raw(m, self.dim, {ee: tuple(c * a for a in v) for ee, (c,) in mono.terms.items()})
        return out

    def linear_change(self, matrix: Sequence[Sequence]) -> "MultiPoly":
        """Substitute ``x_i -> sum_j matrix[i][j] y_j``."""
        m = len(matrix[0])
        images = [MultiPoly(m, {tuple(1 if k == j else 0 for k in range(m)): (matrix[i][j],) for j in range(m)})
                  for i in range(self.nvars)]
        return self.substitute(images)

    def pad_vars(self, before: int = 0, after: int = 0) -> "MultiPoly":
        z0, z1 = (0,) * before, (0,) * after
        return MultiPoly._raw(self.nvars + before + after, self.dim,
                              {z0 + e + z1: v for e, v in self.terms.items()})

    # evaluation -------------------------------------------------------------
    def __call__(self, point: Sequence):
        """Exact (or plain numeric) evaluation at one point; returns a tuple."""
        acc = [Fraction(0)] * self.dim
        for e, v in self.terms.items():
            m = Fraction(1)
            for x, k in zip(point, e):
                if k:
                    m = m * (x ** k)
            for j, a in enumerate(v):
                acc[j] = acc[j] + a * m
        return tuple(acc)

    def numeric_terms(self) -> tuple[np.ndarray, np.ndarray]:
        exps = np.array(list(self.terms), dtype=np.int64).reshape(len(self.terms), self.nvars)
        coefs = np.array([[complex(a) for a in v] for v in self.terms.values()], dtype=complex)
        return exps, coefs.reshape(len(self.terms), self.dim)

    def evaluate_many(self, points: np.ndarray, real: bool | None = None) -> np.ndarray:
        """Vectorized float evaluation; ``points`` has shape (N, nvars), result (N, dim)."""
        points = np.asarray(points, dtype=float)
        n = points.shape[0]
        exps, coefs = self.numeric_terms()
        if real is None:
            real = not np.any(coefs.imag)
        out = np.zeros((n, self.dim), dtype=float if real else complex)
        if not len(exps):
            return out
        cache: dict[tuple[int, int], np.ndarray] = {}

        def pw(i: int, k: int) -> np.ndarray:
            key = (i, k)
            if key not in cache:
                cache[key] = points[:, i] ** k if k >= 0 else 1.0 / points[:, i] ** (-k)
            return cache[key]

        for e, c in zip(exps, coefs):
            mono = np.ones(n)
            for i, k in enumerate(e):
                if k:
                    mono = mono * pw(i, int(k))
            if real:
                out += mono[:, None] * c.real[None, :]
            else:
                out += mono[:, None] * c[None, :]
        return out

    def to_float(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, self.dim, {e: tuple(complex(a) if isinstance(a, Surd) and not a.is_real()
                                                              else float(a) for a in v)
                                                     for e, v in self.terms.items()})

    # division ---------------------------------------------------------------
    def divmod_exact(self, divisor: "MultiPoly") -> "MultiPoly":
        """Exact quotient by a scalar polynomial; raises ``ValueError`` if it does not divide."""
        if divisor.dim != 1 or divisor.is_zero():
            raise ValueError("divisor must be a nonzero scalar polynomial")
        lead = max(divisor.terms, key=lambda e: (sum(e), e))
        lc = divisor.terms[lead][0]
        rem = self
        quot = MultiPoly.zero(self.nvars, self.dim)
        while not rem.is_zero():
            e = max(rem.terms, key=lambda e: (sum(e), e))
            shift = tuple(a - b for a, b in zip(e, lead))
            if any(s < 0 for s in shift):
                raise ValueError("polynomial is not divisible")
            q = MultiPoly._raw(self.nvars, self.dim, {shift: tuple(a / lc for a in rem.terms[e])})
            quot = quot + q
            rem = rem - q * divisor
        return quot

    # display / serialization -----------------------------------------------
    def sorted_terms(self) -> list[tuple[Exp, tuple]]:
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), tuple(-a for a in kv[0])))

    def __repr__(self):
        return f"MultiPoly({self.pretty(ascii_only=True)})"

    def pretty(self, names: Sequence[str] | None = None, ascii_only: bool = False) -> str:
        if self.dim != 1:
            comps = [self.component(j).pretty(names, ascii_only) for j in range(self.dim)]
            return "[" + ", ".join(comps) + "]"
        return format_scalar_poly(self.scalar_terms(), self.nvars, names, ascii_only)

    def to_json(self, r: int | None = None) -> list[dict]:
        return [{"exp": list(e), "coef": [to_json(a, r) for a in v]} for e, v in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: Iterable[dict], nvars: int, r: int | None = None) -> "MultiPoly":
        data = list(data)
        dim = len(data[0]["coef"]) if data else 1
        return cls(nvars, {tuple(d["exp"]): tuple(from_json(c, r) for c in d["coef"]) for d in data}, dim)


def var_names(nvars: int, prefix: str = "v", ascii_only: bool = False, start: int = 1) -> list[str]:
    if ascii_only:
        return [f"{prefix}{i + start}" for i in range(nvars)]
    return [f"{prefix}{str(i + start).translate(_SUB)}" for i in range(nvars)]


def format_monomial(exp: Exp, names: Sequence[str], ascii_only: bool = False) -> str:
    parts = []
    for name, k in zip(names, exp):
        if k == 0:
            continue
        if k == 1:
            parts.append(name)
        elif ascii_only:
            parts.append(f"{name}^{k}")
        else:
            parts.append(name + str(k).translate(_SUP))
    return ("*" if ascii_only else "").join(parts)


def _coef_str(c, ascii_only: bool) -> str:
    from .surd import format_exact

    if isinstance(c, (Fraction, int, Surd)):
        return format_exact(c, ascii_only)
    return f"{c:.12g}"


def _is_negative(c) -> bool:
    if isinstance(c, (Fraction, int, float)):
        return c < 0
    if isinstance(c, Surd):
        t = c.terms
        return len(t) == 1 and next(iter(t.values())) < 0
    return False


def format_scalar_poly(terms: Mapping[Exp, object], nvars: int, names: Sequence[str] | None = None,
                       ascii_only: bool = False) -> str:
    """Format with constants first and ascending degree, e.g. ``2 − v₁²``."""
    names = list(names) if names is not None else var_names(nvars, ascii_only=ascii_only)
    minus = "-" if ascii_only else "−"
    items = sorted(terms.items(), key=lambda kv: (sum(kv[0]), tuple(-a for a in kv[0])))
    if not items:
        return "0"
    out = ""
    for idx, (e, c) in enumerate(items):
        mono = format_monomial(e, names, ascii_only)
        neg = _is_negative(c)
        mag = -c if neg else c
        cs = _coef_str(mag, ascii_only)
        if isinstance(mag, Surd) and len(mag.terms) > 1:
            cs = f"({cs})"
        if mono:
            body = mono if cs == "1" else (f"{cs}*{mono}" if ascii_only else f"{cs}{mono}")
        else:
            body = cs
        if idx == 0:
            out = (minus if neg else "") + body
        else:
            out += f" {minus} " if neg else " + "
            out += body
    return out


def scalar(nvars: int, terms: Mapping[Exp, object]) -> MultiPoly:
    return MultiPoly.from_scalar_terms(nvars, terms)


def product_basis(nvars: int, degree: int, dim: int) -> list[MultiPoly]:
    """Monomials of degree ``degree`` times the standard basis of the value space."""
    return [MultiPoly.monomial(nvars, e, 1, dim, comp) for e in monomials(nvars, degree) for comp in range(dim)]


def norm_squared_poly(nvars: int) -> MultiPoly:
    return scalar(nvars, {tuple(2 if j == i else 0 for j in range(nvars)): Fraction(1) for i in range(nvars)})


__all__ = [
    "MultiPoly", "monomials", "monomials_upto", "falling", "format_scalar_poly", "format_monomial",
    "var_names", "scalar", "product_basis", "norm_squared_poly",
]
