"""Simple Euclidean Jordan algebras Sym(m, R), Herm(m, C) and spin factors.

Elements are coordinate vectors in an orthonormal basis ``e_0, ..., e_{n-1}``
for the trace form, with ``e_0 = e / sqrt(r)``.  The basis comes from a
rational Gram-Schmidt pass over each family's canonical basis (matrix units or
the standard basis ``f_i`` of R x R^{n-1}); only the final normalisation
introduces square roots, which are carried exactly as
:class:`~conebranch.surd.Surd` values.

Coordinate vectors are numpy arrays.  Arrays of dtype ``object`` holding
``Fraction``/``Surd`` entries are treated exactly, float arrays numerically.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, DimensionError
from .surd import Surd, to_json

CONE_TOL = 1e-12


class Family(str, enum.Enum):
    SYM = "sym"
    HERM = "herm"
    SPIN = "spin"

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, Family):
            return name
        key = str(name).lower().replace("_", "")
        aliases = {"sym": cls.SYM, "symr": cls.SYM, "herm": cls.HERM, "hermc": cls.HERM, "spin": cls.SPIN}
        if key not in aliases:
            raise ConfigurationError(f"unsupported algebra family {name!r}")
        return aliases[key]


# exact matrix helpers (nested lists) ---------------------------------------

def _mzero(m: int):
    return [[Fraction(0)] * m for _ in range(m)]


def _munit(m: int, i: int, j: int, c=Fraction(1)):
    out = _mzero(m)
    out[i][j] = c
    return out


def _mmul(a, b):
    m = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(m) if a[i][k] and b[k][j]), Fraction(0))
             for j in range(m)] for i in range(m)]


def _madd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mscale(c, a):
    return [[c * x for x in row] for row in a]


def _mtrace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def _perm_sign(p) -> int:
    sign, seen = 1, set()
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _mdet(a):
    m = len(a)
    total = Fraction(0)
    for p in itertools.permutations(range(m)):
        term = Fraction(_perm_sign(p))
        for i in range(m):
            term = term * a[i][p[i]]
            if not term:
                break
        total = total + term
    return total


# canonical families ----------------------------------------------------------

class _SpinOps:
    def __init__(self, n: int):
        self.n = n

    def mul(self, x, y):
        x0, u = x[0], x[1:]
        y0, v = y[0], y[1:]
        first = x0 * y0 + sum((a * b for a, b in zip(u, v)), Fraction(0))
        return [first] + [x0 * b + y0 * a for a, b in zip(u, v)]

    def inner(self, x, y):
        return 2 * sum((a * b for a, b in zip(x, y)), Fraction(0))

    def add(self, x, y):
        return [a + b for a, b in zip(x, y)]

    def scale(self, c, x):
        return [c * a for a in x]

    def raw_basis(self):
        return [[Fraction(int(i == j)) for j in range(self.n)] for i in range(self.n)]

    def frame(self):
        c1 = [Fraction(1, 2), Fraction(1, 2)] + [Fraction(0)] * (self.n - 2)
        c2 = [Fraction(1, 2), Fraction(-1, 2)] + [Fraction(0)] * (self.n - 2)
        return [c1, c2]

    def det(self, x):
        return x[0] * x[0] - sum((a * a for a in x[1:]), Fraction(0))


class _MatrixOps:
    def __init__(self, m: int, complex_: bool):
        self.m = m
        self.complex = complex_

    def mul(self, x, y):
        return _mscale(Fraction(1, 2), _madd(_mmul(x, y), _mmul(y, x)))

    def inner(self, x, y):
        t = _mtrace(_mmul(x, y))
        if isinstance(t, Surd):
            return Surd.from_terms({k: v for k, v in t.terms.items() if k > 0})
        return t

    def add(self, x, y):
        return _madd(x, y)

    def scale(self, c, x):
        return _mscale(c, x)

    def raw_basis(self):
        m = self.m
        ident = _mzero(m)
        for k in range(m):
            ident[k][k] = Fraction(1)
        out = [ident] + [_munit(m, k, k) for k in range(m - 1)]
        for i in range(m):
            for j in range(i + 1, m):
                out.append(_madd(_munit(m, i, j), _munit(m, j, i)))
        if self.complex:
            im = Surd.i()
            for i in range(m):
                for j in range(i + 1, m):
                    out.append(_madd(_munit(m, i, j, im), _munit(m, j, i, -im)))
        return out

    def frame(self):
        return [_munit(self.m, k, k) for k in range(self.m)]

    def det(self, x):
        return _mdet(x)


@dataclass(frozen=True)
class JordanAlgebra:
    """A simple Euclidean Jordan algebra with a fixed orthonormal basis.

    ``basis[i]`` is the canonical form (matrix or R x R^{n-1} vector) of
    ``e_i``.  ``gram[i]`` is the squared norm of the rational orthogonal vector
    that ``e_i`` normalises, so ``basis[i] = raw[i] / sqrt(gram[i])``.
    """

    family: Family
    size: int
    n: int = field(compare=False)
    r: int = field(compare=False)
    d: Fraction = field(compare=False)
    raw_basis: tuple = field(compare=False, repr=False)
    gram: tuple = field(compare=False, repr=False)
    structure_constants: np.ndarray = field(compare=False, repr=False)
    frame: tuple = field(compare=False, repr=False)

    # derived data -------------------------------------------------------
    @property
    def name(self) -> str:
        label = {Family.SYM: "Sym", Family.HERM: "Herm", Family.SPIN: "Spin"}[self.family]
        return f"{label}({self.size})"

    @property
    def ops(self):
        if self.family is Family.SPIN:
            return _SpinOps(self.size)
        return _MatrixOps(self.size, self.family is Family.HERM)

    @cached_property
    def sqrt_r(self):
        return Surd.sqrt(self.r)

    @cached_property
    def norms(self) -> tuple:
        """``sqrt(gram[i])`` as exact values."""
        return tuple(Surd.sqrt(g) for g in self.gram)

    @cached_property
    def basis(self) -> tuple:
        ops = self.ops
        return tuple(ops.scale(1 / s, b) for b, s in zip(self.raw_basis, self.norms))

    @cached_property
    def c_float(self) -> np.ndarray:
        return np.vectorize(float, otypes=[float])(self.structure_constants)

    @cached_property
    def c_sparse(self) -> tuple:
        c = self.structure_constants
        return tuple((i, j, k, c[i, j, k]) for i, j, k in itertools.product(range(self.n), repeat=3) if c[i, j, k])

    @cached_property
    def basis_float(self) -> np.ndarray:
        """Float canonical forms of the orthonormal basis: (n, n) for spin, (n, m, m) otherwise."""
        if self.family is Family.SPIN:
            return np.array([[float(a) for a in b] for b in self.basis])
        dtype = complex if self.family is Family.HERM else float
        return np.array([[[complex(a) if dtype is complex else float(a) for a in row] for row in b]
                         for b in self.basis], dtype=dtype)

    def identity(self) -> np.ndarray:
        out = self.zero()
        out[0] = self.sqrt_r
        return out

    def zero(self) -> np.ndarray:
        return np.array([Fraction(0)] * self.n, dtype=object)

    def unit_vector(self, i: int) -> np.ndarray:
        out = self.zero()
        out[i] = Fraction(1)
        return out

    def element(self, coords) -> np.ndarray:
        return as_element(self, coords)

    def from_canonical(self, x) -> np.ndarray:
        """Exact orthonormal coordinates of a canonical element."""
        ops = self.ops
        return np.array([ops.inner(x, b) / s for b, s in zip(self.raw_basis, self.norms)], dtype=object)

    def to_canonical(self, coords):
        ops = self.ops
        out = ops.scale(Fraction(0), self.basis[0])
        for c, b in zip(coords, self.basis):
            if c:
                out = ops.add(out, ops.scale(c, b))
        return out

    def random_rational(self, rng: np.random.Generator, bound: int = 5, denom: int = 4) -> np.ndarray:
        return np.array([Fraction(int(rng.integers(-bound * denom, bound * denom + 1)), int(rng.integers(1, denom + 1)))
                         for _ in range(self.n)], dtype=object)

    def descriptor(self) -> dict:
        return {
            "family": self.family.value,
            "param": self.size,
            "name": self.name,
            "n": self.n,
            "r": self.r,
            "d": f"{self.d.numerator}/{self.d.denominator}",
            "gram": [f"{g.numerator}/{g.denominator}" for g in self.gram],
            "structure_constants": [[i, j, k, to_json(c, self.r)] for i, j, k, c in self.c_sparse],
            "frame": [[to_json(a, self.r) for a in c] for c in self.frame],
        }

    @cached_property
    def hash(self) -> str:
        key = json.dumps({"family": self.family.value, "param": self.size}, sort_keys=True)
        return hashlib.blake2b(key.encode(), digest_size=8).hexdigest()


def build_algebra(family, size: int) -> JordanAlgebra:
    """Construct Sym(m, R), Herm(m, C) (``size = m >= 2``) or the spin factor of dimension ``size >= 2``."""
    fam = Family.parse(family)
    if not isinstance(size, int) or size < 2:
        raise ConfigurationError(f"{fam.value} needs size >= 2, got {size!r}")
    if fam is Family.SPIN:
        ops = _SpinOps(size)
        n, r = size, 2
    else:
        ops = _MatrixOps(size, fam is Family.HERM)
        n = size * (size + 1) // 2 if fam is Family.SYM else size * size
        r = size
    d = Fraction(n - r) / Fraction(r * (r - 1), 2)

    raw = []
    for a in ops.raw_basis():
        b = a
        for prev in raw:
            coef = ops.inner(a, prev) / ops.inner(prev, prev)
            if coef:
                b = ops.add(b, ops.scale(-coef, prev))
        raw.append(b)
    if len(raw) != n:
        raise ConfigurationError("basis construction produced the wrong dimension")
    gram = tuple(ops.inner(b, b) for b in raw)
    norms = [Surd.sqrt(g) for g in gram]

    c = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            prod = ops.mul(raw[i], raw[j])
            for k in range(n):
                val = ops.inner(prod, raw[k])
                if val:
                    val = val / (norms[i] * norms[j] * norms[k])
                c[i, j, k] = c[j, i, k] = val if val else Fraction(0)

    alg = JordanAlgebra(fam, size, n, r, d, tuple(raw), gram, c, ())
    frame = tuple(alg.from_canonical(f) for f in ops.frame())
    object.__setattr__(alg, "frame", frame)
    return alg


# element operations ----------------------------------------------------------

def _is_exact_array(x: np.ndarray) -> bool:
    return x.dtype == object


def as_element(A: JordanAlgebra, x) -> np.ndarray:
    if isinstance(x, np.ndarray) and x.dtype != object:
        arr = x.astype(float) if not np.iscomplexobj(x) else x
    else:
        seq = list(x)
        if seq and all(isinstance(a, (int, Fraction, Surd)) for a in seq):
            arr = np.array([Fraction(a) if isinstance(a, int) else a for a in seq], dtype=object)
        else:
            arr = np.asarray(seq, dtype=float)
    if arr.shape != (A.n,):
        raise DimensionError(f"{A.name} elements have {A.n} coordinates, got shape {arr.shape}")
    return arr


def _pair(A, x, y):
    x, y = as_element(A, x), as_element(A, y)
    if _is_exact_array(x) != _is_exact_array(y):
        x, y = x.astype(float), y.astype(float)
    return x, y


def jmul(A: JordanAlgebra, x, y) -> np.ndarray:
    """Jordan product in orthonormal coordinates."""
    x, y = _pair(A, x, y)
    if _is_exact_array(x):
        out = [Fraction(0)] * A.n
        for i, j, k, c in A.c_sparse:
            if x[i] and y[j]:
                out[k] = out[k] + x[i] * y[j] * c
        return np.array(out, dtype=object)
    return np.einsum("i,j,ijk->k", x, y, A.c_float)


def inner(A: JordanAlgebra, x, y):
    """Trace form (x|y) = tr(xy); the basis is orthonormal so this is the dot product."""
    x, y = _pair(A, x, y)
    if _is_exact_array(x):
        return sum((a * b for a, b in zip(x, y) if a and b), Fraction(0))
    return float(np.dot(x, y))


def mult_operator(A: JordanAlgebra, x) -> np.ndarray:
    """Matrix of L(x); column i is x * e_i."""
    x = as_element(A, x)
    if _is_exact_array(x):
        M = np.empty((A.n, A.n), dtype=object)
        M[:] = Fraction(0)
        for i, j, k, c in A.c_sparse:
            if x[i]:
                M[k, j] = M[k, j] + x[i] * c
        return M
    return np.einsum("i,ijk->kj", x, A.c_float)


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b


def quad_rep(A: JordanAlgebra, x, y=None) -> np.ndarray:
    """P(x) = 2L(x)^2 - L(x^2), or the polarisation P(x, y) when ``y`` is given."""
    if y is None:
        Lx = mult_operator(A, x)
        return 2 * _matmul(Lx, Lx) - mult_operator(A, jmul(A, x, x))
    x, y = _pair(A, x, y)
    Lx, Ly = mult_operator(A, x), mult_operator(A, y)
    return _matmul(Lx, Ly) + _matmul(Ly, Lx) - mult_operator(A, jmul(A, x, y))


def box(A: JordanAlgebra, x, y) -> np.ndarray:
    """x box y = L(xy) + [L(x), L(y)]."""
    x, y = _pair(A, x, y)
    Lx, Ly = mult_operator(A, x), mult_operator(A, y)
    return mult_operator(A, jmul(A, x, y)) + _matmul(Lx, Ly) - _matmul(Ly, Lx)


def trace(A: JordanAlgebra, x):
    x = as_element(A, x)
    if _is_exact_array(x):
        return A.sqrt_r * x[0]
    return float(np.sqrt(A.r) * x[0])


def det(A: JordanAlgebra, x):
    x = as_element(A, x)
    if _is_exact_array(x):
        return A.ops.det(A.to_canonical(list(x)))
    return float(det_many(A, x[None, :])[0])


def trace_and_det(A: JordanAlgebra, x):
    """Jordan trace and determinant; exact for exact input."""
    return trace(A, x), det(A, x)


# batched float spectral machinery -------------------------------------------

def canonical_many(A: JordanAlgebra, coords: np.ndarray) -> np.ndarray:
    """Float canonical forms for a stack of coordinate vectors."""
    coords = np.asarray(coords, dtype=float)
    if A.family is Family.SPIN:
        return coords @ A.basis_float
    return np.einsum("pi,iab->pab", coords, A.basis_float)


def eigvals_many(A: JordanAlgebra, coords: np.ndarray) -> np.ndarray:
    """Jordan eigenvalues, descending, shape (N, r)."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    if A.family is Family.SPIN:
        y = coords / np.sqrt(2.0)
        u = np.linalg.norm(y[:, 1:], axis=1)
        return np.stack([y[:, 0] + u, y[:, 0] - u], axis=1)
    w = np.linalg.eigvalsh(canonical_many(A, coords))
    return w[:, ::-1]


def det_many(A: JordanAlgebra, coords: np.ndarray) -> np.ndarray:
    return np.prod(eigvals_many(A, coords), axis=1)


def spectral_map(A: JordanAlgebra, coords: np.ndarray, fn) -> np.ndarray:
    """Coordinates of f(x) = sum f(lambda_k) c_k via the spectral decomposition."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    if A.family is Family.SPIN:
        s2 = np.sqrt(2.0)
        y = coords / s2
        u = y[:, 1:]
        norm = np.linalg.norm(u, axis=1)
        fp, fm = fn(y[:, 0] + norm), fn(y[:, 0] - norm)
        safe = np.where(norm > 0, norm, 1.0)
        out = np.empty_like(coords)
        out[:, 0] = (fp + fm) / 2
        out[:, 1:] = ((fp - fm) / 2 / safe)[:, None] * u
        return out * s2
    w, U = np.linalg.eigh(canonical_many(A, coords))
    F = np.einsum("pab,pb,pcb->pac", U, fn(w), U.conj())
    return np.einsum("pab,iba->pi", F, A.basis_float).real


def spectral(A: JordanAlgebra, x) -> np.ndarray:
    """Eigenvalues of x (length r, descending)."""
    x = as_element(A, x)
    return eigvals_many(A, x.astype(float)[None, :])[0]


def in_cone_many(A: JordanAlgebra, coords: np.ndarray) -> np.ndarray:
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    lam = eigvals_many(A, coords)
    tr = np.sqrt(A.r) * coords[:, 0]
    return lam[:, -1] > CONE_TOL * (1 + np.abs(tr))


def cone_ops(A: JordanAlgebra, x):
    """Return ``(in_cone, sqrt)``; ``sqrt`` is ``None`` outside the cone."""
    x = as_element(A, x).astype(float)
    inside = bool(in_cone_many(A, x[None, :])[0])
    if not inside:
        return False, None
    return True, spectral_map(A, x[None, :], np.sqrt)[0]


def frame_check(A: JordanAlgebra) -> bool:
    """sum_j 2 L(c_j) == 2 L(e), exactly."""
    total = sum((2 * mult_operator(A, c) for c in A.frame), np.zeros((A.n, A.n), dtype=object))
    return bool(np.all(total == 2 * mult_operator(A, A.identity())))
