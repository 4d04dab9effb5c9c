"""Exact arithmetic in multi-quadratic number fields.

A :class:`Surd` is a finite sum ``sum_k q_k * sqrt(k)`` where each ``k`` is a
squarefree nonzero integer and ``q_k`` is a :class:`~fractions.Fraction`.  A
negative ``k`` stands for ``i*sqrt(|k|)``, so the Gaussian unit is the key
``-1``.  This covers Q(sqrt r), the extra radicals that orthonormal bases of
rank >= 3 algebras need (sqrt 6 for Sym(3), ...), and the factor ``i`` carried
by the sl2 generators.

Arithmetic results that are rational collapse to plain ``Fraction`` values, so
code that mixes ``Fraction`` and ``Surd`` stays on the fast rational path
whenever possible.  ``Fraction`` defers unknown operands to the reflected
methods defined here, which makes mixed expressions work in either order.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from functools import lru_cache
from typing import Union

Exact = Union[int, Fraction, "Surd"]


@lru_cache(maxsize=None)
def squarefree_split(m: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``m == s*s*d`` and ``d`` squarefree (m >= 1)."""
    if m < 1:
        raise ValueError("squarefree_split needs a positive integer")
    s, d, p = 1, 1, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            s *= p
        if m % p == 0:
            m //= p
            d *= p
        p += 1
    return s, d * m


@lru_cache(maxsize=None)
def _key_mul(a: int, b: int) -> tuple[int, int]:
    s, d = squarefree_split(abs(a) * abs(b))
    ia, ib = a < 0, b < 0
    coef = -s if (ia and ib) else s
    return coef, (-d if ia != ib else d)


@lru_cache(maxsize=None)
def _primes(k: int) -> tuple[int, ...]:
    out = [-1] if k < 0 else []
    m, p = abs(k), 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            m //= p
        p += 1
    if m > 1:
        out.append(m)
    return tuple(out)


def _coerce(x) -> dict[int, Fraction] | None:
    if isinstance(x, Surd):
        return x._t
    if isinstance(x, (int, Fraction)):
        return {1: Fraction(x)} if x else {}
    return None


def _wrap(terms: dict[int, Fraction]):
    """Drop zeros and collapse rational results to ``Fraction``."""
    terms = {k: v for k, v in terms.items() if v}
    if not terms:
        return Fraction(0)
    if len(terms) == 1 and 1 in terms:
        return terms[1]
    out = object.__new__(Surd)
    out._t = terms
    return out


class Surd:
    """Immutable element of Q(sqrt d_1, ..., sqrt d_k, i)."""

    __slots__ = ("_t",)

    def __new__(cls, value=0):
        if isinstance(value, Surd):
            return value
        t = _coerce(value)
        if t is None:
            raise TypeError(f"cannot build a Surd from {type(value).__name__}")
        obj = object.__new__(cls)
        obj._t = dict(t)
        return obj

    # construction helpers -------------------------------------------------
    @staticmethod
    def sqrt(q) -> "Fraction | Surd":
        """Exact square root of a rational; negative input gives ``i*sqrt(|q|)``."""
        q = Fraction(q)
        if q == 0:
            return Fraction(0)
        sign = -1 if q < 0 else 1
        q = abs(q)
        s, d = squarefree_split(q.numerator * q.denominator)
        return _wrap({sign * d: Fraction(s, q.denominator)})

    @staticmethod
    def i() -> "Surd":
        return _wrap({-1: Fraction(1)})

    @staticmethod
    def from_terms(terms: dict[int, Fraction]):
        out: dict[int, Fraction] = {}
        for k, v in terms.items():
            s, d = squarefree_split(abs(k))
            key = -d if k < 0 else d
            out[key] = out.get(key, Fraction(0)) + Fraction(v) * s
        return _wrap(out)

    # inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._t)

    def is_real(self) -> bool:
        return all(k > 0 for k in self._t)

    def radicands(self) -> set[int]:
        return set(self._t)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            if isinstance(other, numbers.Number):
                return self._to_number() + other
            return NotImplemented
        t = dict(self._t)
        for k, v in o.items():
            t[k] = t.get(k, 0) + v
        return _wrap(t)

    __radd__ = __add__

    def __neg__(self):
        return _wrap({k: -v for k, v in self._t.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            if isinstance(other, numbers.Number):
                return self._to_number() - other
            return NotImplemented
        t = dict(self._t)
        for k, v in o.items():
            t[k] = t.get(k, 0) - v
        return _wrap(t)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            if isinstance(other, numbers.Number):
                return self._to_number() * other
            return NotImplemented
        if len(o) == 1 and 1 in o:
            c = o[1]
            return _wrap({k: v * c for k, v in self._t.items()})
        t: dict[int, Fraction] = {}
        for a, x in self._t.items():
            for b, y in o.items():
                c, k = _key_mul(a, b)
                t[k] = t.get(k, 0) + c * x * y
        return _wrap(t)

    __rmul__ = __mul__

    def conjugate(self):
        """Complex conjugate (flips the sign of imaginary terms)."""
        return _wrap({k: (-v if k < 0 else v) for k, v in self._t.items()})

    def galois(self, p: int):
        """Apply the automorphism sqrt(p) -> -sqrt(p); ``p = -1`` conjugates ``i``."""
        return _wrap({k: (-v if p in _primes(k) else v) for k, v in self._t.items()})

    def inverse(self):
        if not self._t:
            raise ZeroDivisionError("Surd division by zero")
        num: Exact = Fraction(1)
        den: Exact = self
        while isinstance(den, Surd):
            p = next(q for k in den._t for q in _primes(k))
            conj = den.galois(p)
            num = num * conj
            den = den * conj
        return num * (1 / den)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Surd division by zero")
            return _wrap({k: v / other for k, v in self._t.items()})
        if isinstance(other, Surd):
            return self * other.inverse()
        if isinstance(other, numbers.Number):
            return self._to_number() / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        if isinstance(other, numbers.Number):
            return other / self._to_number()
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out: Exact = Fraction(1)
        base: Exact = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison / conversion ------------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            if isinstance(other, numbers.Number):
                return self._to_number() == other
            return NotImplemented
        return self._t == {k: v for k, v in o.items() if v}

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __bool__(self):
        return bool(self._t)

    def _to_number(self):
        return float(self) if self.is_real() else complex(self)

    def __complex__(self):
        re = im = 0.0
        for k, v in self._t.items():
            if k > 0:
                re += float(v) * math.sqrt(k)
            else:
                im += float(v) * math.sqrt(-k)
        return complex(re, im)

    def __float__(self):
        if not self.is_real():
            raise TypeError("Surd has an imaginary part; use complex()")
        return sum(float(v) * math.sqrt(k) for k, v in self._t.items())

    def __repr__(self):
        return f"Surd({format_exact(self)})"

    def __str__(self):
        return format_exact(self)


def _term_str(k: int, v: Fraction, ascii_only: bool) -> str:
    root = "sqrt" if ascii_only else "√"
    rad = abs(k)
    unit = "" if rad == 1 else (f"{root}({rad})" if ascii_only else f"√{rad}")
    if k < 0:
        unit = "i" + ("*" if unit and ascii_only else "") + unit
    if not unit:
        return str(v)
    if v == 1:
        return unit
    if v == -1:
        return "-" + unit
    return f"{v}*{unit}" if ascii_only else f"{v}{unit}"


def format_exact(x, ascii_only: bool = True) -> str:
    """Human-readable form of an exact scalar (``Fraction`` or ``Surd``)."""
    if not isinstance(x, Surd):
        return str(Fraction(x))
    parts = []
    for k in sorted(x._t, key=lambda k: (k < 0, abs(k))):
        parts.append(_term_str(k, x._t[k], ascii_only))
    s = parts[0]
    for p in parts[1:]:
        s += (" - " + p[1:]) if p.startswith("-") else (" + " + p)
    return s


def exact_sqrt(q) -> Exact:
    return Surd.sqrt(q)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Surd))


def to_complex(x) -> complex:
    return complex(x)


def frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def to_json(x, r: int | None = None):
    """Serialize an exact scalar.

    Rationals become ``"p/q"``.  Elements of Q(sqrt r) become the pair
    ``["a", "b"]`` meaning ``a + b*sqrt(r)``.  Anything else is written as
    ``{"terms": [[k, "p/q"], ...]}`` with the key convention of :class:`Surd`.
    """
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if not isinstance(x, Surd):
        return frac_str(x)
    t = x._t
    if r is not None and r > 1:
        _, d = squarefree_split(r)
        if set(t) <= {1, d}:
            return [frac_str(t.get(1, 0)), frac_str(t.get(d, 0) / squarefree_split(r)[0])]
    return {"terms": [[k, frac_str(t[k])] for k in sorted(t)]}


def from_json(obj, r: int | None = None) -> Exact:
    if isinstance(obj, str):
        return Fraction(obj)
    if isinstance(obj, (int, float)):
        return Fraction(obj)
    if isinstance(obj, list):
        a, b = (Fraction(s) for s in obj)
        if r is None:
            raise ValueError("pair form needs the algebra rank")
        return a + b * Surd.sqrt(r)
    if isinstance(obj, dict) and "terms" in obj:
        return Surd.from_terms({int(k): Fraction(v) for k, v in obj["terms"]})
    raise ValueError(f"cannot decode exact scalar from {obj!r}")
