"""Stratified coordinates on the cone and Monte-Carlo integration over X.

Points of X = {v orthogonal to e : e + v in the cone} are stored by their
coordinates ``(v_1, ..., v_{n-1})`` in the orthonormal basis, so ``tr v = 0``
holds by construction.  Sampling is rejection from the trace-form ball of
radius ``sqrt(r(r-1))``: the eigenvalues of such a ``v`` lie in ``(-1, r-1)``
and sum to zero, which bounds ``(v|v)``.

Randomness is drawn in fixed-size shards, each with its own
``SeedSequence(seed, spawn_key=(stream, shard))``, so results do not depend on
how many worker threads run (``CONEBRANCH_THREADS``).
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import DomainError, SamplingError
from .jordan import JordanAlgebra, det_many, in_cone_many
from .representation import RepSpec, gamma_piX_numeric, pi_power_many

SHARD = 1 << 16
MIN_ACCEPTANCE = 1e-4
MAGIC = b"XSMP"

# stream tags for independent random streams derived from one seed
STREAM_X = 0
STREAM_BOX = 1
STREAM_T = 2


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("CONEBRANCH_THREADS", "1")))
    except ValueError:
        return 1


def _shard_rngs(seed: int, stream: int, count: int):
    sizes = [SHARD] * (count // SHARD) + ([count % SHARD] if count % SHARD else [])
    return [(np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, s))), size)
            for s, size in enumerate(sizes)]


def _run_shards(fn, jobs):
    workers = worker_count()
    if workers == 1 or len(jobs) == 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def ball_volume(dim: int, radius: float) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius ** dim


def _uniform_ball(rng: np.random.Generator, size: int, dim: int, radius: float) -> np.ndarray:
    g = rng.standard_normal((size, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * rng.random(size) ** (1.0 / dim)
    return g * rad[:, None]


def x_radius(A: JordanAlgebra) -> float:
    return math.sqrt(A.r * (A.r - 1))


def ambient_from_x(A: JordanAlgebra, v: np.ndarray) -> np.ndarray:
    """Coordinates of e + v."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    out = np.empty((v.shape[0], A.n))
    out[:, 0] = math.sqrt(A.r)
    out[:, 1:] = v
    return out


def in_x_many(A: JordanAlgebra, v: np.ndarray) -> np.ndarray:
    return in_cone_many(A, ambient_from_x(A, v))


@dataclass(frozen=True)
class SampleSet:
    """Accepted points of a rejection sampler together with what is needed to turn sums into integrals."""

    algebra: JordanAlgebra
    seed: int
    count: int
    points: np.ndarray = field(repr=False)
    box_volume: float

    @property
    def n_proposed(self) -> int:
        return self.count

    @property
    def n_accepted(self) -> int:
        return self.points.shape[0]

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.count

    @cached_property
    def delta(self) -> np.ndarray:
        """Delta(e + v) at every point."""
        return det_many(self.algebra, self.ambient())

    def ambient(self) -> np.ndarray:
        return ambient_from_x(self.algebra, self.points)

    def integrate(self, h: np.ndarray):
        """Integral over X of a function given by its values ``h`` at the accepted points (axis 0)."""
        h = np.asarray(h)
        mean = h.sum(axis=0) / self.count
        second = (np.abs(h) ** 2).sum(axis=0) / self.count
        var = np.maximum(second - np.abs(mean) ** 2, 0.0)
        return self.box_volume * mean, self.box_volume * np.sqrt(var / self.count)

    def volume(self):
        return self.integrate(np.ones(self.n_accepted))


def sample_X(A: JordanAlgebra, seed: int, count: int) -> SampleSet:
    """Rejection sampling of X from ``count`` uniform proposals in the ball of radius sqrt(r(r-1))."""
    if count < 1:
        raise SamplingError("count must be positive")
    m, rad = A.n - 1, x_radius(A)

    def shard(rng, size):
        v = _uniform_ball(rng, size, m, rad)
        return v[in_x_many(A, v)]

    parts = _run_shards(shard, _shard_rngs(seed, STREAM_X, count))
    pts = np.concatenate(parts, axis=0)
    rate = pts.shape[0] / count
    if rate < MIN_ACCEPTANCE:
        raise SamplingError(f"acceptance rate {rate:.3g} below {MIN_ACCEPTANCE}; proposal region misconfigured")
    return SampleSet(A, int(seed), int(count), pts, ball_volume(m, rad))


# stratification map -----------------------------------------------------------

def _x_part(A: JordanAlgebra, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] == A.n:
        if np.any(np.abs(v[..., 0]) > 1e-12):
            raise DomainError("v must be orthogonal to e")
        v = v[..., 1:]
    if v.shape[-1] != A.n - 1:
        raise DomainError(f"X coordinates have length {A.n - 1}")
    return v


def iota_many(A: JordanAlgebra, t, v) -> np.ndarray:
    """(t/r)(e + v) for stacks of (t, v), no domain checks."""
    t = np.asarray(t, dtype=float)
    v = np.atleast_2d(_x_part(A, v))
    out = np.empty((v.shape[0], A.n))
    out[:, 0] = t / math.sqrt(A.r)
    out[:, 1:] = (t / A.r)[..., None] * v if t.ndim else t / A.r * v
    return out


def iota(A: JordanAlgebra, t: float, v) -> np.ndarray:
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    v = _x_part(A, v)
    if not in_x_many(A, v[None, :])[0]:
        raise DomainError("v is not in X")
    return iota_many(A, np.float64(t), v[None, :])[0]


def iota_inv_many(A: JordanAlgebra, x: np.ndarray):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = math.sqrt(A.r) * x[:, 0]
    return t, A.r * x[:, 1:] / t[:, None]


def iota_inv(A: JordanAlgebra, x):
    """(tr x, r x' / tr x); t is read off as the trace since tr(iota(t, v)) = t."""
    x = np.asarray(x, dtype=float)
    if not in_cone_many(A, x[None, :])[0]:
        raise DomainError("x is not in the cone")
    t, v = iota_inv_many(A, x[None, :])
    return float(t[0]), v[0]


# the L2_pi(X) pairing ----------------------------------------------------------

def _values(f, points: np.ndarray, dim: int) -> np.ndarray:
    if hasattr(f, "evaluate_many"):
        vals = f.evaluate_many(points)
    else:
        vals = np.asarray(f(points))
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[1] != dim:
        raise DomainError(f"function has {vals.shape[1]} components, representation space has {dim}")
    return vals


class L2XPairing:
    """Monte-Carlo realisation of int_X <G A f, A g> Delta(e+v)^(-n/r) dv.

    ``A = pi((e+v)^(1/2))^(-1)`` and ``G`` is Gamma_{pi,X}, estimated on the
    same samples unless given.  For the scalar kind the integrand collapses to
    ``G f conj(g) Delta^(lam - n/r)``.
    """

    def __init__(self, A: JordanAlgebra, rep: RepSpec, samples: SampleSet, gamma_x=None):
        self.A, self.rep, self.samples = A, rep, samples
        if gamma_x is None:
            gamma_x = gamma_piX_numeric(A, rep, samples).value
        self.gamma_x = gamma_x
        base = samples.delta ** (-A.n / A.r)
        if rep.kind == "scalar":
            self.weight = base * samples.delta ** float(rep.lam)
            self.twist = None
        else:
            self.weight = base
            self.twist = pi_power_many(rep, samples.ambient(), -1.0)

    def values(self, f) -> np.ndarray:
        vals = _values(f, self.samples.points, self.rep.dim)
        if self.twist is not None:
            vals = np.einsum("pab,pb->pa", self.twist, vals)
        return vals

    def _integrand(self, F: np.ndarray, G: np.ndarray) -> np.ndarray:
        if self.twist is None:
            return self.gamma_x * F[:, 0] * np.conj(G[:, 0]) * self.weight
        return np.einsum("pa,ab,pb->p", np.conj(G), self.gamma_x, F) * self.weight

    def inner(self, f, g):
        """(value, stderr) of the pairing."""
        return self.samples.integrate(self._integrand(self.values(f), self.values(g)))

    def norm(self, f) -> float:
        return float(np.sqrt(np.real(self.inner(f, f)[0])))

    def gram(self, funcs, others=None) -> np.ndarray:
        """Matrix of pairings <funcs[a], others[b]>."""
        F = [self.values(f) for f in funcs]
        G = F if others is None else [self.values(g) for g in others]
        out = np.zeros((len(F), len(G)), dtype=complex)
        scale = self.samples.box_volume / self.samples.count
        if self.twist is None:
            Fm = np.stack([f[:, 0] for f in F], axis=1) * (self.weight * self.gamma_x)[:, None]
            Gm = np.stack([g[:, 0] for g in G], axis=1)
            out = Fm.T @ np.conj(Gm) * scale
        else:
            for a, f in enumerate(F):
                for b, g in enumerate(G):
                    out[a, b] = self._integrand(f, g).sum() * scale
        return out if np.any(np.iscomplex(out)) else out.real


def l2x_inner(A: JordanAlgebra, rep: RepSpec, f, g, samples: SampleSet, gamma_x=None):
    return L2XPairing(A, rep, samples, gamma_x).inner(f, g)


def unitarity_constant(A: JordanAlgebra, alpha) -> float:
    """c with ||F||^2 in L2_pi(cone) = c * (stratified norm of F o iota)."""
    from .representation import gamma_alpha

    return gamma_alpha(A, alpha) / A.r ** (float(alpha) - 0.5)


# integral formula check ----------------------------------------------------------

@dataclass(frozen=True)
class JacobianResult:
    lhs: float
    rhs: float
    rel_err: float
    lhs_stderr: float
    rhs_stderr: float


def bump(A: JordanAlgebra, radius: float = 0.8) -> Callable[[np.ndarray], np.ndarray]:
    """Smooth bump supported in the trace-norm ball of ``radius`` around e (inside the cone for radius < 1)."""
    e = np.zeros(A.n)
    e[0] = math.sqrt(A.r)

    def f(x: np.ndarray) -> np.ndarray:
        s = np.sum((x - e) ** 2, axis=1) / radius ** 2
        out = np.zeros(x.shape[0])
        inside = s < 1
        out[inside] = np.exp(-1.0 / (1.0 - s[inside]))
        return out

    return f


def verify_jacobian(A: JordanAlgebra, f, seed: int, count: int = 10 ** 6, radius: float = 0.8) -> JacobianResult:
    """Compare int_cone f with r^(1/2-n) int_X int_t f(iota(t, v)) t^(n-1) dt dv.

    ``f`` acts on stacks of ambient coordinates and must vanish outside the
    ball of ``radius`` around e.  The left side samples a box around e, the
    right side samples X and a t-interval covering the support.
    """
    n, r = A.n, A.r
    sr = math.sqrt(r)
    center = np.zeros(n)
    center[0] = sr

    def lhs_shard(rng, size):
        x = center + radius * (2 * rng.random((size, n)) - 1)
        h = f(x) * in_cone_many(A, x)
        return h.sum(), (h ** 2).sum()

    box_vol = (2 * radius) ** n
    parts = _run_shards(lhs_shard, _shard_rngs(seed, STREAM_BOX, count))
    s1, s2 = sum(p[0] for p in parts), sum(p[1] for p in parts)
    lhs = box_vol * s1 / count
    lhs_se = box_vol * math.sqrt(max(s2 / count - (s1 / count) ** 2, 0.0) / count)

    samples = sample_X(A, seed, count)
    t_lo, t_hi = r - radius * sr, r + radius * sr
    t_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(STREAM_T, 0)))
    t = t_lo + (t_hi - t_lo) * t_rng.random(samples.n_accepted)
    x = iota_many(A, t, samples.points)
    h = f(x) * r ** (0.5 - n) * t ** (n - 1) * (t_hi - t_lo)
    rhs, rhs_se = samples.integrate(h)
    rhs, rhs_se = float(rhs), float(rhs_se)
    if lhs == 0 and rhs == 0:
        return JacobianResult(0.0, 0.0, 0.0, lhs_se, rhs_se)
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return JacobianResult(float(lhs), rhs, rel, float(lhs_se), rhs_se)


# sample cache files ----------------------------------------------------------------

_HEADER = struct.Struct("<4s8sQQQI")


def save_samples(path, samples: SampleSet) -> None:
    """Binary file: magic, algebra hash, seed, proposal count, accepted count, dimension, then f64 LE points."""
    pts = np.ascontiguousarray(samples.points, dtype="<f8")
    head = _HEADER.pack(MAGIC, bytes.fromhex(samples.algebra.hash), samples.seed, samples.count,
                        pts.shape[0], pts.shape[1] if pts.ndim == 2 else 0)
    with open(path, "wb") as fh:
        fh.write(head)
        fh.write(struct.pack("<d", samples.box_volume))
        fh.write(pts.tobytes())


def load_samples(path, A: JordanAlgebra) -> SampleSet:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, h, seed, count, n_acc, dim = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise SamplingError(f"{path} is not a sample cache file")
    if h.hex() != A.hash:
        raise SamplingError(f"{path} was written for a different algebra")
    off = _HEADER.size
    (vol,) = struct.unpack_from("<d", raw, off)
    pts = np.frombuffer(raw, dtype="<f8", offset=off + 8).reshape(n_acc, dim).astype(float)
    return SampleSet(A, seed, count, pts, vol)
