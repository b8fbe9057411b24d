"""Gegenbauer and adjacent Jacobi polynomials, normalized to 1 at t = 1.

Everything integrates against the probability measure
``dmu_n(t) = gamma_n (1 - t^2)^((n-3)/2) dt`` on [-1, 1]. The constant
gamma_n never has to be computed: all integrals reduce to the even
moments of mu_n, which obey a one-line recurrence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq


@dataclass(frozen=True, eq=False)
class Poly:
    """Real polynomial stored by monomial coefficients (index = power)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        c = npoly.polytrim(c, 0.0) if c.size else np.zeros(1)
        c = np.array(c, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0.0:
            return 0
        return self.coeffs.size - 1

    @classmethod
    def from_roots(cls, roots, scale: float = 1.0) -> "Poly":
        return cls(scale * npoly.polyfromroots(np.asarray(roots, dtype=float)))

    @classmethod
    def monomial(cls, k: int) -> "Poly":
        c = np.zeros(k + 1)
        c[k] = 1.0
        return cls(c)

    def __call__(self, t):
        return npoly.polyval(t, self.coeffs)

    def deriv(self, m: int = 1) -> "Poly":
        return Poly(npoly.polyder(self.coeffs, m))

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        return Poly(npoly.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly(npoly.polymul(self.coeffs, other.coeffs))
        return Poly(self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, s: float):
        return Poly(self.coeffs / float(s))

    def __repr__(self):
        return f"Poly({np.array2string(self.coeffs, precision=6)})"


def _jacobi_params(n: int, a: int, b: int) -> tuple[float, float]:
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError(f"adjacent indices (a, b) must lie in {{0,1}}^2, got ({a}, {b})")
    if n < 2:
        raise ValueError("dimension n must be >= 2")
    return a + (n - 3) / 2, b + (n - 3) / 2


def _jacobi_step(k: int, al: float, be: float):
    """Coefficients of P_{k+1} = (A t + B) P_k - C P_{k-1} (standard Jacobi)."""
    s = 2 * k + al + be
    d = 2 * (k + 1) * (k + al + be + 1) * s
    A = (s + 1) * (s + 2) * s / d
    B = (s + 1) * (al * al - be * be) / d
    C = 2 * (k + al) * (k + be) * (s + 2) / d
    return A, B, C


def _jacobi_raw(i: int, al: float, be: float, t):
    """Standard (unnormalized) Jacobi values by forward recurrence."""
    t = np.asarray(t, dtype=float)
    p0 = np.ones_like(t)
    if i == 0:
        return p0
    p1 = ((al + be + 2) * t + (al - be)) / 2
    for k in range(1, i):
        A, B, C = _jacobi_step(k, al, be)
        p0, p1 = p1, (A * t + B) * p1 - C * p0
    return p1


class GegenbauerBasis:
    """P_i^{(a,b)} in dimension n, with cached monomial coefficients."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("dimension n must be >= 2")
        self.n = n
        self.alpha = n / 2 - 1
        self._cache: dict[tuple[int, int], list[Poly]] = {}

    def poly(self, i: int, a: int = 0, b: int = 0) -> Poly:
        al, be = _jacobi_params(self.n, a, b)
        polys = self._cache.setdefault((a, b), [])
        while len(polys) <= i:
            polys.append(self._build(len(polys), al, be))
        return polys[i]

    @staticmethod
    def _build(i: int, al: float, be: float) -> Poly:
        p0 = np.array([1.0])
        if i == 0:
            return Poly(p0)
        p1 = np.array([(al - be) / 2, (al + be + 2) / 2])
        for k in range(1, i):
            A, B, C = _jacobi_step(k, al, be)
            nxt = npoly.polysub(npoly.polymul([B, A], p1), C * p0)
            p0, p1 = p1, nxt
        return Poly(p1 / npoly.polyval(1.0, p1))

    def __call__(self, i: int, t, a: int = 0, b: int = 0):
        return jacobi_eval(self, a, b, i, t)

    def zeros(self, k: int, a: int = 0, b: int = 0) -> np.ndarray:
        return _jacobi_zeros(self.n, a, b, k)


@lru_cache(maxsize=None)
def basis(n: int) -> GegenbauerBasis:
    return GegenbauerBasis(n)


def jacobi_eval(basis: GegenbauerBasis, a: int, b: int, i: int, t):
    """P_i^{(a,b)}(t) with P(1) = 1, evaluated by the three-term recurrence."""
    if i < 0:
        raise ValueError("degree must be nonnegative")
    al, be = _jacobi_params(basis.n, a, b)
    return _jacobi_raw(i, al, be, t) / _jacobi_raw(i, al, be, 1.0)


def gegenbauer_values(n: int, kmax: int, t) -> np.ndarray:
    """Stack of P_0..P_kmax (n-dimensional Gegenbauer, P(1)=1) at t.

    Uses the normalized recurrence (2a+k)P_{k+1} = 2(a+k) t P_k - k P_{k-1}.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty((kmax + 1,) + t.shape)
    out[0] = 1.0
    if kmax == 0:
        return out
    out[1] = t
    al = n / 2 - 1
    for k in range(1, kmax):
        out[k + 1] = (2 * (al + k) * t * out[k] - k * out[k - 1]) / (2 * al + k)
    return out


@lru_cache(maxsize=None)
def _moments(n: int, jmax: int) -> tuple[float, ...]:
    m = [1.0]
    for j in range(1, jmax // 2 + 1):
        m.append(m[-1] * (2 * j - 1) / (2 * j + n - 2))
    return tuple(m)


def measure_moment(n: int, j: int) -> float:
    """Integral of t^j against mu_n."""
    if n < 2 or j < 0:
        raise ValueError("need n >= 2 and j >= 0")
    if j % 2:
        return 0.0
    return _moments(n, max(j, 32))[j // 2]


@dataclass(frozen=True)
class MeasureMoments:
    """Even-moment table of mu_n; odd moments vanish."""

    n: int
    jmax: int = 32
    even: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "even", _moments(self.n, self.jmax))

    def __getitem__(self, j: int) -> float:
        return 0.0 if j % 2 else self.even[j // 2]


def integrate(n: int, f: Poly) -> float:
    """f_0 = integral of f against mu_n."""
    c = f.coeffs
    return float(sum(c[j] * measure_moment(n, j) for j in range(0, c.size, 2)))


def gegenbauer_norm_sq(n: int, k: int) -> float:
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if k == 0:
        return 1.0
    return (n + k - 2) / (n + 2 * k - 2) / comb(k + n - 2, k)


def leading_coeff(n: int, k: int) -> float:
    return basis(n).poly(k).coeffs[-1]


def gegenbauer_expand(n: int, f: Poly) -> np.ndarray:
    """Coefficients f_i with f = sum f_i P_i^{(n)}, by back-substitution."""
    B = basis(n)
    rem = np.array(f.coeffs, dtype=float)
    deg = f.degree
    out = np.zeros(deg + 1)
    for k in range(deg, -1, -1):
        pk = B.poly(k).coeffs
        ck = rem[k] / pk[k]
        out[k] = ck
        rem[: k + 1] -= ck * pk
    return out


def gegenbauer_synth(n: int, coeffs) -> Poly:
    B = basis(n)
    acc = Poly([0.0])
    for i, c in enumerate(coeffs):
        if c != 0.0:
            acc = acc + c * B.poly(i)
    return acc


class RootError(ValueError):
    pass


def isolate_roots(f: Poly, brackets) -> np.ndarray:
    """One root per bracket: Brent bisection to 1e-15, then a Newton polish."""
    df = f.deriv()
    roots = []
    for lo, hi in brackets:
        flo, fhi = f(lo), f(hi)
        if flo == 0.0:
            roots.append(float(lo))
            continue
        if fhi == 0.0:
            roots.append(float(hi))
            continue
        if np.sign(flo) == np.sign(fhi):
            raise RootError(f"missing root in bracket [{lo!r}, {hi!r}]")
        r = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        for _ in range(2):
            d = df(r)
            if d == 0.0:
                break
            step = f(r) / d
            if not lo <= r - step <= hi:
                break
            r -= step
        roots.append(float(r))
    return np.sort(np.array(roots))


@lru_cache(maxsize=None)
def _jacobi_zeros(n: int, a: int, b: int, k: int) -> np.ndarray:
    """Zeros of P_k^{(a,b)} found from the interlacing with degree k-1."""
    if k == 0:
        return np.zeros(0)
    prev = _jacobi_zeros(n, a, b, k - 1)
    edges = np.concatenate([[-1.0], prev, [1.0]])
    p = basis(n).poly(k, a, b)
    z = isolate_roots(p, list(zip(edges[:-1], edges[1:])))
    z.setflags(write=False)
    return z
