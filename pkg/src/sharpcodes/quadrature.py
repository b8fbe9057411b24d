"""Quadrature rules against mu_n: PULB cases (i)/(ii), Gauss, Levenshtein 1/N
and the Skip 1-Add 2 rule exact on {0..2k+2} minus {2k}."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from .orthopoly import Poly, basis, gegenbauer_values, integrate, isolate_roots, measure_moment

KINDS = ("pulb_i", "pulb_ii", "gauss", "levenshtein_1_over_N", "skip1add2")
NODE_TOL = 1e-9


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    exact_on: tuple[int, ...]
    kind: str
    N: float | None = None

    def __post_init__(self):
        for name in ("nodes", "weights"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def apply(self, f) -> float:
        """Sum of w_i f(x_i); for the 1/N kind the node 1 is part of the rule."""
        return float(np.dot(self.weights, f(self.nodes)))

    def scaled(self, N: float | None = None) -> np.ndarray:
        """Weights times N (the frequencies a sharp code must realize)."""
        return self.weights * (self.N if N is None else N)

    def bound(self, h, N: float) -> float:
        return pulb_value(self, h, N)


def split_strength(tau: int) -> tuple[int, int]:
    """tau = 2k - 1 + eps."""
    if tau < 1:
        raise ValueError("strength must be >= 1")
    eps = 1 - tau % 2
    return (tau + 1 - eps) // 2, eps


def dgs_bound(n: int, tau: int) -> int:
    k, eps = split_strength(tau)
    return comb(n + k - 2 + eps, n - 1) + comb(n + k - 2, n - 1)


def lagrange_weights(n: int, nodes) -> np.ndarray:
    """Integrals of the Lagrange basis polynomials over the given nodes."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.empty(nodes.size)
    for i, x in enumerate(nodes):
        others = np.delete(nodes, i)
        ell = Poly.from_roots(others) / np.prod(x - others)
        w[i] = integrate(n, ell)
    return w


def _merge(*groups) -> np.ndarray:
    x = np.sort(np.concatenate([np.atleast_1d(np.asarray(g, dtype=float)) for g in groups]))
    if x.size > 1 and np.min(np.diff(x)) <= NODE_TOL:
        raise QuadratureError("nodes are not distinct")
    return x


def _finish(n, nodes, kind, exact_on, N=None) -> QuadratureRule:
    w = lagrange_weights(n, nodes)
    rule = QuadratureRule(n, nodes, w, tuple(exact_on), kind, N)
    if np.any(w <= 0):
        i = int(np.argmin(w))
        raise QuadratureError(f"{kind}: nonpositive weight {w[i]!r} at node {nodes[i]!r}")
    return rule


@lru_cache(maxsize=None)
def pulb_case_i(n: int, tau: int) -> QuadratureRule:
    """Zeros of (1+t)^eps P_k^{(0,eps)}; exact on degrees <= tau."""
    k, eps = split_strength(tau)
    nodes = _merge([-1.0] * eps, basis(n).zeros(k, 0, eps))
    return _finish(n, nodes, "pulb_i", range(1, tau + 1))


@lru_cache(maxsize=None)
def pulb_case_ii(n: int, tau: int) -> QuadratureRule:
    """Zeros of (t-1)(t+1)^(1-eps) P_{k-1+eps}^{(1,1-eps)}."""
    k, eps = split_strength(tau)
    inner = basis(n).zeros(k - 1 + eps, 1, 1 - eps)
    nodes = _merge([1.0], [-1.0] * (1 - eps), inner)
    return _finish(n, nodes, "pulb_ii", range(1, tau + 1))


@lru_cache(maxsize=None)
def gauss(n: int, k: int) -> QuadratureRule:
    nodes = basis(n).zeros(k)
    return _finish(n, nodes, "gauss", range(1, 2 * k))


def _real_roots(q: np.ndarray) -> np.ndarray:
    r = npoly.polyroots(q)
    if np.any(np.abs(r.imag) > 1e-7):
        raise QuadratureError("annihilating polynomial has non-real roots")
    r = np.sort(r.real)
    dq = npoly.polyder(q)
    for _ in range(3):
        d = npoly.polyval(r, dq)
        step = np.where(d != 0, npoly.polyval(r, q) / np.where(d != 0, d, 1), 0.0)
        r = r - step
    return np.sort(r)


@lru_cache(maxsize=None)
def levenshtein_1_over_N(n: int, N: float, tau: int) -> QuadratureRule:
    """Radau/Lobatto rule with the node 1 carrying weight 1/N, exact on degree <= tau.

    The k free nodes are the roots of the monic q solving
      eps=0:  int q P_j dmu = q(1)/N
      eps=1:  int q (t+1) P_j dmu = 2 q(1)/N        (j = 0..k-1)
    with -1 adjoined as an extra node when eps=1.  At N = D(n, tau) with
    eps=1 the -1 node receives weight 0 and is dropped.
    """
    k, eps = split_strength(tau)
    D = dgs_bound(n, tau)
    if N < D:
        raise QuadratureError(f"N={N} is below the DGS bound D({n},{tau})={D}")
    B = basis(n)
    mult = Poly([1.0, 1.0]) if eps else Poly([1.0])
    # unknown monic q = t^k + sum_{m<k} c_m t^m
    A = np.empty((k, k))
    rhs = np.empty(k)
    for j in range(k):
        pj = B.poly(j) * mult

        def lhs(m, pj=pj):
            return integrate(n, Poly.monomial(m) * pj) - pj(1.0) / N

        for m in range(k):
            A[j, m] = lhs(m)
        rhs[j] = -lhs(k)
    c = np.append(np.linalg.solve(A, rhs), 1.0)
    free = _real_roots(c)
    if np.any(np.abs(free) > 1 + 1e-9):
        raise QuadratureError(f"free nodes leave [-1, 1]: {free}")
    free = np.clip(free, -1.0, 1.0)
    groups = [free, [1.0]]
    if eps and not np.any(np.abs(free + 1) < NODE_TOL):
        groups.append([-1.0])
    nodes = _merge(*groups)
    w = lagrange_weights(n, nodes)
    keep = np.abs(w) > 1e-12
    if np.any(w[keep] < 0):
        i = int(np.argmin(np.where(keep, w, np.inf)))
        raise QuadratureError(f"infeasible: negative weight {w[i]!r} at node {nodes[i]!r}")
    if abs(w[-1] - 1 / N) > 1e-9:
        raise QuadratureError(f"weight at 1 is {w[-1]!r}, expected 1/N")
    nodes, w = nodes[keep][:-1], w[keep][:-1]
    return QuadratureRule(n, nodes, w, tuple(range(1, tau + 1)), "levenshtein_1_over_N", N)


def skip_bc(n: int, k: int) -> tuple[float, float]:
    """(b, c) from the product and sum relations; b is the positive root."""
    al = n / 2 - 1
    bc = -(k + 1) * k * (al + k - 1) / ((2 * al + k) * (2 * al + k - 1) * (al + k + 1))
    s = -2 * al * (k + 1) ** 2 * (al + k - 1) / ((2 * al + k) * (2 * al + k - 1) * (al + 2 * k + 1))
    disc = np.sqrt(s * s - 4 * bc)
    b, c = (s + disc) / 2, (s - disc) / 2
    # (t-b)(t-c) > 0 at k/(2al+k) keeps that point outside [c, b]; the
    # alternative branch b = k/(k+n-2) is excluded by this
    x = k / (2 * al + k)
    if not (x - b) * (x - c) > 0:
        raise QuadratureError(f"skip1add2({n},{k}): (t-b)(t-c) is not positive at k/(2a+k)")
    return b, c


def skip_gap(n: int, k: int) -> float:
    """Closed form of (t-b)(t-c) at t = k/(2a+k), a = n/2-1."""
    al = n / 2 - 1
    return (2 * k * k * al * (k + 2) * (al + k) ** 2
            / ((2 * al + k) ** 2 * (2 * al + k - 1) * (al + 2 * k + 1) * (al + k + 1)))


def skip_polynomial(n: int, k: int) -> Poly:
    b, _ = skip_bc(n, k)
    B = basis(n)
    return B.poly(k + 1) + b * B.poly(k - 1)


def skip_degrees(k: int) -> tuple[int, ...]:
    return tuple(i for i in range(1, 2 * k + 3) if i != 2 * k)


@lru_cache(maxsize=None)
def skip1add2(n: int, k: int) -> QuadratureRule:
    """k+1 nodes, zeros of P_{k+1} + b P_{k-1}, exact on T^k = {1..2k+2} minus {2k}."""
    if n < 3 or k < 1:
        raise ValueError("skip1add2 needs n >= 3 and k >= 1")
    q = skip_polynomial(n, k)
    edges = np.concatenate([[-1.0], basis(n).zeros(k), [1.0]])
    nodes = isolate_roots(q, list(zip(edges[:-1], edges[1:])))
    rule = _finish(n, _merge(nodes), "skip1add2", skip_degrees(k))
    res = verify_exactness(rule)
    if res > 1e-10:
        raise QuadratureError(f"skip1add2({n},{k}) exactness residual {res:.3g}")
    return rule


def rule_moment(rule: QuadratureRule, i: int) -> float:
    """Rule applied to P_i^{(n)}, including the f(1)/N term for the 1/N kind."""
    v = float(np.dot(rule.weights, gegenbauer_values(rule.n, i, rule.nodes)[i]))
    if rule.kind == "levenshtein_1_over_N":
        v += 1.0 / rule.N
    return v


def verify_exactness(rule: QuadratureRule, deep: bool = False, seed: int = 0, samples: int = 200) -> float:
    """Max |rule(f) - f_0| over P_i, i in {0} + exact_on (and random span elements)."""
    degs = (0,) + tuple(rule.exact_on)
    kmax = max(degs)
    vals = gegenbauer_values(rule.n, kmax, rule.nodes)[list(degs)]
    applied = vals @ rule.weights
    if rule.kind == "levenshtein_1_over_N":
        applied = applied + 1.0 / rule.N
    target = np.zeros(len(degs))
    target[0] = 1.0
    res = float(np.max(np.abs(applied - target)))
    if deep:
        rng = np.random.default_rng(seed)
        C = rng.uniform(-1, 1, size=(samples, len(degs)))
        res = max(res, float(np.max(np.abs(C @ applied - C[:, 0]))))
    return res


def pulb_value(rule: QuadratureRule, h, N: float) -> float:
    """N times the rule applied to h (plus h(1) for the 1/N kind)."""
    v = N * rule.apply(h)
    if rule.kind == "levenshtein_1_over_N":
        v += N / rule.N * float(h(1.0))
    return float(v)


def build_rule(kind: str, n: int, tau: int | None = None, k: int | None = None, N: float | None = None):
    """Dispatch by kind name (CLI-facing)."""
    if kind == "pulb_i":
        return pulb_case_i(n, tau)
    if kind == "pulb_ii":
        return pulb_case_ii(n, tau)
    if kind == "gauss":
        return gauss(n, k)
    if kind in ("levenshtein", "levenshtein_1_over_N"):
        return levenshtein_1_over_N(n, float(N), tau)
    if kind == "skip1add2":
        return skip1add2(n, k)
    raise ValueError(f"unknown rule kind {kind!r}")
