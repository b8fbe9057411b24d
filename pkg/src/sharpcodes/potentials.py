"""Potential kernels, confluent divided differences and the interpolants behind
the first-level, second-level and 600-cell bounds."""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable

import numpy as np

from .orthopoly import Poly, gegenbauer_expand
from .quadrature import pulb_case_i, pulb_case_ii, skip1add2

SIGN_CASES = ("case_i", "case_ii", "abs_monotone", "custom")
CLAMP = 1 - 1e-12
GRID_SIZE = 100_000


class DominationError(ValueError):
    def __init__(self, msg, t=None, excess=None):
        super().__init__(msg)
        self.t, self.excess = t, excess


@dataclass(frozen=True, eq=False)
class Potential:
    kind: str
    params: tuple
    value: Callable
    derivative: Callable
    sign_case: str = "custom"
    singular: bool = False
    spec: str = ""

    def __call__(self, t):
        t = np.clip(np.asarray(t, dtype=float), -1.0, CLAMP if self.singular else 1.0)
        return self.value(t)

    def d(self, t):
        # clamped for every kernel: distance powers have h'(1) infinite
        t = np.clip(np.asarray(t, dtype=float), -1.0, CLAMP)
        return self.derivative(t)

    def __repr__(self):
        return f"Potential({self.spec or self.kind})"


def riesz(s: float) -> Potential:
    """h(t) = (2 - 2t)^(-s/2); s < 0 gives the (bounded) distance powers."""
    s = float(s)
    if s == 0:
        raise ValueError("riesz:0 is constant; use log for the logarithmic kernel")
    p = -s / 2
    case = "abs_monotone" if s > 0 else ("case_ii" if -2 < s < 0 else "custom")
    return Potential(
        "riesz", (s,),
        lambda t: (2 - 2 * t) ** p,
        lambda t: -2 * p * (2 - 2 * t) ** (p - 1),
        case, s > 0, f"riesz:{s:g}",
    )


def log_potential() -> Potential:
    """h(t) = -log(2 - 2t) / 2, the logarithmic energy of distance."""
    return Potential("log", (), lambda t: -0.5 * np.log(2 - 2 * t), lambda t: 1 / (2 - 2 * t),
                     "abs_monotone", True, "log")


def exp_potential(a: float = 1.0) -> Potential:
    a = float(a)
    return Potential("exp", (a,), lambda t: np.exp(a * t), lambda t: a * np.exp(a * t),
                     "abs_monotone" if a > 0 else "custom", False, f"exp:{a:g}")


def trunc_exp(a: float = 1.0, degree: int = 15) -> Potential:
    """Degree-15 Taylor polynomial of exp(a t); its 16th derivative vanishes."""
    a = float(a)
    c = np.array([a ** i / factorial(i) for i in range(degree + 1)])
    p = Poly(c)
    dp = p.deriv()
    case = "abs_monotone" if 0 < a <= 1 else "custom"
    spec = f"trunc_exp:{a:g}" if degree == 15 else f"trunc_exp:{a:g}:{degree}"
    return Potential("trunc_exp", (a, degree), p, dp, case, False, spec)


def custom(value, derivative, sign_case: str = "custom", singular: bool = False, name: str = "custom") -> Potential:
    if sign_case not in SIGN_CASES:
        raise ValueError(f"unknown sign case {sign_case!r}")
    return Potential("custom", (), value, derivative, sign_case, singular, name)


def parse_potential(spec: str) -> Potential:
    """`riesz:<s>`, `log`, `exp:<a>`, `trunc_exp:<a>[:<degree>]`."""
    head, _, rest = spec.strip().partition(":")
    try:
        if head == "riesz":
            return riesz(float(rest))
        if head == "log" and not rest:
            return log_potential()
        if head == "exp":
            return exp_potential(float(rest) if rest else 1.0)
        if head == "trunc_exp":
            a, _, deg = rest.partition(":")
            return trunc_exp(float(a) if a else 1.0, int(deg) if deg else 15)
    except ValueError as exc:
        raise ValueError(f"bad potential spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown potential spec {spec!r}")


# --------------------------------------------------------------------------
# Hermite data


@dataclass(frozen=True)
class NodeMultiset:
    nodes: tuple[float, ...]
    mults: tuple[int, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.mults):
            raise ValueError("nodes and multiplicities differ in length")
        if any(m not in (1, 2) for m in self.mults):
            raise ValueError("multiplicities above 2 need h'' which is not modelled")

    def expanded(self) -> np.ndarray:
        return np.repeat(np.asarray(self.nodes, dtype=float), self.mults)

    @classmethod
    def interior_doubled(cls, nodes) -> "NodeMultiset":
        """Simple at +-1, doubled elsewhere."""
        nodes = tuple(float(x) for x in nodes)
        return cls(nodes, tuple(1 if abs(abs(x) - 1) < 1e-12 else 2 for x in nodes))


def _check_nodes(h: Potential, z: np.ndarray):
    if h.singular and np.any(z > 1 - 1e-9):
        raise ValueError(f"{h!r} is singular at 1 and a node lies within 1e-9 of it")


def divided_differences(h: Potential, m: NodeMultiset) -> np.ndarray:
    """Newton coefficients h[t_1], h[t_1,t_2], ..., h[t_1..t_M] (confluent)."""
    z = m.expanded()
    _check_nodes(h, z)
    M = z.size
    col = np.asarray(h(z), dtype=float).copy()
    dz = np.asarray(h.d(z), dtype=float)
    out = [col[0]]
    for j in range(1, M):
        nxt = np.empty(M - j)
        for i in range(M - j):
            span = z[i + j] - z[i]
            if span == 0.0:
                nxt[i] = dz[i]  # only j == 1 can hit a repeated node
            else:
                nxt[i] = (col[i + 1] - col[i]) / span
        col = nxt
        out.append(col[0])
    return np.array(out)


def newton_basis(z: np.ndarray) -> list[Poly]:
    """u_0 = 1, u_j = (t - z_1)...(t - z_j)."""
    u = [Poly([1.0])]
    for x in z[:-1]:
        u.append(u[-1] * Poly([-x, 1.0]))
    return u


def hermite_interpolant(h: Potential, m: NodeMultiset) -> Poly:
    z = m.expanded()
    c = divided_differences(h, m)
    acc = Poly([0.0])
    for cj, uj in zip(c, newton_basis(z)):
        acc = acc + cj * uj
    return acc


def chebyshev_grid(size: int = GRID_SIZE) -> np.ndarray:
    return np.cos(np.pi * np.arange(size) / (size - 1))[::-1].copy()


def domination_excess(f: Poly, h: Potential, grid: np.ndarray | None = None) -> tuple[float, float]:
    """Worst relative excess of f over h on the grid, and where it happens."""
    t = chebyshev_grid() if grid is None else grid
    hv = h(t)
    excess = (f(t) - hv) / np.maximum(1.0, np.abs(hv))
    i = int(np.argmax(excess))
    return float(excess[i]), float(t[i])


def check_domination(f: Poly, h: Potential, tol: float = 1e-9, what: str = "interpolant") -> float:
    excess, t = domination_excess(f, h)
    if excess > tol:
        raise DominationError(
            f"{what} exceeds {h!r} by {excess:.3e} (relative) at t={t:.12g}", t, excess)
    return excess


def case_interpolant(n: int, tau: int, case: str, h: Potential, check: bool = True) -> Poly:
    """Degree-tau Hermite interpolant at the case (i) or (ii) PULB nodes."""
    rule = {"i": pulb_case_i, "ii": pulb_case_ii}[case](n, tau)
    nodes = rule.nodes
    if h.singular:
        nodes = nodes[nodes < 1 - 1e-9]
        if case == "ii":
            raise ValueError("case (ii) interpolates at t = 1; the kernel must be finite there")
    H = hermite_interpolant(h, NodeMultiset.interior_doubled(nodes))
    if check:
        check_domination(H, h, what=f"case ({case}) interpolant")
    return H


def gegenbauer_coeff(n: int, f: Poly, i: int) -> float:
    c = gegenbauer_expand(n, f)
    return float(c[i]) if i < c.size else 0.0


def annihilation_data(n: int, k: int, h: Potential):
    """(H, g_{k+1}, h_2k, e_2k) for the second-level construction."""
    beta = skip1add2(n, k).nodes
    H = hermite_interpolant(h, NodeMultiset(tuple(beta), (2,) * beta.size))
    g = Poly.from_roots(beta)
    h2k = gegenbauer_coeff(n, H, 2 * k)
    e2k = gegenbauer_coeff(n, g * g, 2 * k)
    return H, g, h2k, e2k


def second_level_interpolant(n: int, k: int, h: Potential, check: bool = True) -> Poly:
    """G = H - (h_2k / e_2k) g_{k+1}^2: interpolates h and h' at the Skip 1-Add 2
    nodes and has vanishing 2k-th Gegenbauer coefficient."""
    H, g, h2k, e2k = annihilation_data(n, k, h)
    G = H - (h2k / e2k) * (g * g)
    if check:
        check_domination(G, h, what="second-level interpolant")
    return G


S5 = np.sqrt(5)
CELL600_NODES = (-1.0, -(1 + S5) / 4, -0.5, (1 - S5) / 4, 0.0, (S5 - 1) / 4, 0.5, (1 + S5) / 4, 1.0)


def cell600_multiset() -> NodeMultiset:
    return NodeMultiset(CELL600_NODES, (1,) + (2,) * 7 + (1,))


def cell600_data(h: Potential):
    """(g, g16, g_12, (g16)_12) for the 600-cell construction, dimension 4."""
    m = cell600_multiset()
    g = hermite_interpolant(h, m)
    g16 = Poly.from_roots(m.expanded())
    return g, g16, gegenbauer_coeff(4, g, 12), gegenbauer_coeff(4, g16, 12)


def cell600_interpolant(h: Potential, check: bool = True) -> Poly:
    """H = g - (g_12 / (g16)_12) g16 on the 16-point multiset over the 600-cell
    inner products; H_12 = 0 and H interpolates h there."""
    if check:
        t = chebyshev_grid(2001)[1:-1]
        d1 = h.d(t)
        if np.any(d1 < -1e-12) or np.any(np.diff(d1) < -1e-12 * np.maximum(1, np.abs(d1[1:]))):
            raise ValueError(f"{h!r}: h' and h'' must be nonnegative for the 600-cell construction")
    g, g16, g12, e12 = cell600_data(h)
    H = g - (g12 / e12) * g16
    if check:
        check_domination(H, h, what="600-cell interpolant")
    return H
