"""Sharp spherical codes from explicit coordinates, plus the Golay machinery
behind the Higman-Sims, McLaughlin and Leech constructions."""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product

import numpy as np
from scipy.linalg import null_space

from . import tables

IP_TOL = 1e-9
ROLES = ("case_i", "case_ii", "second_level")


class CodeError(ValueError):
    pass


class NotAttainedError(CodeError):
    """Raised when a witness is requested at a level the code does not attain."""


# --------------------------------------------------------------------------
# binary Golay code

QR23 = frozenset(pow(i, 2, 23) for i in range(1, 23))


@dataclass(frozen=True, eq=False)
class BinaryCode:
    length: int
    codewords: np.ndarray  # uint8, shape (2^k, length)

    def weights(self) -> np.ndarray:
        return self.codewords.sum(axis=1)

    def weight_distribution(self) -> dict[int, int]:
        w, c = np.unique(self.weights(), return_counts=True)
        return {int(a): int(b) for a, b in zip(w, c)}

    def punctured(self) -> "BinaryCode":
        """Drop the last coordinate."""
        return BinaryCode(self.length - 1, np.ascontiguousarray(self.codewords[:, :-1]))


def _gf2_rref(M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    M = M.copy() % 2
    pivots, r = [], 0
    for c in range(M.shape[1]):
        rows = np.nonzero(M[r:, c])[0]
        if rows.size == 0:
            continue
        p = r + rows[0]
        M[[r, p]] = M[[p, r]]
        others = np.nonzero(M[:, c])[0]
        others = others[others != r]
        M[others] ^= M[r]
        pivots.append(c)
        r += 1
        if r == M.shape[0]:
            break
    return M[:r], pivots


def golay_generator() -> np.ndarray:
    """[24,12] generator in systematic form [I | B].

    The cyclic [23,12] code is spanned by the 23 cyclic shifts of the
    indicator of the quadratic residues mod 23; a parity bit extends it.
    """
    base = np.zeros(23, dtype=np.uint8)
    base[sorted(QR23)] = 1
    shifts = np.array([np.roll(base, s) for s in range(23)], dtype=np.uint8)
    R, piv = _gf2_rref(shifts)
    if R.shape[0] != 12 or piv != list(range(12)):
        raise CodeError("quadratic-residue generator does not reduce to [I | B]")
    parity = R.sum(axis=1, dtype=np.uint8) % 2
    return np.concatenate([R, parity[:, None]], axis=1).astype(np.uint8)


GOLAY_WEIGHTS = {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


@lru_cache(maxsize=None)
def golay_extended() -> BinaryCode:
    G = golay_generator()
    msgs = (np.arange(4096)[:, None] >> np.arange(11, -1, -1)) & 1
    words = (msgs.astype(np.int64) @ G.astype(np.int64)) % 2
    code = BinaryCode(24, words.astype(np.uint8))
    if code.weight_distribution() != GOLAY_WEIGHTS:
        raise CodeError(f"Golay self-check failed: {code.weight_distribution()}")
    return code


def golay_min_words() -> np.ndarray:
    """The 253 weight-7 words of the punctured (length 23) code."""
    c23 = golay_extended().punctured()
    return c23.codewords[c23.weights() == 7]


def octads() -> np.ndarray:
    g = golay_extended()
    return g.codewords[g.weights() == 8]


# --------------------------------------------------------------------------
# spherical codes


@dataclass(frozen=True, eq=False)
class SphericalCode:
    name: str
    n: int
    points: np.ndarray
    strength: int
    T: tuple[int, ...]
    expected_inner_products: tuple[float, ...]
    witnesses: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    def __repr__(self):
        return f"SphericalCode({self.name!r}, n={self.n}, N={self.N}, tau={self.strength})"


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def inner_product_spectrum(points: np.ndarray, base: np.ndarray | None = None, chunk: int = 1024):
    """Sorted distinct inner products (clustered at IP_TOL) with counts per base row."""
    base = points if base is None else np.atleast_2d(base)
    values, counts = [], []
    for s in range(0, base.shape[0], chunk):
        G = base[s : s + chunk] @ points.T
        values.append(G.ravel())
    return cluster(np.concatenate(values))


def cluster(values, tol: float = IP_TOL):
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        return np.zeros(0), np.zeros(0, dtype=int)
    breaks = np.nonzero(np.diff(v) > tol)[0]
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks + 1, [v.size]])
    centers = np.array([v[a:b].mean() for a, b in zip(starts, ends)])
    if np.any(v[ends - 1] - v[starts] > 2 * tol):
        raise CodeError("inner-product clustering is ambiguous at this tolerance")
    return centers, ends - starts


def check_code(code: SphericalCode, samples: int = 20, seed: int = 0, full_limit: int = 5000) -> None:
    """Unit norms, distinctness and spectrum inside expected values + {1}."""
    P = code.points
    if P.shape[1] != code.n:
        raise CodeError(f"{code.name}: points have dimension {P.shape[1]}, expected {code.n}")
    norms = np.linalg.norm(P, axis=1)
    if np.max(np.abs(norms - 1)) > 1e-12:
        raise CodeError(f"{code.name}: point norms deviate from 1 by {np.max(np.abs(norms - 1)):.2e}")
    allowed = np.array(sorted(set(code.expected_inner_products) | {1.0}))
    if code.N <= full_limit:
        rows = np.arange(code.N)
    else:
        rows = np.random.default_rng(seed).choice(code.N, size=samples, replace=False)
    for s in range(0, rows.size, 512):
        idx = rows[s : s + 512]
        G = P[idx] @ P.T
        dev = np.min(np.abs(G[..., None] - allowed), axis=-1)
        if np.max(dev) > IP_TOL:
            raise CodeError(f"{code.name}: inner product off the expected spectrum by {np.max(dev):.2e}")
        ones = np.sum(G > 1 - IP_TOL, axis=1)
        if np.any(ones != 1):
            raise CodeError(f"{code.name}: repeated points")


def _reduce(points: np.ndarray, normals) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates in an orthonormal frame of the complement of `normals`."""
    frame = null_space(np.atleast_2d(np.asarray(normals, dtype=float)))
    return points @ frame, frame


def _select(points: np.ndarray, apex: np.ndarray, s: float) -> np.ndarray:
    ip = points @ apex
    sel = np.abs(ip - s) <= IP_TOL
    if not np.any(sel):
        raise CodeError(f"no points at inner product {s} with the apex")
    return (points[sel] - s * apex) / np.sqrt(1 - s * s)


def derive_kissing(parent: SphericalCode, apex, s: float, name: str | None = None) -> SphericalCode:
    """Points at inner product s with the apex, recentred onto the unit sphere
    of the apex's orthogonal complement (expressed in n-1 coordinates)."""
    apex_v = parent.points[apex] if np.ndim(apex) == 0 else _unit(apex)
    if not any(abs(s - v) <= IP_TOL for v in parent.expected_inner_products):
        raise CodeError(f"{s} is not an inner product of {parent.name}")
    Y = _select(parent.points, apex_v, s)
    Y, _ = _reduce(Y, apex_v)
    vals, _ = inner_product_spectrum(Y)
    vals = tuple(float(v) for v in vals if v < 1 - IP_TOL)
    strength = max(parent.strength - 2, 1)
    return SphericalCode(name or f"{parent.name}/derived", parent.n - 1, _frozen(Y), strength,
                         tuple(range(1, strength + 1)), vals)


# --- individual constructions ------------------------------------------------

PHI = (1 + np.sqrt(5)) / 2


def _ngon(N: int):
    ang = 2 * np.pi * np.arange(N) / N
    P = np.column_stack([np.cos(ang), np.sin(ang)])
    wi = np.array([np.cos(np.pi / N), np.sin(np.pi / N)]) if N % 2 == 0 else -P[0]
    ips = tuple(sorted({round(np.cos(2 * np.pi * j / N), 15) for j in range(1, N)}))
    return P, N - 1, ips, {"case_i": wi, "case_ii": P[0]}


def _simplex(n: int):
    E = np.eye(n + 1) - 1.0 / (n + 1)
    E /= np.linalg.norm(E, axis=1)[:, None]
    P, _ = _reduce(E, np.ones(n + 1))
    return P, 2, (-1.0 / n,), {"case_i": -P[0], "case_ii": P[0]}


def _cross(n: int):
    P = np.zeros((2 * n, n))
    P[0::2] = np.eye(n)
    P[1::2] = -np.eye(n)
    return P, 3, (-1.0, 0.0), {"case_i": np.ones(n) / np.sqrt(n), "case_ii": P[0]}


def _cube():
    P = np.array(list(product((1.0, -1.0), repeat=3))) / np.sqrt(3)
    return P, 3, (-1.0, -1 / 3, 1 / 3), {"case_i": np.array([0.0, 0.0, 1.0]), "case_ii": P[0]}


def _icosahedron_points() -> np.ndarray:
    pts = []
    for s1, s2 in product((1.0, -1.0), repeat=2):
        v = np.array([0.0, s1, s2 * PHI])
        for r in range(3):
            pts.append(np.roll(v, r))
    P = np.array(pts)
    return P / np.linalg.norm(P, axis=1)[:, None]


def _faces(P: np.ndarray) -> list[tuple[int, int, int]]:
    c = 1 / np.sqrt(5)
    G = P @ P.T
    return [f for f in combinations(range(len(P)), 3)
            if all(abs(G[i, j] - c) < IP_TOL for i, j in combinations(f, 2))]


def _icosahedron():
    P = _icosahedron_points()
    f = _faces(P)[0]
    wit = _unit(P[list(f)].sum(axis=0))
    s5 = 1 / np.sqrt(5)
    return P, 5, (-1.0, -s5, s5), {"second_level": wit, "case_ii": P[0]}


def _dodecahedron():
    I = _icosahedron_points()
    P = np.array([_unit(I[list(f)].sum(axis=0)) for f in _faces(I)])
    s = np.sqrt(5) / 3
    return P, 5, (-1.0, -s, -1 / 3, 1 / 3, s), {"second_level": I[0], "case_ii": P[0]}


def _c_5_16_3():
    A = []
    for i in range(4):
        for sg in (1.0, -1.0):
            v = np.zeros(5)
            v[i] = sg * 2
            v[4] = 1.0
            A.append(v)
    B = [np.array([*s, -1.0]) for s in product((1.0, -1.0), repeat=4) if s.count(-1.0) % 2 == 0]
    P = np.array(A + B) / np.sqrt(5)
    e5 = np.eye(5)[4]
    return P, 3, (-3 / 5, 1 / 5), {"case_i": e5, "case_ii": P[0]}


def _c_7_56_5():
    r, c = np.sqrt(2 / 3), 1 / np.sqrt(3)
    A, B = [], []
    for i in range(6):
        for sg in (1.0, -1.0):
            v = np.zeros(7)
            v[i] = sg * r
            A.append(v + c * np.eye(7)[6])
            B.append(v - c * np.eye(7)[6])
    E = [np.array([*s, 0.0]) / np.sqrt(6) for s in product((1.0, -1.0), repeat=6) if s.count(-1.0) % 2 == 0]
    P = np.array(A + B + E)
    return P, 5, (-1.0, -1 / 3, 1 / 3), {"case_i": np.eye(7)[6], "case_ii": P[0]}


def _e8():
    roots = []
    for i, j in combinations(range(8), 2):
        for si, sj in product((1.0, -1.0), repeat=2):
            v = np.zeros(8)
            v[i], v[j] = si, sj
            roots.append(v / np.sqrt(2))
    for s in product((1.0, -1.0), repeat=8):
        if s.count(-1.0) % 2 == 0:
            roots.append(np.array(s) / np.sqrt(8))
    P = np.array(roots)
    return P, 7, (-1.0, -0.5, 0.0, 0.5), {"second_level": np.eye(8)[0], "case_ii": P[0]}


def _c_22_100_3():
    W = golay_min_words()
    r22 = np.sqrt(22)
    s5 = np.sqrt(5)
    x, y = (8 * s5 - 1) / (11 * r22), -(3 * s5 + 1) / (11 * r22)
    z, u = (4 - 21 * s5) / (11 * r22), (4 + s5) / (11 * r22)
    first = W[:, 0] == 1
    alphas = W[first][:, 1:]
    A = np.where(alphas == 1, x, y)
    B = np.full((22, 22), u) + np.eye(22) * (z - u)
    c = np.full((1, 22), -1 / r22)
    P = np.concatenate([c, B, A])
    beta = W[~first][0, 1:]
    a, b = (5 + 15 * s5) / 110, (5 - 7 * s5) / 110
    wit = np.where(beta == 1, a, b)
    return P, 3, (-4 / 11, 1 / 11), {"case_i": wit, "case_ii": P[0]}


def _c_22_275_4_parts():
    W = golay_min_words()
    s2, s30 = np.sqrt(2), np.sqrt(30)
    x, y = 2 * s30 / 33 - s2 / 22, -s30 / 44 - s2 / 22
    z, u = 3 * s2 / 44 + 7 * s30 / 44, 3 * s2 / 44 - s30 / 132
    a, b = -5 * s30 / 88 + s2 / 88, 7 * s30 / 264 + s2 / 88
    last = W[:, -1] == 1
    Pp = np.full((22, 22), u) + np.eye(22) * (z - u)
    A = np.where(W[last][:, :-1] == 1, x, y)
    B = np.where(W[~last][:, :-1] == 1, a, b)
    return Pp, A, B


def _c_22_275_4():
    P = np.concatenate(_c_22_275_4_parts())
    return P, 4, (-0.25, 1 / 6), {"case_i": -P[0], "case_ii": P[0]}


def _mclaughlin_split(s_keep: float, s_pick: float, s_common: float):
    """Derived code of the 275-point code at apex p22, with the centroid witness.

    Keep the points at s_keep to the apex; pick b as the first point at s_pick
    to the apex; the witness points from the centroid of the derived code to
    the centroid of the kept points at s_common to both apex and b.
    """
    P = np.concatenate(_c_22_275_4_parts())
    apex = P[21]
    ip_apex = P @ apex
    keep = np.abs(ip_apex - s_keep) <= IP_TOL
    b = P[np.nonzero(np.abs(ip_apex - s_pick) <= IP_TOL)[0][0]]
    common = keep & (np.abs(P @ b - s_common) <= IP_TOL)
    Y = (P[keep] - s_keep * apex) / np.sqrt(1 - s_keep ** 2)
    G = (P[common] - s_keep * apex) / np.sqrt(1 - s_keep ** 2)
    Yr, frame = _reduce(Y, apex)
    g, e = G.mean(axis=0) @ frame, Yr.mean(axis=0)
    return Yr, _unit(g - e)


def _c_21_162_3():
    Y, wit = _mclaughlin_split(1 / 6, -0.25, 1 / 6)
    return Y, 3, (-2 / 7, 1 / 7), {"case_i": wit, "case_ii": Y[0]}


def _c_21_112_3():
    Y, wit = _mclaughlin_split(-0.25, 1 / 6, -0.25)
    return Y, 3, (-1 / 3, 1 / 9), {"case_i": wit, "case_ii": Y[0]}


def _c_23_552_5():
    X = np.concatenate(_c_22_275_4_parts())
    xi = np.concatenate([X * 2 * np.sqrt(6) / 5, np.full((275, 1), 0.2)], axis=1)
    xi0 = np.eye(23)[22][None]
    P = np.concatenate([xi0, xi, -xi0, -xi])
    wit = np.append(np.full(22, 0.2), -np.sqrt(3) / 5)
    return P, 5, (-1.0, -0.2, 0.2), {"case_i": wit, "case_ii": P[0]}


@lru_cache(maxsize=None)
def _leech_raw() -> np.ndarray:
    """Leech minimal vectors in integer coordinates (norm^2 = 32)."""
    t1 = []
    for i, j in combinations(range(24), 2):
        for si, sj in product((4, -4), repeat=2):
            v = np.zeros(24, dtype=np.int8)
            v[i], v[j] = si, sj
            t1.append(v)
    t1 = np.array(t1, dtype=np.int8)
    words = golay_extended().codewords.astype(np.int8)
    pm = 2 * words - 1
    t2 = np.repeat(pm, 24, axis=0)
    j = np.tile(np.arange(24), words.shape[0])
    t2[np.arange(t2.shape[0]), j] *= -3
    signs = np.array([s for s in product((1, -1), repeat=8) if s.count(-1) % 2 == 0], dtype=np.int8)
    octs = octads()
    t3 = np.zeros((octs.shape[0] * signs.shape[0], 24), dtype=np.int8)
    row = 0
    for o in octs:
        pos = np.nonzero(o)[0]
        t3[row : row + signs.shape[0], pos] = 2 * signs
        row += signs.shape[0]
    return np.concatenate([t1, t2, t3])


def _leech():
    P = _leech_raw() / np.sqrt(32)
    wit = np.array([5.0] + [1.0] * 23) / np.sqrt(48)
    ips = (-1.0, -0.5, -0.25, 0.0, 0.25, 0.5)
    return P, 11, ips, {"second_level": wit, "case_ii": P[0]}


def _c4600_ambient() -> tuple[np.ndarray, np.ndarray]:
    L = _leech_raw() / np.sqrt(32)
    a = np.zeros(24)
    a[:2] = 4 / np.sqrt(32)
    return _select(L, a, 0.5), a


def _c_23_4600_7():
    Y, a = _c4600_ambient()
    P, frame = _reduce(Y, a)
    wit = np.array([-2.0, 2.0] + [1.0] * 22) / np.sqrt(30)
    return P, 7, (-1.0, -1 / 3, 0.0, 1 / 3), {"case_i": wit @ frame, "case_ii": P[0]}


def _c_22_891_5():
    Y, a = _c4600_ambient()
    b = np.zeros(24)
    b[:3] = np.array([-2.0, 2.0, 4.0]) / np.sqrt(24)
    Z = _select(Y, b, 1 / 3)
    P, frame = _reduce(Z, np.array([a, b]))
    wit = np.array([-1.0, 1.0, -1.0] + [1.0] * 21) / np.sqrt(24)
    return P, 5, (-0.5, -0.125, 0.25), {"case_i": wit @ frame, "case_ii": P[0]}


def _cell_600():
    pts = [s * e for e in np.eye(4) for s in (1.0, -1.0)]
    pts += [np.array(s) / 2 for s in product((1.0, -1.0), repeat=4)]
    base = (PHI, 1.0, 1 / PHI, 0.0)
    even = [p for p in permutations(range(4)) if _parity(p) == 0]
    for p in even:
        for s in product((1.0, -1.0), repeat=3):
            v = np.zeros(4)
            sv = list(s) + [1.0]
            for slot, src in enumerate(p):
                v[slot] = base[src] * sv[src]
            pts.append(v / 2)
    P = np.array(pts)
    s5 = np.sqrt(5)
    B = (-1.0, -(1 + s5) / 4, -0.5, (1 - s5) / 4, 0.0, (s5 - 1) / 4, 0.5, (1 + s5) / 4)
    return P, 11, B, {"case_ii": P[0]}


def _parity(p) -> int:
    inv = sum(1 for i, j in combinations(range(len(p)), 2) if p[i] > p[j])
    return inv % 2


# --- catalog -----------------------------------------------------------------

_FIXED = {
    "cube": _cube,
    "icosahedron": _icosahedron,
    "dodecahedron": _dodecahedron,
    "c_5_16_3": _c_5_16_3,
    "c_6_27_4": None,
    "c_7_56_5": _c_7_56_5,
    "e8_240": _e8,
    "c_21_112_3": _c_21_112_3,
    "c_21_162_3": _c_21_162_3,
    "c_22_100_3": _c_22_100_3,
    "c_22_275_4": _c_22_275_4,
    "c_22_891_5": _c_22_891_5,
    "c_23_552_5": _c_23_552_5,
    "c_23_4600_7": _c_23_4600_7,
    "leech_196560": _leech,
    "cell_600": _cell_600,
}
_FAMILIES = {"ngon": (_ngon, 3), "simplex": (_simplex, 2), "cross_polytope": (_cross, 2)}

# default parametric instances used by table reproduction and the test suite
FAMILY_INSTANCES = {"ngon": (3, 4, 5, 6, 7, 8), "simplex": (3, 4, 5, 6), "cross_polytope": (3, 4, 5, 6)}

SECOND_LEVEL_K = {"icosahedron": 3, "dodecahedron": 3, "e8_240": 4, "leech_196560": 6}

_NAME_RE = re.compile(r"^(ngon|simplex|cross_polytope)[(_:]?(\d+)\)?$")


def canonical_name(name: str) -> str:
    """`ngon(7)`, `ngon_7` and `ngon:7` all map to `ngon(7)`."""
    m = _NAME_RE.match(name.strip())
    if m:
        return f"{m.group(1)}({int(m.group(2))})"
    if name in _FIXED:
        return name
    raise CodeError(f"unknown code {name!r}; try `codes list`")


def catalog_names(include_leech: bool = True) -> list[str]:
    names = [f"{fam}({p})" for fam, ps in FAMILY_INSTANCES.items() for p in ps]
    names += [k for k in _FIXED if include_leech or k != "leech_196560"]
    return names


@lru_cache(maxsize=None)
def build_code(name: str, check: bool = True) -> SphericalCode:
    name = canonical_name(name)
    m = _NAME_RE.match(name)
    if m:
        fam, p = m.group(1), int(m.group(2))
        builder, pmin = _FAMILIES[fam]
        if p < pmin:
            raise CodeError(f"{fam} needs parameter >= {pmin}")
        P, tau, ips, wit = builder(p)
    elif name == "c_6_27_4":
        parent = build_code("c_7_56_5", check)
        child = derive_kissing(parent, 0, 1 / 3, name)
        P, tau, ips = child.points, 4, (-0.5, 0.25)
        wit = {"case_i": -P[0], "case_ii": P[0]}
    else:
        P, tau, ips, wit = _FIXED[name]()
    T = tuple(range(1, tau + 1))
    if name in SECOND_LEVEL_K:
        k = SECOND_LEVEL_K[name]
        T = tuple(i for i in range(1, 2 * k + 3) if i != 2 * k)
    code = SphericalCode(
        name, P.shape[1], _frozen(P), tau, T, tuple(float(v) for v in ips),
        {r: _frozen(_unit(w)) for r, w in wit.items()},
    )
    if check:
        check_code(code)
    return code


def witness_point(code: SphericalCode, role: str) -> np.ndarray:
    if role not in ROLES:
        raise ValueError(f"unknown witness role {role!r}")
    row = tables.row_for(code.name)
    if role == "case_i" and row is not None and row.table2_marked:
        raise NotAttainedError(f"{code.name}: not attained at first level (marked * in table 2, case i)")
    if role == "case_ii" and row is not None and row.table4_marked:
        raise NotAttainedError(f"{code.name}: not attained at first level (marked * in table 4, case ii)")
    if role not in code.witnesses:
        raise NotAttainedError(f"{code.name}: no {role} witness (level not attained for this code)")
    return code.witnesses[role]


def export_points(code: SphericalCode, fmt: str = "csv") -> bytes:
    """Points in construction order; CSV rows use 17 significant digits."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for p in code.points:
            w.writerow([f"{v:.17g}" for v in p])
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {"schema": "sharpcode/1", "code": code.name, "n": code.n, "N": code.N,
               "points": code.points.tolist()}
        return json.dumps(doc).encode()
    raise ValueError(f"unknown export format {fmt!r}")
