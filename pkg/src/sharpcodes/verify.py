"""Design certificates, distance distributions, potentials and bound attainment."""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import tables
from .codes import (IP_TOL, SECOND_LEVEL_K, NotAttainedError, SphericalCode, build_code,
                    catalog_names, cluster, witness_point)
from .orthopoly import gegenbauer_values, integrate
from .potentials import CELL600_NODES, Potential, cell600_interpolant
from .quadrature import (QuadratureRule, pulb_case_i, pulb_case_ii, pulb_value, skip1add2,
                         skip_degrees, verify_exactness)

LEVELS = ("first_i", "first_ii", "second", "cell600")
ATTAIN_TOL = 1e-9
SOUND_TOL = 1e-8
INT_TOL = 1e-6
FULL_LIMIT = 5000
CHUNK = 512


class VerifyError(ValueError):
    pass


def _scale(x: float) -> float:
    return max(1.0, abs(x))


def _rows(C: SphericalCode, full: bool, samples: int, seed: int):
    """Base vectors: all code points, or `samples` random unit vectors."""
    if full:
        return C.points
    X = np.random.default_rng(seed).standard_normal((samples, C.n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


# --------------------------------------------------------------------------
# moments and designs


def moments(C: SphericalCode, degrees, mode: str = "full", samples: int = 20, seed: int = 0) -> dict[int, float]:
    """Full: M_i = sum over pairs of P_i(x.y).  Sampled: max over random unit x of
    |sum_y P_i(x.y)|."""
    degrees = sorted(set(int(i) for i in degrees))
    if not degrees or degrees[0] < 1:
        raise ValueError("moment degrees must be >= 1")
    full = mode == "full"
    if mode not in ("full", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    X = _rows(C, full, samples, seed)
    kmax = degrees[-1]
    acc = {i: [] for i in degrees}
    for s in range(0, X.shape[0], CHUNK):
        V = gegenbauer_values(C.n, kmax, X[s : s + CHUNK] @ C.points.T)
        for i in degrees:
            row_sums = V[i].sum(axis=1)
            acc[i].append(math.fsum(row_sums) if full else float(np.max(np.abs(row_sums))))
    return {i: (math.fsum(v) if full else max(v)) for i, v in acc.items()}


def moment(C: SphericalCode, i: int, mode: str = "full", samples: int = 20, seed: int = 0) -> float:
    return moments(C, [i], mode, samples, seed)[i]


def _auto_mode(C: SphericalCode, mode: str) -> str:
    if mode == "auto":
        return "full" if C.N <= FULL_LIMIT else "sampled"
    return mode


@dataclass
class DesignCertificate:
    code: str
    mode: str
    threshold: float
    residuals: dict[int, float]

    @property
    def passed(self) -> dict[int, bool]:
        return {i: abs(r) <= self.threshold for i, r in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def failures(self) -> list[int]:
        return [i for i, p in self.passed.items() if not p]


def design_certificate(C: SphericalCode, T=None, mode: str = "auto", samples: int = 20, seed: int = 0) -> DesignCertificate:
    """Moments over the index set T (default: the code's own T)."""
    mode = _auto_mode(C, mode)
    T = C.T if T is None else tuple(T)
    thr = 1e-9 * C.N ** 2 if mode == "full" else 1e-6 * C.N
    return DesignCertificate(C.name, mode, thr, moments(C, T, mode, samples, seed))


# --------------------------------------------------------------------------
# distributions and potentials


@dataclass
class DistanceDistribution:
    values: np.ndarray
    counts: np.ndarray
    base: np.ndarray
    tol: float = IP_TOL
    exclude_self: bool = False

    def as_pairs(self) -> list[tuple[float, int]]:
        return [(float(v), int(c)) for v, c in zip(self.values, self.counts)]

    def total(self) -> int:
        return int(self.counts.sum())

    def matches(self, other: "DistanceDistribution", tol: float = 1e-8) -> bool:
        return (self.values.shape == other.values.shape
                and np.array_equal(self.counts, other.counts)
                and bool(np.all(np.abs(self.values - other.values) <= tol)))


def distance_distribution(x, C: SphericalCode, tol: float = IP_TOL, exclude_self: bool = False) -> DistanceDistribution:
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1) > 1e-9:
        raise VerifyError("base point is not a unit vector")
    ip = C.points @ x
    if exclude_self:
        ip = ip[ip < 1 - tol]
    vals, counts = cluster(ip, tol)
    return DistanceDistribution(vals, np.asarray(counts), x, tol, exclude_self)


def spectrum_value(spectrum, h) -> float:
    """sum of c_i h(t_i) for a (nodes, coefficients) spectrum."""
    t, c = spectrum
    return math.fsum(np.asarray(c, dtype=float) * np.asarray(h(np.asarray(t, dtype=float)), dtype=float))


def snap(ip: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Round inner products within tol of +-1 (self and antipode) to +-1."""
    ip = np.array(ip, dtype=float)
    ip[ip > 1 - tol] = 1.0
    ip[ip < -1 + tol] = -1.0
    return ip


def _singular_guard(h, ip):
    if getattr(h, "singular", False) and np.any(ip > 1 - 1e-9):
        raise VerifyError(f"{h!r} is singular at 1 and the probe coincides with a code point")


def potential_value(h, x, C: SphericalCode) -> float:
    """U_h(x, C), summed with math.fsum."""
    ip = snap(C.points @ np.asarray(x, dtype=float))
    _singular_guard(h, ip)
    return math.fsum(np.asarray(h(ip), dtype=float))


@dataclass
class EnergyReport:
    code: str
    mode: str
    energy: float
    per_point: float  # E / N
    consistent: bool
    distribution: list = field(default_factory=list)


def energy(C: SphericalCode, h, mode: str = "auto", samples: int = 20, seed: int = 0) -> EnergyReport:
    """E_h(C) over ordered pairs x != y."""
    mode = _auto_mode(C, mode)
    if mode == "full":
        parts = []
        for s in range(0, C.N, CHUNK):
            G = snap(C.points[s : s + CHUNK] @ C.points.T)
            off = np.ones(G.shape, dtype=bool)
            off[np.arange(G.shape[0]), s + np.arange(G.shape[0])] = False
            _singular_guard(h, G[off])
            parts.extend(np.where(off, h(np.where(off, G, 0.0)), 0.0).sum(axis=1))
        E = math.fsum(parts)
        return EnergyReport(C.name, mode, E, E / C.N, True)
    if mode != "per_point_sampled" and mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    idx = np.random.default_rng(seed).choice(C.N, size=min(samples, C.N), replace=False)
    dists = [distance_distribution(C.points[i], C, exclude_self=True) for i in idx]
    same = all(d.matches(dists[0]) for d in dists[1:])
    if not same:
        raise VerifyError(f"{C.name}: per-point distance distributions differ between sample points")
    per = spectrum_value((dists[0].values, dists[0].counts), h)
    return EnergyReport(C.name, "sampled", C.N * per, per, same, dists[0].as_pairs())


# --------------------------------------------------------------------------
# empirical minimization


def _objective(h, P, X):
    G = snap(X @ P.T)
    return np.sum(h(G), axis=1), G


def global_min_search(C: SphericalCode, h, restarts: int | None = None, seed: int = 42,
                      max_iter: int = 10_000, extra_starts=None, tol: float = 1e-12):
    """Projected gradient descent on the sphere, run for all starts at once.

    Starts: `restarts` seeded random points plus every stored witness and any
    `extra_starts`. Armijo backtracking per start, retraction by normalization.
    Returns (best value, best point).
    """
    if restarts is None:
        restarts = 200 if C.n <= 8 else 50
    rng = np.random.default_rng(seed)
    starts = [rng.standard_normal((restarts, C.n))]
    starts += [np.atleast_2d(w) for w in C.witnesses.values()]
    if extra_starts is not None:
        starts.append(np.atleast_2d(extra_starts))
    X = np.concatenate(starts)
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    if getattr(h, "singular", False):
        # nudge starts that sit on code points
        near = np.max(X @ C.points.T, axis=1) > 1 - 1e-6
        X[near] = X[near] + 1e-3 * rng.standard_normal((int(near.sum()), C.n))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
    P = C.points
    f, G = _objective(h, P, X)
    eta = np.full(X.shape[0], 0.1 / max(1.0, float(np.max(np.abs(h.d(G))))))
    active = np.ones(X.shape[0], dtype=bool)
    for _ in range(max_iter):
        if not np.any(active):
            break
        a = np.nonzero(active)[0]
        Xa = X[a]
        g = h.d(Xa @ P.T) @ P
        g -= np.sum(g * Xa, axis=1, keepdims=True) * Xa
        gn2 = np.sum(g * g, axis=1)
        step = eta[a].copy()
        accepted = np.zeros(a.size, dtype=bool)
        newX = Xa.copy()
        newf = f[a].copy()
        for _ in range(60):
            todo = ~accepted
            if not np.any(todo):
                break
            Y = Xa[todo] - step[todo, None] * g[todo]
            Y /= np.linalg.norm(Y, axis=1, keepdims=True)
            fy, _ = _objective(h, P, Y)
            ok = fy <= f[a][todo] - 1e-4 * step[todo] * gn2[todo]
            idx = np.nonzero(todo)[0]
            newX[idx[ok]] = Y[ok]
            newf[idx[ok]] = fy[ok]
            accepted[idx[ok]] = True
            step[idx[~ok]] *= 0.5
            if np.all(step[todo][~ok] < tol) if np.any(~ok) else False:
                break
        X[a] = newX
        gain = f[a] - newf
        f[a] = newf
        eta[a] = np.where(accepted, step * 2.0, step)
        done = (~accepted) | (step < tol) | (gain <= 1e-15 * np.maximum(1.0, np.abs(newf)))
        active[a[done]] = False
    i = int(np.argmin(f))
    return float(f[i]), X[i].copy()


# --------------------------------------------------------------------------
# attainment


@dataclass
class BoundReport:
    code: str
    level: str
    rule_kind: str
    potential: str
    status: str  # attained | not_attained | refused
    bound: float | None = None
    witness_value: float | None = None
    relative_gap: float | None = None
    attained: bool = False
    distribution: list = field(default_factory=list)
    frequencies: list = field(default_factory=list)
    frequency_deviation: float | None = None
    sampled_witnesses: int = 0
    search_floor: float | None = None
    certified_bound: float | None = None
    sound: bool | None = None
    reason: str = ""
    started: float = 0.0
    finished: float = 0.0

    def to_dict(self, timestamps: bool = True) -> dict:
        d = asdict(self)
        if not timestamps:
            d.pop("started")
            d.pop("finished")
        return d


def cell600_rule() -> QuadratureRule:
    counts = np.array([1, 12, 20, 12, 30, 12, 20, 12, 1], dtype=float)
    exact = tuple(i for i in range(1, 20) if i not in (12,))
    return QuadratureRule(4, np.array(CELL600_NODES), counts / 120, exact, "cell600", 120)


def level_rule(C: SphericalCode, level: str) -> QuadratureRule:
    if level == "first_i":
        return pulb_case_i(C.n, C.strength)
    if level == "first_ii":
        return pulb_case_ii(C.n, C.strength)
    if level == "second":
        return skip1add2(C.n, SECOND_LEVEL_K[C.name])
    if level == "cell600":
        return cell600_rule()
    raise ValueError(f"unknown level {level!r}; choose from {', '.join(LEVELS)}")


def integer_frequencies(rule: QuadratureRule, N: int) -> tuple[np.ndarray, float]:
    """N*rho rounded, and the worst pre-rounding deviation."""
    f = rule.weights * N
    r = np.rint(f)
    return r.astype(int), float(np.max(np.abs(f - r)))


def _table_marked(name: str, level: str) -> bool:
    row = tables.row_for(name)
    if row is None:
        return False
    return row.table2_marked if level == "first_i" else row.table4_marked if level == "first_ii" else False


def certified_bound(C: SphericalCode, h) -> float:
    """A lower bound on min U_h(., C) that holds for every admissible kernel of the
    code's class: the case (i) PULB, improved by the second level when it applies."""
    N = C.N
    b = pulb_value(pulb_case_i(C.n, C.strength), h, N)
    if C.name in SECOND_LEVEL_K:
        b = max(b, pulb_value(skip1add2(C.n, SECOND_LEVEL_K[C.name]), h, N))
    return b


_ROLE = {"first_i": "case_i", "first_ii": "case_ii", "second": "second_level"}


def attainment_check(code_name: str, level: str, h: Potential, search: bool = True,
                     restarts: int | None = None, seed: int = 42, samples: int = 5,
                     max_iter: int | None = None) -> BoundReport:
    """Compute the bound at `level`, evaluate U_h at the witness(es), compare.

    first_ii and cell600 witnesses are code points: the stored witness plus
    `samples` seeded code points (all 120 points for cell600).
    """
    started = time.time()
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; choose from {', '.join(LEVELS)}")
    C = build_code(code_name)
    rep = BoundReport(C.name, level, "", h.spec or h.kind, "refused", started=started)

    def done(r):
        r.finished = time.time()
        return r

    if level == "second" and C.name not in SECOND_LEVEL_K:
        rep.reason = "no second-level row for this code (table 3)"
        return done(rep)
    if level == "cell600" and C.name != "cell_600":
        rep.reason = "the cell600 level applies to cell_600 only"
        return done(rep)
    rule = level_rule(C, level)
    rep.rule_kind = rule.kind
    freq, dev = integer_frequencies(rule, C.N)
    rep.frequencies, rep.frequency_deviation = freq.tolist(), dev
    if level != "cell600":
        rep.bound = pulb_value(rule, h, C.N)  # valid whether or not it is attained
    marked = _table_marked(C.name, level)
    if marked or dev >= INT_TOL:
        why = []
        if dev >= INT_TOL:
            why.append(f"N*rho is not integral (deviation {dev:.3g})")
        if marked:
            tbl = "2" if level == "first_i" else "4"
            why.append(f"table {tbl} marks this row with *")
        row = tables.row_for(C.name)
        has_row = row is not None and (row.table4 if level == "first_ii" else None) is not None
        if has_row and marked != (dev >= INT_TOL):
            raise VerifyError(f"{C.name}: integrality and table marker disagree ({'; '.join(why)})")
        rep.reason = "not attained at this level: " + "; ".join(why)
        return done(rep)

    if level == "cell600":
        H = cell600_interpolant(h)
        rep.bound = C.N * integrate(4, H)
        witnesses = C.points
    else:
        try:
            w = witness_point(C, _ROLE[level])
        except NotAttainedError as exc:
            rep.reason = str(exc)
            return done(rep)
        witnesses = w[None, :]
        if level == "first_ii":
            idx = np.random.default_rng(seed).choice(C.N, size=min(samples, C.N), replace=False)
            witnesses = np.concatenate([witnesses, C.points[idx]])
    rep.sampled_witnesses = len(witnesses)
    scale = _scale(rep.bound)
    gaps, dist_ok = [], True
    want = [(float(t), int(c)) for t, c in zip(rule.nodes, freq)]
    for k, x in enumerate(witnesses):
        val = potential_value(h, x, C)
        gaps.append(abs(val - rep.bound) / scale)
        d = distance_distribution(x, C)
        if k == 0:
            rep.witness_value = val
            rep.distribution = d.as_pairs()
        got = d.as_pairs()
        dist_ok &= len(got) == len(want) and all(
            abs(a[0] - b[0]) <= 1e-8 and a[1] == b[1] for a, b in zip(got, want))
    rep.relative_gap = max(gaps)
    rep.attained = rep.relative_gap <= ATTAIN_TOL and dist_ok
    rep.status = "attained" if rep.attained else "not_attained"
    if not dist_ok:
        rep.reason = "witness distribution differs from the rule's nodes and frequencies"
    if search:
        kw = {} if max_iter is None else {"max_iter": max_iter}
        if C.N > FULL_LIMIT:
            restarts = min(restarts if restarts is not None else 4, 4)
            kw.setdefault("max_iter", 100)
        floor, _ = global_min_search(C, h, restarts, seed, extra_starts=witnesses[:1], **kw)
        rep.search_floor = floor
        rep.certified_bound = rep.bound
        rep.sound = floor >= rep.bound - SOUND_TOL * scale
        if not rep.sound:
            rep.status = "not_attained"
            rep.attained = False
            rep.reason = f"search found {floor!r}, below the bound {rep.bound!r}"
    return done(rep)


# --------------------------------------------------------------------------
# facets


@dataclass
class FacetReport:
    centroid_error: float
    top_node: float
    top_count: int
    expected_top_count: int
    direction_error: float | None
    top_spectrum: list
    ok: bool


def facet_checks(C: SphericalCode, witness, rule: QuadratureRule, tol: float = 1e-8) -> FacetReport:
    """Level-set centroids equal alpha_i*y; the top level set has N*rho_max >= n
    points (when its node is positive) and the witness points at its centroid."""
    y = np.asarray(witness, dtype=float)
    ip = C.points @ y
    cerr = 0.0
    for a in rule.nodes:
        S = C.points[np.abs(ip - a) <= 1e-8]
        if S.size:
            cerr = max(cerr, float(np.linalg.norm(S.mean(axis=0) - a * y)))
    nodes = rule.nodes[rule.nodes < 1 - 1e-12]
    top = float(nodes.max())
    S = C.points[np.abs(ip - top) <= 1e-8]
    i_top = int(np.argmin(np.abs(rule.nodes - top)))
    expect = int(round(rule.weights[i_top] * C.N))
    derr = None
    ok = cerr <= tol and S.shape[0] == expect
    if top > 0:
        ok &= S.shape[0] >= C.n
        c = S.mean(axis=0)
        derr = float(np.linalg.norm(c / np.linalg.norm(c) - y))
        ok &= derr <= tol
    spec = recentered_spectrum(S, top * y)
    return FacetReport(cerr, top, int(S.shape[0]), expect, derr, spec, bool(ok))


def recentered_spectrum(S: np.ndarray, center) -> list[float]:
    """Distinct normalized inner products among distinct points of S after
    moving `center` to the origin."""
    V = S - center
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    G = V @ V.T
    off = G[~np.eye(len(V), dtype=bool)]
    vals, _ = cluster(off, 1e-8)
    return [float(v) for v in vals]


def table_codes(which: int) -> list[str]:
    """Catalog codes that have a row in the given table."""
    out = []
    for name in catalog_names():
        row = tables.row_for(name)
        if row is None:
            continue
        if getattr(row, f"table{which}") is not None:
            out.append(name)
    return out


__all__ = [
    "BoundReport", "DesignCertificate", "DistanceDistribution", "EnergyReport", "FacetReport",
    "VerifyError", "attainment_check", "cell600_rule", "certified_bound", "design_certificate",
    "distance_distribution", "energy", "facet_checks", "global_min_search", "integer_frequencies",
    "level_rule", "moment", "moments", "potential_value", "pulb_value", "recentered_spectrum",
    "spectrum_value", "table_codes", "verify_exactness", "skip_degrees",
]
