"""Reference values for the four bound tables, frozen as plain data.

Each row stores an inner-product spectrum: nodes t_i and the coefficients
c_i in front of h(t_i). These are the independent oracle the computed rules
and distance distributions are checked against.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from math import cos, pi, sqrt

Spectrum = tuple[tuple[float, ...], tuple[float, ...]]


def _spec(*pairs) -> Spectrum:
    """Merge (count, node) pairs, sort by node."""
    acc: dict[float, float] = {}
    for c, t in pairs:
        key = round(t, 14) + 0.0
        acc[key] = acc.get(key, 0.0) + c
    ts = sorted(acc)
    return tuple(ts), tuple(acc[t] for t in ts)


@dataclass(frozen=True)
class Row:
    code: str
    n: int
    N: int
    tau: int
    table1: Spectrum | None = None  # energy: E/N, pairs x != y
    table2: Spectrum | None = None  # case (i) PULB
    table2_marked: bool = False
    table3: Spectrum | None = None  # second-level PULB
    table4: Spectrum | None = None  # case (ii) PULB, node 1 included
    table4_marked: bool = False
    cell600: Spectrum | None = None
    extra: bool = False  # not a row of the reference tables


S3, S5, S6, S15, S30 = sqrt(3), sqrt(5), sqrt(6), sqrt(15), sqrt(30)


def _ngon(N: int) -> Row:
    k = N // 2
    if N % 2 == 0:
        t1 = _spec((1, -1.0), *[(2, cos(2 * j * pi / N)) for j in range(1, k)])
        t2 = _spec(*[(2, cos((2 * j - 1) * pi / N)) for j in range(1, k + 1)])
        t4 = _spec((1, -1.0), *[(2, cos(2 * j * pi / N)) for j in range(1, k)], (1, 1.0))
    else:
        t1 = _spec(*[(2, cos(2 * j * pi / N)) for j in range(1, k + 1)])
        # odd N: the antipode of a vertex sees the odd multiples of pi/N, and a
        # vertex sees the even ones (plus itself)
        t2 = _spec((1, -1.0), *[(2, cos((2 * j - 1) * pi / N)) for j in range(1, k + 1)])
        t4 = _spec(*[(2, cos(2 * j * pi / N)) for j in range(1, k + 1)], (1, 1.0))
    return Row(f"ngon({N})", 2, N, N - 1, t1, t2, False, None, t4)


def _simplex(n: int) -> Row:
    return Row(f"simplex({n})", n, n + 1, 2,
               _spec((n, -1 / n)),
               _spec((1, -1.0), (n, 1 / n)), False, None,
               _spec((n, -1 / n), (1, 1.0)))


def _cross(n: int) -> Row:
    r = 1 / sqrt(n)
    return Row(f"cross_polytope({n})", n, 2 * n, 3,
               _spec((1, -1.0), (2 * (n - 1), 0.0)),
               _spec((n, -r), (n, r)), False, None,
               _spec((1, -1.0), (2 * n - 2, 0.0), (1, 1.0)))


_B_ICO = (
    -sqrt(1 + 2 / S5) / S3, -sqrt(1 - 2 / S5) / S3,
    sqrt(1 - 2 / S5) / S3, sqrt(1 + 2 / S5) / S3,
)
_B600 = (-1.0, -(1 + S5) / 4, -0.5, (1 - S5) / 4, 0.0, (S5 - 1) / 4, 0.5, (1 + S5) / 4, 1.0)

_FIXED = {
    "cube": Row("cube", 3, 8, 3, table2=_spec((4, -1 / S3), (4, 1 / S3)), extra=True),
    "icosahedron": Row(
        "icosahedron", 3, 12, 5,
        _spec((1, -1.0), (5, -1 / S5), (5, 1 / S5)),
        _spec((4 * 5 / 6, -sqrt(3 / 5)), (4 * 4 / 3, 0.0), (4 * 5 / 6, sqrt(3 / 5))), True,
        _spec(*[(3, b) for b in _B_ICO]),
        _spec((1, -1.0), (5, -1 / S5), (5, 1 / S5), (1, 1.0)),
    ),
    "dodecahedron": Row("dodecahedron", 3, 20, 5, table3=_spec(*[(5, b) for b in _B_ICO])),
    "c_5_16_3": Row(
        "c_5_16_3", 5, 16, 3,
        _spec((5, -3 / 5), (10, 1 / 5)),
        _spec((8, -1 / S5), (8, 1 / S5)), False, None,
        _spec((8 / 5, -1.0), (64 / 5, 0.0), (8 / 5, 1.0)), True,
    ),
    "c_6_27_4": Row(
        "c_6_27_4", 6, 27, 4,
        _spec((10, -0.5), (16, 0.25)),
        _spec((1, -1.0), (16, -0.25), (10, 0.5)), False, None,
        _spec((10, -0.5), (16, 0.25), (1, 1.0)),
    ),
    "c_7_56_5": Row(
        "c_7_56_5", 7, 56, 5,
        _spec((1, -1.0), (27, -1 / 3), (27, 1 / 3)),
        _spec((12, -1 / S3), (32, 0.0), (12, 1 / S3)), False, None,
        _spec((1, -1.0), (27, -1 / 3), (27, 1 / 3), (1, 1.0)),
    ),
    "e8_240": Row(
        "e8_240", 8, 240, 7,
        _spec((1, -1.0), (56, -0.5), (126, 0.0), (56, 0.5)),
        _spec(
            (240 * (6 - S15) / 24, -sqrt(25 + 5 * S15) / 10),
            (240 * (6 + S15) / 24, -sqrt(25 - 5 * S15) / 10),
            (240 * (6 + S15) / 24, sqrt(25 - 5 * S15) / 10),
            (240 * (6 - S15) / 24, sqrt(25 + 5 * S15) / 10),
        ), True,
        _spec((14, -sqrt(2) / 2), (64, -sqrt(2) / 4), (84, 0.0), (64, sqrt(2) / 4), (14, sqrt(2) / 2)),
        _spec((1, -1.0), (56, -0.5), (126, 0.0), (56, 0.5), (1, 1.0)),
    ),
    "c_21_112_3": Row(
        "c_21_112_3", 21, 112, 3,
        _spec((30, -1 / 3), (81, 1 / 9)),
        _spec((56, -1 / sqrt(21)), (56, 1 / sqrt(21))), False, None,
        _spec((56 / 21, -1.0), (56 * 40 / 21, 0.0), (56 / 21, 1.0)), True,
    ),
    "c_21_162_3": Row(
        "c_21_162_3", 21, 162, 3,
        _spec((56, -2 / 7), (105, 1 / 7)),
        _spec((81, -1 / sqrt(21)), (81, 1 / sqrt(21))), False, None,
        _spec((27 / 7, -1.0), (27 * 40 / 7, 0.0), (27 / 7, 1.0)), True,
    ),
    "c_22_100_3": Row(
        "c_22_100_3", 22, 100, 3,
        _spec((22, -4 / 11), (77, 1 / 11)),
        _spec((50, -1 / sqrt(22)), (50, 1 / sqrt(22))), False, None,
        _spec((25 / 11, -1.0), (25 * 42 / 11, 0.0), (25 / 11, 1.0)), True,
    ),
    "c_22_275_4": Row(
        "c_22_275_4", 22, 275, 4,
        _spec((112, -0.25), (162, 1 / 6)),
        _spec((1, -1.0), (162, -1 / 6), (112, 0.25)), False, None,
        _spec((112, -0.25), (162, 1 / 6), (1, 1.0)),
    ),
    "c_22_891_5": Row(
        "c_22_891_5", 22, 891, 5,
        _spec((42, -0.5), (512, -1 / 8), (336, 0.25)),
        _spec((162, -1 / sqrt(8)), (567, 0.0), (162, 1 / sqrt(8))), False, None,
        # interior nodes are -sqrt(6)/12 and +sqrt(6)/12
        _spec((81 / 46, -1.0), (81 * 126 / 23, -S6 / 12), (81 * 126 / 23, S6 / 12), (81 / 46, 1.0)), True,
    ),
    "c_23_552_5": Row(
        "c_23_552_5", 23, 552, 5,
        _spec((1, -1.0), (275, -0.2), (275, 0.2)),
        _spec((100, -S3 / 5), (352, 0.0), (100, S3 / 5)), False, None,
        _spec((1, -1.0), (275, -0.2), (275, 0.2), (1, 1.0)),
    ),
    "c_23_4600_7": Row(
        "c_23_4600_7", 23, 4600, 7,
        _spec((1, -1.0), (891, -1 / 3), (2816, 0.0), (891, 1 / 3)),
        _spec((275, -S5 / 5), (2025, -S5 / 15), (2025, S5 / 15), (275, S5 / 5)), False, None,
        _spec((1, -1.0), (891, -1 / 3), (2816, 0.0), (891, 1 / 3), (1, 1.0)),
    ),
    "leech_196560": Row(
        "leech_196560", 24, 196560, 11,
        _spec((1, -1.0), (4600, -0.5), (47104, -0.25), (93150, 0.0), (47104, 0.25), (4600, 0.5)),
        # known to three decimals only
        _spec((1207.983, -0.577), (21794.872, -0.349), (75277.144, -0.117),
              (75277.144, 0.117), (21794.872, 0.349), (1207.983, 0.577)), True,
        _spec((552, -S6 / 4), (11178, -S6 / 6), (48600, -S6 / 12), (75900, 0.0),
              (48600, S6 / 12), (11178, S6 / 6), (552, S6 / 4)),
        _spec((1, -1.0), (4600, -0.5), (47104, -0.25), (93150, 0.0), (47104, 0.25), (4600, 0.5), (1, 1.0)),
    ),
    "cell_600": Row(
        "cell_600", 4, 120, 11,
        cell600=_spec(*zip((1, 12, 20, 12, 30, 12, 20, 12, 1), _B600)), extra=True,
    ),
}

# the generalized-quadrangle family of the last row, for the prime power q
def quadrangle_row(q: int) -> Row:
    n = q * (q ** 3 + 1) // (q + 1)
    N = (q ** 3 + 1) * (q + 1)
    r = sqrt(1 / (q ** 3 - q ** 2 + q))
    return Row(
        f"quadrangle({q})", n, N, 3,
        _spec((q * (q * q + 1), -1 / q), (q ** 4, 1 / q ** 2)),
        _spec((N / 2, -r), (N / 2, r)), True, None,
        _spec((N / 2 / n, -1.0), (N / 2 * (2 * n - 2) / n, 0.0), (N / 2 / n, 1.0)), True,
    )


_FAM = re.compile(r"^(ngon|simplex|cross_polytope)\((\d+)\)$")


def row_for(code: str) -> Row | None:
    m = _FAM.match(code)
    if m:
        p = int(m.group(2))
        return {"ngon": _ngon, "simplex": _simplex, "cross_polytope": _cross}[m.group(1)](p)
    return _FIXED.get(code)


TABLE3_CODES = ("icosahedron", "dodecahedron", "e8_240", "leech_196560")
