from math import sqrt

import pytest

from sharpcodes import tables
from sharpcodes.codes import catalog_names

ROWS = [tables.row_for(c) for c in catalog_names()]


@pytest.mark.parametrize("row", ROWS, ids=lambda r: r.code)
def test_row_masses(row):
    if row.table1:
        assert sum(row.table1[1]) == pytest.approx(row.N - 1)
    for spec in (row.table2, row.table3, row.table4, row.cell600):
        if spec:
            assert sum(spec[1]) == pytest.approx(row.N, rel=1e-5)
            assert all(-1 <= t <= 1 for t in spec[0])
            assert list(spec[0]) == sorted(spec[0])


def test_odd_ngon_rows():
    r = tables.row_for("ngon(5)")
    assert r.table2[0] == pytest.approx((-1.0, -0.30901699437495, 0.80901699437495))
    assert r.table4[0][-1] == 1.0 and r.table4[1][-1] == 1.0


def test_marked_rows():
    marked2 = {r.code for r in ROWS if r.table2_marked}
    marked4 = {r.code for r in ROWS if r.table4_marked}
    assert marked2 == {"icosahedron", "e8_240", "leech_196560"}
    assert marked4 == {"c_5_16_3", "c_21_112_3", "c_21_162_3", "c_22_100_3", "c_22_891_5"}


def test_e8_case_i_weights():
    r = tables.row_for("e8_240")
    s15 = sqrt(15)
    assert r.table2[1][0] == pytest.approx(10 * (6 - s15))
    assert r.table2[1][1] == pytest.approx(10 * (6 + s15))


def test_22_891_rows():
    r = tables.row_for("c_22_891_5")
    assert r.table2[0][0] == pytest.approx(-1 / sqrt(8))
    assert r.table4[0][1] == pytest.approx(-sqrt(6) / 12)
    assert r.table4[0][2] == pytest.approx(sqrt(6) / 12)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_quadrangle_family(q):
    r = tables.quadrangle_row(q)
    assert sum(r.table1[1]) == r.N - 1
    assert r.table2_marked and r.table4_marked


def test_unknown_row():
    assert tables.row_for("nothing") is None
