import csv
import io
import json

import numpy as np
import pytest

from sharpcodes import tables
from sharpcodes.codes import (
    GOLAY_WEIGHTS, CodeError, NotAttainedError, build_code, canonical_name, catalog_names, cluster,
    derive_kissing, export_points, golay_extended, golay_generator, golay_min_words,
    inner_product_spectrum, octads, witness_point,
)

SMALL = [c for c in catalog_names() if c != "leech_196560"]


def test_golay_self_check():
    g = golay_extended()
    assert g.codewords.shape == (4096, 24)
    assert g.weight_distribution() == GOLAY_WEIGHTS
    mw = golay_min_words()
    assert mw.shape[0] == 253
    assert int(mw[:, 0].sum()) == 77
    assert octads().shape == (759, 24)


def test_golay_generator_is_systematic():
    G = golay_generator()
    assert G.shape == (12, 24)
    assert np.array_equal(G[:, :12], np.eye(12, dtype=G.dtype))


def test_octads_form_a_steiner_system():
    # every 5-set of coordinates lies in exactly one octad; spot-check
    O = octads().astype(bool)
    rng = np.random.default_rng(3)
    for _ in range(30):
        S = rng.choice(24, size=5, replace=False)
        assert int(np.all(O[:, S], axis=1).sum()) == 1


@pytest.mark.parametrize("name", SMALL)
def test_codes_are_unit_and_on_spectrum(name):
    C = build_code(name)
    row = tables.row_for(C.name)
    assert np.allclose(np.linalg.norm(C.points, axis=1), 1.0)
    vals, counts = inner_product_spectrum(C.points)
    assert vals[-1] == pytest.approx(1.0)
    assert counts[-1] == C.N
    if row is not None:
        assert (C.n, C.N) == (row.n, row.N)


@pytest.mark.parametrize("name", [c for c in SMALL if tables.row_for(c).table1])
def test_point_distribution_matches_energy_row(name):
    C = build_code(name)
    row = tables.row_for(C.name)
    for i in (0, C.N // 2, C.N - 1):
        vals, counts = cluster(np.delete(C.points @ C.points[i], i))
        assert np.allclose(vals, row.table1[0], atol=1e-9)
        assert np.array_equal(counts, np.array(row.table1[1], dtype=int))


def _check_witness(C, role, ref):
    w = witness_point(C, role)
    vals, counts = cluster(C.points @ w)
    assert np.allclose(vals, ref[0], atol=1e-9)
    assert np.allclose(counts, ref[1])


@pytest.mark.parametrize("name", catalog_names())
def test_witness_distributions(name):
    C = build_code(name)
    row = tables.row_for(C.name)
    if row.table2 is not None and not row.table2_marked:
        _check_witness(C, "case_i", row.table2)
    if row.table3 is not None:
        _check_witness(C, "second_level", row.table3)
    if row.table4 is not None and not row.table4_marked:
        _check_witness(C, "case_ii", row.table4)


def test_cell600_distribution():
    C = build_code("cell_600")
    vals, counts = cluster(C.points @ C.points[17])
    ref = tables.row_for("cell_600").cell600
    assert np.allclose(vals, ref[0])
    assert list(counts) == [1, 12, 20, 12, 30, 12, 20, 12, 1]


def test_marked_rows_refuse_witness():
    with pytest.raises(NotAttainedError, match=r"\*"):
        witness_point(build_code("icosahedron"), "case_i")
    with pytest.raises(NotAttainedError, match=r"\*"):
        witness_point(build_code("c_5_16_3"), "case_ii")
    with pytest.raises(NotAttainedError):
        witness_point(build_code("cube"), "second_level")
    with pytest.raises(ValueError):
        witness_point(build_code("cube"), "middle")


def test_kissing_derivation_chain():
    e8 = build_code("e8_240")
    c56 = derive_kissing(e8, 0, 0.5)
    assert c56.N == 56 and c56.n == 7
    c27 = derive_kissing(c56, 0, 1 / 3)
    assert c27.N == 27 and c27.n == 6
    assert set(np.round(c27.expected_inner_products, 9)) == {-0.5, 0.25}


def test_derive_kissing_rejects_foreign_inner_product():
    with pytest.raises(CodeError):
        derive_kissing(build_code("e8_240"), 0, 0.3)


@pytest.mark.parametrize("alias,canon", [("ngon(7)", "ngon(7)"), ("ngon_7", "ngon(7)"), ("ngon:7", "ngon(7)"),
                                         ("simplex(4)", "simplex(4)"), ("e8_240", "e8_240")])
def test_canonical_names(alias, canon):
    assert canonical_name(alias) == canon


def test_unknown_code():
    with pytest.raises(CodeError):
        canonical_name("torus")
    with pytest.raises(CodeError):
        build_code("simplex(1)")


def test_leech_sampled_structure():
    C = build_code("leech_196560")
    assert C.points.shape == (196560, 24)
    rng = np.random.default_rng(0)
    for i in rng.choice(C.N, 3, replace=False):
        vals, counts = cluster(C.points @ C.points[i])
        assert list(counts) == [1, 4600, 47104, 93150, 47104, 4600, 1]


def test_export_csv_roundtrip():
    C = build_code("icosahedron")
    text = export_points(C, "csv").decode()
    rows = list(csv.reader(io.StringIO(text)))
    P = np.array(rows, dtype=float)
    assert np.array_equal(P, C.points)


def test_export_json():
    doc = json.loads(export_points(build_code("simplex(3)"), "json"))
    assert doc["schema"] == "sharpcode/1" and doc["N"] == 4
    with pytest.raises(ValueError):
        export_points(build_code("simplex(3)"), "xml")


def test_cluster_ambiguity():
    with pytest.raises(CodeError):
        cluster([0.0, 6e-10, 1.2e-9, 1.8e-9, 2.4e-9])
