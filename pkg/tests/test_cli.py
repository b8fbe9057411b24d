import json

import pytest

from sharpcodes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_codes_list(capsys):
    code, out, _ = run(capsys, "codes", "list")
    assert code == 0
    assert "leech_196560" in out and "cell_600" in out
    code, out, _ = run(capsys, "codes", "list", "--format", "json")
    doc = json.loads(out)
    assert doc["schema"] == "sharpcode/1"
    assert len(doc["codes"]) >= 30


def test_verify_attained(capsys):
    code, out, _ = run(capsys, "verify", "c_22_275_4", "--level", "first_i", "--h", "riesz:3")
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["status"] == "attained"
    assert [c for _, c in rep["distribution"]] == [1, 162, 112]


def test_verify_cell600(capsys):
    code, out, _ = run(capsys, "verify", "cell_600", "--level", "cell600", "--h", "trunc_exp:1")
    assert code == 0
    assert json.loads(out)["report"]["status"] == "attained"


def test_verify_refused_is_success(capsys):
    code, out, _ = run(capsys, "verify", "icosahedron", "--level", "first_i", "--h", "riesz:1", "--format", "text")
    assert code == 0
    assert "refused" in out and "*" in out


def test_verify_failure_exit_code(capsys):
    # a kernel outside its construction's hypotheses fails with exit 1
    code, _, err = run(capsys, "verify", "cell_600", "--level", "cell600", "--h", "trunc_exp:4")
    assert code == 1 and "exceeds" in err


@pytest.mark.parametrize("argv", [
    ("verify", "torus", "--level", "first_i", "--h", "riesz:1"),
    ("verify", "icosahedron", "--level", "third", "--h", "riesz:1"),
    ("verify", "icosahedron", "--level", "first_i", "--h", "gauss:1"),
    ("quadrature", "pulb_i", "--n", "3"),
    ("frobnicate",),
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_quadrature_json(capsys):
    code, out, _ = run(capsys, "quadrature", "skip1add2", "--n", "24", "--k", "6")
    doc = json.loads(out)
    assert code == 0 and doc["exactness_residual"] < 1e-10
    assert doc["nodes"][-1] == pytest.approx(6 ** 0.5 / 4, abs=1e-15)
    code, out, _ = run(capsys, "quadrature", "levenshtein", "--n", "23", "--tau", "7", "--N", "4600")
    doc = json.loads(out)
    assert [round(c) for c in doc["scaled_weights"]] == [1, 891, 2816, 891]


def test_export(tmp_path, capsys):
    path = tmp_path / "ico.csv"
    code, _, _ = run(capsys, "export", "icosahedron", "--format", "csv", "--out", str(path))
    assert code == 0
    assert len(path.read_text().splitlines()) == 12
    code, _, err = run(capsys, "export", "icosahedron", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "cannot write" in err


def test_tables_three_text(capsys):
    code, out, _ = run(capsys, "tables", "3", "--format", "text")
    assert code == 0
    for name in ("icosahedron", "dodecahedron", "e8_240", "leech_196560"):
        assert name in out
    assert "not_attained" not in out


def test_tables_two_marks_stars(capsys):
    code, out, _ = run(capsys, "tables", "2", "--format", "json", "--no-search")
    doc = json.loads(out)
    status = {r["code"]: r["status"] for r in doc["rows"]}
    assert status["icosahedron"] == status["e8_240"] == status["leech_196560"] == "refused"
    assert all(r["matches_reference"] is not False for r in doc["rows"])
    assert code == 0


def test_tables_deterministic(capsys):
    _, a, _ = run(capsys, "tables", "4", "--format", "json", "--restarts", "5")
    _, b, _ = run(capsys, "tables", "4", "--format", "json", "--restarts", "5")
    assert a == b


def test_every_catalog_code_in_some_table(capsys):
    from sharpcodes.codes import catalog_names

    seen = set()
    for which in ("1", "2", "3", "4"):
        _, out, _ = run(capsys, "tables", which, "--format", "json", "--no-search")
        seen |= {r["code"] for r in json.loads(out)["rows"]}
    assert set(catalog_names()) <= seen
