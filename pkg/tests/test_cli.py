"""Drives the command-line interface in-process through cli.main."""

import json

import numpy as np

import goldens
from unitonflow.cli import main
from unitonflow.uniton_array import (array_from_json, array_to_json,
                                     fzero_to_json, is_diagonal, validate)


def write_array(tmp_path, arr, q=None, name="arr.json"):
    path = tmp_path / name
    path.write_text(json.dumps(array_to_json(arr, left_factor=q)))
    return path


def as_matrix(obj):
    return np.array([[complex(re, im) for re, im in row] for row in obj])


def test_build_report(tmp_path):
    src = write_array(tmp_path, goldens.two_row_array())
    out = tmp_path / "out"
    assert main(["build", str(src), "--out", str(out), "--samples", "4"]) == 0
    rep = json.loads((out / "build.json").read_text())
    assert rep["n"] == 5 and rep["r"] == 2 and rep["seed"] == 0
    assert len(rep["points"]) == 4
    for pt in rep["points"]:
        phi = as_matrix(pt["phi"])
        assert np.linalg.norm(phi @ phi.conj().T - np.eye(5)) < 1e-9
        assert len(pt["ranks"]) == 2
        assert "0" in pt["extended"]


def test_build_empty_array_gives_constant_left_factor(tmp_path):
    q = np.diag([1.0, -1.0, 1.0]).astype(complex)
    src = tmp_path / "empty.json"
    src.write_text(json.dumps({
        "n": 3, "r": 0, "columns": [],
        "left_factor": [[[c.real, c.imag] for c in row] for row in q],
    }))
    out = tmp_path / "out"
    assert main(["build", str(src), "--out", str(out), "--samples", "3"]) == 0
    rep = json.loads((out / "build.json").read_text())
    for pt in rep["points"]:
        assert np.allclose(as_matrix(pt["phi"]), q)
        assert pt["ranks"] == []


def test_flow_table_sorted_and_limit_diagonal(tmp_path):
    src = write_array(tmp_path, goldens.filled_3x3_array())
    out = tmp_path / "flow"
    # grid given out of order on purpose; output ordering is canonical
    assert main(["flow", str(src), "--out", str(out), "--samples", "3",
                 "--t-grid", "0.75,0.25"]) == 0
    lines = (out / "flow.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header[:3] == ["t", "z_re", "z_im"]
    assert header[-2:] == ["unitarity_residual", "harmonicity_residual"]
    assert len(header) == 3 + 2 * 16 + 2
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    assert len(rows) == 2 * 3
    assert [r[0] for r in rows] == sorted(r[0] for r in rows)
    limit, _ = array_from_json(json.loads((out / "limit.json").read_text()))
    assert is_diagonal(limit)
    assert not validate(limit)


def test_verify_default_suites(tmp_path):
    src = write_array(tmp_path, goldens.two_row_array())
    out = tmp_path / "v"
    assert main(["verify", str(src), "--out", str(out), "--samples", "3"]) == 0
    rep = json.loads((out / "verify.json").read_text())
    assert set(rep["suites"]) == {"harmonic", "extended", "lambda_plus"}
    assert rep["pass"] is True
    for suite in rep["suites"].values():
        assert suite["pass"] is True
        assert all(e["pass"] for e in suite["entries"])


def test_verify_special_suites_on_grassmannian_array(tmp_path):
    q, arr = goldens.g27_array()
    src = write_array(tmp_path, arr, q=q.matrix)
    out = tmp_path / "v"
    code = main(["verify", str(src), "--out", str(out), "--samples", "2",
                 "--suite", "grassmann", "--suite", "s1"])
    assert code == 0


def test_verify_unreachable_tolerance_exits_one(tmp_path):
    src = write_array(tmp_path, goldens.two_row_array())
    code = main(["verify", str(src), "--out", str(tmp_path / "v"),
                 "--samples", "2", "--tol", "1e-30"])
    assert code == 1
    rep = json.loads((tmp_path / "v" / "verify.json").read_text())
    assert rep["pass"] is False


def test_lemmas_report(tmp_path):
    src = write_array(tmp_path, goldens.two_row_array())
    out = tmp_path / "lem"
    assert main(["lemmas", str(src), "--out", str(out), "--samples", "2",
                 "--t-grid", "0.37,0.8"]) == 0
    rep = json.loads((out / "lemmas.json").read_text())
    assert [e["identity"] for e in rep["identities"]] == list("abcdefghi")
    assert all(e["status"] in ("pass", "degenerate") for e in rep["identities"])
    assert rep["exponent_resolution"]["identity"] == "g"
    assert "t^(s-1-R)" in rep["exponent_resolution"]["used"]
    assert rep["pass"] is True


def test_convert_f0_roundtrips_to_valid_echelon(tmp_path):
    src = tmp_path / "karr.json"
    src.write_text(json.dumps(fzero_to_json(goldens.g27_f0())))
    out = tmp_path / "conv"
    assert main(["convert-f0", str(src), "--out", str(out)]) == 0
    arr, q = array_from_json(json.loads((out / "converted.json").read_text()))
    assert not validate(arr)
    assert q is not None
    assert np.linalg.norm(q @ q - np.eye(arr.n)) < 1e-12


def test_missing_file_is_input_error(tmp_path):
    assert main(["build", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 2


def test_malformed_json_is_input_error(tmp_path):
    src = tmp_path / "bad.json"
    src.write_text("{not json")
    assert main(["build", str(src), "--out", str(tmp_path)]) == 2


def test_nan_coefficient_is_input_error(tmp_path):
    src = tmp_path / "nan.json"
    src.write_text('{"n": 2, "r": 0, "columns": [], '
                   '"left_factor": [[[NaN, 0.0], [0.0, 0.0]], '
                   '[[0.0, 0.0], [1.0, 0.0]]]}')
    assert main(["verify", str(src), "--out", str(tmp_path)]) == 2


def test_non_echelon_array_is_input_error(tmp_path):
    src = tmp_path / "col.json"
    zero_cell = [[[0.0, 0.0]], [[0.0, 0.0]], [[0.0, 0.0]]]
    src.write_text(json.dumps({
        "n": 3, "r": 1,
        "columns": [{"lead_row": 0, "rows": [zero_cell]}],
    }))
    assert main(["build", str(src), "--out", str(tmp_path)]) == 2


def test_bad_t_grid_is_input_error(tmp_path):
    src = write_array(tmp_path, goldens.two_row_array())
    assert main(["flow", str(src), "--out", str(tmp_path),
                 "--t-grid", "0.5,1.5"]) == 2
    assert main(["flow", str(src), "--out", str(tmp_path),
                 "--t-grid", "0"]) == 2


def test_unknown_suite_is_input_error(tmp_path):
    src = write_array(tmp_path, goldens.two_row_array())
    assert main(["verify", str(src), "--out", str(tmp_path),
                 "--suite", "sideways"]) == 2


def test_same_seed_byte_identical_outputs(tmp_path):
    src = write_array(tmp_path, goldens.two_row_array())
    dirs = (tmp_path / "one", tmp_path / "two")
    for d in dirs:
        for cmd in (["build"], ["verify"], ["lemmas"]):
            assert main(cmd + [str(src), "--out", str(d), "--samples", "3",
                               "--seed", "11"]) == 0
    for name in ("build.json", "verify.json", "lemmas.json"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
