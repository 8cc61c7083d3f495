"""Command-line front end: outputs, determinism, exit codes."""

import json

import pytest

from spencer.cli import main


def run_json(capsys, argv):
    code = main(argv)
    data = json.loads(capsys.readouterr().out)
    return code, data


# ---------------------------------------------------------------- symbols

def test_symbols_planar_hamiltonian(capsys):
    code, data = run_json(capsys, ["symbols", "--group", "symplectic:2n=2",
                                   "--l", "1..5"])
    assert code == 0
    assert [data["table"][str(l)] for l in range(1, 6)] == [3, 4, 5, 6, 7]


def test_symbols_rotations_truncate(capsys):
    code, data = run_json(capsys, ["symbols", "--group", "isometry:n=3"])
    assert code == 0
    assert [data["table"][str(l)] for l in (1, 2, 3)] == [3, 0, 0]


def test_symbols_full_diffeomorphisms(capsys):
    code, data = run_json(capsys, ["symbols", "--group", "general:m=2"])
    assert code == 0
    assert [data["table"][str(l)] for l in (1, 2, 3)] == [4, 6, 8]


def test_symbols_csv_round_trip(capsys):
    code = main(["symbols", "--group", "general:m=2", "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split(",")[:2] == ["l", "dim"]
    assert [ln.split(",")[1] for ln in lines[1:]] == ["4", "6", "8"]


# ---------------------------------------------------------------- cohomology

def test_spencer_table_of_full_symbols_vanishes(capsys):
    code, data = run_json(capsys, ["cohomology", "--group", "general:m=2",
                                   "--table", "spencer", "--l", "1..3"])
    assert code == 0
    assert all(v == 0 for v in data["table"]["cells"].values())


def test_obstruction_row_for_rotations(capsys):
    code, data = run_json(capsys, ["cohomology", "--group", "isometry:n=3",
                                   "--table", "obstruction",
                                   "--flag", "tau=1,0,0", "--l", "1..3"])
    assert code == 0
    cells = data["table"]["cells"]
    assert [cells["%d,0" % l] for l in (1, 2, 3)] == [0, 2, 2]


def test_covariant_table_needs_flag(capsys):
    code = main(["cohomology", "--group", "general:m=2",
                 "--table", "obstruction", "--l", "1..2"])
    assert code == 2


# ---------------------------------------------------------------- covariants

def test_covariant_reports_full_group(capsys):
    code, data = run_json(capsys, ["covariants", "--group", "general:m=2",
                                   "--flag", "tau=1,0", "--l", "1..3"])
    assert code == 0
    rows = data["reports"]
    assert [r["dim_g"] for r in rows] == [4, 6, 8]
    assert [r["dim_stationary"] for r in rows] == [3, 5, 7]
    assert all(r["transversal"] for r in rows)


def test_covariants_with_equation_file(capsys, tmp_path):
    h_path = tmp_path / "h.json"
    h_path.write_text(json.dumps({
        "ambient": {"m": 2, "n": 1},
        "tau_basis": [[1, 0]],
        "h": {"1": [[1]]},
    }))
    code, data = run_json(capsys, ["covariants", "--group", "general:m=2",
                                   "--flag", "tau=1,0", "--l", "1..3",
                                   "--h-file", str(h_path)])
    assert code == 0
    assert [r["dim_h"] for r in data["reports"]] == [1, 1, 1]


def test_named_stratum_flag(capsys):
    code, data = run_json(capsys, ["covariants", "--group", "symplectic:2n=4",
                                   "--flag", "stratum=lagrangian",
                                   "--l", "1..2"])
    assert code == 0
    assert [r["dim_O"] for r in data["reports"]] == [1, 2]


# ---------------------------------------------------------------- transversality

def test_transversality_scan_output(capsys):
    code, data = run_json(capsys, ["transversality", "--group",
                                   "symplectic:2n=2", "--flag", "tau=1,0",
                                   "--l", "1..3"])
    assert code == 0
    assert [e["transversal"] for e in data["entries"]] == [True, True, True]
    assert [e["stationary_tau_H2_zero"] for e in data["entries"]] == [True] * 3


def test_transversality_requires_full_range(capsys):
    assert main(["transversality", "--group", "symplectic:2n=2",
                 "--flag", "tau=1,0", "--l", "2..3"]) == 2


# ---------------------------------------------------------------- oracle

def test_oracle_point_family(capsys):
    code, data = run_json(capsys, ["oracle", "--group", "point_lie:n=1,r=2,k=1",
                                   "--l", "1..2"])
    assert code == 0
    rows = data["rows"]
    assert [(r["formula"], r["oracle"], r["match"]) for r in rows] == [
        (13, 13, True), (24, 24, True)]


def test_oracle_contact_family(capsys):
    code, data = run_json(capsys, ["oracle", "--group", "contact_lie:n=1,k=1",
                                   "--l", "1..3"])
    assert code == 0
    assert [r["formula"] for r in data["rows"]] == [6, 10, 15]
    assert all(r["match"] for r in data["rows"])


def test_oracle_volume_probe_flags_divergence(capsys):
    code, data = run_json(capsys, ["oracle", "--group", "volume:m=2",
                                   "--l", "1..3"])
    assert code == 0
    assert [r["match"] for r in data["rows"]] == [True, False, False]
    assert [r["formula"] for r in data["rows"]] == [3, 6, 8]
    assert [r["oracle"] for r in data["rows"]] == [3, 4, 5]


def test_oracle_scalar_point_family_is_gated(capsys):
    assert main(["oracle", "--group", "point_lie:n=1,r=1,k=1",
                 "--l", "1..1"]) == 2
    code, data = run_json(capsys, ["oracle", "--group", "point_lie:n=1,r=1,k=1",
                                   "--l", "1..1", "--allow-r1-point-lift"])
    assert code == 0
    assert data["rows"][0]["formula"] == 5


def test_oracle_cap_exit_code(capsys):
    assert main(["oracle", "--group", "point_lie:n=2,r=2,k=2",
                 "--l", "3..3", "--cap", "100"]) == 4


# ---------------------------------------------------------------- tresse

def write_tresse_fixtures(tmp_path):
    poly = tmp_path / "poly.json"
    poly.write_text(json.dumps({
        "n": 1, "r": 1,
        "frame": ["x1 + u"],
        "targets": ["u", "x1"],
    }))
    return poly


def test_tresse_frame_normalization(capsys, tmp_path):
    poly = write_tresse_fixtures(tmp_path)
    code, data = run_json(capsys, ["tresse", "--poly-file", str(poly),
                                   "--seed", "1"])
    assert code == 0
    vals = data["values"]
    assert vals["u"] == ["2/9"]
    assert vals["x1"] == ["7/9"]
    assert data["frame_identity"] == [["1"]]


def test_tresse_singular_frame_exit_code(capsys, tmp_path):
    poly = tmp_path / "poly.json"
    poly.write_text(json.dumps({"n": 1, "r": 1, "frame": ["u"],
                                "targets": ["u"]}))
    point = tmp_path / "point.json"
    point.write_text(json.dumps({"values": {"x1": "0", "u": "0",
                                            "p[1,1]": "0"}}))
    assert main(["tresse", "--poly-file", str(poly),
                 "--point-file", str(point)]) == 3


def test_tresse_explicit_point_file(capsys, tmp_path):
    poly = write_tresse_fixtures(tmp_path)
    point = tmp_path / "point.json"
    point.write_text(json.dumps({"values": {"x1": "0", "u": "1",
                                            "p[1,1]": "1/2"}}))
    code, data = run_json(capsys, ["tresse", "--poly-file", str(poly),
                                   "--point-file", str(point)])
    assert code == 0
    assert data["values"]["u"] == ["1/3"]
    assert data["values"]["x1"] == ["2/3"]


# ---------------------------------------------------------------- determinism

def test_reruns_are_byte_identical(tmp_path, capsys):
    out = tmp_path / "run.json"
    argv = ["transversality", "--group", "symplectic:2n=2", "--flag",
            "tau=1,0", "--l", "1..3", "--out", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_tresse_rerun_byte_identical(tmp_path, capsys):
    poly = write_tresse_fixtures(tmp_path)
    out = tmp_path / "t.json"
    argv = ["tresse", "--poly-file", str(poly), "--seed", "5",
            "--out", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first


# ---------------------------------------------------------------- errors

def test_unknown_group_is_usage_error(capsys):
    assert main(["symbols", "--group", "projective:m=2"]) == 2


def test_bad_flag_spec_is_usage_error(capsys):
    assert main(["covariants", "--group", "general:m=2",
                 "--flag", "stratum=nope", "--l", "1..1"]) == 2


def test_missing_file_is_usage_error(capsys):
    assert main(["tresse", "--poly-file", "/nonexistent/p.json"]) == 2
