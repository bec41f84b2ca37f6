"""End-to-end tests of the command-line front end."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import jsonschema
import pytest

from capcones.cli import RunConfig, main
from capcones.errors import DomainError

SCHEMAS = Path(__file__).resolve().parents[1] / "src" / "capcones" / "schemas"


def _schema_for(name: str) -> str:
    if name.startswith("classify"):
        return "classification"
    if name == "verify_oracles.json":
        return "oracles"
    if name == "limit_eq.json":
        return "limit_eq"
    if name.endswith("_polyline.json"):
        return "polyline"
    if name.startswith("sweep"):
        return "sweep"
    if name.startswith("axisym"):
        if name.endswith("_threshold.json"):
            return "axisym_threshold"
        if name.endswith("_shot.json"):
            return "axisym_shot"
        return "axisym_solution"
    return "solution"


def _validate_dir(d: Path) -> int:
    count = 0
    for path in sorted(d.glob("*.json")):
        schema = json.loads((SCHEMAS / f"{_schema_for(path.name)}.schema.json").read_text(encoding="utf-8"))
        jsonschema.validate(json.loads(path.read_text(encoding="utf-8")), schema)
        count += 1
    return count


def _load(d: Path, name: str) -> dict:
    return json.loads((d / name).read_text(encoding="utf-8"))


@pytest.fixture(autouse=True)
def _no_env_out(monkeypatch):
    monkeypatch.delenv("CAPCONES_OUT", raising=False)


def test_type1_a_star(tmp_path):
    assert main(["type1", "-g", "2", "-m1", "1", "-m2", "2", "--a-star", "--out", str(tmp_path)]) == 0
    js = _load(tmp_path, "type1_g2_m1-2.json")
    assert abs(js["a_star"] - 1.0) < 1e-6
    assert _validate_dir(tmp_path) == 1
    assert (tmp_path / "type1_g2_m1-2_trajectory.csv").exists()


def test_type1_theta(tmp_path):
    rc = main(["type1", "-g", "4", "-m1", "2", "-m2", "5", "--theta", "0.7853981634", "--out", str(tmp_path)])
    assert rc == 0
    js = _load(tmp_path, "type1_g4_m2-5.json")
    assert js["residual"] <= 1e-8
    assert _validate_dir(tmp_path) == 1


def test_type1_degrees_match_radians(tmp_path):
    a, b = tmp_path / "rad", tmp_path / "deg"
    main(["type1", "-g", "2", "-m1", "1", "-m2", "2", "--theta", str(math.pi / 3), "--out", str(a)])
    main(["type1", "-g", "2", "-m1", "1", "-m2", "2", "--theta", "60", "--deg", "--out", str(b)])
    ja, jb = _load(a, "type1_g2_m1-2.json"), _load(b, "type1_g2_m1-2.json")
    assert abs(ja["parameter"] - jb["parameter"]) < 1e-9


def test_exit_codes(tmp_path, capsys):
    assert main(["type1", "-g", "3", "-m1", "3", "-m2", "3", "--a", "0.1", "--out", str(tmp_path)]) == 2
    assert main(["type1", "-g", "4", "-m1", "2", "-m2", "5", "--a", "5", "--out", str(tmp_path)]) == 3
    err = capsys.readouterr().err
    assert "NonAdmissible" in err and "solver failure" in err
    with pytest.raises(SystemExit) as exc:
        main(["type1", "-g", "2", "-m1", "1", "-m2", "2"])
    assert exc.value.code == 2


def test_classify_markdown(capsys):
    assert main(["classify", "-g", "4", "-m1", "2", "-m2", "5", "--format", "md"]) == 0
    out = capsys.readouterr().out
    assert "| 4 | (2,5) | S¹⁶ | S⁵×S⁷×S³, S⁷×S²×S⁶ | S⁵×S⁷×S²×S¹ |" in out


def test_classify_json_and_env_out(tmp_path, monkeypatch, capsys):
    assert main(["classify", "-g", "6", "-m1", "1", "-m2", "1"]) == 0
    js = json.loads(capsys.readouterr().out)
    assert js["relation"] == "diffeomorphic but not isometric"
    assert not list(tmp_path.iterdir())
    monkeypatch.setenv("CAPCONES_OUT", str(tmp_path))
    assert main(["classify", "-g", "4", "-m1", "4", "-m2", "3", "--k", "2", "--q", "0"]) == 0
    assert _validate_dir(tmp_path) == 1
    assert main(["classify", "-g", "4", "-m1", "4", "-m2", "3"]) == 2


def test_axisym_threshold(tmp_path, capsys):
    assert main(["axisym", "--threshold", "-n", "7", "--out", str(tmp_path)]) == 0
    js = _load(tmp_path, "axisym_n7_threshold.json")
    assert abs(js["threshold"] - 0.44721) <= 1e-4
    assert "threshold n = 7" in capsys.readouterr().out


def test_axisym_solution_and_svg(tmp_path):
    assert main(["axisym", "-n", "7", "--theta", "45", "--deg", "--svg-data", "--out", str(tmp_path)]) == 0
    js = _load(tmp_path, "axisym_n7.json")
    assert js["evenness"]["even"]
    poly = _load(tmp_path, "axisym_n7_polyline.json")
    assert len(poly["points"].split()) > 10
    assert _validate_dir(tmp_path) == 2


def test_verify_oracles(tmp_path, capsys):
    assert main(["verify-oracles", "--out", str(tmp_path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)
    assert _validate_dir(tmp_path) == 1


def test_limit_eq(tmp_path):
    assert main(["limit-eq", "--out", str(tmp_path)]) == 0
    js = _load(tmp_path, "limit_eq.json")
    assert js["round_trip"] <= 1e-6
    assert _validate_dir(tmp_path) == 1


RUNS = [
    ["type1", "-g", "2", "-m1", "1", "-m2", "2", "--theta", "1.0", "--svg-data"],
    ["type2", "-g", "4", "-m1", "2", "-m2", "5", "--theta", "0.7853981634"],
    ["type2", "-g", "3", "-m1", "2", "-m2", "2", "--symmetric", "--a", "0.1"],
    ["sweep", "-g", "4", "-m1", "2", "-m2", "5", "--start", "0.01", "--stop", "0.3", "--num", "5", "--svg-data"],
    ["axisym", "-n", "5", "--a", "0.3"],
    ["classify", "-g", "3", "-m1", "4", "-m2", "4"],
    ["limit-eq"],
    ["fm-table", "-g", "4", "-m1", "2", "-m2", "5", "--num", "11"],
]


def _run_all(d: Path) -> dict[str, str]:
    for argv in RUNS:
        assert main([*argv, "--out", str(d)]) == 0, argv
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(d.iterdir())}


def test_determinism_and_schemas(tmp_path, capsys):
    first = _run_all(tmp_path / "a")
    second = _run_all(tmp_path / "b")
    assert first == second
    assert any(name.endswith(".csv") for name in first)
    assert _validate_dir(tmp_path / "a") >= 8


def test_csv_round_trip_digits(tmp_path):
    main(["fm-table", "-g", "1", "-m1", "3", "-m2", "3", "--num", "5", "--t-max", "0.5", "--out", str(tmp_path)])
    rows = (tmp_path / "fm_g1_m3-3.csv").read_text().strip().splitlines()
    assert rows[0] == "t,f_M,f_M_prime"
    t, f, _ = (float(v) for v in rows[2].split(","))
    assert t == 0.125 and abs(f - (1 - 2 * t * t)) < 1e-15


def test_run_config_rejects_bad_tolerances():
    with pytest.raises(DomainError):
        RunConfig("type1", tol_rel=0.0)
    assert "out" not in RunConfig("type1", out="/x").to_json()
