import json
import math

import pytest

from conftest import random_guards
from thetaguard import cli
from thetaguard.cli import InputError, main, parse_resolution, parse_theta
from thetaguard.errors import DegeneracyError
from thetaguard.report import read_pgm


@pytest.fixture
def square_csv(tmp_path):
    p = tmp_path / "sq.csv"
    p.write_text("0,0\n1,0\n1,1\n0,1\n")
    return str(p)


@pytest.fixture
def random_json(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"guards": random_guards(11, 40).tolist()}))
    return str(p)


def test_parse_theta():
    assert parse_theta("60deg") == pytest.approx(math.pi / 3)
    assert parse_theta("1.25") == 1.25
    assert parse_theta("360deg") == pytest.approx(2 * math.pi)
    for bad in ("0", "-1", "7", "abc", "nan"):
        with pytest.raises(InputError):
            parse_theta(bad)


def test_parse_resolution():
    assert parse_resolution("30x20") == (30, 20)
    with pytest.raises(InputError):
        parse_resolution("1x5")


def test_query_square_center(square_csv, capsys):
    assert main(["query", square_csv, "--theta", "60deg", "--point", "0.5,0.5"]) == 0
    rec = json.loads(capsys.readouterr().out.strip())
    assert rec["guarded"] is False
    assert rec["f"] == pytest.approx(math.pi / 2)


def test_input_errors_exit_2(tmp_path, square_csv, capsys):
    assert main(["query", str(tmp_path / "missing.csv"), "--theta", "1"]) == 2
    assert main(["query", square_csv, "--theta", "9"]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\nx,y,z\n")
    assert main(["region", str(bad), "--theta", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["region"])
    assert exc.value.code == 2


def test_degeneracy_exit_3(square_csv, monkeypatch):
    def boom(*a, **k):
        raise DegeneracyError("forced")

    monkeypatch.setattr(cli, "compute_region", boom)
    assert main(["region", square_csv, "--theta", "1"]) == 3


def test_region_output_is_deterministic(tmp_path, random_json):
    outs = []
    for k in range(2):
        j, s = tmp_path / f"r{k}.json", tmp_path / f"r{k}.svg"
        assert main(["region", random_json, "--theta", "1.0", "--out", str(j), "--svg", str(s)]) == 0
        outs.append((j.read_bytes(), s.read_bytes()))
    assert outs[0] == outs[1]
    d = json.loads(outs[0][0])
    assert d["theta"] == 1.0 and d["meta"]["euler_ok"]


def test_dump_arcs(tmp_path, random_json):
    a = tmp_path / "arcs.json"
    assert main(["region", random_json, "--theta", "1.0", "--out", str(tmp_path / "r.json"), "--dump-arcs", str(a)]) == 0
    assert a.exists() and json.loads(a.read_text())


def test_rasterize_pgm(tmp_path, square_csv):
    out = tmp_path / "r.pgm"
    assert main(["rasterize", square_csv, "--theta", "2.0", "--resolution", "20x10", "--out", str(out), "--threads", "2"]) == 0
    img = read_pgm(out.read_text())
    assert img.shape == (10, 20)
    out2 = tmp_path / "r2.pgm"
    main(["rasterize", square_csv, "--theta", "2.0", "--resolution", "20x10", "--out", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_lowerbound_and_verify(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    assert main(["lowerbound", "--i", "1", "--out", str(inst), "--verify", "raster"]) == 0
    assert "components=9" in capsys.readouterr().out
    assert main(["verify", str(inst), "--method", "raster"]) == 0
    d = json.loads(inst.read_text())
    d["expected_components"] = 10
    inst.write_text(json.dumps(d))
    assert main(["verify", str(inst), "--method", "raster"]) == 4


def test_verify_random_instance(random_json, capsys):
    assert main(["verify", random_json, "--theta", "1.0", "--probes", "2000"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_bench(tmp_path):
    csv_path, figs = tmp_path / "b.csv", tmp_path / "figs"
    assert main(["bench", "--n", "20,40", "--thetas", "1.0,2.0", "--out", str(csv_path), "--figures", str(figs)]) == 0
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 5
    assert list(figs.iterdir())
