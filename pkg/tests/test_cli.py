import csv
import io
import json

import pytest

from georiesz import cli
from georiesz.config import SCHEMAS, ConfigError, CoeffsConfig, GapScanConfig, from_dict, load, to_dict
from georiesz.experiments import RUNNERS, cell_seed, run_coeffs, run_extremizers


def run(argv, tmp_path=None, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    return cli.main(argv)


def test_every_command_has_schema_and_runner():
    assert set(SCHEMAS) == set(RUNNERS) == {
        "coeffs", "gap-scan", "extremizers", "stolarsky", "cap", "decay", "optimize", "gen",
    }


def test_config_rejects_unknown_and_mistyped_keys():
    with pytest.raises(ConfigError):
        from_dict(CoeffsConfig, {"d": 2, "K": 8, "colour": "red"})
    with pytest.raises(ConfigError):
        from_dict(CoeffsConfig, {"K": 8.5})
    with pytest.raises(ConfigError):
        from_dict(CoeffsConfig, {"log": 1})
    with pytest.raises(ConfigError):
        from_dict(CoeffsConfig, [1, 2])
    cfg = from_dict(GapScanConfig, {"Ns": [64, 128], "delta": -1})
    assert cfg.Ns == (64, 128) and cfg.delta == -1.0


def test_config_from_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"d": 3, "delta": -2, "K": 16}))
    cfg = load("coeffs", str(path))
    assert to_dict(cfg)["d"] == 3
    with pytest.raises(ConfigError):
        load("coeffs", str(tmp_path / "missing.json"))


def test_coeffs_examples(tmp_path, monkeypatch):
    assert run(["coeffs", "--config", "-", "--out", str(tmp_path), "--quiet"], stdin='{"d": 2, "delta": 0.5, "K": 64}', monkeypatch=monkeypatch) == 0
    rep = json.loads((tmp_path / "coeffs.json").read_text())
    assert rep["passed"] and all(c["value"] < 0 for c in rep["cells"][1:])
    assert (tmp_path / "coeffs.txt").exists()
    assert run(["coeffs", "--config", "-", "--quiet"], stdin='{"d": 3, "delta": -2, "K": 64}', monkeypatch=monkeypatch) == 0
    assert run(["coeffs", "--config", "-", "--quiet"], stdin='{"d": 2, "delta": -2.5}', monkeypatch=monkeypatch) == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["coeffs", "--workers", "many"])
    assert exc.value.code == 2
    assert cli.main(["coeffs", "--seed", "-1"]) == 2
    assert cli.main(["coeffs", "--workers", "0"]) == 2


def test_quantitative_failure_exits_1(monkeypatch):
    # a slope window far from the asymptotic law cannot meet a tiny tolerance
    cfg = '{"d": 2, "delta": 0.5, "n_min": 1, "n_max": 6, "slope_tol": 1e-6}'
    assert run(["decay", "--config", "-", "--quiet"], stdin=cfg, monkeypatch=monkeypatch) == 1


def test_gen_and_optimize(tmp_path, monkeypatch):
    assert run(["gen", "--config", "-", "--out", str(tmp_path / "g"), "--quiet"], stdin='{"kind": "fibonacci", "N": 50}', monkeypatch=monkeypatch) == 0
    pts = tmp_path / "g" / "points.txt"
    assert len(pts.read_text().splitlines()) == 50
    cfg = json.dumps({"d": 2, "delta": -1, "iterations": 20, "input": str(pts)})
    assert run(["optimize", "--config", "-", "--out", str(tmp_path / "o"), "--quiet"], stdin=cfg, monkeypatch=monkeypatch) == 0
    rep = json.loads((tmp_path / "o" / "optimize.json").read_text())
    e = rep["fits"]["energies"]
    assert e[-1] <= e[0]


def test_csv_has_17_digits(tmp_path):
    cfg = from_dict(SCHEMAS["extremizers"], {"delta": 1.0, "n_random": 2})
    run_extremizers(cfg, out=str(tmp_path))
    rows = list(csv.DictReader(open(tmp_path / "extremizers.csv")))
    e = rows[0]["energy"]
    assert float(e) == pytest.approx(1.5707963267948966, rel=1e-15)
    assert len(e.replace(".", "").lstrip("0")) == 17


def test_reruns_are_bit_identical(tmp_path):
    cfg = from_dict(SCHEMAS["extremizers"], {"delta": 0.5, "n_random": 3})
    a = run_extremizers(cfg, seed=12345).to_dict()
    b = run_extremizers(cfg, seed=12345).to_dict()
    a.pop("wall_clock"), b.pop("wall_clock")
    assert a == b
    c = run_coeffs(from_dict(CoeffsConfig, {"K": 16})).to_dict()
    d = run_coeffs(from_dict(CoeffsConfig, {"K": 16})).to_dict()
    c.pop("wall_clock"), d.pop("wall_clock")
    assert c == d


def test_worker_count_does_not_change_cells():
    cfg = from_dict(SCHEMAS["stolarsky"], {"Ns": [8], "deltas": [0.5], "K1": 256, "K2": 128})
    one = RUNNERS["stolarsky"](cfg, seed=7, workers=1).cells
    two = RUNNERS["stolarsky"](cfg, seed=7, workers=2).cells
    assert one == two


def test_cell_seed():
    assert cell_seed(0, 5) == 5
    assert cell_seed(2 ** 64 - 1, 1) == 2 ** 64 - 2
