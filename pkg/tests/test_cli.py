import csv
import hashlib
import json
import subprocess
import sys

import pytest

from psido import cli
from psido.checks import TOL
from psido.errors import ConfigError


def write_cfg(path, **kw):
    path.write_text(json.dumps(kw), encoding="utf-8")
    return path


def run(tmp_path, cfg, out="out"):
    code = cli.main(["run", "--config", str(cfg), "--output-dir", str(tmp_path / out)])
    return code, tmp_path / out


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert cli.main(["run", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path):
    assert cli.main(["run", "--config", str(tmp_path / "nope.json")]) == 2


@pytest.mark.parametrize("cfg", [
    {"grid": {"N": 100}},
    {"grid": {"N": 2048}},
    {"grid": {"N": 32}},
    {"experiment": "nonsense"},
    {"tolerances": {"contour": 0.0}},
    {"tolerances": {"unknown_key": 1.0}},
    {"seed": -1},
    {"seed": 2 ** 64},
    {"bogus": 1},
    {"symbol_catalog_entries": {"s": {"kind": "no_such_symbol"}}},
])
def test_config_validation(cfg):
    with pytest.raises(ConfigError):
        cli.ExperimentConfig.from_dict(cfg)


def test_config_defaults():
    cfg = cli.ExperimentConfig.from_dict({"grid": {"N": 128}, "tolerances": {"contour": 1e-6},
                                          "symbol_catalog_entries": {"a": {"kind": "c2"}}})
    assert cfg.N == 128 and cfg.experiment == "full_suite" and cfg.tolerances["contour"] == 1e-6
    assert set(cfg.tolerances) <= set(TOL)


def test_powers_pipeline_and_determinism(tmp_path):
    cfg = write_cfg(tmp_path / "p.json", experiment="powers", seed=7)
    code1, out1 = run(tmp_path, cfg, "a")
    code2, out2 = run(tmp_path, cfg, "b")
    assert code1 == code2 == 0
    s1 = (out1 / "summary.json").read_bytes()
    assert hashlib.sha256(s1).digest() == hashlib.sha256((out2 / "summary.json").read_bytes()).digest()
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    summary = json.loads(s1)
    law = [c for c in summary["checks"] if c["name"] == "sigma_power_law"]
    assert law and all(c["pass"] for c in law)
    assert all(c["anchor"] == "σ^{(mz)}(A^z) = σ^{(m)}(A)^z" for c in law)
    assert all(c["anchor"] for c in summary["checks"])
    with open(out1 / "results.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == cli.CSV_COLUMNS


def test_resolvent_sweep_plotdata(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "r.json", experiment="resolvent_sweep", t_max=64)
    code, out = run(tmp_path, cfg)
    # the gap-slope criterion is not met on this model; see README
    assert code == 1
    assert "FAIL" in capsys.readouterr().err
    with open(out / "plotdata" / "resolvent_decay.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert "slope" in rows[0]
    assert {int(float(r["t"])) for r in rows} >= {4, 8, 16, 32, 64}


def test_dump_operator(tmp_path):
    from psido.quantize import read_binary
    cfg = write_cfg(tmp_path / "d.json", experiment="axioms", grid={"N": 64}, dump_operator=True)
    run(tmp_path, cfg)
    op = read_binary(tmp_path / "out" / "c2_operator.bin")
    assert op.N == 64


def test_catalog_text(capsys):
    assert cli.main(["catalog"]) == 0
    text = capsys.readouterr().out
    assert "c2 = ⟨ξ⟩²(2+sin x): standard elliptic test symbol" in text
    assert "heat(t): R = e^{−tΔ}" in text
    assert any(line.startswith("r: ") for line in text.splitlines())
    assert cli.main(["--list-catalog"]) == 0
    assert capsys.readouterr().out == text


def test_no_command_exits_2():
    assert cli.main([]) == 2


def test_module_entry_point(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[", encoding="utf-8")
    proc = subprocess.run([sys.executable, "-m", "psido.cli", "run", "--config", str(bad)],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert proc.stderr
