import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from circlechain import __version__
from circlechain.cli import format_float, main, parse_counts

GOLDEN = Path(__file__).parent / "golden"


def run(tmp_path, *args):
    out, table = tmp_path / "run.json", tmp_path / "run.csv"
    code = main([*args, "--out", str(out), "--csv", str(table), "-q"])
    doc = json.loads(out.read_text()) if out.exists() else None
    rows = list(csv.reader(table.open())) if table.exists() else None
    return code, doc, rows


def assert_matches_golden(rows, name):
    gold = list(csv.reader((GOLDEN / name).open()))
    assert rows[0] == gold[0]
    assert len(rows) == len(gold)
    for got, want in zip(rows[1:], gold[1:]):
        np.testing.assert_allclose([float(v) for v in got], [float(v) for v in want], rtol=1e-14, atol=1e-16)


def test_parity_exit_code(tmp_path):
    code, doc, _ = run(tmp_path, "exists", "--L", "1", "--M", "1/2", "--F1", "1", "--F2", "-1", "--N", "9")
    assert code == 2
    assert doc["result"]["kind"] == "ImpossibleParity"


def test_symmetric_target(tmp_path):
    code, doc, rows = run(tmp_path, "symmetric", "--L", "1", "--F", "1/5", "--N", "8", "--a", "2", "--target", "0.37")
    assert code == 0
    assert 0.37 in doc["result"]["positions"]
    assert rows[0] == ["k", "x", "gap"]
    assert "0.37" in [r[1] for r in rows[1:]]


def test_sweep_table(tmp_path):
    code, doc, rows = run(tmp_path, "sweep", "--family", "symmetric", "--N", "16:1024:x2", "--a", "2", "--F", "1/5")
    assert code == 0
    assert rows[0] == ["N", "D", "slope_so_far", "D2", "predicted"]
    D = [float(r[1]) for r in rows[1:]]
    assert [int(r[0]) for r in rows[1:]] == [16, 32, 64, 128, 256, 512, 1024]
    assert all(b < a for a, b in zip(D, D[1:]))


def test_golden_segment_csv(tmp_path):
    code, _, rows = run(tmp_path, "segment", "--length", "1", "--N", "5", "--F", "1/10", "--a", "2")
    assert code == 0
    assert_matches_golden(rows, "segment_n5.csv")


def test_golden_symmetric_csv(tmp_path):
    code, _, rows = run(tmp_path, "symmetric", "--L", "1", "--F", "1/5", "--N", "8", "--a", "2")
    assert code == 0
    assert_matches_golden(rows, "symmetric_n8.csv")


def test_float_format_round_trips():
    for v in [0.1, 1 / 3, np.pi * 1e-9, 0.37]:
        s = format_float(v)
        assert float(s) == v
        assert len(s.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 17


def test_json_round_trip_is_bit_identical(tmp_path):
    first = tmp_path / "a.json"
    assert main(["newton", "--L", "1", "--M", "1/2", "--F1", "1/5", "--F2", "-1/5", "--N", "8",
                 "--init", "symmetric", "--perturb", "0.1", "--seed", "3", "--out", str(first), "-q"]) == 0
    second = tmp_path / "b.json"
    assert main(["newton", "--config", str(first), "--out", str(second), "-q"]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_repeated_runs_identical(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        main(["relax", "--L", "1", "--F", "1/5", "--N", "6", "--init", "random", "--seed", "5",
              "--max_steps", "2000", "--out", str(p), "-q"])
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_report_embeds_config_and_seed(tmp_path):
    _, doc, _ = run(tmp_path, "exists", "--L", "1", "--M", "1/2", "--F1", "1", "--F2", "-1", "--N", "10")
    assert doc["schema_version"] == 1 and doc["csv_schema_version"] == 1
    assert doc["program"] == f"circlechain {__version__}"
    assert doc["seed"] == 0
    assert doc["config"]["M"] == "1/2" and doc["config"]["N"] == 10
    assert "out" not in doc["config"]


def test_set_overrides_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"L": "1", "M": "1/2", "F1": "1", "F2": "-1", "N": 9}))
    code, doc, _ = run(tmp_path, "exists", "--config", str(cfg), "--set", "N=10")
    assert code == 0
    assert doc["config"]["N"] == 10
    code, doc, _ = run(tmp_path, "exists", "--config", str(cfg), "--set", "N=10", "--N", "12")
    assert doc["config"]["N"] == 12


def test_unknown_key_is_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"L": "1", "bogus": 3}))
    assert main(["exists", "--config", str(cfg)]) == 1
    assert "bogus" in capsys.readouterr().err


def test_bad_value_reports_key_path(tmp_path, capsys):
    assert main(["exists", "--set", "a=0.5", "--M", "1/2", "--F1", "1", "--F2", "-1", "--N", "4"]) == 1
    assert "a" in capsys.readouterr().err


def test_usage_error_is_exit_one():
    assert main(["no-such-command"]) == 1


@pytest.mark.parametrize("args", [
    ["symmetric", "--F", "1/5", "--N", "7"],
    ["glue-probe", "--M1", "1/2", "--M2", "1/2", "--F1", "1", "--F2", "-1", "--N1", "6", "--N2", "5"],
])
def test_typed_infeasibility_exit_two(args):
    assert main(args + ["-q"]) == 2


def test_repair_and_fine_scale(tmp_path):
    code, doc, rows = run(tmp_path, "repair-gap", "--M", "3/5", "--F1", "1", "--F2", "-3/2", "--N1", "6", "--N2", "4")
    assert code == 0
    assert doc["result"]["relative_residual"] < 1e-10
    code, doc, rows = run(tmp_path, "fine-scale", "--F", "1/5", "--N", "64")
    assert code == 0
    assert rows[0] == ["k", "delta", "predicted"]
    assert abs(sum(float(r[1]) for r in rows[1:])) < 1e-10


def test_glue_probe_report(tmp_path):
    code, doc, _ = run(tmp_path, "glue-probe", "--M1", "1/2", "--M2", "1/2", "--F1", "1", "--F2", "-1", "--N1", "6", "--N2", "6")
    assert code == 0
    assert doc["result"]["infeasibility"] < 1e-10


def test_parse_counts():
    assert parse_counts(16) == [16]
    assert parse_counts([4, 8]) == [4, 8]
    assert parse_counts("2:5") == [2, 3, 4, 5]
    assert parse_counts("2:12:+4") == [2, 6, 10]
    assert parse_counts("16:128:x2") == [16, 32, 64, 128]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "circlechain", "exists", "--M", "1/2", "--F1", "1",
                           "--F2", "-1", "--N", "9"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "ImpossibleParity" in proc.stdout
