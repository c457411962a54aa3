import csv
import json
from pathlib import Path

import pytest

from bdmqam.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    assert lines[0].startswith("# config: ")
    return list(csv.DictReader(lines[1:]))


def test_coverage_defaults(tmp_path, capsys):
    assert main(["coverage", "-o", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "coverage_table.csv")
    expected = {0.98: 3.4, 0.95: 7.0, 0.9: 10.3, 0.8: 14.4, 0.7: 17.4}
    assert len(rows) == 5
    for r in rows:
        assert float(r["threshold_db"]) == pytest.approx(expected[float(r["coverage"])], abs=0.15)
    cdf = read_csv(tmp_path / "coverage_cdf.csv")
    assert list(cdf[0]) == ["threshold_db", "coverage"]


def test_sweep_hierarchical_tmax(tmp_path):
    rc = main(["sweep", "--g-base", "0.98", "--g-enh", "0.90", "--t-step", "0.01",
               "--strategies", "hierarchical", "-o", str(tmp_path)])
    assert rc == 0
    rows = read_csv(tmp_path / "sweep_gb98_ge90.csv")
    assert {r["strategy"] for r in rows} == {"hierarchical"}
    tmax = max(float(r["t"]) for r in rows)
    assert 2.9 <= tmax <= 3.3


def test_sweep_columns_and_config_line(tmp_path):
    main(["sweep", "--config", str(CONFIGS / "fig4d.json"), "--t-max", "0.2",
          "--strategies", "time_sharing,bdm_uniform", "-o", str(tmp_path)])
    path = tmp_path / "sweep_gb95_ge70.csv"
    first = path.read_text().splitlines()[0]
    rec = json.loads(first[len("# config: "):])
    assert rec["g_base"] == 0.95 and rec["t_max"] == 0.2  # flag overrides file
    rows = read_csv(path)
    assert list(rows[0]) == ["strategy", "g_base", "g_enh", "t", "alpha", "beta1", "beta2",
                             "beta3", "beta4", "x", "se_base", "se_enh", "se_total"]
    assert len(rows) == 2 * 5


def test_step_zero_is_config_error(tmp_path, capsys):
    assert main(["sweep", "--t-step", "0", "-o", str(tmp_path)]) == 2
    assert "t_grid.step" in capsys.readouterr().err


def test_bad_targets(tmp_path, capsys):
    assert main(["sweep", "--g-base", "0.7", "--g-enh", "0.9", "-o", str(tmp_path)]) == 2
    assert "g_enh" in capsys.readouterr().err


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["coverage", "--config", str(cfg), "-o", str(tmp_path)]) == 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["coverage", "-o", str(blocker / "sub")]) == 2


def test_output_env(tmp_path, monkeypatch):
    monkeypatch.setenv("BDMQAM_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["capacity", "--alphas", "1", "--esn0-min", "0", "--esn0-max", "2"]) == 0
    rows = read_csv(tmp_path / "env" / "capacity.csv")
    assert len(rows) == 5 and list(rows[0])[-1] == "total"
    assert (tmp_path / "env" / "constellation_alpha1.csv").exists()


def test_sweep_deterministic(tmp_path):
    args = ["sweep", "--g-base", "0.95", "--g-enh", "0.8", "--t-max", "1", "--t-step", "0.25"]
    main(args + ["-o", str(tmp_path / "a")])
    main(args + ["-o", str(tmp_path / "b")])
    a = (tmp_path / "a" / "sweep_gb95_ge80.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep_gb95_ge80.csv").read_bytes()
    assert b"\r\n" not in a


def test_compare(tmp_path, capsys):
    assert main(["compare", "--config", str(CONFIGS / "fig4b.json"), "--t-step", "0.5",
                 "-o", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "compare_gb98_ge80.csv")
    assert len(rows) == 11
    assert all("bdm_nonuniform" in r["best"] for r in rows)


def test_validate_pass_and_fail(capsys):
    small = ["--capacity-points", "2", "--capacity-draws", "20000", "--coverage-draws", "20000",
             "--allocation-instances", "3"]
    assert main(["validate", *small]) == 0
    assert "FAIL" not in capsys.readouterr().out
    # a different cell no longer reproduces the reference thresholds
    assert main(["validate", "--intercept-db", "20", *small]) == 1
    assert "FAIL  threshold" in capsys.readouterr().out
