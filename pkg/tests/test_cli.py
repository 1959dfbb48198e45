import csv
import io
import re

import pytest

from risnoma import cli
from risnoma.config import parse_config
from risnoma.errors import NumericalError

QUICK = "sweep_values = 95, 100, 105\ntrials = 2000\n"


def _data_rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_analytic_only_point_leaves_mc_empty():
    cfg = parse_config("sweep_values = 100\nengines = analytic\nmodes = ris_noma\n")
    rows = cli.run_sweep(cfg)
    assert len(rows) == 1
    r = rows[0]
    assert r["p_t_analytic"] is not None and r["p_c_analytic"] is not None
    assert r["p_t_mc"] is None and r["p_c_ci"] is None


def test_sweep_csv_schema_and_monotone_snr(tmp_path):
    cfg = parse_config(QUICK + "engines = analytic\nmodes = ris_noma, ris_oma\n")
    rows = cli.run_sweep(cfg)
    path = cli.write_csv(rows, cfg, tmp_path / "out.csv")
    text = path.read_text()
    assert "# r_c = 50.0" in text
    header = next(line for line in text.splitlines() if not line.startswith("#"))
    assert tuple(header.split(",")) == cli.CSV_COLUMNS
    data = _data_rows(text)
    assert len(data) == 6
    noma = [float(d["p_t_analytic"]) for d in data if d["mode"] == "ris_noma"]
    assert noma == sorted(noma)
    assert all(d["p_t_analytic"] == "" for d in data if d["mode"] == "ris_oma")


def test_engine_failure_goes_to_sidecar(tmp_path, monkeypatch):
    def boom(p, cfg):
        raise NumericalError("quadrature failed")

    monkeypatch.setattr(cli, "_analytic_point", boom)
    cfg = parse_config("sweep_values = 100\nengines = analytic\n")
    rows = cli.run_sweep(cfg)
    assert rows[0]["p_t_analytic"] is None
    path = cli.write_csv(rows, cfg, tmp_path / "f.csv")
    side = cli.diagnostics_path(path)
    assert "quadrature failed" in side.read_text()


def test_plot_script_curves(tmp_path):
    cfg = parse_config("sweep_values = 95, 100\ntrials = 1000\nmodes = ris_noma, traditional_noma\n")
    rows = cli.run_sweep(cfg)
    # ris_noma: analytic + MC, traditional_noma: MC only (no analytic engine for the baseline)
    script = cli.emit_plot_script(rows, tmp_path / "p.gp", "cov.csv").read_text()
    first_plot = script.split("\nplot ", 1)[1].split("set title")[0]
    assert len(re.findall(r"title '", first_plot)) == 3
    assert "datafile = 'cov.csv'" in script


def test_plot_script_two_modes_two_engines(tmp_path):
    rows = [
        dict.fromkeys(cli.CSV_COLUMNS, 0.5) | {"mode": m, "sweep_value": v}
        for v in (1.0, 2.0) for m in ("ris_noma", "ris_oma")
    ]
    script = cli.emit_plot_script(rows, tmp_path / "p.gp", "x.csv").read_text()
    first_plot = script.split("\nplot ", 1)[1].split("set title")[0]
    assert len(re.findall(r"title '", first_plot)) == 4


def test_plot_script_omits_empty_mc(tmp_path):
    cfg = parse_config("sweep_values = 95, 100\nengines = analytic\nmodes = ris_noma\n")
    rows = cli.run_sweep(cfg)
    script = cli.emit_plot_script(rows, tmp_path / "p.gp", "a.csv").read_text()
    assert "montecarlo" not in script
    assert script.count("title 'ris_noma analytic'") == 2
    with pytest.raises(ValueError):
        cli.emit_plot_script([], tmp_path / "q.gp", "a.csv")


def test_main_sweep_writes_csv_and_plot(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(QUICK)
    out = tmp_path / "cov.csv"
    assert cli.main(["sweep", str(cfg), "--out", str(out), "--emit-plot", "--trials", "1000", "--seed", "3"]) == 0
    data = _data_rows(out.read_text())
    assert {d["trials"] for d in data} == {"1000"} and {d["seed"] for d in data} == {"3"}
    assert "'cov.csv'" in out.with_suffix(".gp").read_text()


def test_main_exit_codes(tmp_path, capsys, monkeypatch):
    bad = tmp_path / "bad.cfg"
    bad.write_text("a_c = 0.3\n")
    assert cli.main(["point", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["sweep", str(tmp_path / "missing.cfg")]) == cli.EXIT_CONFIG

    good = tmp_path / "good.cfg"
    good.write_text("engines = analytic\n")
    assert cli.main(["point", str(good)]) == cli.EXIT_OK
    assert "ris_noma" in capsys.readouterr().out

    monkeypatch.setattr(cli, "_analytic_point", lambda p, cfg: (_ for _ in ()).throw(NumericalError("x")))
    assert cli.main(["sweep", str(good), "--out", str(tmp_path / "o.csv")]) == cli.EXIT_NUMERIC


def test_main_validate_failure_code(monkeypatch, capsys):
    from risnoma import validation

    report = validation.ValidationReport([validation.CheckResult("dummy", "FAIL", 1.0, 0.0)])
    monkeypatch.setattr(validation, "run_validation", lambda **kw: report)
    assert cli.main(["validate", "--trials", "1000"]) == cli.EXIT_VALIDATION
    assert "FAIL" in capsys.readouterr().out
