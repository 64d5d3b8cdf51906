import csv
import io

import numpy as np
import pytest

from swiptsec import cli
from swiptsec.optimize import operating_point
from swiptsec.sysmodel import ConfigError, table1_config

SPEC = """\
param = "theta"
values = [0.9, 0.3, 0.6]
metric = "secrecy"
trials = 200
seed = 11
rho_k = 0.5
config = "sys.toml"

[system]
M = 64
"""


def _read(path):
    text = path.read_text()
    header = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return header, list(csv.DictReader(io.StringIO("\n".join(body))))


@pytest.fixture
def spec_file(tmp_path):
    (tmp_path / "sys.toml").write_text('zeta = 0.3\n[geometry]\nd_eve = 14.0\n')
    (tmp_path / "spec.toml").write_text(SPEC)
    return tmp_path / "spec.toml"


def test_fmt():
    assert cli.fmt(1 / 3) == "0.333333333333"
    assert cli.fmt(123456789012345.0) == "1.23456789012e+14"
    assert cli.fmt(float("nan")) == "" and cli.fmt(None) == ""
    assert cli.fmt(np.inf) == "inf" and cli.fmt(True) == "true" and cli.fmt(np.int64(3)) == "3"
    assert cli._fmt_value([1.5, 2]) == "[1.5, 2]"


@pytest.mark.parametrize("kw", [dict(param="eta"), dict(metric="power"), dict(trials=0), dict(values=[]),
                                dict(param="theta", values=[1.2]), dict(param="M", values=[3.5]),
                                dict(k=9)])
def test_sweep_spec_validation(kw):
    args = dict(param="theta", values=[0.5])
    args.update(kw)
    with pytest.raises(ConfigError):
        cli.SweepSpec(**args)


def test_apply_value():
    spec = cli.SweepSpec("d_k", [12.0], k=2)
    cfg, rho, theta = cli.apply_value(spec, 12.0)
    assert cfg.geometry.d_user[2] == 12.0 and (rho, theta) == (0.4, 0.7)
    cfg, _, _ = cli.apply_value(cli.SweepSpec("d_w", [9.0]), 9.0)
    assert cfg.geometry.d_eve == 9.0


def test_load_sweep_spec(spec_file):
    spec = cli.load_sweep_spec(spec_file)
    assert spec.config.M == 64 and spec.config.zeta == 0.3 and spec.config.geometry.d_eve == 14.0
    assert spec.rho_k == 0.5 and spec.seed == 11
    spec_file.write_text(SPEC.replace("seed", "sed"))
    with pytest.raises(ConfigError, match="unknown sweep keys"):
        cli.load_sweep_spec(spec_file)


def test_sweep_csv(spec_file, tmp_path):
    out = tmp_path / "a.csv"
    assert cli.main(["sweep", str(spec_file), "--out", str(out)]) == 0
    header, rows = _read(out)
    assert "# config.M = 64" in header and "# seed = 11" in header and "# config.zeta = 0.3" in header
    assert [r["theta"] for r in rows] == ["0.3", "0.6", "0.9"]
    assert list(rows[0]) == ["theta", *cli.COLUMNS]
    for r in rows:
        assert r["series"] == "secrecy" and r["status"] == "ok" and float(r["closed_form"]) > 0 and float(r["mc_stderr"]) > 0
        assert len(r["closed_form"].replace("-", "").replace(".", "").split("e")[0]) <= 12


def test_sweep_rerun_is_byte_identical(spec_file, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["sweep", str(spec_file), "--out", str(a), "--trials", "1"])
    cli.main(["sweep", str(spec_file), "--out", str(b), "--trials", "1", "--workers", "2"])
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    cli.main(["sweep", str(spec_file), "--out", str(c), "--trials", "1", "--seed", "12"])
    assert a.read_bytes() != c.read_bytes()


def test_timing_column(spec_file, tmp_path):
    out = tmp_path / "t.csv"
    cli.main(["sweep", str(spec_file), "--out", str(out), "--trials", "1", "--timing"])
    _, rows = _read(out)
    assert "wall_time" in rows[0] and float(rows[0]["wall_time"]) >= 0


def test_unknown_figure_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["reproduce", "fig1"])
    assert exc.value.code == 2


def test_bad_config_returns_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("antennas = 3\n")
    assert cli.main(["eval", "--config", str(bad)]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_eval(tmp_path):
    out = tmp_path / "e.csv"
    assert cli.main(["eval", "--trials", "0", "--out", str(out)]) == 0
    header, rows = _read(out)
    assert "# trials = 0" in header
    assert [r["series"] for r in rows] == ["secrecy", "user_rate", "eve_rate", "harvest_user", "harvest_eve"]
    assert all(r["mc_mean"] == "" for r in rows)


def test_reproduce_preset_passes(tmp_path, capsys):
    out = tmp_path / "f4.csv"
    assert cli.main(["reproduce", "fig4", "--trials", "200", "--out", str(out)]) == 0
    report = capsys.readouterr().out
    assert "PASS fig4" in report and "FAIL" not in report
    header, rows = _read(out)
    assert "# command = reproduce fig4" in header
    thetas = [float(r["theta"]) for r in rows]
    assert thetas == sorted(thetas)


def test_optimize_exit_codes(tmp_path, capsys):
    Qu = operating_point(table1_config(), 0.0, 1.0)[2][0]
    out = tmp_path / "o.csv"
    assert cli.main(["optimize", "--q-min", repr(float(0.5 * Qu)), "--audit", "10", "--out", str(out)]) == 0
    text = out.read_text()
    assert "theta_star,1\n" in text and "binding,Q_min\n" in text
    assert cli.main(["optimize", "--q-min", "1"]) == 1
    assert "infeasible" in capsys.readouterr().err


def test_unestimable_point_marked():
    spec = cli.SweepSpec("theta", [0.0, 0.5], metric="secrecy", trials=50)
    rows = cli.run_sweep(spec)
    assert rows[0].status.startswith("unestimable") and rows[0].mc is None and rows[1].status == "ok"
    # the steady-state network at the default distances is dead, so the pilots are zero too
    dead = cli.SweepSpec("theta", [0.5], config=table1_config(funding="steady"), trials=50)
    assert cli.run_sweep(dead)[0].status.startswith("unestimable")
