import csv
import io
import math
import subprocess
import sys

import pytest

from fadingrate import checks
from fadingrate.channel import DEFAULT_SEED, McConfig, mc_throughput
from fadingrate.cli import (HEADER, ResultRow, SpecError, SweepSpec, format_csv, main,
                            parse_grid, run_sweep)
from fadingrate.rates_miso import miso_throughput_max


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid():
    assert parse_grid("0.1,1,10") == [0.1, 1.0, 10.0]
    assert parse_grid("10dB") == [10.0]
    assert parse_grid("-10:10:10dB") == pytest.approx([0.1, 1.0, 10.0])
    assert parse_grid("1:8:1", int) == list(range(1, 9))
    assert len(parse_grid("-10:30:2dB")) == 21
    with pytest.raises(ValueError):
        parse_grid("1:2")


def test_throughput_sweep(capsys):
    code, out = run(["sweep", "--quantity", "throughput", "--nt", "2", "--P", "0.1,1,10"],
                    capsys)
    assert code == 0
    assert out.splitlines()[0] == HEADER
    rows = rows_of(out)
    assert len(rows) == 3
    assert [float(r["P"]) for r in rows] == [0.1, 1.0, 10.0]
    for r in rows:
        assert 0 < float(r["argmax"]) < 1
        assert r["stderr"] == "" and r["seed"] == "" and r["K"] == "" and r["rho"] == ""
        assert float(r["value_nats"]) == pytest.approx(
            miso_throughput_max(2, float(r["P"])).value, rel=1e-11)


def test_csv_format():
    row = ResultRow("throughput", 2, 1, 10.0, 1 / 3, argmax=0.123456789012345)
    text = format_csv([row])
    assert "\r" not in text and text.endswith("\n")
    assert text.splitlines()[1] == "throughput,2,1,,,10,0.333333333333,0.123456789012,,"
    bits = format_csv([row], bits=True).splitlines()[1]
    assert float(bits.split(",")[6]) == pytest.approx(1 / 3 / math.log(2), rel=1e-11)


def test_result_row_rejects_nonfinite():
    with pytest.raises(SpecError):
        ResultRow("mimo-asymptotic", 4, 1, 0.5, math.nan)


def test_fig2_rows(capsys):
    code, out = run(["fig2", "--P", "0.1,1,10,100"], capsys)
    rows = rows_of(out)
    assert code == 0 and len(rows) == 16
    for k in range(4):
        one, two, cl, erg = (float(r["value_nats"]) for r in rows[4 * k:4 * k + 4])
        assert one <= two + 1e-6 <= cl + 1e-4 + 1e-6 and cl <= erg + 1e-9
        assert rows[4 * k + 1]["K"] == "2"


def test_fig1_surface_monotone(capsys):
    code, out = run(["fig1", "--nt", "1,3", "--samples", "5000"], capsys)
    rows = rows_of(out)
    assert code == 0 and {r["nr"] for r in rows} == {"4"}
    for nt in ("1", "3"):
        vals = [float(r["value_nats"]) for r in rows if r["nt"] == nt]
        assert len(vals) == 9
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert all(r["seed"] == str(DEFAULT_SEED) for r in rows)


def test_sweep_byte_identical_across_workers(tmp_path):
    args = ["sweep", "--quantity", "mimo-surface", "--nt", "1,2", "--nr", "2",
            "--P", "0.5,5", "--samples", "20000"]
    outs = []
    for workers in ("1", "3", "1"):
        path = tmp_path / f"w{workers}_{len(outs)}.csv"
        assert main(args + ["--workers", workers, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_row_reproducible_in_isolation(capsys):
    _, out = run(["sweep", "--quantity", "mimo-surface", "--nt", "2", "--nr", "2", "--P",
                  "1,10", "--samples", "30000", "--seed", "0x1234"], capsys)
    for r in rows_of(out):
        cfg = McConfig(30000, int(r["seed"]))
        rate, est = mc_throughput(int(r["nt"]), int(r["nr"]), float(r["P"]), cfg)
        assert r["value_nats"] == format(est.mean, ".12g")
        assert r["argmax"] == format(rate, ".12g")


def test_dist_sim_and_layers(capsys):
    _, out = run(["sweep", "--quantity", "dist-sim", "--nt", "2", "--rho", "0,1", "--P", "10",
                  "--samples", "20000"], capsys)
    rows = rows_of(out)
    assert [r["rho"] for r in rows] == ["0", "1"] and all(r["stderr"] for r in rows)
    _, out = run(["sweep", "--quantity", "expected-rate-k", "--nt", "1", "--K", "1,2",
                  "--P", "10"], capsys)
    one, two = rows_of(out)
    assert float(two["value_nats"]) >= float(one["value_nats"])
    thresholds, powers = two["argmax"].split("/")
    assert sum(map(float, powers.split(";"))) == pytest.approx(10.0)


def test_asymptotic_and_ergodic(capsys):
    _, out = run(["sweep", "--quantity", "mimo-asymptotic", "--regime", "large-nr",
                  "--nt", "1", "--nr", "64", "--P", "1"], capsys)
    (row,) = rows_of(out)
    assert float(row["value_nats"]) < math.log(65)
    _, out = run(["sweep", "--quantity", "ergodic", "--nt", "1,2", "--nr", "1,2", "--P", "1",
                  "--samples", "10000"], capsys)
    rows = rows_of(out)
    assert [bool(r["stderr"]) for r in rows] == [False, False, False, True]


@pytest.mark.parametrize("argv,field", [
    (["--quantity", "throughput", "--nr", "2"], "nr"),
    (["--quantity", "throughput", "--regime", "high-snr"], "regime"),
    (["--quantity", "nonsense"], "quantity"),
    (["--quantity", "throughput", "--P", "-1"], "P"),
    (["--quantity", "throughput", "--K", "2"], "K"),
    (["--quantity", "dist-sim", "--nt", "3"], "nt"),
    (["--quantity", "throughput", "--P", "1:2"], "P"),
])
def test_usage_errors_name_field(argv, field, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep"] + argv)
    assert exc.value.code == 2
    assert f"error: {field}:" in capsys.readouterr().err


def test_spec_rejects_empty_grid():
    with pytest.raises(SpecError, match="P"):
        SweepSpec("throughput", P=())


def test_settings_precedence(tmp_path, monkeypatch, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# sweep settings\nquantity = mimo-surface\nnr = 2\nP = 1\n"
                    "samples = 3000\nseed = 11\n")
    _, out = run(["sweep", "--config", str(conf)], capsys)
    assert rows_of(out)[0]["seed"] == "11"
    monkeypatch.setenv("FR_SEED", "22")
    monkeypatch.setenv("FR_SAMPLES", "4000")
    _, out = run(["sweep", "--config", str(conf)], capsys)
    row = rows_of(out)[0]
    assert row["seed"] == "22"
    rate, est = mc_throughput(1, 2, 1.0, McConfig(4000, 22))
    assert row["value_nats"] == format(est.mean, ".12g")
    _, out = run(["sweep", "--config", str(conf), "--seed", "33"], capsys)
    assert rows_of(out)[0]["seed"] == "33"


def test_bits_flag(capsys):
    _, nats = run(["sweep", "--quantity", "throughput", "--P", "10"], capsys)
    _, bits = run(["sweep", "--quantity", "throughput", "--P", "10", "--bits"], capsys)
    a, b = float(rows_of(nats)[0]["value_nats"]), float(rows_of(bits)[0]["value_nats"])
    assert b == pytest.approx(a / math.log(2), rel=1e-11)
    assert rows_of(nats)[0]["argmax"] == rows_of(bits)[0]["argmax"]


def test_run_sweep_grid_order():
    spec = SweepSpec("cl-expected-rate", P=(10.0, 1.0), nt=(2, 1))
    rows = run_sweep(spec)
    assert [(r.nt, r.P) for r in rows] == [(2, 10.0), (2, 1.0), (1, 10.0), (1, 1.0)]
    threaded = run_sweep(SweepSpec("cl-expected-rate", P=(10.0, 1.0), nt=(2, 1),
                                   mc=McConfig(workers=4)))
    assert [r.value for r in threaded] == [r.value for r in rows]


def test_verify_subset(capsys):
    code, out = run(["verify", "--only", "1,5"], capsys)
    assert code == 0
    assert "2/2 criteria passed" in out


def test_verify_reports_failure(monkeypatch, capsys):
    monkeypatch.setattr(checks.specfun, "EULER_GAMMA", 0.5772)
    code, out = run(["verify", "--only", "1"], capsys)
    assert code == 1 and "FAIL" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "fadingrate.cli", "sweep", "--P", "1"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith(HEADER)
