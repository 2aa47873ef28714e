"""
End-to-end tests for the command-line pipeline
"""
import json

import pytest

import cli
from models.diagnostics import ComparisonReport
from models.event import Side
from models.fit import FitResult
from models.hawkes import HawkesModel
from models.kernel import KernelKind
from models.strategy import BacktestReport
from utils.diagnostics import export_intensity
from utils.errors import HawkesInputError, HawkesNumericalError
from utils.event_data import parse_csv

MODEL = HawkesModel(
    kind=KernelKind.EXPONENTIAL,
    mu=(0.5, 0.5),
    alpha=[[0.8, 0.3], [0.3, 0.8]],
    beta=[[2.0, 2.0], [2.0, 2.0]],
)


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(MODEL.to_json())
    return path


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_parse_invocation():
    inv = cli.parse_invocation(["fit", "--data", "d.csv", "--kernel", "power_law", "--out", "r.json", "--seed", "3"])
    assert inv.subcommand is cli.Subcommand.FIT
    assert inv.flags["kernel"] == "power_law"
    assert inv.flags["seed"] == 3


def test_invocation_requires_flags():
    with pytest.raises(ValueError, match="--out"):
        cli.CliInvocation(subcommand="compare", flags={"data": "d.csv"})


def test_unknown_flag_is_exit_1(tmp_path):
    assert run("compare", "--data", tmp_path / "d.csv", "--out", tmp_path / "c.json", "--bogus") == 1
    with pytest.raises(HawkesInputError, match="unrecognized"):
        cli.parse_invocation(["compare", "--data", "d.csv", "--out", "c.json", "--bogus"])


def test_missing_subcommand_is_exit_1():
    assert run() == 1


def test_missing_required_flag_is_exit_1(tmp_path):
    assert run("fit", "--data", tmp_path / "d.csv", "--out", tmp_path / "r.json") == 1


def test_compare_unreadable_path_writes_nothing(tmp_path):
    out = tmp_path / "c.json"
    assert run("compare", "--data", tmp_path / "missing.csv", "--out", out) == 1
    assert not out.exists()


def test_model_schema_mismatch_is_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "exponential", "mu": [0.5]}))
    out = tmp_path / "e.csv"
    assert run("simulate", "--model", bad, "--horizon", 10, "--seed", 1, "--out", out) == 1
    assert not out.exists()


def test_nonstationary_simulation_is_exit_1(tmp_path):
    path = tmp_path / "hot.json"
    hot = MODEL.model_copy(update={"alpha": [[3.0, 0.0], [0.0, 3.0]]})
    path.write_text(hot.to_json())
    assert run("simulate", "--model", path, "--horizon", 10, "--out", tmp_path / "e.csv") == 1


def test_numerical_failure_is_exit_2(tmp_path, monkeypatch):
    data = tmp_path / "d.csv"
    data.write_text("# horizon=1\ntime,side,price,size\n0.5,B,,\n")

    def diverge(*args, **kwargs):
        raise HawkesNumericalError("every restart diverged")

    monkeypatch.setattr(cli, "run_fit", diverge)
    out = tmp_path / "r.json"
    assert run("fit", "--data", data, "--kernel", "exponential", "--out", out) == 2
    assert not out.exists()


def test_intensity_of_empty_csv_is_flat(tmp_path, model_file):
    data = tmp_path / "empty.csv"
    data.write_text("# horizon=1\ntime,side,price,size\n")
    out = tmp_path / "i.csv"
    assert run("intensity", "--model", model_file, "--data", data, "--step", 0.25, "--out", out) == 0
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 5
    assert {r.split(",", 1)[1] for r in rows} == {"0.500000000,0.500000000"}


def test_pipeline_end_to_end(tmp_path, model_file):
    events = tmp_path / "events.csv"
    fitted = tmp_path / "fit.json"
    intensity = tmp_path / "intensity.csv"
    svg = tmp_path / "intensity.svg"
    comparison = tmp_path / "compare.json"

    assert run("simulate", "--model", model_file, "--horizon", 300, "--seed", 42, "--out", events) == 0
    assert "# seed=42" in events.read_text()
    assert run("fit", "--data", events, "--kernel", "exponential", "--out", fitted, "--restarts", 2) == 0
    result = FitResult.model_validate_json(fitted.read_text())
    assert result.model.kind is KernelKind.EXPONENTIAL

    assert run("intensity", "--model", fitted, "--data", events, "--step", 1.0, "--out", intensity, "--svg", svg) == 0
    assert intensity.read_text().startswith("time,lambda_buy,lambda_sell\n")
    assert svg.read_text().count("<polyline") == 2

    assert run("compare", "--data", events, "--out", comparison, "--restarts", 1) == 0
    report = ComparisonReport.model_validate_json(comparison.read_text())
    assert report.winner in (KernelKind.EXPONENTIAL, KernelKind.POWER_LAW)

    # identical inputs and seeds give byte-identical outputs
    snapshot = {p: p.read_bytes() for p in (events, fitted, intensity, svg)}
    assert run("simulate", "--model", model_file, "--horizon", 300, "--seed", 42, "--out", events) == 0
    assert run("fit", "--data", events, "--kernel", "exponential", "--out", fitted, "--restarts", 2) == 0
    assert run("intensity", "--model", fitted, "--data", events, "--step", 1.0, "--out", intensity, "--svg", svg) == 0
    assert {p: p.read_bytes() for p in snapshot} == snapshot


def test_backtest_subcommand(tmp_path, model_file):
    data = tmp_path / "priced.csv"
    data.write_text(
        "# horizon=2\ntime,side,price,size\n"
        "0.1,B,100.00,1\n0.11,B,100.00,1\n0.5,S,100.01,1\n0.9,S,100.00,1\n"
    )
    config = tmp_path / "bt.json"
    config.write_text(json.dumps({"threshold_multiplier": 2.0}))
    out = tmp_path / "report.json"
    trades = tmp_path / "trades.csv"
    assert run("backtest", "--model", model_file, "--data", data, "--config", config, "--out", out, "--trades", trades) == 0
    report = BacktestReport.model_validate_json(out.read_text())
    assert trades.read_text().splitlines()[0] == "time,side,price,size"
    assert len(trades.read_text().splitlines()) == 1 + len(report.trades)
    assert all(t.side in (Side.BUY, Side.SELL) for t in report.trades)


def test_backtest_rejects_bad_config(tmp_path, model_file):
    data = tmp_path / "priced.csv"
    data.write_text("# horizon=2\ntime,side,price,size\n0.1,B,100.00,1\n")
    config = tmp_path / "bt.json"
    config.write_text(json.dumps({"cancel_decay_fraction": 1.5}))
    assert run("backtest", "--model", model_file, "--data", data, "--config", config, "--out", tmp_path / "r.json") == 1


def test_simulated_file_parses(tmp_path, model_file):
    events = tmp_path / "events.csv"
    assert run("simulate", "--model", model_file, "--horizon", 50, "--seed", 1, "--out", events) == 0
    assert parse_csv(events).horizon == 50.0


def test_non_utf8_inputs_are_exit_1(tmp_path, model_file):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"\xff\xfe\x00garbage")
    good = tmp_path / "d.csv"
    good.write_text("# horizon=1\ntime,side,price,size\n0.5,B,,\n")
    assert run("fit", "--data", bad, "--kernel", "exponential", "--out", tmp_path / "r.json") == 1
    assert run("intensity", "--model", bad, "--data", good, "--step", 0.1, "--out", tmp_path / "i.csv") == 1
    assert not (tmp_path / "r.json").exists()
    assert not (tmp_path / "i.csv").exists()


def test_intensity_subcommand_matches_export(tmp_path, model_file):
    data = tmp_path / "d.csv"
    data.write_text("# horizon=3\ntime,side,price,size\n0.5,B,,\n1.2,S,,\n2.0,B,,\n")
    assert run("intensity", "--model", model_file, "--data", data, "--step", 0.25, "--out", tmp_path / "i.csv", "--svg", tmp_path / "i.svg") == 0
    export_intensity(MODEL, parse_csv(data), 0.25, tmp_path / "ref.csv", tmp_path / "ref.svg")
    assert (tmp_path / "i.csv").read_text() == (tmp_path / "ref.csv").read_text()
    assert (tmp_path / "i.svg").read_text() == (tmp_path / "ref.svg").read_text()
