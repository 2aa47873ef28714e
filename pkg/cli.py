"""
Command-line entry point for the Hawkes pipeline.

    python cli.py fit --data F.csv --kernel power_law --out R.json
    python cli.py simulate --model R.json --horizon 100 --seed 42 --out E.csv
    python cli.py intensity --model R.json --data F.csv --step 0.01 --out I.csv --svg I.svg
    python cli.py compare --data F.csv --out C.json
    python cli.py backtest --model R.json --data F.csv --config B.json --out REP.json

Exit codes: 0 success, 1 validation error, 2 numerical failure. Logs go to
standard error; machine output goes only to the declared files, and only once
the whole step has succeeded.
"""
import argparse
import json
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from loguru import logger
from pydantic import BaseModel, ValidationError, model_validator

from config.log import configure_logging
from config.settings import get_settings
from models.kernel import KernelKind
from utils.errors import HawkesInputError, HawkesNumericalError, describe_validation_error
from utils.event_data import parse_csv
from utils.pipeline import (
    ingest_config,
    load_model_text,
    load_strategy_text,
    run_backtest_json,
    run_compare,
    run_fit,
    run_intensity,
    run_simulate,
)
from utils.strategy import format_trades_csv, run_backtest

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2


class Subcommand(str, Enum):
    FIT = "fit"
    SIMULATE = "simulate"
    INTENSITY = "intensity"
    COMPARE = "compare"
    BACKTEST = "backtest"


REQUIRED_FLAGS = {
    Subcommand.FIT: ("data", "kernel", "out"),
    Subcommand.SIMULATE: ("model", "horizon", "out"),
    Subcommand.INTENSITY: ("model", "data", "step", "out"),
    Subcommand.COMPARE: ("data", "out"),
    Subcommand.BACKTEST: ("model", "data", "config", "out"),
}


class CliInvocation(BaseModel):
    subcommand: Subcommand
    flags: Dict[str, Any] = {}

    @model_validator(mode="after")
    def _required_flags(self) -> "CliInvocation":
        missing = [f for f in REQUIRED_FLAGS[self.subcommand] if self.flags.get(f) is None]
        if missing:
            raise ValueError(f"{self.subcommand.value}: missing required flag(s) " + ", ".join(f"--{m}" for m in missing))
        return self


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so every bad flag maps to exit code 1."""

    def error(self, message):
        raise HawkesInputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hawkes", description="Bivariate Hawkes toolkit for order-book event streams")
    parser.add_argument("--log-level", default=None, help="loguru level for standard error")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("fit", help="Fit a model by maximum likelihood")
    p.add_argument("--data", required=True)
    p.add_argument("--kernel", required=True, choices=[k.value for k in KernelKind])
    p.add_argument("--out", required=True)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--free-epsilon", action="store_true")
    p.add_argument("--lenient", action="store_true", help="sort and de-duplicate instead of rejecting")

    p = sub.add_parser("simulate", help="Simulate an event stream by thinning")
    p.add_argument("--model", required=True)
    p.add_argument("--horizon", required=True, type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--max-events", type=int)
    p.add_argument("--allow-nonstationary", action="store_true")

    p = sub.add_parser("intensity", help="Export the fitted intensity path")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--step", required=True, type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--lenient", action="store_true")

    p = sub.add_parser("compare", help="Fit both kernels and compare by AIC")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--lenient", action="store_true")

    p = sub.add_parser("backtest", help="Run the cluster liquidity-provision backtest")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trades", help="also write the trades as CSV")
    p.add_argument("--lenient", action="store_true")
    return parser


def parse_invocation(argv: List[str]) -> CliInvocation:
    args = vars(build_parser().parse_args(argv))
    name = args.pop("subcommand")
    if name is None:
        raise HawkesInputError("no subcommand given (fit, simulate, intensity, compare, backtest)")
    try:
        return CliInvocation(subcommand=name, flags=args)
    except ValidationError as exc:
        raise HawkesInputError(describe_validation_error(exc))


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise HawkesInputError(f"{what} file not found: {path}")
    except UnicodeDecodeError as exc:
        raise HawkesInputError(f"{what} file {path}: not UTF-8 text ({exc.reason} at byte {exc.start})")


def _outputs(inv: CliInvocation) -> Dict[str, str]:
    """Compute every output file's content without touching the filesystem."""
    f = inv.flags
    cmd = inv.subcommand
    lenient = bool(f.get("lenient"))

    if cmd is Subcommand.FIT:
        stream = parse_csv(f["data"], ingest_config(lenient))
        return {f["out"]: run_fit(stream, KernelKind(f["kernel"]), f.get("restarts"), f.get("seed"), bool(f.get("free_epsilon")))}

    if cmd is Subcommand.SIMULATE:
        model = load_model_text(_read_text(f["model"], "model"), f["model"])
        text = run_simulate(model, f["horizon"], f.get("seed"), f.get("max_events"), bool(f.get("allow_nonstationary")))
        return {f["out"]: text}

    if cmd is Subcommand.INTENSITY:
        model = load_model_text(_read_text(f["model"], "model"), f["model"])
        stream = parse_csv(f["data"], ingest_config(lenient))
        csv_text, svg_text = run_intensity(model, stream, f["step"], svg=bool(f.get("svg")))
        out = {f["out"]: csv_text}
        if svg_text is not None:
            out[f["svg"]] = svg_text
        return out

    if cmd is Subcommand.COMPARE:
        stream = parse_csv(f["data"], ingest_config(lenient))
        return {f["out"]: run_compare(stream, f.get("seed"), f.get("restarts"))}

    model = load_model_text(_read_text(f["model"], "model"), f["model"])
    stream = parse_csv(f["data"], ingest_config(lenient))
    cfg = load_strategy_text(_read_text(f["config"], "config"), f["config"])
    if not f.get("trades"):
        return {f["out"]: run_backtest_json(model, stream, cfg)}
    report = run_backtest(model, stream, cfg)
    return {f["out"]: report.model_dump_json(indent=2), f["trades"]: format_trades_csv(report.trades)}


def dispatch(invocation: CliInvocation) -> int:
    try:
        outputs = _outputs(invocation)
        for path, text in outputs.items():
            Path(path).write_text(text, encoding="utf-8")
            logger.info(f"Wrote {path}")
    except HawkesNumericalError as exc:
        logger.error(f"{invocation.subcommand.value}: numerical failure: {exc}")
        return EXIT_NUMERICAL
    except HawkesInputError as exc:
        logger.error(f"{invocation.subcommand.value}: {exc}")
        return EXIT_INPUT
    except ValidationError as exc:
        logger.error(f"{invocation.subcommand.value}: {describe_validation_error(exc)}")
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        logger.error(f"{invocation.subcommand.value}: {exc}")
        return EXIT_INPUT
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    level = get_settings().log_level
    if "--log-level" in argv:
        k = argv.index("--log-level")
        if k + 1 < len(argv):
            level = argv[k + 1]
    configure_logging(level)
    try:
        invocation = parse_invocation(argv)
    except HawkesInputError as exc:
        logger.error(str(exc))
        return EXIT_INPUT
    return dispatch(invocation)


if __name__ == "__main__":
    sys.exit(main())
