"""
Shared glue for the CLI and the HTTP routers: build configs from settings,
read model documents and render each step's machine output as text.
"""
import json
from typing import Optional, Tuple

from pydantic import ValidationError

from config.settings import get_settings
from models.event import EventStream, IngestConfig
from models.fit import FitConfig
from models.hawkes import HawkesModel
from models.kernel import KernelKind
from models.simulation import SimConfig
from models.strategy import StrategyConfig
from utils.diagnostics import compare_kernels, render_intensity
from utils.errors import HawkesInputError, describe_validation_error
from utils.event_data import format_csv
from utils.estimate import fit
from utils.simulate import simulate
from utils.strategy import run_backtest


def ingest_config(lenient: bool = False) -> IngestConfig:
    return IngestConfig(strict=get_settings().strict_ingest and not lenient)


def fit_config(kind: KernelKind, restarts: Optional[int] = None, seed: Optional[int] = None, free_epsilon: bool = False) -> FitConfig:
    settings = get_settings()
    return FitConfig(
        kind=kind,
        restarts=restarts if restarts is not None else settings.fit_restarts,
        seed=seed if seed is not None else settings.default_seed,
        ftol=settings.fit_ftol,
        gtol=settings.fit_gtol,
        max_iterations=settings.fit_max_iterations,
        free_epsilon=free_epsilon,
        fixed_epsilon=settings.fixed_epsilon,
    )


def load_model_text(text: str, source: str = "<model>") -> HawkesModel:
    """Accept either a FitResult document (model under "model") or a bare model."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HawkesInputError(f"{source}: not valid JSON ({exc.msg} at line {exc.lineno})")
    if isinstance(doc, dict) and isinstance(doc.get("model"), dict):
        doc = doc["model"]
    try:
        return HawkesModel.model_validate(doc)
    except ValidationError as exc:
        raise HawkesInputError(f"{source}: model schema mismatch: {describe_validation_error(exc)}")


def load_strategy_text(text: str, source: str = "<config>") -> StrategyConfig:
    try:
        return StrategyConfig.model_validate_json(text)
    except ValidationError as exc:
        raise HawkesInputError(f"{source}: strategy config schema mismatch: {describe_validation_error(exc)}")


def run_fit(stream: EventStream, kind: KernelKind, restarts=None, seed=None, free_epsilon=False) -> str:
    result = fit(stream, fit_config(kind, restarts, seed, free_epsilon))
    return result.model_dump_json(indent=2)


def run_simulate(model: HawkesModel, horizon: float, seed: Optional[int] = None, max_events: Optional[int] = None, allow_nonstationary: bool = False) -> str:
    settings = get_settings()
    try:
        cfg = SimConfig(
            horizon=horizon,
            seed=seed if seed is not None else settings.default_seed,
            max_events=max_events if max_events is not None else settings.sim_max_events,
            allow_nonstationary=allow_nonstationary,
        )
    except ValidationError as exc:
        raise HawkesInputError(describe_validation_error(exc))
    result = simulate(model, cfg)
    comments = {"seed": result.seed}
    if result.truncated:
        comments["truncated"] = "true"
    return format_csv(result.stream, comments)


def run_intensity(model: HawkesModel, stream: EventStream, step: float, svg: bool = False) -> Tuple[str, Optional[str]]:
    return render_intensity(model, stream, step, svg)


def run_compare(stream: EventStream, seed: Optional[int] = None, restarts: Optional[int] = None) -> str:
    report = compare_kernels(
        stream,
        fit_config(KernelKind.EXPONENTIAL, restarts, seed),
        fit_config(KernelKind.POWER_LAW, restarts, seed),
    )
    return report.model_dump_json(indent=2)


def run_backtest_json(model: HawkesModel, stream: EventStream, cfg: StrategyConfig) -> str:
    return run_backtest(model, stream, cfg).model_dump_json(indent=2)
