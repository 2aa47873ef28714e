"""
Goodness of fit and kernel comparison.

Residual test: under the true model the compensator-rescaled inter-arrival
times of each component are i.i.d. unit exponential; they are tested with a
one-sample KS test against 1 - exp(-x) at the 1% level.
"""
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import stats

from models.diagnostics import ComparisonReport, ResidualReport
from models.event import EventStream, Side
from models.fit import FitConfig, FitResult
from models.hawkes import HawkesModel
from models.kernel import KernelKind
from utils.chart import IntensityChartGenerator
from utils.errors import HawkesInputError, HawkesNumericalError
from utils.estimate import fit
from utils.hawkes_model import compensator_at, intensity_path

KS_ASYMPTOTIC_1PCT = 1.628
KS_ASYMPTOTIC_MIN_N = 35


def ks_statistic(samples: Sequence[float]) -> float:
    """Sup distance between the empirical CDF and the unit-exponential CDF."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise HawkesInputError("ks_statistic needs at least one sample")
    return float(stats.kstest(x, "expon").statistic)


def ks_critical_1pct(n: int) -> float:
    """1.628/sqrt(n) for n > 35, the exact Kolmogorov quantile below that."""
    if n < 1:
        raise HawkesInputError("n must be >= 1")
    if n > KS_ASYMPTOTIC_MIN_N:
        return KS_ASYMPTOTIC_1PCT / math.sqrt(n)
    return float(stats.kstwo.ppf(0.99, n))


def residuals(model: HawkesModel, stream: EventStream, side: Side) -> ResidualReport:
    times = np.array([e.time for e in stream.events if e.side is side], dtype=float)
    if times.size < 2:
        raise HawkesInputError(f"residual test needs at least 2 {side.name} events, got {times.size}")
    rescaled = compensator_at(model, stream, side, times)
    gaps = np.diff(rescaled)
    if not np.all(np.isfinite(gaps)):
        raise HawkesNumericalError("non-finite rescaled times")
    stat = ks_statistic(gaps)
    crit = ks_critical_1pct(gaps.size)
    return ResidualReport(
        component=side,
        residuals=gaps.tolist(),
        ks_statistic=stat,
        ks_critical_1pct=crit,
        passed=stat < crit,
    )


def residual_reports(model: HawkesModel, stream: EventStream) -> List[ResidualReport]:
    reports = []
    for side in (Side.BUY, Side.SELL):
        if stream.count(side) >= 2:
            reports.append(residuals(model, stream, side))
    return reports


def build_comparison(exp_fit: FitResult, pl_fit: FitResult) -> ComparisonReport:
    delta_aic = pl_fit.aic - exp_fit.aic
    return ComparisonReport(
        exp_fit=exp_fit,
        pl_fit=pl_fit,
        delta_log_likelihood=exp_fit.neg_log_likelihood - pl_fit.neg_log_likelihood,
        delta_aic=delta_aic,
        winner=KernelKind.POWER_LAW if delta_aic < 0 else KernelKind.EXPONENTIAL,
    )


def compare_kernels(stream: EventStream, cfg_exp: FitConfig, cfg_pl: FitConfig) -> ComparisonReport:
    """Fit both kernel families and pick the lower AIC."""
    if cfg_exp.kind is not KernelKind.EXPONENTIAL or cfg_pl.kind is not KernelKind.POWER_LAW:
        raise HawkesInputError("compare_kernels needs an exponential and a power_law FitConfig")
    exp_fit = fit(stream, cfg_exp)
    pl_fit = fit(stream, cfg_pl)
    report = build_comparison(exp_fit, pl_fit)
    report.exp_residuals = residual_reports(exp_fit.model, stream)
    report.pl_residuals = residual_reports(pl_fit.model, stream)
    logger.info(
        f"Kernel comparison: delta_ll={report.delta_log_likelihood:.4f} "
        f"delta_aic={report.delta_aic:.4f} winner={report.winner.value}"
    )
    return report


def format_intensity_csv(samples) -> str:
    lines = ["time,lambda_buy,lambda_sell"]
    lines += [f"{s.time:.9f},{s.lambda_buy:.9f},{s.lambda_sell:.9f}" for s in samples]
    return "\n".join(lines) + "\n"


def render_intensity(model: HawkesModel, stream: EventStream, grid_step: float, svg: bool = False) -> Tuple[str, Optional[str]]:
    """Intensity path as CSV text, plus the SVG chart text when svg is set."""
    samples = intensity_path(model, stream, grid_step)
    svg_text = IntensityChartGenerator().generate_svg(samples) if svg else None
    return format_intensity_csv(samples), svg_text


def export_intensity(
    model: HawkesModel,
    stream: EventStream,
    grid_step: float,
    path: Union[str, Path],
    svg_path: Optional[Union[str, Path]] = None,
) -> Path:
    """Write the intensity path as CSV and, when svg_path is given, as an SVG chart."""
    csv_text, svg_text = render_intensity(model, stream, grid_step, svg=svg_path is not None)
    path = Path(path)
    path.write_text(csv_text, encoding="utf-8")
    if svg_text is not None:
        Path(svg_path).write_text(svg_text, encoding="utf-8")
    logger.info(f"Wrote intensity path to {path}")
    return path
