"""
Event CSV ingest and export.

Format::

    # horizon=2.0
    # start=0.0
    time,side,price,size
    0.001,B,100.25,3
    0.500,S,,

``time`` is decimal seconds with at most 9 fractional digits, ``side`` is B or S,
``price`` and ``size`` may be empty. Lines starting with ``#`` are comments.
"""
import math
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from models.event import Event, EventStream, IngestConfig, Side
from utils.errors import HawkesInputError, describe_validation_error

HEADER = ["time", "side", "price", "size"]
TIE_NUDGE = 1e-9
TIME_PATTERN = re.compile(r"^-?\d+(\.\d{1,9})?$")
SIDE_TOKENS = {"B": Side.BUY, "S": Side.SELL}

PathLike = Union[str, Path]


def _directive(line: str) -> Optional[Tuple[str, str]]:
    body = line.lstrip("#").strip()
    if "=" not in body:
        return None
    key, _, value = body.partition("=")
    return key.strip().lower(), value.strip()


def _parse_optional(value: str, name: str, lineno: int) -> Optional[float]:
    if value == "":
        return None
    try:
        out = float(value)
    except ValueError:
        raise HawkesInputError(f"line {lineno}: {name} '{value}' is not a number")
    if not math.isfinite(out):
        raise HawkesInputError(f"line {lineno}: {name} must be finite")
    return out


def _parse_row(fields: List[str], lineno: int) -> Tuple[float, Side, Optional[float], Optional[float]]:
    if len(fields) != 4:
        raise HawkesInputError(f"line {lineno}: expected 4 fields, got {len(fields)}")
    raw_time, raw_side, raw_price, raw_size = (f.strip() for f in fields)
    if not TIME_PATTERN.match(raw_time):
        raise HawkesInputError(f"line {lineno}: time '{raw_time}' is not decimal seconds with at most 9 decimals")
    time = float(raw_time)
    if time < 0:
        raise HawkesInputError(f"line {lineno}: time {raw_time} is negative")
    side = SIDE_TOKENS.get(raw_side)
    if side is None:
        raise HawkesInputError(f"line {lineno}: unknown side token '{raw_side}'")
    price = _parse_optional(raw_price, "price", lineno)
    size = _parse_optional(raw_size, "size", lineno)
    if size is not None and size <= 0:
        raise HawkesInputError(f"line {lineno}: size must be > 0")
    return time, side, price, size


def _resolve_ties(rows: List[Tuple[float, Side, Optional[float], Optional[float], int]], strict: bool):
    last: Dict[Side, float] = {Side.BUY: -math.inf, Side.SELL: -math.inf}
    out = []
    nudged: List[int] = []
    for time, side, price, size, lineno in rows:
        if time <= last[side]:
            if strict:
                raise HawkesInputError(f"line {lineno}: duplicate {side.name} timestamp {time}")
            time = last[side] + TIE_NUDGE
            nudged.append(lineno)
        last[side] = time
        out.append((time, side, price, size, lineno))
    if nudged:
        logger.warning(f"Perturbed {len(nudged)} same-side duplicate timestamp(s) by {TIE_NUDGE}s")
        out.sort(key=lambda r: r[0])
    return out, nudged


def parse_csv_text(text: str, config: Optional[IngestConfig] = None, source: str = "<text>") -> EventStream:
    config = config or IngestConfig()
    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise HawkesInputError(f"{source}: empty file")

    declared: Dict[str, float] = {}
    header_seen = False
    rows = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            kv = _directive(stripped)
            if kv and kv[0] in ("horizon", "start") and not rows:
                try:
                    declared[kv[0]] = float(kv[1])
                except ValueError:
                    raise HawkesInputError(f"{source} line {lineno}: bad {kv[0]} value '{kv[1]}'")
            continue
        fields = stripped.split(",")
        if not header_seen:
            if [f.strip() for f in fields] != HEADER:
                raise HawkesInputError(f"{source} line {lineno}: header must be '{','.join(HEADER)}'")
            header_seen = True
            continue
        try:
            rows.append((*_parse_row(fields, lineno), lineno))
        except HawkesInputError as exc:
            raise HawkesInputError(f"{source} {exc}")

    if not header_seen:
        raise HawkesInputError(f"{source}: empty file (no header line)")

    for k in range(1, len(rows)):
        if rows[k][0] < rows[k - 1][0]:
            if config.strict:
                raise HawkesInputError(f"{source} line {rows[k][4]}: timestamps are not sorted")
            logger.warning(f"{source}: timestamps unsorted, sorting (lenient mode)")
            rows.sort(key=lambda r: r[0])
            break
    try:
        rows, nudged = _resolve_ties(rows, config.strict)
    except HawkesInputError as exc:
        raise HawkesInputError(f"{source} {exc}")

    horizon = config.horizon if config.horizon is not None else declared.get("horizon")
    start = config.window_start if config.window_start is not None else declared.get("start")
    if start is None:
        if horizon is not None:
            start = 0.0
        elif rows:
            start = rows[0][0]
        else:
            raise HawkesInputError(f"{source}: no events and no declared horizon")
    if rows and start > rows[0][0]:
        raise HawkesInputError(f"{source}: window start {start} is after the first event {rows[0][0]}")
    if horizon is None:
        horizon = rows[-1][0] - start
    for t, _, _, _, lineno in rows:
        if lineno in nudged and t - start > horizon:
            raise HawkesInputError(
                f"{source} line {lineno}: duplicate timestamp nudged by {TIE_NUDGE}s to {t - start:.9f}, past the horizon {horizon}"
            )

    events = [Event(time=t - start, side=s, price=p, size=z) for t, s, p, z, _ in rows]
    try:
        stream = EventStream(events=events, horizon=horizon)
    except ValidationError as exc:
        raise HawkesInputError(f"{source}: {describe_validation_error(exc)}")
    logger.debug(f"Parsed {len(stream)} events from {source}, horizon={stream.horizon}")
    return stream


def parse_csv(path: PathLike, config: Optional[IngestConfig] = None) -> EventStream:
    """Read an event CSV into a validated EventStream."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise HawkesInputError(f"data file not found: {path}")
    except UnicodeDecodeError as exc:
        raise HawkesInputError(f"{path}: not UTF-8 text ({exc.reason} at byte {exc.start})")
    return parse_csv_text(text, config, source=str(path))


def _fmt_optional(x: Optional[float]) -> str:
    return "" if x is None else repr(float(x))


def format_csv(stream: EventStream, comments: Optional[Dict[str, object]] = None) -> str:
    lines = [f"# horizon={stream.horizon:.9f}"]
    for key, value in (comments or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(HEADER))
    for ev in stream.events:
        lines.append(f"{ev.time:.9f},{ev.side.value},{_fmt_optional(ev.price)},{_fmt_optional(ev.size)}")
    return "\n".join(lines) + "\n"


def write_csv(stream: EventStream, path: PathLike, comments: Optional[Dict[str, object]] = None) -> Path:
    path = Path(path)
    path.write_text(format_csv(stream, comments), encoding="utf-8")
    return path


def split_by_side(stream: EventStream) -> Tuple[List[float], List[float]]:
    buys = [e.time for e in stream.events if e.side is Side.BUY]
    sells = [e.time for e in stream.events if e.side is Side.SELL]
    return buys, sells


def normalize_time(stream: EventStream, origin: float) -> EventStream:
    """Shift every event time and the horizon by -origin."""
    if stream.events and origin > stream.events[0].time:
        raise HawkesInputError(f"origin {origin} is after the first event at {stream.events[0].time}")
    if stream.horizon - origin <= 0:
        raise HawkesInputError(f"origin {origin} leaves no observation window (horizon {stream.horizon})")
    events = [e.model_copy(update={"time": e.time - origin}) for e in stream.events]
    return EventStream(events=events, horizon=stream.horizon - origin)
