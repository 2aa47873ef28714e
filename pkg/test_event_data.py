"""
Tests for event CSV ingest and export
"""
import pytest

from models.event import Event, EventStream, IngestConfig, Side
from utils.errors import HawkesInputError
from utils.event_data import (
    TIE_NUDGE,
    format_csv,
    normalize_time,
    parse_csv,
    parse_csv_text,
    split_by_side,
    write_csv,
)

BASIC = """# horizon=2.0
time,side,price,size
0.001,B,100.25,3
0.5,S,,
1.25,B,100.26,
"""


def test_parse_basic_file():
    stream = parse_csv_text(BASIC)
    assert stream.horizon == 2.0
    assert [e.time for e in stream.events] == [0.001, 0.5, 1.25]
    assert [e.side for e in stream.events] == [Side.BUY, Side.SELL, Side.BUY]
    assert stream.events[0].price == 100.25
    assert stream.events[0].size == 3.0
    assert stream.events[1].price is None
    assert stream.events[1].size is None
    assert stream.counts() == (2, 1)


def test_empty_file_rejected():
    with pytest.raises(HawkesInputError, match="empty"):
        parse_csv_text("")


def test_header_only_with_horizon_gives_empty_stream():
    stream = parse_csv_text("# horizon=3\ntime,side,price,size\n")
    assert len(stream) == 0
    assert stream.horizon == 3.0


def test_header_only_without_horizon_rejected():
    with pytest.raises(HawkesInputError, match="no declared horizon"):
        parse_csv_text("time,side,price,size\n")


def test_wrong_header_rejected():
    with pytest.raises(HawkesInputError, match="header"):
        parse_csv_text("t,side,price,size\n0.1,B,,\n")


def test_malformed_row_reports_line_number():
    text = "# horizon=1\ntime,side,price,size\n0.1,B,\n"
    with pytest.raises(HawkesInputError, match="line 3"):
        parse_csv_text(text)


def test_negative_time_rejected():
    with pytest.raises(HawkesInputError, match="negative"):
        parse_csv_text("# horizon=1\ntime,side,price,size\n-0.1,B,,\n")


def test_unknown_side_rejected():
    with pytest.raises(HawkesInputError, match="unknown side"):
        parse_csv_text("# horizon=1\ntime,side,price,size\n0.1,X,,\n")


def test_too_many_decimals_rejected():
    with pytest.raises(HawkesInputError, match="9 decimals"):
        parse_csv_text("# horizon=1\ntime,side,price,size\n0.1234567891,B,,\n")


def test_unsorted_strict_rejected_and_lenient_sorted():
    text = "# horizon=1\ntime,side,price,size\n0.5,B,,\n0.2,S,,\n"
    with pytest.raises(HawkesInputError, match="not sorted"):
        parse_csv_text(text)
    stream = parse_csv_text(text, IngestConfig(strict=False))
    assert [e.time for e in stream.events] == [0.2, 0.5]


def test_same_side_duplicate_strict_rejected_and_lenient_nudged():
    text = "# horizon=1\ntime,side,price,size\n0.5,B,,\n0.5,B,,\n"
    with pytest.raises(HawkesInputError, match="duplicate"):
        parse_csv_text(text)
    stream = parse_csv_text(text, IngestConfig(strict=False))
    assert stream.events[1].time == pytest.approx(0.5 + TIE_NUDGE, abs=1e-15)


def test_cross_side_tie_allowed():
    stream = parse_csv_text("# horizon=1\ntime,side,price,size\n0.5,B,,\n0.5,S,,\n")
    assert len(stream) == 2


def test_event_beyond_horizon_rejected():
    with pytest.raises(HawkesInputError, match="beyond horizon"):
        parse_csv_text("# horizon=1\ntime,side,price,size\n1.5,B,,\n")


def test_no_declared_window_shifts_to_first_event():
    stream = parse_csv_text("time,side,price,size\n10.0,B,,\n12.5,S,,\n")
    assert [e.time for e in stream.events] == [0.0, 2.5]
    assert stream.horizon == 2.5


def test_declared_start_shifts_times():
    stream = parse_csv_text("# start=5\n# horizon=10\ntime,side,price,size\n6.0,B,,\n")
    assert stream.events[0].time == 1.0
    assert stream.horizon == 10.0


def test_config_horizon_overrides_comment():
    stream = parse_csv_text(BASIC, IngestConfig(horizon=5.0))
    assert stream.horizon == 5.0


def test_directive_after_data_is_ignored():
    text = "# horizon=2\ntime,side,price,size\n0.5,B,,\n# horizon=9\n"
    assert parse_csv_text(text).horizon == 2.0


def test_format_then_parse_preserves_stream(tmp_path):
    stream = parse_csv_text(BASIC)
    path = write_csv(stream, tmp_path / "events.csv", {"seed": 7})
    text = path.read_text()
    assert text.startswith("# horizon=2.000000000\n# seed=7\ntime,side,price,size\n")
    again = parse_csv(path)
    assert again == stream
    assert format_csv(again, {"seed": 7}) == text


def test_missing_file_is_input_error(tmp_path):
    with pytest.raises(HawkesInputError, match="not found"):
        parse_csv(tmp_path / "nope.csv")


def test_split_by_side():
    buys, sells = split_by_side(parse_csv_text(BASIC))
    assert buys == [0.001, 1.25]
    assert sells == [0.5]


def test_normalize_time():
    stream = EventStream(events=[Event(time=3.0, side=Side.BUY), Event(time=4.0, side=Side.SELL)], horizon=10.0)
    shifted = normalize_time(stream, 2.0)
    assert [e.time for e in shifted.events] == [1.0, 2.0]
    assert shifted.horizon == 8.0
    with pytest.raises(HawkesInputError):
        normalize_time(stream, 3.5)


def test_lenient_nudge_past_horizon_reported():
    text = "# horizon=1\ntime,side,price,size\n0.5,S,,\n1.0,B,,\n1.0,B,,\n"
    with pytest.raises(HawkesInputError, match="line 5: duplicate timestamp nudged .* past the horizon"):
        parse_csv_text(text, IngestConfig(strict=False))


def test_non_utf8_file_rejected(tmp_path):
    path = tmp_path / "latin1.csv"
    path.write_bytes(b"time,side,price,size\n0.5,B,\xe9,\n")
    with pytest.raises(HawkesInputError, match="not UTF-8"):
        parse_csv(path)
