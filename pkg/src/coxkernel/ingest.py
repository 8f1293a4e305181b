"""Daily market data: parsing, returns, and construction of schedule and counts.

Two layouts are supported. Equity files carry ``Date, Open, High, Low,
Close, Volume, Adj.Close`` with plain numbers. Commodity files carry ``Date,
Price, Open, High, Low, Vol., Change`` where volumes use K/M/B suffixes and
changes are percentages. Calendar dates are mapped to ``[0, 1]`` by their
trading-day index.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import re
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import InvalidDataError, ParseError
from .simulate import CountingRealization, CovariatePath, ObservationSchedule

__all__ = [
    "MarketSeries",
    "ThresholdConfig",
    "parse_yahoo",
    "parse_investing",
    "serialize_yahoo",
    "serialize_investing",
    "percent_returns",
    "volume_increments",
    "align_calendar",
    "restrict",
    "calendar_positions",
    "build_schedule",
    "build_counts",
    "RealDataset",
    "build_real_dataset",
]

YAHOO_COLUMNS = ("Date", "Open", "High", "Low", "Close", "Volume", "Adj.Close")
INVESTING_COLUMNS = ("Date", "Price", "Open", "High", "Low", "Vol.", "Change")
_SUFFIX = {"": 1.0, "K": 1e3, "M": 1e6, "B": 1e9}


@dataclass
class MarketSeries:
    """Daily rows sorted by ascending date.

    ``extra`` keeps the remaining columns (High, Low, ...) keyed by their
    header name.
    """

    dates: list
    open: np.ndarray
    volume: np.ndarray
    extra: dict = field(default_factory=dict)
    name: str = ""

    def __len__(self):
        return len(self.dates)

    def index(self) -> dict:
        return {d: i for i, d in enumerate(self.dates)}


@dataclass(frozen=True)
class ThresholdConfig:
    alpha: float = -0.01
    beta_thr: float = -0.015


def _key(name: str) -> str:
    return re.sub(r"[\s.]", "", name).lower()


def _header_map(header, expected, source):
    keys = [_key(h) for h in header]
    out = {}
    for col in expected:
        k = _key(col)
        if k not in keys:
            raise ParseError(f"missing column {col!r}", source=source)
        out[col] = keys.index(k)
    return out


def _parse_date(text, row, source):
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(f"bad date {text!r}", row=row, source=source) from None


def _parse_number(text, col, row, source):
    cleaned = text.strip().replace(",", "")
    try:
        return float(cleaned)
    except ValueError:
        raise ParseError(f"cannot parse {col} value {text!r}", row=row, source=source) from None


def _parse_suffixed(text, row, source):
    cleaned = text.strip().replace(",", "")
    m = re.fullmatch(r"([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)([A-Za-z]?)", cleaned)
    if not m:
        raise ParseError(f"cannot parse volume {text!r}", row=row, source=source)
    suffix = m.group(2).upper()
    if suffix not in _SUFFIX:
        raise ParseError(f"unknown volume suffix {m.group(2)!r}", row=row, source=source)
    return float(m.group(1)) * _SUFFIX[suffix]


def _parse_percent(text, row, source):
    cleaned = text.strip()
    if not cleaned.endswith("%"):
        raise ParseError(f"expected a percentage, got {text!r}", row=row, source=source)
    return _parse_number(cleaned[:-1], "Change", row, source) / 100.0


def _read_rows(csv_text, expected, source):
    reader = csv.reader(io.StringIO(csv_text.lstrip("﻿")))
    header = next(reader, None)
    if header is None:
        raise ParseError("empty file, no header", source=source)
    cols = _header_map(header, expected, source)
    rows = []
    for i, raw in enumerate(reader, start=1):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) < len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(raw)}", row=i, source=source)
        rows.append((i, {c: raw[j] for c, j in cols.items()}))
    return rows


def _assemble(records, source, name):
    seen = {}
    for row, rec in records:
        if rec["Date"] in seen:
            raise ParseError(f"duplicate date {rec['Date'].isoformat()}", row=row, source=source)
        seen[rec["Date"]] = rec
    ordered = [seen[d] for d in sorted(seen)]
    extra_cols = [c for c in (ordered[0] if ordered else {}) if c not in ("Date", "Open", "Volume")]
    return MarketSeries(
        dates=[r["Date"] for r in ordered],
        open=np.array([r["Open"] for r in ordered], dtype=float),
        volume=np.array([r["Volume"] for r in ordered], dtype=float),
        extra={c: np.array([r[c] for r in ordered], dtype=float) for c in extra_cols},
        name=name,
    )


def parse_yahoo(csv_text: str, source=None, name: str = "") -> MarketSeries:
    records = []
    for row, raw in _read_rows(csv_text, YAHOO_COLUMNS, source):
        rec = {"Date": _parse_date(raw["Date"], row, source)}
        for col in YAHOO_COLUMNS[1:]:
            rec[col] = _parse_number(raw[col], col, row, source)
        records.append((row, rec))
    return _assemble(records, source, name)


def parse_investing(csv_text: str, source=None, name: str = "") -> MarketSeries:
    records = []
    for row, raw in _read_rows(csv_text, INVESTING_COLUMNS, source):
        rec = {"Date": _parse_date(raw["Date"], row, source)}
        for col in ("Price", "Open", "High", "Low"):
            rec[col] = _parse_number(raw[col], col, row, source)
        rec["Volume"] = _parse_suffixed(raw["Vol."], row, source)
        rec["Change"] = _parse_percent(raw["Change"], row, source)
        records.append((row, rec))
    return _assemble(records, source, name)


def _num(x):
    return repr(float(x))


def serialize_yahoo(series: MarketSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(YAHOO_COLUMNS)
    for i, d in enumerate(series.dates):
        w.writerow(
            [d.isoformat(), _num(series.open[i]), _num(series.extra["High"][i]), _num(series.extra["Low"][i]),
             _num(series.extra["Close"][i]), _num(series.volume[i]), _num(series.extra["Adj.Close"][i])]
        )
    return buf.getvalue()


def serialize_investing(series: MarketSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(INVESTING_COLUMNS)
    for i, d in enumerate(series.dates):
        w.writerow(
            [d.isoformat(), _num(series.extra["Price"][i]), _num(series.open[i]), _num(series.extra["High"][i]),
             _num(series.extra["Low"][i]), _num(series.volume[i]), _num(series.extra["Change"][i] * 100.0) + "%"]
        )
    return buf.getvalue()


def _relative_changes(series: MarketSeries, values: np.ndarray, what: str):
    if len(series) < 2:
        raise InvalidDataError(f"{what} need at least two rows, got {len(series)}")
    out = []
    for i in range(1, len(series)):
        prev = values[i - 1]
        if not prev > 0:
            raise InvalidDataError(f"{what}: previous value {prev!r} is not positive before {series.dates[i].isoformat()}")
        out.append((series.dates[i], float((values[i] - prev) / prev)))
    return out


def percent_returns(series: MarketSeries):
    """Day-over-day relative change of the open price."""
    return _relative_changes(series, series.open, "percent returns")


def volume_increments(series: MarketSeries):
    """Day-over-day relative change of the traded volume."""
    return _relative_changes(series, series.volume, "volume increments")


def align_calendar(series_list):
    """Trading days common to every series, ascending."""
    series_list = list(series_list)
    if not series_list:
        raise InvalidDataError("need at least one series to build a calendar")
    common = set(series_list[0].dates)
    for s in series_list[1:]:
        common &= set(s.dates)
    if not common:
        raise InvalidDataError("the series share no trading day")
    return sorted(common)


def restrict(series: MarketSeries, calendar) -> MarketSeries:
    """Rows of ``series`` on ``calendar`` dates; a missing date is an error."""
    idx = series.index()
    missing = [d for d in calendar if d not in idx]
    if missing:
        raise InvalidDataError(f"{series.name or 'series'} has no row for {missing[0].isoformat()}")
    rows = [idx[d] for d in calendar]
    return MarketSeries(
        dates=list(calendar),
        open=series.open[rows],
        volume=series.volume[rows],
        extra={k: v[rows] for k, v in series.extra.items()},
        name=series.name,
    )


def calendar_positions(calendar) -> dict:
    """Map each date to ``index / (len - 1)``: first date 0, last date 1."""
    if len(calendar) < 2:
        raise InvalidDataError("a calendar needs at least two dates to be normalised")
    last = len(calendar) - 1
    return {d: i / last for i, d in enumerate(calendar)}


def _crossings(returns, threshold, calendar):
    pos = calendar_positions(calendar)
    times = []
    for date, value in returns:
        if date not in pos:
            raise InvalidDataError(f"return date {date.isoformat()} is not on the calendar")
        if value < threshold:
            times.append(pos[date])
    return np.array(sorted(times), dtype=float)


def build_schedule(oil_returns, alpha: float, calendar) -> ObservationSchedule:
    """Observation times at the dates where the commodity return falls strictly below ``alpha``."""
    return ObservationSchedule(_crossings(oil_returns, alpha, calendar))


def build_counts(equity_returns, beta_thr: float, calendar) -> CountingRealization:
    """Jump times at the dates where the equity return falls strictly below ``beta_thr``."""
    return CountingRealization(_crossings(equity_returns, beta_thr, calendar))


@dataclass
class RealDataset:
    calendar: list
    schedule_dates: list
    jump_dates: dict
    names: list
    dataset: Dataset


def build_real_dataset(equities, oil: MarketSeries, thresholds: ThresholdConfig = ThresholdConfig()) -> RealDataset:
    """Assemble the estimation sample from equity series and the commodity series.

    Each equity contributes one trajectory, its covariate being its own
    volume increment at the schedule dates (``d = 1``).
    """
    equities = list(equities)
    if not equities:
        raise InvalidDataError("need at least one equity series")
    calendar = align_calendar([oil] + equities)
    pos = calendar_positions(calendar)
    oil = restrict(oil, calendar)
    schedule = build_schedule(percent_returns(oil), thresholds.alpha, calendar)
    if len(schedule) == 0:
        raise InvalidDataError("no observation times: the commodity return never falls below alpha")
    by_pos = {p: d for d, p in pos.items()}
    schedule_dates = [by_pos[s] for s in schedule.times]

    paths, counts, jump_dates, names = [], [], {}, []
    for k, eq in enumerate(equities):
        eq = restrict(eq, calendar)
        name = eq.name or f"equity{k}"
        incr = dict(volume_increments(eq))
        paths.append(CovariatePath(schedule, np.array([incr[d] for d in schedule_dates])))
        realization = build_counts(percent_returns(eq), thresholds.beta_thr, calendar)
        counts.append(realization)
        jump_dates[name] = [by_pos[t] for t in realization.jump_times]
        names.append(name)
    return RealDataset(calendar, schedule_dates, jump_dates, names, Dataset.from_trajectories(paths, counts))
