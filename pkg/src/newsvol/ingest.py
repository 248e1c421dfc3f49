"""Reading news and price CSVs and joining news to trading-day closes.

News files carry the columns ``ticker, exchange, timestamp, story_headline,
story_full, story_rank``; price files need at least ``tic, datadate, prccd``
(WRDS daily layout, with ``prchd/prcld/prcod`` read when present). Dates are
``YYYYMMDD`` integers in both.
"""

from __future__ import annotations

import bisect
import csv
import datetime as dt
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ContractError, SchemaError

NEWS_COLUMNS = ("ticker", "exchange", "timestamp", "story_headline", "story_full", "story_rank")
PRICE_REQUIRED = ("tic", "datadate", "prccd")
PRICE_OPTIONAL = {"prchd": "high", "prcld": "low", "prcod": "open"}

DEFAULT_LOOKBACK = 10
DEFAULT_HORIZON = 6


@dataclass(frozen=True)
class NewsDoc:
    ticker: str
    exchange: str
    timestamp: dt.date
    headline: str
    body: str = ""
    story_rank: str = "normal"

    @property
    def text(self) -> str:
        return f"{self.headline}\n{self.body}" if self.body else self.headline


@dataclass(frozen=True)
class PriceBar:
    ticker: str
    date: dt.date
    close: float
    high: float | None = None
    low: float | None = None
    open: float | None = None


@dataclass(frozen=True)
class JoinedRecord:
    """A news document with the closes around its (anchored) release day.

    ``anchor`` indexes ``dates``/``closes`` at the trading day the news is
    attributed to: the release date itself, or the last trading day before
    it for weekend and holiday news.
    """

    doc: NewsDoc
    dates: tuple[dt.date, ...]
    closes: tuple[float, ...]
    anchor: int

    @property
    def forward_closes(self) -> tuple[float, ...]:
        return self.closes[self.anchor :]


def parse_date(raw: str) -> dt.date:
    """Parse a ``YYYYMMDD`` string; raises ``ValueError`` otherwise."""
    s = raw.strip()
    if len(s) != 8 or not s.isdigit():
        raise ValueError(f"not a YYYYMMDD date: {raw!r}")
    return dt.date(int(s[:4]), int(s[4:6]), int(s[6:]))


def format_date(d: dt.date) -> int:
    return d.year * 10000 + d.month * 100 + d.day


def _story_rank(raw: str) -> str:
    return "topStory" if "topstory" in raw.replace(" ", "").lower() else "normal"


def _reader(path: str | Path) -> tuple[csv.DictReader, io.TextIOBase]:
    fh = open(path, encoding="utf-8", errors="replace", newline="")
    return csv.DictReader(fh), fh


def _check_header(fieldnames: Sequence[str] | None, required: Iterable[str], path) -> None:
    present = {f.strip().lstrip("﻿") for f in (fieldnames or [])}
    for col in required:
        if col not in present:
            raise SchemaError(f"{path}: missing required column {col!r}", column=col)


def _clean_row(row: Mapping[str, str | None]) -> dict[str, str]:
    return {(k or "").strip().lstrip("﻿"): (v or "") for k, v in row.items()}


def parse_news_csv(path: str | Path) -> tuple[list[NewsDoc], int]:
    """Read a news CSV. Returns the documents and the number of skipped rows.

    Rows with an empty ticker or an invalid date are skipped, not fatal.
    """
    reader, fh = _reader(path)
    with fh:
        _check_header(reader.fieldnames, NEWS_COLUMNS, path)
        docs, skipped = [], 0
        for raw in reader:
            row = _clean_row(raw)
            ticker = row["ticker"].strip()
            try:
                when = parse_date(row["timestamp"])
            except ValueError:
                skipped += 1
                continue
            if not ticker:
                skipped += 1
                continue
            docs.append(
                NewsDoc(
                    ticker=ticker,
                    exchange=row["exchange"].strip(),
                    timestamp=when,
                    headline=row["story_headline"],
                    body=row["story_full"],
                    story_rank=_story_rank(row["story_rank"]),
                )
            )
    return docs, skipped


def _opt_float(raw: str) -> float | None:
    raw = raw.strip()
    if not raw:
        return None
    return float(raw)


def parse_prices_csv(path: str | Path) -> tuple[dict[str, list[PriceBar]], int]:
    """Read a price CSV into per-ticker bars sorted by date.

    Returns ``(bars_by_ticker, rejected)``. A row is rejected when its close
    is missing, non-numeric or non-positive, its date is invalid, or its
    high is below its low. For duplicate ``(tic, datadate)`` pairs the first
    row wins.
    """
    reader, fh = _reader(path)
    with fh:
        _check_header(reader.fieldnames, PRICE_REQUIRED, path)
        seen: set[tuple[str, dt.date]] = set()
        by_ticker: dict[str, list[PriceBar]] = {}
        rejected = 0
        for raw in reader:
            row = _clean_row(raw)
            ticker = row["tic"].strip()
            try:
                when = parse_date(row["datadate"])
                close = float(row["prccd"])
                extras = {name: _opt_float(row.get(col, "")) for col, name in PRICE_OPTIONAL.items()}
            except ValueError:
                rejected += 1
                continue
            if not ticker or not close > 0 or not math.isfinite(close):
                rejected += 1
                continue
            if extras["high"] is not None and extras["low"] is not None and extras["high"] < extras["low"]:
                rejected += 1
                continue
            if (ticker, when) in seen:
                continue
            seen.add((ticker, when))
            by_ticker.setdefault(ticker, []).append(PriceBar(ticker, when, close, **extras))
    for bars in by_ticker.values():
        bars.sort(key=lambda b: b.date)
    return dict(sorted(by_ticker.items())), rejected


def dedupe_news(docs: Iterable[NewsDoc]) -> list[NewsDoc]:
    """Collapse documents sharing (ticker, timestamp, headline); first one wins."""
    seen = set()
    out = []
    for doc in docs:
        key = (doc.ticker, doc.timestamp, doc.headline)
        if key not in seen:
            seen.add(key)
            out.append(doc)
    return out


def join_news_prices(
    docs: Iterable[NewsDoc],
    prices: Mapping[str, Sequence[PriceBar]],
    lookback: int = DEFAULT_LOOKBACK,
    horizon: int = DEFAULT_HORIZON,
) -> tuple[list[JoinedRecord], int]:
    """Attach up to ``lookback`` closes before and ``horizon`` after each doc.

    A document is dropped (and counted) when its ticker has no prices, no
    trading day falls on or before its date, or no trading day follows the
    anchor. Windows near the ends of a series are truncated, not dropped;
    labelers check the horizon they need.
    """
    if lookback < 1 or horizon < 1:
        raise ContractError("lookback and horizon must be >= 1")
    index = {t: [b.date for b in bars] for t, bars in prices.items()}
    records, dropped = [], 0
    for doc in docs:
        bars = prices.get(doc.ticker)
        if not bars:
            dropped += 1
            continue
        dates = index[doc.ticker]
        pos = bisect.bisect_right(dates, doc.timestamp) - 1
        if pos < 0 or pos + 1 >= len(bars):
            dropped += 1
            continue
        lo = max(0, pos - lookback)
        hi = min(len(bars), pos + horizon + 1)
        window = bars[lo:hi]
        records.append(
            JoinedRecord(
                doc=doc,
                dates=tuple(b.date for b in window),
                closes=tuple(b.close for b in window),
                anchor=pos - lo,
            )
        )
    return records, dropped


def write_news_csv(docs: Iterable[NewsDoc], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NEWS_COLUMNS)
        for d in docs:
            w.writerow([d.ticker, d.exchange, format_date(d.timestamp), d.headline, d.body, d.story_rank])


def write_prices_csv(prices: Mapping[str, Sequence[PriceBar]] | Iterable[PriceBar], path: str | Path) -> None:
    bars = [b for seq in prices.values() for b in seq] if isinstance(prices, Mapping) else list(prices)

    def fmt(x: float | None) -> str:
        return "" if x is None else repr(x)

    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tic", "datadate", "prccd", "prchd", "prcld", "prcod"])
        for b in bars:
            w.writerow([b.ticker, format_date(b.date), repr(b.close), fmt(b.high), fmt(b.low), fmt(b.open)])


def record_to_dict(rec: JoinedRecord) -> dict:
    d = rec.doc
    return {
        "ticker": d.ticker,
        "exchange": d.exchange,
        "timestamp": format_date(d.timestamp),
        "headline": d.headline,
        "body": d.body,
        "story_rank": d.story_rank,
        "anchor": rec.anchor,
        "dates": [format_date(x) for x in rec.dates],
        "closes": list(rec.closes),
    }


def record_from_dict(obj: Mapping) -> JoinedRecord:
    doc = NewsDoc(
        ticker=obj["ticker"],
        exchange=obj["exchange"],
        timestamp=parse_date(str(obj["timestamp"])),
        headline=obj["headline"],
        body=obj["body"],
        story_rank=obj["story_rank"],
    )
    return JoinedRecord(
        doc=doc,
        dates=tuple(parse_date(str(x)) for x in obj["dates"]),
        closes=tuple(float(x) for x in obj["closes"]),
        anchor=int(obj["anchor"]),
    )
