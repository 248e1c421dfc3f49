"""Synthetic news and price data with a planted text-label signal.

Prices follow a GARCH(1,1) random walk. Each document is written after its
label is known: positive-leaning vocabulary when the price measure at the
planted horizon is positive, negative-leaning vocabulary otherwise. A
classifier can therefore only do well when it is trained on labels from the
planted horizon, which is what the horizon sweep should discover.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import NewsDoc, PriceBar, join_news_prices, write_news_csv, write_prices_csv
from .volatility import MAX_P, Sentiment, fit_models, label_binary

POSITIVE_WORDS = (
    "surge rally upgrade beat growth profit record expansion outperform bullish "
    "dividend breakthrough approval strong gain"
).split()
NEGATIVE_WORDS = (
    "slump plunge downgrade miss loss decline layoff lawsuit bearish writedown "
    "recall probe weak default shortfall"
).split()
NEUTRAL_WORDS = (
    "company shares market quarter analyst investor report statement board trading "
    "chief executive revenue sector industry exchange fund guidance outlook customer "
    "product meeting announcement conference region"
).split()

EXCHANGES = ("NASDAQ", "NYSE")


@dataclass
class Fixture:
    docs: list[NewsDoc]
    prices: dict[str, list[PriceBar]]
    planted_p: int
    seed: int

    def write(self, directory: str | Path) -> tuple[Path, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        news, prices = directory / "news.csv", directory / "prices.csv"
        write_news_csv(self.docs, news)
        write_prices_csv(self.prices, prices)
        return news, prices


def trading_days(start: dt.date, n: int) -> list[dt.date]:
    """The first ``n`` weekdays on or after ``start``."""
    days, d = [], start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def simulate_garch(
    n: int, omega: float, alpha: float, beta: float, rng: np.random.Generator, burn: int = 500
) -> np.ndarray:
    """GARCH(1,1) shocks with Gaussian innovations, started at the
    unconditional variance and run ``burn`` steps before recording."""
    h = omega / (1.0 - alpha - beta)
    e_prev = np.sqrt(h)
    out = np.empty(n)
    z = rng.standard_normal(n + burn)
    for t in range(n + burn):
        h = omega + alpha * e_prev * e_prev + beta * h
        e_prev = np.sqrt(h) * z[t]
        if t >= burn:
            out[t - burn] = e_prev
    return out


def _text(rng: np.random.Generator, positive: bool, n_signal: int, n_filler: int) -> tuple[str, str]:
    lean = POSITIVE_WORDS if positive else NEGATIVE_WORDS
    words = list(rng.choice(lean, n_signal)) + list(rng.choice(NEUTRAL_WORDS, n_filler))
    rng.shuffle(words)
    headline = " ".join(words[:4]).capitalize()
    body = " ".join(words[4:]).capitalize() + "."
    return headline, body


def make_fixture(
    planted_p: int = 0,
    n_tickers: int = 4,
    n_days: int = 400,
    n_docs: int = 300,
    seed: int = 0,
    n_signal: int = 6,
    n_filler: int = 14,
    garch: tuple[float, float, float] = (0.05, 0.10, 0.80),
    weekend_share: float = 0.1,
) -> Fixture:
    """Build a fixture whose text sentiment follows the label at ``planted_p``.

    Returns are GARCH shocks in percent (so the defaults give roughly 0.7%
    daily volatility). For ``planted_p >= 1`` the label comes from the
    GARCH model the pipeline itself would fit on these prices. Documents sit
    far enough from both ends of the series that every horizon up to the
    maximum is computable; a ``weekend_share`` of Friday documents is
    re-dated to the Saturday after to exercise anchoring.
    """
    rng = np.random.default_rng(seed)
    days = trading_days(dt.date(2015, 1, 5), n_days)
    prices: dict[str, list[PriceBar]] = {}
    tickers = [f"T{k:02d}" for k in range(n_tickers)]
    for t in tickers:
        r = simulate_garch(n_days - 1, *garch, rng) / 100.0
        closes = 50.0 * np.exp(np.concatenate([[0.0], np.cumsum(r)]))
        prices[t] = [PriceBar(t, d, float(c)) for d, c in zip(days, closes)]

    placeholders = []
    for i in range(n_docs):
        t = tickers[int(rng.integers(n_tickers))]
        pos = int(rng.integers(11, n_days - MAX_P - 2))
        date = days[pos]
        if date.weekday() == 4 and rng.random() < weekend_share * 5:
            date += dt.timedelta(days=1)
        rank = "topStory" if rng.random() < 0.2 else "normal"
        placeholders.append(NewsDoc(t, EXCHANGES[i % 2], date, f"placeholder {i}", "", rank))

    models = fit_models(prices)[0] if planted_p >= 1 else {}
    records, dropped = join_news_prices(placeholders, prices)
    assert dropped == 0 and len(records) == n_docs
    docs = []
    for rec in records:
        label = label_binary(rec, planted_p, models.get(rec.doc.ticker))
        headline, body = _text(rng, label is Sentiment.POSITIVE, n_signal, n_filler)
        d = rec.doc
        docs.append(NewsDoc(d.ticker, d.exchange, d.timestamp, headline, body, d.story_rank))
    return Fixture(docs, prices, planted_p, seed)
