"""Log returns, ARCH/GARCH conditional variance and price-based sentiment labels.

Conditional variance recursions::

    ARCH(p):      h_t = omega + sum_i alpha_i * eps_{t-i}^2
    GARCH(1,1):   h_t = omega + alpha * eps_{t-1}^2 + beta * h_{t-1}

GARCH(1,1) is fitted by Gaussian maximum likelihood. Its persistence
``alpha + beta`` sets the decay rate used by the multi-day labeler.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter
from scipy.special import expit, logit

from .errors import (
    ContractError,
    ConvergenceError,
    CoverageError,
    DegenerateInputError,
    DomainError,
)
from .ingest import JoinedRecord, PriceBar

MIN_FIT_LENGTH = 50
MAX_PERSISTENCE = 0.9999
MAX_ITER = 500
REL_TOL = 1e-8
MAX_P = 5


class Sentiment(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"


@dataclass(frozen=True)
class ArchParams:
    omega: float
    alphas: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be > 0")
        if any(a < 0 for a in self.alphas):
            raise DomainError("ARCH coefficients must be >= 0")

    @property
    def order(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class GarchModel:
    omega: float
    alpha: float
    beta: float
    loglik: float | None = None
    n: int | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("omega must be > 0")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("alpha and beta must be >= 0")

    @property
    def persistence(self) -> float:
        return self.alpha + self.beta

    @property
    def uncond_var(self) -> float:
        """``omega / (1 - alpha - beta)``; infinite for a non-stationary model."""
        if self.persistence >= 1:
            return math.inf
        return self.omega / (1.0 - self.persistence)


@dataclass(frozen=True)
class ReturnSeries:
    ticker: str
    dates: tuple
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) < 2:
            raise ContractError("a return series needs at least 2 observations")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ContractError("return dates must be strictly increasing")

    @property
    def shocks(self) -> np.ndarray:
        return self.values - self.values.mean()

    def __len__(self) -> int:
        return len(self.values)


def log_return(p_now: float, p_prev: float) -> float:
    if not (p_now > 0 and p_prev > 0):
        raise DomainError(f"prices must be positive, got {p_now!r} and {p_prev!r}")
    return math.log(p_now / p_prev)


def returns_from_bars(bars: Sequence[PriceBar]) -> ReturnSeries:
    closes = np.array([b.close for b in bars], dtype=float)
    if np.any(closes <= 0):
        raise DomainError("closes must be positive")
    values = np.diff(np.log(closes))
    return ReturnSeries(bars[0].ticker, tuple(b.date for b in bars[1:]), values)


def arch_variance(params: ArchParams, shocks: Sequence[float]) -> float:
    """One ARCH(p) step. ``shocks`` holds eps_{t-1}, ..., eps_{t-p}."""
    if len(shocks) != params.order:
        raise ContractError(f"expected {params.order} lagged shocks, got {len(shocks)}")
    h = params.omega
    for a, e in zip(params.alphas, shocks):
        h += a * e * e
    return h


def garch_pq_filter(
    omega: float,
    alphas: Sequence[float],
    betas: Sequence[float],
    shocks: Sequence[float],
    h0: float,
) -> np.ndarray:
    """General GARCH(p, q) recursion; pre-sample eps^2 and h are both ``h0``.

    Returns h_1..h_n where h_t uses eps_{t-1}.. and h_{t-1}.. .
    """
    if not h0 > 0:
        raise DomainError("h0 must be > 0")
    eps2 = [h0] + [float(e) * float(e) for e in shocks]  # eps2[t] = eps_t^2, t=0..n
    h = [h0]
    n = len(shocks)
    for t in range(1, n + 1):
        v = omega
        for i, a in enumerate(alphas, start=1):
            v += a * (eps2[t - i] if t - i >= 0 else h0)
        for j, b in enumerate(betas, start=1):
            v += b * (h[t - j] if t - j >= 0 else h0)
        h.append(v)
    return np.array(h[1:])


def garch_filter(model: GarchModel, shocks: Sequence[float], h0: float) -> np.ndarray:
    """GARCH(1,1) variances h_1..h_n for shocks eps_1..eps_n.

    The pre-sample squared shock eps_0^2 is taken to be ``h0``.
    """
    if not h0 > 0:
        raise DomainError("h0 must be > 0")
    eps = np.asarray(shocks, dtype=float)
    if eps.size < 1:
        raise ContractError("need at least one shock")
    lagged = np.empty_like(eps)
    lagged[0] = h0
    lagged[1:] = eps[:-1] * eps[:-1]
    drive = model.omega + model.alpha * lagged
    h, _ = lfilter([1.0], [1.0, -model.beta], drive, zi=[model.beta * h0])
    return h


def garch_loglik(model: GarchModel, shocks: Sequence[float], h0: float) -> float:
    """Gaussian log-likelihood without the constant: -1/2 sum(ln h + eps^2/h)."""
    eps = np.asarray(shocks, dtype=float)
    h = garch_filter(model, eps, h0)
    return -0.5 * float(np.sum(np.log(h) + eps * eps / h))


def _unpack(theta: np.ndarray, scale: float) -> tuple[float, float, float]:
    omega = scale * math.exp(theta[0])
    pers = MAX_PERSISTENCE * float(expit(theta[1]))
    alpha = pers * float(expit(theta[2]))
    return omega, alpha, pers - alpha


def _pack(omega: float, alpha: float, beta: float, scale: float) -> np.ndarray:
    pers = alpha + beta
    return np.array([math.log(omega / scale), logit(pers / MAX_PERSISTENCE), logit(alpha / pers)])


def fit_garch11(
    returns: ReturnSeries | Sequence[float],
    max_iter: int = MAX_ITER,
    rel_tol: float = REL_TOL,
) -> GarchModel:
    """Maximum-likelihood GARCH(1,1) on demeaned returns.

    The search runs Nelder-Mead over unconstrained coordinates
    (log omega, logit persistence, logit alpha share), which keeps
    omega > 0, alpha, beta >= 0 and alpha + beta < 0.9999. It starts from
    ``(0.1 * var, 0.05, 0.85)`` with h_0 set to the sample variance.

    Raises ``ConvergenceError`` (carrying the best point) if the simplex has
    not met the relative likelihood tolerance after ``max_iter`` iterations.
    """
    r = np.asarray(returns.values if isinstance(returns, ReturnSeries) else returns, dtype=float)
    if r.size < MIN_FIT_LENGTH:
        raise ContractError(f"need at least {MIN_FIT_LENGTH} returns, got {r.size}")
    if not np.all(np.isfinite(r)):
        raise DomainError("returns must be finite")
    if np.ptp(r) == 0:
        raise DegenerateInputError("returns are constant")
    eps = r - r.mean()
    var = float(np.mean(eps * eps))

    def nll(theta: np.ndarray) -> float:
        w, a, b = _unpack(theta, var)
        eps2 = np.empty_like(eps)
        eps2[0] = var
        eps2[1:] = eps[:-1] ** 2
        h, _ = lfilter([1.0], [1.0, -b], w + a * eps2, zi=[b * var])
        return 0.5 * float(np.sum(np.log(h) + eps * eps / h))

    theta0 = _pack(0.1 * var, 0.05, 0.85, var)
    start = nll(theta0)
    res = minimize(
        nll,
        theta0,
        method="Nelder-Mead",
        options={"maxiter": max_iter, "xatol": 1e-6, "fatol": rel_tol * abs(start)},
    )
    omega, alpha, beta = _unpack(res.x, var)
    model = GarchModel(omega, alpha, beta, loglik=-float(res.fun), n=int(r.size))
    if not res.success:
        raise ConvergenceError(
            f"GARCH fit did not converge in {max_iter} iterations", best=model, loglik=model.loglik
        )
    return model


def news_impact_curve(
    model: GarchModel, baseline_var: float, eps_grid: Sequence[float]
) -> list[tuple[float, float]]:
    """Next-period variance as a function of today's shock, with yesterday's
    variance held at ``baseline_var``."""
    if not baseline_var > 0:
        raise DomainError("baseline variance must be > 0")
    base = model.omega + model.beta * baseline_var
    return [(float(e), base + model.alpha * float(e) * float(e)) for e in eps_grid]


def forward_returns(record: JoinedRecord, p: int) -> list[float]:
    """Log returns r_{t+i -> t+i+1} for i = 0..p from the anchor day t."""
    closes = record.closes
    need = record.anchor + p + 1
    if need >= len(closes):
        raise CoverageError(
            f"{record.doc.ticker} {record.doc.timestamp}: need {p + 1} closes after the anchor, "
            f"have {len(closes) - record.anchor - 1}"
        )
    return [log_return(closes[record.anchor + i + 1], closes[record.anchor + i]) for i in range(p + 1)]


def price_measure(
    record: JoinedRecord,
    p: int = 0,
    model: GarchModel | None = None,
    weighting: str = "geometric",
) -> float:
    """Signed price-movement measure that the labelers threshold.

    ``p = 0`` is the next-day log return. For ``p >= 1`` the forward returns
    over p+1 days are summed with weights ``lam**i``, where ``lam`` is the
    fitted GARCH persistence, so later days count geometrically less.
    ``weighting="uniform"`` sets every weight to 1.
    """
    if not 0 <= p <= MAX_P:
        raise ContractError(f"p must lie in 0..{MAX_P}")
    rets = forward_returns(record, p)
    if p == 0:
        return rets[0]
    if weighting == "uniform":
        return math.fsum(rets)
    if weighting != "geometric":
        raise ContractError(f"unknown weighting {weighting!r}")
    if model is None:
        raise ContractError("p >= 1 needs a fitted GARCH model for the ticker")
    lam = model.persistence
    return math.fsum(lam**i * r for i, r in enumerate(rets))


def label_binary(
    record: JoinedRecord,
    p: int = 0,
    model: GarchModel | None = None,
    weighting: str = "geometric",
) -> Sentiment:
    """Positive iff the price measure is strictly above zero."""
    m = price_measure(record, p, model, weighting)
    return Sentiment.POSITIVE if m > 0 else Sentiment.NEGATIVE


def label_threshold(m: float, min_thr: float, max_thr: float) -> Sentiment:
    """Three-way label with a neutral band strictly between the thresholds."""
    if not (min_thr < 0 < max_thr):
        raise ContractError("thresholds must satisfy min_thr < 0 < max_thr")
    if m >= max_thr:
        return Sentiment.POSITIVE
    if m <= min_thr:
        return Sentiment.NEGATIVE
    return Sentiment.NEUTRAL


def fit_models(
    prices: Mapping[str, Sequence[PriceBar]], min_length: int = MIN_FIT_LENGTH
) -> tuple[dict[str, GarchModel], dict[str, str]]:
    """Fit one GARCH(1,1) per ticker. Returns ``(models, failures)``.

    Tickers with too little history or a failed fit end up in ``failures``
    with the reason instead of aborting the whole run.
    """
    models: dict[str, GarchModel] = {}
    failures: dict[str, str] = {}
    for ticker, bars in prices.items():
        if len(bars) < min_length + 1:
            failures[ticker] = f"only {max(len(bars) - 1, 0)} returns"
            continue
        try:
            models[ticker] = fit_garch11(returns_from_bars(bars))
        except (ConvergenceError, DegenerateInputError, DomainError) as exc:
            failures[ticker] = str(exc)
    return models, failures
