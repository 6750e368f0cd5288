"""Normalized Black-Scholes pricing, implied volatility, and smile curves.

All prices are normalized by spot: the put with log-moneyness x on a
unit-forward underlying is

    P(x, sigma) = e^x Phi(-d) - Phi(-d - sigma),   d = -x/sigma - sigma/2,

so 0 <= P < e^x, with intrinsic value (e^x - 1)^+ at sigma = 0.  Deep wings
are handled through a parallel log-price channel that never underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import PchipInterpolator

from .errors import (
    DomainError,
    MaxIterations,
    NonPositiveVol,
    PriceAtOrAboveCap,
    PriceBelowIntrinsic,
)
from .numerics import log_mills_ratio, log_norm_cdf, norm_cdf, norm_pdf

__all__ = [
    "NormalizedPutPrice",
    "SmileCurve",
    "d_minus",
    "put_price",
    "call_price",
    "vega",
    "implied_vol",
    "f_transform",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _log1mexp(u: float) -> float:
    """log(1 - e^u) for u < 0, stable at both ends."""
    if u >= 0.0:
        raise DomainError("log1mexp requires a negative argument")
    if u > -0.6931471805599453:
        return math.log(-math.expm1(u))
    return math.log1p(-math.exp(u))


def d_minus(x: float, sigma: float) -> float:
    """The lower Black-Scholes argument -x/sigma - sigma/2."""
    if sigma <= 0.0 or not math.isfinite(sigma):
        raise DomainError(f"d_minus requires sigma > 0, got {sigma}")
    return -x / sigma - 0.5 * sigma


@dataclass(frozen=True)
class NormalizedPutPrice:
    """A normalized put price with log channels carried alongside.

    The log channels matter: on deep wings the price itself underflows
    float64, and for x > 0 with small vol the time value drowns under the
    intrinsic part at float precision.  ``log_p`` is log of the price,
    ``log_time_value`` log of (p - intrinsic); both stay informative where
    the linear fields go numb, and the implied-vol solver works on them.
    """

    p: float
    log_p: float | None = None
    log_time_value: float | None = None

    def __post_init__(self) -> None:
        if math.isnan(self.p) or self.p < 0.0:
            raise DomainError(f"put price must be >= 0, got {self.p}")
        if self.log_p is None:
            lp = math.log(self.p) if self.p > 0.0 else -math.inf
            object.__setattr__(self, "log_p", lp)


def _log_put(x: float, sigma: float) -> float:
    d = -x / sigma - 0.5 * sigma
    la = x + log_norm_cdf(-d)
    if d >= 8.0:
        # lb - la reduces exactly to a ratio of Mills terms: the x-sized
        # quadratic pieces cancel symbolically, which the naive difference
        # of two ~|x| logs cannot do at extreme moneyness.
        gap = log_mills_ratio(d + sigma) - log_mills_ratio(d)
        return la + _log1mexp(min(gap, -1e-300))
    lb = log_norm_cdf(-d - sigma)
    return la + _log1mexp(lb - la)


def _log_call(x: float, sigma: float) -> float:
    d = -x / sigma - 0.5 * sigma
    la = log_norm_cdf(d + sigma)
    if -d - sigma >= 8.0:
        gap = log_mills_ratio(-d) - log_mills_ratio(-d - sigma)
        return la + _log1mexp(min(gap, -1e-300))
    lb = x + log_norm_cdf(d)
    return la + _log1mexp(min(lb - la, -1e-300))


def put_price(x: float, sigma: float) -> NormalizedPutPrice:
    """Normalized Black-Scholes put.  ``sigma = 0`` returns the intrinsic
    value and ``sigma = inf`` the cap e^x."""
    if not math.isfinite(x):
        raise DomainError(f"put_price requires finite x, got {x}")
    if math.isnan(sigma) or sigma < 0.0:
        raise DomainError(f"put_price requires sigma >= 0, got {sigma}")
    if sigma == 0.0:
        intrinsic = max(math.expm1(x), 0.0)
        lp = math.log(intrinsic) if intrinsic > 0.0 else -math.inf
        return NormalizedPutPrice(intrinsic, lp, -math.inf)
    if math.isinf(sigma):
        return NormalizedPutPrice(math.exp(x), x, x)
    d = -x / sigma - 0.5 * sigma
    log_p = _log_put(x, sigma)
    if d <= 30.0:
        p = math.exp(x) * norm_cdf(-d) - norm_cdf(-d - sigma)
        p = max(p, 0.0)
    else:
        p = math.exp(log_p) if log_p > -745.0 else 0.0
    # Time value of a put at x >= 0 equals the call price, which has its own
    # stable log form; for x < 0 the whole price is time value.
    log_tv = _log_call(x, sigma) if x > 0.0 else log_p
    return NormalizedPutPrice(p, log_p, log_tv)


def call_price(x: float, sigma: float) -> float:
    """Normalized Black-Scholes call Phi(d + sigma) - e^x Phi(d)."""
    if not math.isfinite(x):
        raise DomainError(f"call_price requires finite x, got {x}")
    if math.isnan(sigma) or sigma < 0.0:
        raise DomainError(f"call_price requires sigma >= 0, got {sigma}")
    if sigma == 0.0:
        return max(-math.expm1(x), 0.0)
    if math.isinf(sigma):
        return 1.0
    d = -x / sigma - 0.5 * sigma
    # e^x Phi(d) through logs: at large x the factors overflow/underflow in
    # opposite directions while the product stays tiny.
    arg = x + log_norm_cdf(d)
    sub = math.exp(arg) if arg > -745.0 else 0.0
    return max(norm_cdf(d + sigma) - sub, 0.0)


def vega(x: float, sigma: float) -> float:
    """dP/dsigma = e^x phi(d) = phi(d + sigma); identical for put and call."""
    d = d_minus(x, sigma)
    return math.exp(x) * norm_pdf(d)


def _log_vega(x: float, sigma: float) -> float:
    d = -x / sigma - 0.5 * sigma
    return x - 0.5 * d * d - _LOG_SQRT_2PI


def implied_vol(x: float, price: float | NormalizedPutPrice) -> float:
    """Invert the normalized put price to a volatility.

    Accepts either a plain price or a :class:`NormalizedPutPrice`; the latter
    keeps deep-wing quotes invertible after the linear price underflows.
    Raises :class:`PriceBelowIntrinsic` / :class:`PriceAtOrAboveCap` outside
    the attainable band, and returns 0.0 exactly at intrinsic.
    """
    if not math.isfinite(x):
        raise DomainError(f"implied_vol requires finite x, got {x}")
    log_tv: float | None = None
    if isinstance(price, NormalizedPutPrice):
        p, log_p = price.p, float(price.log_p)
        if price.log_time_value is not None:
            log_tv = float(price.log_time_value)
    else:
        p = float(price)
        if math.isnan(p):
            raise DomainError("price is NaN")
        log_p = math.log(p) if p > 0.0 else -math.inf
    intrinsic = max(math.expm1(x), 0.0)
    # A couple of ulps of slack: a linear price within rounding distance of
    # intrinsic is at intrinsic (the time value lives far below resolution),
    # not below it.
    if p < intrinsic - 4e-16 * intrinsic - 5e-324:
        raise PriceBelowIntrinsic(
            f"price {p} below intrinsic {intrinsic} at x = {x}")
    if log_p >= x:
        raise PriceAtOrAboveCap(f"price {p} at or above cap e^{x}")
    if x > 0.0:
        if log_tv is None:
            tv = p - intrinsic
            log_tv = math.log(tv) if tv > 0.0 else -math.inf
        if log_tv == -math.inf:
            return 0.0
        target = log_tv
        objective = _log_call
    else:
        if p == intrinsic and log_p == -math.inf:
            return 0.0
        target = log_p
        objective = _log_put

    def g(sigma: float) -> float:
        return objective(x, sigma) - target

    hi = 1.0
    for _ in range(500):
        if g(hi) >= 0.0:
            break
        hi *= 2.0
    lo = hi
    for _ in range(4000):
        nxt = 0.5 * lo
        if g(nxt) <= 0.0:
            lo = nxt
            break
        lo = nxt
    if lo == hi:
        lo = 0.5 * hi

    tol_g = 4e-16 * max(1.0, abs(target))
    sigma = 0.5 * (lo + hi)
    for _ in range(200):
        gs = g(sigma)
        if abs(gs) <= tol_g:
            return sigma
        if gs > 0.0:
            hi = sigma
        else:
            lo = sigma
        slope = math.exp(_log_vega(x, sigma) - (gs + target))
        nxt = sigma - gs / slope if slope > 0.0 else 0.5 * (lo + hi)
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - sigma) <= 1e-16 * sigma:
            return nxt
        sigma = nxt
    raise MaxIterations("implied_vol did not converge", best=sigma)


@dataclass(frozen=True, eq=False)
class SmileCurve:
    """An implied-volatility curve on all of R.

    ``x``/``vol`` give the grid; between knots the curve follows the chosen
    interpolation, beyond the last knot it is clamped flat, and beyond the
    first knot it is either clamped or continued with the tail-index wing

        d(x)^2 = 2 q log|x| + c,    I(x) = sqrt(d(x)^2 + 2|x|) - d(x),

    with c anchored so the continuation is exactly continuous at the
    boundary knot.  ``certified_q`` records a moment order the generating
    model guarantees (None when unknown).
    """

    x: NDArray[np.float64]
    vol: NDArray[np.float64]
    interpolation: Literal["monotone-cubic", "linear"] = "monotone-cubic"
    left_wing: Literal["clamp", "corollary_expansion"] = "clamp"
    left_wing_q: float | None = None
    right_wing: Literal["clamp"] = "clamp"
    certified_q: float | None = None

    def __post_init__(self) -> None:
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        vol = np.atleast_1d(np.asarray(self.vol, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "vol", vol)
        if x.ndim != 1 or vol.ndim != 1 or x.shape != vol.shape or x.size == 0:
            raise DomainError("x and vol must be 1-d arrays of equal nonzero length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(vol))):
            raise DomainError("smile grid must be finite")
        if np.any(np.diff(x) <= 0.0):
            raise DomainError("x grid must be strictly increasing")
        if np.any(vol <= 0.0):
            raise NonPositiveVol("implied vols must be strictly positive")
        if self.interpolation not in ("monotone-cubic", "linear"):
            raise DomainError(f"unknown interpolation {self.interpolation!r}")
        if self.right_wing != "clamp":
            raise DomainError(f"unknown right wing {self.right_wing!r}")
        if self.left_wing == "corollary_expansion":
            if self.left_wing_q is None or self.left_wing_q < 0.0:
                raise DomainError("corollary_expansion needs left_wing_q >= 0")
            if x[0] >= -1.0:
                raise DomainError(
                    "corollary_expansion needs the boundary knot at x < -1")
        elif self.left_wing != "clamp":
            raise DomainError(f"unknown left wing {self.left_wing!r}")
        if self.certified_q is not None and (
                math.isnan(self.certified_q) or self.certified_q < 0.0):
            raise DomainError("certified_q must be >= 0 when given")

    @classmethod
    def flat(cls, sigma: float, lo: float = -20.0, hi: float = 5.0,
             n: int = 11, **kwargs) -> "SmileCurve":
        xs = np.linspace(lo, hi, n)
        return cls(xs, np.full_like(xs, float(sigma)), **kwargs)

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]], **kwargs) -> "SmileCurve":
        pts = sorted(points)
        xs = np.array([p[0] for p in pts], dtype=float)
        vols = np.array([p[1] for p in pts], dtype=float)
        return cls(xs, vols, **kwargs)

    @property
    def grid(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.x.tolist(), self.vol.tolist()))

    @cached_property
    def _pchip(self) -> PchipInterpolator | None:
        if self.x.size < 2 or self.interpolation != "monotone-cubic":
            return None
        return PchipInterpolator(self.x, self.vol, extrapolate=False)

    @cached_property
    def _pchip_deriv(self):
        return None if self._pchip is None else self._pchip.derivative()

    @cached_property
    def _wing_anchor(self) -> tuple[float, float]:
        # (d0, c) for the corollary wing, anchored at the left boundary knot.
        x0 = float(self.x[0])
        v0 = float(self.vol[0])
        d0 = -x0 / v0 - 0.5 * v0
        c = d0 * d0 - 2.0 * self.left_wing_q * math.log(-x0)
        return d0, c

    def _interior(self, xs: np.ndarray) -> np.ndarray:
        if self.x.size == 1:
            return np.full_like(xs, self.vol[0])
        if self._pchip is not None:
            return self._pchip(xs)
        return np.interp(xs, self.x, self.vol)

    def _interior_deriv(self, xs: np.ndarray) -> np.ndarray:
        if self.x.size == 1:
            return np.zeros_like(xs)
        if self._pchip_deriv is not None:
            return self._pchip_deriv(xs)
        idx = np.clip(np.searchsorted(self.x, xs, side="right") - 1, 0, self.x.size - 2)
        slopes = np.diff(self.vol) / np.diff(self.x)
        return slopes[idx]

    def _left_wing_vals(self, xs: np.ndarray, want_deriv: bool) -> np.ndarray:
        if self.left_wing == "clamp":
            fill = 0.0 if want_deriv else self.vol[0]
            return np.full_like(xs, fill)
        q = float(self.left_wing_q)
        _, c = self._wing_anchor
        lg = np.log(-xs)
        a = np.sqrt(2.0 * q * lg + c)
        b = np.sqrt(a * a - 2.0 * xs)
        if not want_deriv:
            return b - a
        with np.errstate(divide="ignore"):
            da = np.where(a > 0.0, q / (xs * a), 0.0)
        db = (q / xs - 1.0) / b
        return db - da

    def _eval(self, at, want_deriv: bool):
        arr = np.asarray(at, dtype=float)
        scalar = arr.ndim == 0
        xs = np.atleast_1d(arr)
        out = np.empty_like(xs)
        left = xs < self.x[0]
        right = xs > self.x[-1]
        mid = ~(left | right)
        if np.any(mid):
            out[mid] = (self._interior_deriv(xs[mid]) if want_deriv
                        else self._interior(xs[mid]))
        if np.any(right):
            out[right] = 0.0 if want_deriv else self.vol[-1]
        if np.any(left):
            out[left] = self._left_wing_vals(xs[left], want_deriv)
        return float(out[0]) if scalar else out

    def __call__(self, at):
        return self._eval(at, want_deriv=False)

    def derivative(self, at):
        """dI/dx, from the interpolant inside the grid and the wing form
        outside (0 on clamped sides)."""
        return self._eval(at, want_deriv=True)


def f_transform(x, smile: SmileCurve):
    """The monotone change of variable f(x) = x/I(x) + I(x)/2 = -d_minus."""
    iv = smile(x)
    return x / iv + 0.5 * iv
