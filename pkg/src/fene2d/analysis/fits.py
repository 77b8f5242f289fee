"""Least-squares decay-exponent fits on time series."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float
    curvature: float
    n: int

    @property
    def exponent(self) -> float:
        return self.slope

    @property
    def rate(self) -> float:
        return -self.slope


def _window(t, v, window):
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    t0, t1 = window
    if not (t1 > t0 >= 0):
        raise ValueError(f"fit window must satisfy t1 > t0 >= 0, got {window}")
    sel = (t >= t0) & (t <= t1)
    if np.count_nonzero(sel) < 3:
        raise ValueError(f"fewer than 3 samples in window {window}")
    t, v = t[sel], v[sel]
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise ValueError("fit needs strictly positive finite values in the window")
    return t, v


def _linfit(x, y) -> FitResult:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    curvature = float(np.polyfit(x, y, 2)[0]) if x.size >= 4 else 0.0
    return FitResult(float(slope), float(intercept), r2, curvature, int(x.size))


def decay_fit(t, values, window) -> FitResult:
    """Slope of log(value) against log(1 + t) over ``window``."""
    t, v = _window(t, values, window)
    return _linfit(np.log1p(t), np.log(v))


def exp_fit(t, values, window) -> FitResult:
    """Slope of log(value) against t; ``result.rate`` is the decay rate."""
    t, v = _window(t, values, window)
    return _linfit(t, np.log(v))
