"""Post-processing: power-law fits, quasi-front width, short-wave arrival, series comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import LatticeParams

__all__ = [
    "FitReport",
    "FrontWidth",
    "SeriesComparison",
    "fit_power_law",
    "peak_amplitude_decay",
    "long_wave_window",
    "front_peak",
    "front_width",
    "shortwave_period",
    "predicted_shortwave_arrival",
    "shortwave_arrival",
    "compare_series",
]


@dataclass(frozen=True)
class FitReport:
    """Least-squares fit of log(y) = exponent * log(t) + intercept."""

    exponent: float
    intercept: float
    r_squared: float
    sample_range: tuple[float, float]
    n_points: int


@dataclass(frozen=True)
class FrontWidth:
    t: float
    width: float
    definition: str = "FIVE_PCT_AHEAD"


@dataclass(frozen=True)
class SeriesComparison:
    max_abs_diff: float
    rel_peak_diff: float


def fit_power_law(t, y) -> FitReport:
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("t and y must be 1-D arrays of equal length")
    if len(t) < 4:
        raise ValueError(f"need at least 4 samples, got {len(t)}")
    if np.any(t <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive t and y")
    lx, ly = np.log(t), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    return FitReport(float(slope), float(intercept), min(r2, 1.0), (float(t.min()), float(t.max())), len(t))


def peak_amplitude_decay(times, maxima, min_span: float = 8.0) -> FitReport:
    """Decay exponent of envelope maxima sampled at ``times``.

    The samples must span at least a factor ``min_span`` in time.
    """
    times = np.asarray(times, dtype=float)
    maxima = np.asarray(maxima, dtype=float)
    if np.any(maxima <= 0):
        raise ValueError("amplitude maxima must be positive")
    if len(times) >= 1 and times.min() > 0 and times.max() / times.min() < min_span * (1 - 1e-9):
        raise ValueError(f"sample times span less than a factor {min_span}")
    return fit_power_law(times, maxima)


def long_wave_window(
    params: LatticeParams,
    t: float,
    kappa_range: tuple[float, float] = (-10.0, 6.0),
) -> tuple[float, float]:
    """Axis range (node units) holding the long-wave quasi-front at time t.

    The range is kappa in ``kappa_range`` around m = w0 t. Its rear edge is
    also clipped at the short-wave front m = c t / (sqrt(2) L); behind that
    point the numerical field carries short-wave oscillations that are not
    part of the long-wave envelope.
    """
    wt = params.omega0 * t
    scale = wt ** (1.0 / 3.0)
    shortwave_front = params.c_short * t / (math.sqrt(2.0) * params.spacing)
    lo = max(wt + kappa_range[0] * scale, shortwave_front)
    return lo, wt + kappa_range[1] * scale


def front_peak(m, values, params: LatticeParams, t: float) -> tuple[float, float]:
    """(m, |value|) at the largest |value| inside the long-wave window."""
    m = np.asarray(m, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    lo, hi = long_wave_window(params, t)
    sel = (m >= lo) & (m <= hi)
    if not sel.any():
        raise ValueError(f"no samples inside the long-wave window [{lo:.3g}, {hi:.3g}]")
    i = int(np.argmax(np.where(sel, values, -np.inf)))
    return float(m[i]), float(values[i])


def front_width(m, values, *, t: float = math.nan, params: LatticeParams | None = None, threshold: float = 0.05) -> FrontWidth:
    """Distance from the peak of |values| to where it first drops below ``threshold`` * peak ahead of it.

    When ``params`` is given the search is restricted to the long-wave window
    at time ``t``, and the snapshot has to cover that window.
    """
    m = np.asarray(m, dtype=float)
    a = np.abs(np.asarray(values, dtype=float))
    if m.shape != a.shape or m.ndim != 1:
        raise ValueError("m and values must be 1-D arrays of equal length")
    if params is not None:
        lo, hi = long_wave_window(params, t)
        if m.min() > lo + 1 or m.max() < hi - 1:
            raise ValueError(f"snapshot [{m.min()}, {m.max()}] does not cover the front region [{lo:.1f}, {hi:.1f}]")
        sel = (m >= lo) & (m <= hi)
        m, a = m[sel], a[sel]
    if a.size == 0 or not np.any(a > 0):
        raise ValueError("snapshot has no nonzero samples")
    i = int(np.argmax(a))
    level = threshold * a[i]
    ahead = np.nonzero(a[i:] < level)[0]
    if ahead.size == 0:
        raise ValueError("snapshot too narrow: values never fall below threshold ahead of the peak")
    j = i + int(ahead[0])
    # linear interpolation between the last sample above and the first below
    frac = (a[j - 1] - level) / (a[j - 1] - a[j])
    edge = m[j - 1] + frac * (m[j] - m[j - 1])
    return FrontWidth(float(t), float(edge - m[i]))


def shortwave_period(params: LatticeParams) -> float:
    """Period of the highest lattice mode, 2 pi / (2 sqrt(2) w0)."""
    return 2.0 * math.pi / (2.0 * math.sqrt(2.0) * params.omega0)


def predicted_shortwave_arrival(params: LatticeParams, m: int) -> float:
    """Arrival time m sqrt(2) L / c of the short-wave oscillations at node (m, 0)."""
    return abs(m) * math.sqrt(2.0) * params.spacing / params.c_short


def _moving_average(x: np.ndarray, k: int) -> np.ndarray:
    return np.convolve(x, np.ones(k) / k, mode="same")


def shortwave_arrival(t, v, params: LatticeParams, *, trend_window: float = 10.0, tol: float = 0.2) -> float | None:
    """Earliest time after the main velocity peak when short waves dominate v(t).

    ``v`` is detrended by a centered moving average over ``trend_window / w0``
    and a running period is read off every pair of consecutive zero
    crossings. The long-wave ripple of v ~ J_m^2 always has a period longer
    than pi / w0, while lattice modes above frequency 2 w0 lie between the
    short-wave period 2 pi / (2 sqrt(2) w0) and pi / w0. The estimate locks
    when the running period enters that band (with ``tol`` slack below the
    short-wave period). Returns None when it never does, which is the
    expected outcome for the long-wave closed forms.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    if t.shape != v.shape or t.ndim != 1 or len(t) < 3:
        raise ValueError("t and v must be 1-D arrays of equal length")
    dt = float(t[1] - t[0])
    if not np.allclose(np.diff(t), dt, rtol=1e-6, atol=1e-12):
        raise ValueError("shortwave_arrival needs a uniform time grid")

    k = int(round(trend_window / params.omega0 / dt)) | 1
    if 3 * k > len(v):
        raise ValueError("series too short for the detrending window")
    d = v - _moving_average(v, k)
    edge = k // 2
    peak = int(np.argmax(np.abs(v)))

    sign = np.signbit(d)
    idx = np.nonzero(sign[:-1] != sign[1:])[0]
    idx = idx[(idx >= max(peak, edge)) & (idx < len(v) - edge - 1)]
    if idx.size < 3:
        return None
    crossings = t[idx] - d[idx] * dt / (d[idx + 1] - d[idx])
    periods = crossings[2:] - crossings[:-2]

    lower = (1.0 - tol) * shortwave_period(params)
    upper = math.pi / params.omega0
    hits = np.nonzero((periods >= lower) & (periods < upper))[0]
    if hits.size == 0:
        return None
    return float(crossings[hits[0]])


def _as_series(s) -> tuple[np.ndarray, np.ndarray]:
    t, y = s
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("series must be a pair of equal-length 1-D arrays")
    return t, y


def compare_series(a, b, window: tuple[float, float]) -> SeriesComparison:
    """Compare two (t, y) series over ``window`` on the union of their sample times.

    Both series are linearly interpolated onto that grid, so the result is
    symmetric in ``a`` and ``b``.
    """
    ta, ya = _as_series(a)
    tb, yb = _as_series(b)
    lo = max(window[0], ta.min(), tb.min())
    hi = min(window[1], ta.max(), tb.max())
    if not lo <= hi:
        raise ValueError(f"series do not overlap inside window {window!r}")
    grid = np.union1d(ta[(ta >= lo) & (ta <= hi)], tb[(tb >= lo) & (tb <= hi)])
    if grid.size == 0:
        grid = np.array([lo, hi])
    ra = np.interp(grid, ta, ya)
    rb = np.interp(grid, tb, yb)
    pa, pb = float(np.max(np.abs(ra))), float(np.max(np.abs(rb)))
    rel = 0.0 if max(pa, pb) == 0 else abs(pa - pb) / max(pa, pb)
    return SeriesComparison(float(np.max(np.abs(ra - rb))), rel)
