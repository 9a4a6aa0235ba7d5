"""Integer-order Bessel functions of the first kind and the Airy function Ai.

Bessel values come from Miller's backward recurrence normalized with
``J_0 + 2 * sum(J_2k) = 1``; arguments below 1e-5 use two power-series
terms instead. Ai and Ai' use the Maclaurin pair of series
near the origin and the standard asymptotic expansions in the variable
``zeta = (2/3) |x|**1.5`` in both tails.

All public functions accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BesselRow",
    "bessel_j",
    "bessel_j_row",
    "airy_ai",
    "airy_ai_prime",
]

# Recurrence values are rescaled once they exceed this magnitude.
_BIG = 1e250
_TINY_NORMAL = np.finfo(float).tiny

# Ai(0) and -Ai'(0).
_AI0 = 0.355028053887817239260
_AIP0 = 0.258819403792806798405

# Below this argument two power-series terms are exact to double precision
# and 2/x would overflow for subnormal x.
_SMALL_X = 1e-5

# Series/asymptotic crossovers, placed where both sides agree to ~1e-12 so the
# seam is invisible even to second differences. The oscillatory expansion
# needs a larger |x| than the decaying one.
_SERIES_MAX_POS = 5.5
_SERIES_MAX_NEG = 7.0


def _start_order(n_max: int, x_max: float) -> int:
    top = max(n_max, math.ceil(x_max))
    return top + math.ceil(math.sqrt(40.0 * top)) + 40


def _miller_rows(n_max: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (rows, underflow) with rows[k, i] = J_k(x[i]) for k <= n_max.

    ``x`` must be 1-D, finite and non-negative.
    """
    rows = np.zeros((n_max + 1, x.size))
    underflow = np.zeros((n_max + 1, x.size), dtype=bool)
    if x.size == 0:
        return rows, underflow

    zero = x == 0.0
    rows[0, zero] = 1.0
    small = (x > 0.0) & (x < _SMALL_X)
    if small.any():
        rows[:, small], underflow[:, small] = _small_x_rows(n_max, x[small])
    regular = x >= _SMALL_X
    xs = x[regular]
    if xs.size == 0:
        return rows, underflow

    start = _start_order(n_max, float(xs.max()))
    two_over_x = 2.0 / xs
    # log10 of the scale by which each column of stored values is too small.
    stored = np.zeros((n_max + 1, xs.size))
    log_scale = np.zeros((n_max + 1, xs.size))
    running_log = np.zeros(xs.size)

    j_next = np.zeros(xs.size)
    j_curr = np.full(xs.size, 1e-300)
    norm = np.zeros(xs.size)
    for k in range(start, 0, -1):
        # j_curr holds J_k (unnormalized)
        if k <= n_max:
            stored[k] = j_curr
            log_scale[k] = running_log
        if k % 2 == 0:
            norm += 2.0 * j_curr
        j_prev = k * two_over_x * j_curr - j_next
        j_next, j_curr = j_curr, j_prev
        big = np.abs(j_curr) > _BIG
        if big.any():
            j_curr[big] /= _BIG
            j_next[big] /= _BIG
            norm[big] /= _BIG
            running_log[big] += math.log10(_BIG)
    # j_curr is now J_0
    stored[0] = j_curr
    log_scale[0] = running_log
    norm += j_curr

    # stored[k] carries scale 10**-(running_log - log_scale[k]) relative to norm
    rel = log_scale - running_log
    with np.errstate(under="ignore"):
        factor = np.where(rel < -320.0, 0.0, 10.0 ** np.maximum(rel, -320.0))
        vals = stored * factor / norm
    tiny = (np.abs(vals) < _TINY_NORMAL)
    vals[tiny] = 0.0
    # exact zeros only arise from underflow for x > 0
    rows[:, regular] = vals
    underflow[:, regular] = tiny
    return rows, underflow


def _small_x_rows(n_max: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # J_n(x) = (x/2)^n / n! * (1 - (x/2)^2 / (n+1)), evaluated in logs
    n = np.arange(n_max + 1)[:, None]
    half = 0.5 * x[None, :]
    lgam = np.array([math.lgamma(k + 1.0) for k in range(n_max + 1)])[:, None]
    # log(x) - log(2) stays finite even where x/2 underflows
    log_lead = n * (np.log(x[None, :]) - math.log(2.0)) - lgam
    with np.errstate(under="ignore"):
        vals = np.exp(log_lead) * (1.0 - half * half / (n + 1))
    tiny = np.abs(vals) < _TINY_NORMAL
    vals[tiny] = 0.0
    return vals, tiny


@dataclass(frozen=True)
class BesselRow:
    """J_0(x) .. J_N(x) at one argument."""

    x: float
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> float:
        return float(self.values[n])

    def normalization(self) -> float:
        """J_0^2 + 2 * sum J_n^2; equals 1 when the row is long enough."""
        v = self.values
        return float(v[0] ** 2 + 2.0 * np.sum(v[1:] ** 2))


def _check_x(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Bessel argument must be finite")
    if np.any(arr < 0):
        raise ValueError("Bessel argument must be non-negative")
    return arr


def bessel_j_row(n_max: int, x: float) -> BesselRow:
    """All orders 0..n_max of J_n at a single argument."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    xa = _check_x(x)
    if xa.ndim != 0:
        raise ValueError("bessel_j_row takes a scalar argument")
    rows, _ = _miller_rows(int(n_max), xa.reshape(1))
    return BesselRow(float(xa), rows[:, 0].copy())


def bessel_j(n, x, *, full_output: bool = False):
    """Bessel function of the first kind, J_n(x), for integer n >= 0 and x >= 0.

    ``n`` and ``x`` broadcast against each other. With ``full_output=True``
    the result is ``(value, underflow)`` where ``underflow`` marks entries
    that fell below the smallest normal double and were returned as 0.
    """
    n_arr = np.asarray(n)
    if n_arr.dtype.kind not in "iu":
        if not np.all(np.asarray(n_arr, dtype=float) == np.round(n_arr)):
            raise ValueError("Bessel order must be an integer")
        n_arr = n_arr.astype(np.int64)
    if np.any(n_arr < 0):
        raise ValueError("order must be >= 0; use J_{-n} = (-1)^n J_n")
    x_arr = _check_x(x)
    n_b, x_b = np.broadcast_arrays(n_arr, x_arr)

    flat_x = x_b.ravel()
    uniq, inverse = np.unique(flat_x, return_inverse=True)
    n_max = int(n_b.max()) if n_b.size else 0
    rows, under = _miller_rows(n_max, uniq)
    flat_n = n_b.ravel()
    vals = rows[flat_n, inverse].reshape(x_b.shape)
    flags = under[flat_n, inverse].reshape(x_b.shape)
    if vals.ndim == 0:
        vals, flags = float(vals), bool(flags)
    if full_output:
        return vals, flags
    return vals


# ---------------------------------------------------------------------------
# Airy


def _maclaurin(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Ai = c1 f - c2 g with f = sum a_k x^{3k}, g = sum b_k x^{3k+1}
    x2 = x * x
    x3 = x2 * x
    tf = np.ones_like(x)
    tg = x.copy()
    f, g = tf.copy(), tg.copy()
    fp = np.zeros_like(x)
    gp = np.ones_like(x)
    for k in range(1, 200):
        # derivative terms reuse the previous series term
        dfp = tf * x2 / (3 * k - 1)
        dgp = tg * x2 / (3 * k)
        tf = tf * x3 / ((3 * k - 1) * (3 * k))
        tg = tg * x3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        fp += dfp
        gp += dgp
        largest = max(np.max(np.abs(tf)), np.max(np.abs(tg)), np.max(np.abs(dfp)), np.max(np.abs(dgp)))
        if largest < 1e-18:
            break
    ai = _AI0 * f - _AIP0 * g
    aip = _AI0 * fp - _AIP0 * gp
    return ai, aip


def _asymptotic_coeffs(count: int) -> tuple[np.ndarray, np.ndarray]:
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    u = np.array(u)
    v = np.array([-(6 * k + 1) / (6 * k - 1) * u[k] if k else 1.0 for k in range(count)])
    return u, v


_U, _V = _asymptotic_coeffs(40)


def _truncated(coeffs: np.ndarray, inv_zeta: np.ndarray, signs: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """Sum signs[k]*coeffs[k]*inv_zeta**k over the selected k, stopping at the smallest term."""
    total = np.zeros_like(inv_zeta)
    prev = np.full_like(inv_zeta, np.inf)
    active = np.ones(inv_zeta.shape, dtype=bool)
    power = np.ones_like(inv_zeta)
    last_k = 0
    for k in ks:
        power = power * inv_zeta ** (k - last_k)
        last_k = k
        term = signs[k] * coeffs[k] * power
        mag = np.abs(term)
        active &= mag < prev
        total = total + np.where(active, term, 0.0)
        prev = np.where(active, mag, prev)
        if not active.any():
            break
    return total


def _asymptotic_pos(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    zeta = 2.0 / 3.0 * x ** 1.5
    inv = 1.0 / zeta
    ks = np.arange(len(_U))
    signs = (-1.0) ** ks
    su = _truncated(_U, inv, signs, ks)
    sv = _truncated(_V, inv, signs, ks)
    pre = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = pre * x ** -0.25 * su
    aip = -pre * x ** 0.25 * sv
    return ai, aip


def _asymptotic_neg(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ax = -x
    zeta = 2.0 / 3.0 * ax ** 1.5
    inv = 1.0 / zeta
    ks = np.arange(len(_U))
    even, odd = ks[ks % 2 == 0], ks[ks % 2 == 1]
    signs = np.array([(-1.0) ** (k // 2) for k in ks])
    pu = _truncated(_U, inv, signs, even)
    qu = _truncated(_U, inv, signs, odd)
    pv = _truncated(_V, inv, signs, even)
    qv = _truncated(_V, inv, signs, odd)
    phase = zeta + math.pi / 4.0
    s, c = np.sin(phase), np.cos(phase)
    rp = 1.0 / math.sqrt(math.pi)
    ai = rp * ax ** -0.25 * (s * pu - c * qu)
    aip = -rp * ax ** 0.25 * (c * pv + s * qv)
    return ai, aip


def _airy_pair(x) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("Airy argument must be finite")
    flat = np.atleast_1d(xa).ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)

    series = (flat >= -_SERIES_MAX_NEG) & (flat <= _SERIES_MAX_POS)
    pos = flat > _SERIES_MAX_POS
    neg = flat < -_SERIES_MAX_NEG
    if series.any():
        ai[series], aip[series] = _maclaurin(flat[series])
    if pos.any():
        with np.errstate(under="ignore"):
            ai[pos], aip[pos] = _asymptotic_pos(flat[pos])
    if neg.any():
        ai[neg], aip[neg] = _asymptotic_neg(flat[neg])
    return ai.reshape(xa.shape), aip.reshape(xa.shape)


def airy_ai(x):
    """Airy function Ai(x) for finite real x."""
    ai, _ = _airy_pair(x)
    return float(ai) if ai.ndim == 0 else ai


def airy_ai_prime(x):
    """Derivative Ai'(x) for finite real x."""
    _, aip = _airy_pair(x)
    return float(aip) if aip.ndim == 0 else aip
