"""Large-time closed forms for the axis row n = 0 under a step point load.

Five formulas are provided:

* ``displacement_log``: logarithmic growth behind the front, ``u ~ ln(z + sqrt(z^2-1))``
  with ``z = w0 t/|m|``, and the ``ln(4 sqrt(2) w0 t) + gamma`` law at the source;
* ``velocity_bessel`` / ``acceleration_bessel``: the J_m^2 form and its time derivative;
* ``velocity_airy`` / ``acceleration_airy``: the quasi-front form in the similarity
  variable ``kappa = (m - w0 t) / (w0 t)^(1/3)``.

Everything depends on |m| only. Negative orders use J_{-m} = (-1)^m J_m, so the
squared and product forms are even in m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .model import LatticeParams
from .specfun import airy_ai, airy_ai_prime, bessel_j

__all__ = [
    "EULER_GAMMA",
    "Formula",
    "AsymptoticEval",
    "displacement_log",
    "velocity_bessel",
    "acceleration_bessel",
    "velocity_airy",
    "acceleration_airy",
    "kappa",
    "evaluate",
    "snapshot",
    "envelope_max",
]

EULER_GAMMA = 0.57721566490153286061
_CBRT2 = 2.0 ** (1.0 / 3.0)


class Formula(str, Enum):
    DISPLACEMENT_LOG = "displacement_log"
    VELOCITY_BESSEL = "velocity_bessel"
    ACCELERATION_BESSEL = "acceleration_bessel"
    VELOCITY_AIRY = "velocity_airy"
    ACCELERATION_AIRY = "acceleration_airy"


@dataclass(frozen=True)
class AsymptoticEval:
    m: int
    t: float
    formula: Formula
    value: float


def _scalar_or_array(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _check_t(t, strict: bool) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if strict and np.any(t <= 0):
        raise ValueError("t must be > 0 for the quasi-front forms")
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    return t


def kappa(params: LatticeParams, m, t):
    """Similarity variable (m - w0 t) / (w0 t)^(1/3) for t > 0."""
    wt = params.omega0 * _check_t(t, strict=True)
    return _scalar_or_array((np.abs(np.asarray(m, dtype=float)) - wt) / np.cbrt(wt))


def displacement_log(params: LatticeParams, m, t):
    """Displacement of node (m, 0) for large t.

    Off the source the value is exactly zero ahead of the front ``w0 t < |m|``.
    At the source the formula is singular at t = 0, which is rejected.
    """
    m = np.abs(np.asarray(m))
    t = _check_t(t, strict=False)
    m, t = np.broadcast_arrays(m, t)
    scale = params.load / (2.0 * math.pi * params.stiffness)
    out = np.zeros(m.shape)

    src = m == 0
    if np.any(src):
        ts = t[src]
        if np.any(ts <= 0):
            raise ValueError("the source-node law needs t > 0")
        out[src] = scale * (np.log(4.0 * math.sqrt(2.0) * params.omega0 * ts) + EULER_GAMMA)
    off = ~src
    if np.any(off):
        z = params.omega0 * t[off] / m[off]
        behind = z > 1.0
        vals = np.zeros(z.shape)
        zb = z[behind]
        vals[behind] = scale * np.log(zb + np.sqrt(zb * zb - 1.0))
        out[off] = vals
    return _scalar_or_array(out)


def _jm(m, x):
    return bessel_j(np.abs(np.asarray(m)), x)


def velocity_bessel(params: LatticeParams, m, t):
    """Q0 / (2 sqrt(kM)) * J_m(w0 t)^2."""
    x = params.omega0 * _check_t(t, strict=False)
    j = _jm(m, x)
    return _scalar_or_array(params.load / (2.0 * params.impedance) * np.asarray(j) ** 2)


def acceleration_bessel(params: LatticeParams, m, t):
    """Q0 / (2M) * J_m(w0 t) * (J_{m-1}(w0 t) - J_{m+1}(w0 t))."""
    x = params.omega0 * _check_t(t, strict=False)
    m = np.abs(np.asarray(m))
    jm = np.asarray(bessel_j(m, x))
    jp = np.asarray(bessel_j(m + 1, x))
    # J_{-1} = -J_1
    jl = np.where(m == 0, -jp, np.asarray(bessel_j(np.maximum(m - 1, 0), x)))
    return _scalar_or_array(params.load / (2.0 * params.mass) * jm * (jl - jp))


def velocity_airy(params: LatticeParams, m, t):
    """Q0 / (2^(1/3) sqrt(kM)) * (Ai(2^(1/3) kappa) / (w0 t)^(1/3))^2.

    ``m`` may be fractional here, which the envelope search uses.
    """
    k = np.asarray(kappa(params, m, t))
    wt = params.omega0 * np.asarray(t, dtype=float)
    ai = np.asarray(airy_ai(_CBRT2 * k))
    return _scalar_or_array(params.load / (_CBRT2 * params.impedance) * (ai / np.cbrt(wt)) ** 2)


def acceleration_airy(params: LatticeParams, m, t):
    """-2 Q0 Ai(2^(1/3) kappa) Ai'(2^(1/3) kappa) / (t sqrt(kM))."""
    k = np.asarray(kappa(params, m, t))
    t = np.asarray(t, dtype=float)
    arg = _CBRT2 * k
    ai = np.asarray(airy_ai(arg))
    aip = np.asarray(airy_ai_prime(arg))
    return _scalar_or_array(-2.0 * params.load * ai * aip / (t * params.impedance))


_DISPATCH = {
    Formula.DISPLACEMENT_LOG: displacement_log,
    Formula.VELOCITY_BESSEL: velocity_bessel,
    Formula.ACCELERATION_BESSEL: acceleration_bessel,
    Formula.VELOCITY_AIRY: velocity_airy,
    Formula.ACCELERATION_AIRY: acceleration_airy,
}


def evaluate(params: LatticeParams, formula: Formula | str, m, t):
    """Dispatch on a formula tag; arguments broadcast as in the individual functions."""
    return _DISPATCH[Formula(formula)](params, m, t)


def snapshot(params: LatticeParams, formula: Formula | str, m_range: tuple[int, int], t: float) -> list[AsymptoticEval]:
    """Spatial profile over the inclusive node range ``m_range`` at time t."""
    lo, hi = m_range
    if hi < lo:
        raise ValueError(f"empty m range {m_range!r}")
    formula = Formula(formula)
    ms = np.arange(lo, hi + 1)
    values = np.atleast_1d(evaluate(params, formula, ms, float(t)))
    return [AsymptoticEval(int(m), float(t), formula, float(v)) for m, v in zip(ms, values)]


def envelope_max(
    params: LatticeParams,
    formula: Formula | str,
    t: float,
    kappa_window: tuple[float, float] = (-10.0, 6.0),
) -> tuple[float, float]:
    """Maximum of |value| over continuous m with kappa in ``kappa_window``.

    Returns ``(m_at_max, max_abs_value)``. Only the quasi-front forms are
    self-similar in kappa, so only those are accepted.
    """
    formula = Formula(formula)
    if formula not in (Formula.VELOCITY_AIRY, Formula.ACCELERATION_AIRY):
        raise ValueError("envelope_max applies to the quasi-front forms only")
    wt = params.omega0 * t
    scale = np.cbrt(wt)
    ks = np.linspace(kappa_window[0], kappa_window[1], 4001)
    ms = wt + ks * scale
    vals = np.abs(evaluate(params, formula, ms, t))
    i = int(np.argmax(vals))
    lo = ms[max(i - 1, 0)]
    hi = ms[min(i + 1, len(ms) - 1)]
    res = minimize_scalar(
        lambda m: -abs(float(evaluate(params, formula, m, t))),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-10 * max(1.0, scale)},
    )
    best_m, best = (float(res.x), -float(res.fun)) if -res.fun >= vals[i] else (float(ms[i]), float(vals[i]))
    return best_m, best
