"""Lattice parameters and the transform-domain symbol of the square lattice."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LatticeParams",
    "SpectralPoint",
    "omega0",
    "c_star",
    "c_short",
    "dispersion_omega",
    "symbol_b",
    "symbol_b2m1_longwave",
]

# slack for wavenumbers computed as pi / L in floating point
_ZONE_RTOL = 1e-12


@dataclass(frozen=True)
class LatticeParams:
    """Mass M, spring stiffness k, spacing L and step-load amplitude Q0."""

    mass: float = 1.0
    stiffness: float = 1.0
    spacing: float = 1.0
    load: float = 1.0

    def __post_init__(self):
        for name in ("mass", "stiffness", "spacing"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if not math.isfinite(self.load):
            raise ValueError(f"load must be finite, got {self.load!r}")

    @property
    def omega0(self) -> float:
        return math.sqrt(self.stiffness / self.mass)

    @property
    def c_star(self) -> float:
        """Speed of infinitely long waves, L * omega0."""
        return self.spacing * self.omega0

    @property
    def c_short(self) -> float:
        """Phase speed of the diagonal short-wave mode qx = qy = pi/L."""
        return 2.0 / math.pi * self.omega0 * self.spacing

    @property
    def impedance(self) -> float:
        """sqrt(k M), the denominator of the velocity prefactors."""
        return math.sqrt(self.stiffness * self.mass)


@dataclass(frozen=True)
class SpectralPoint:
    """Laplace parameter p (treated as real) and Fourier wavenumbers qx, qy."""

    p: float = 0.0
    qx: float = 0.0
    qy: float = 0.0


def omega0(params: LatticeParams) -> float:
    return params.omega0


def c_star(params: LatticeParams) -> float:
    return params.c_star


def c_short(params: LatticeParams) -> float:
    return params.c_short


def _check_zone(params: LatticeParams, *qs) -> None:
    limit = math.pi / params.spacing * (1.0 + _ZONE_RTOL)
    for q in qs:
        if np.any(np.abs(np.asarray(q, dtype=float)) > limit):
            raise ValueError(f"wavenumber outside the first Brillouin zone |q| <= pi/L: {q!r}")


def dispersion_omega(params: LatticeParams, qx, qy):
    """Lattice frequency 2 w0 sqrt(sin^2(qx L/2) + sin^2(qy L/2)).

    Accepts scalars or arrays; rejects wavenumbers outside |q L| <= pi.
    """
    _check_zone(params, qx, qy)
    half = 0.5 * params.spacing
    sx = np.sin(np.asarray(qx, dtype=float) * half)
    sy = np.sin(np.asarray(qy, dtype=float) * half)
    out = 2.0 * params.omega0 * np.sqrt(sx * sx + sy * sy)
    return float(out) if out.ndim == 0 else out


def symbol_b(params: LatticeParams, pt: SpectralPoint) -> float:
    """B = M p^2 / 2k + 2 - cos(qx L); qy does not enter."""
    _check_zone(params, pt.qx, pt.qy)
    return params.mass * pt.p**2 / (2.0 * params.stiffness) + 2.0 - math.cos(pt.qx * params.spacing)


def symbol_b2m1_longwave(params: LatticeParams, pt: SpectralPoint) -> float:
    """Long-wave form of B^2 - 1: 4 (p^2/4w0^2 + s^2)(1 + s^2), s = sin(qx L/2)."""
    _check_zone(params, pt.qx, pt.qy)
    s2 = math.sin(0.5 * pt.qx * params.spacing) ** 2
    return 4.0 * (pt.p**2 / (4.0 * params.omega0**2) + s2) * (1.0 + s2)
