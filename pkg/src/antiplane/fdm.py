"""Explicit central-difference solver for the square mass-spring lattice.

The update for node (m, n) is

    u[r+1] = 2 u[r] - u[r-1] + (tau w0)^2 * lap(u[r]) + tau^2 (Q0/M) H_r delta_m0 delta_n0

with the five-point lattice Laplacian. For k = M = 1 this is the textbook
leapfrog scheme. The lattice starts at rest and the load switches on at
r = 0; ``H_0`` (``source_start``) defaults to 1/2, the trapezoidal value of
the step, which keeps the start-up error second order in tau.

The infinite lattice is truncated at half-width N with fixed (zero) ghost
nodes. Ahead of the quasi-front the long-wave field decays like Ai^2 of the
similarity variable, so N is the front position plus eight front widths
``(w0 t)^(1/3)`` plus ``halo_margin``; reflections from the ghost layer stay
far below double precision in the region of interest.

With ``symmetric=True`` (the default) only the quarter plane m, n >= 0 is
stored and the mirror images u[-1, n] = u[1, n] close the stencil. The
Laplacian is summed as (left + right) + (down + up) so the quarter-plane
field is bitwise symmetric under m <-> n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import LatticeParams

__all__ = [
    "CFL_LIMIT",
    "InstabilityError",
    "FdmConfig",
    "WaveField",
    "ProbeSeries",
    "RowSnapshot",
    "FdmResult",
    "EnergyBalance",
    "step",
    "run",
    "energy_balance",
]

# (tau w0)^2 * 8 <= 4 for the leapfrog stencil; configs stay a little inside.
CFL_LIMIT = 1.0 / math.sqrt(2.0)
CFL_ENFORCED = 0.7
FRONT_WIDTHS = 8.0
_BLOWUP = 1e12
_CHECK_EVERY = 16


class InstabilityError(RuntimeError):
    """The field grew past any physical amplitude (CFL violation or bad state)."""


def _as_probe(p) -> tuple[int, int]:
    m, n = p
    if int(m) != m or int(n) != n:
        raise ValueError(f"probe indices must be integers, got {p!r}")
    return int(m), int(n)


@dataclass(frozen=True)
class FdmConfig:
    params: LatticeParams = field(default_factory=LatticeParams)
    tau: float = 0.07
    t_end: float = 80.0
    probes: tuple[tuple[int, int], ...] = ()
    halo_margin: int = 8
    snapshot_times: tuple[float, ...] = ()
    symmetric: bool = True
    source_start: float = 0.5
    enforce_cfl: bool = True

    def __post_init__(self):
        object.__setattr__(self, "probes", tuple(_as_probe(p) for p in self.probes))
        object.__setattr__(self, "snapshot_times", tuple(float(t) for t in self.snapshot_times))
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if self.halo_margin < 0:
            raise ValueError("halo_margin must be >= 0")
        if self.enforce_cfl and self.courant > CFL_ENFORCED + 1e-12:
            raise ValueError(
                f"tau*w0 = {self.courant:.4g} exceeds {CFL_ENFORCED} "
                f"(stability limit 1/sqrt(2) = {CFL_LIMIT:.4f})"
            )
        for t in self.snapshot_times:
            if not 0 <= t <= self.t_end:
                raise ValueError(f"snapshot time {t} outside [0, t_end]")
        n = self.half_width
        for m_, n_ in self.probes:
            if abs(m_) > n or abs(n_) > n:
                raise ValueError(f"probe {(m_, n_)} outside the truncated domain |m|,|n| <= {n}")

    @property
    def courant(self) -> float:
        return self.tau * self.params.omega0

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_end / self.tau - 1e-9))

    @property
    def half_width(self) -> int:
        wt = self.params.omega0 * self.t_end
        return int(math.ceil(wt + FRONT_WIDTHS * wt ** (1.0 / 3.0))) + self.halo_margin


@dataclass
class WaveField:
    """Two time layers of the truncated lattice.

    Arrays carry one ghost layer of zeros. In symmetric mode index [i, j]
    is node (i, j); in full mode node (m, n) sits at [N+1+m, N+1+n].
    """

    u_prev: np.ndarray
    u_curr: np.ndarray
    r: int
    half_width: int
    symmetric: bool
    _work: tuple | None = field(default=None, repr=False, compare=False)

    @classmethod
    def at_rest(cls, cfg: FdmConfig) -> "WaveField":
        n = cfg.half_width
        shape = (n + 2, n + 2) if cfg.symmetric else (2 * n + 3, 2 * n + 3)
        return cls(np.zeros(shape), np.zeros(shape), 0, n, cfg.symmetric)

    def workspace(self) -> tuple[np.ndarray, np.ndarray]:
        if self._work is None:
            self._work = (np.empty_like(self.u_curr), np.empty_like(self.u_curr))
        return self._work

    @property
    def origin(self) -> int:
        return 0 if self.symmetric else self.half_width + 1

    def index(self, m: int, n: int) -> tuple[int, int]:
        if abs(m) > self.half_width or abs(n) > self.half_width:
            raise IndexError(f"node {(m, n)} outside |m|,|n| <= {self.half_width}")
        if self.symmetric:
            return abs(m), abs(n)
        return self.origin + m, self.origin + n

    def value(self, m: int, n: int, layer: str = "curr") -> float:
        arr = self.u_curr if layer == "curr" else self.u_prev
        return float(arr[self.index(m, n)])

    def full(self, layer: str = "curr") -> np.ndarray:
        """Field over [-N, N]^2 (no ghosts)."""
        arr = self.u_curr if layer == "curr" else self.u_prev
        n = self.half_width
        if not self.symmetric:
            return arr[1:-1, 1:-1].copy()
        q = arr[: n + 1, : n + 1]
        top = np.concatenate([q[:0:-1], q], axis=0)
        return np.concatenate([top[:, :0:-1], top], axis=1)

    def axis_row(self, layer: str = "curr") -> tuple[np.ndarray, np.ndarray]:
        """(m, u) along n = 0; m >= 0 in symmetric mode, otherwise -N..N."""
        arr = self.u_curr if layer == "curr" else self.u_prev
        n = self.half_width
        if self.symmetric:
            return np.arange(n + 1), arr[: n + 1, 0].copy()
        c = self.origin
        return np.arange(-n, n + 1), arr[1:-1, c].copy()


def _stencil_into(out, uc, up, lo, hi, coef, sym, work) -> None:
    """Write 2 uc - up + coef * lap(uc) into out[lo:hi, lo:hi]; ``out`` may alias ``up``."""
    k = hi - lo
    horiz = work[0][:k, :k]
    vert = work[1][:k, :k]
    c = uc[lo:hi, lo:hi]
    if sym:
        # lo == 0; mirror u[-1] = u[1]
        np.add(uc[0 : hi - 1, :hi], uc[2 : hi + 1, :hi], out=horiz[1:])
        np.add(uc[1, :hi], uc[1, :hi], out=horiz[0])
        np.add(uc[:hi, 0 : hi - 1], uc[:hi, 2 : hi + 1], out=vert[:, 1:])
        np.add(uc[:hi, 1], uc[:hi, 1], out=vert[:, 0])
    else:
        np.add(uc[lo - 1 : hi - 1, lo:hi], uc[lo + 1 : hi + 1, lo:hi], out=horiz)
        np.add(uc[lo:hi, lo - 1 : hi - 1], uc[lo:hi, lo + 1 : hi + 1], out=vert)
    np.add(horiz, vert, out=horiz)
    np.multiply(c, 4.0, out=vert)
    np.subtract(horiz, vert, out=horiz)
    np.multiply(horiz, coef, out=horiz)
    np.multiply(c, 2.0, out=vert)
    target = out[lo:hi, lo:hi]
    np.subtract(vert, up[lo:hi, lo:hi], out=target)
    np.add(target, horiz, out=target)


def _active_bounds(state: WaveField) -> tuple[int, int]:
    # layer r+1 is nonzero only within graph distance r+1 of the origin
    e = min(state.r + 1, state.half_width)
    if state.symmetric:
        return 0, e + 1
    c = state.origin
    return c - e, c + e + 1


def step(state: WaveField, cfg: FdmConfig) -> WaveField:
    """Advance ``state`` by one layer in place and return it."""
    lo, hi = _active_bounds(state)
    coef = cfg.courant**2
    new = state.u_prev
    _stencil_into(new, state.u_curr, state.u_prev, lo, hi, coef, state.symmetric, state.workspace())
    h = cfg.source_start if state.r == 0 else 1.0
    o = state.origin
    new[o, o] += cfg.tau**2 * cfg.params.load / cfg.params.mass * h

    state.u_prev, state.u_curr = state.u_curr, new
    state.r += 1
    if state.r % _CHECK_EVERY == 0 or state.r == cfg.n_steps:
        _check_bounded(state, cfg, lo, hi)
    return state


def _check_bounded(state: WaveField, cfg: FdmConfig, lo: int, hi: int) -> None:
    limit = _BLOWUP * abs(cfg.params.load) / cfg.params.stiffness
    if limit == 0:
        return
    peak = float(np.max(np.abs(state.u_curr[lo:hi, lo:hi])))
    if not peak <= limit:
        raise InstabilityError(
            f"|u| reached {peak:.3g} at step {state.r} (t = {state.r * cfg.tau:.4g}); "
            f"tau*w0 = {cfg.courant:.4g}, stability needs <= {CFL_LIMIT:.4f}"
        )


@dataclass
class ProbeSeries:
    """Oscillogram at one node: u at every layer, centered v and w inside."""

    node: tuple[int, int]
    times: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def from_displacement(cls, node, tau: float, u: np.ndarray) -> "ProbeSeries":
        u = np.asarray(u, dtype=float)
        times = np.arange(len(u)) * tau
        v = (u[2:] - u[:-2]) / (2.0 * tau)
        w = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / tau**2
        return cls(tuple(node), times, u, v, w)

    @property
    def inner_times(self) -> np.ndarray:
        """Times at which v and w are defined."""
        return self.times[1:-1]


@dataclass
class RowSnapshot:
    """u, v, w along the axis n = 0 at layer ``step``."""

    t: float
    step: int
    m: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray


@dataclass
class FdmResult:
    config: FdmConfig
    probes: dict[tuple[int, int], ProbeSeries]
    snapshots: list[RowSnapshot]
    final: WaveField


def run(cfg: FdmConfig) -> FdmResult:
    """Integrate from rest to t_end, recording probes and axis snapshots.

    The result is deterministic: identical configs give bit-identical arrays.
    """
    state = WaveField.at_rest(cfg)
    snap_steps = sorted({int(round(t / cfg.tau)) for t in cfg.snapshot_times})
    n_steps = max([cfg.n_steps] + [s + 1 for s in snap_steps])

    idx = [state.index(*p) for p in cfg.probes]
    rows = np.array([i for i, _ in idx], dtype=int)
    cols = np.array([j for _, j in idx], dtype=int)
    record = np.zeros((cfg.n_steps + 1, len(idx)))

    pending: dict[int, dict[int, np.ndarray]] = {s: {} for s in snap_steps}
    wanted = {}
    for s in snap_steps:
        for d in (-1, 0, 1):
            wanted.setdefault(s + d, []).append(s)

    def capture():
        for s in wanted.get(state.r, ()):
            pending[s][state.r - s] = state.axis_row()[1]

    capture()
    for _ in range(n_steps):
        step(state, cfg)
        if state.r <= cfg.n_steps and len(idx):
            record[state.r] = state.u_curr[rows, cols]
        capture()

    m_axis = state.axis_row()[0]
    snapshots = []
    for s in snap_steps:
        layers = pending[s]
        um = layers.get(-1, np.zeros_like(layers[0]))
        u0, up = layers[0], layers[1]
        snapshots.append(
            RowSnapshot(
                t=s * cfg.tau,
                step=s,
                m=m_axis,
                u=u0,
                v=(up - um) / (2.0 * cfg.tau),
                w=(up - 2.0 * u0 + um) / cfg.tau**2,
            )
        )
    probes = {p: ProbeSeries.from_displacement(p, cfg.tau, record[:, k]) for k, p in enumerate(cfg.probes)}
    return FdmResult(cfg, probes, snapshots, state)


@dataclass(frozen=True)
class EnergyBalance:
    kinetic: float
    potential: float
    work: float

    @property
    def mismatch(self) -> float:
        return self.kinetic + self.potential - self.work


def energy_balance(state: WaveField, cfg: FdmConfig) -> EnergyBalance:
    """Kinetic, spring and load-work energies at the current layer r.

    Velocities are centered differences (u[r+1] - u[r-1]) / 2 tau, where
    u[r+1] is produced by a trial step on a copy of ``state``. The step load
    has done work Q0 * u_00 by time r tau.
    """
    trial = WaveField(state.u_prev.copy(), state.u_curr.copy(), state.r, state.half_width, state.symmetric)
    step(trial, cfg)
    before = state.full("prev")
    now = state.full("curr")
    after = trial.full("curr")
    p = cfg.params
    v = (after - before) / (2.0 * cfg.tau)
    kinetic = 0.5 * p.mass * float(np.sum(v * v))
    padded = np.pad(now, 1)
    potential = 0.5 * p.stiffness * float(np.sum(np.diff(padded, axis=0) ** 2) + np.sum(np.diff(padded, axis=1) ** 2))
    n = state.half_width
    work = p.load * float(now[n, n])
    return EnergyBalance(kinetic, potential, work)
