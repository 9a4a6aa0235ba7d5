"""Acceptance suite: eight numbered checks with fixed tolerances.

Most checks share one baseline run (unit parameters, tau = 0.07, t_end = 400,
probes on (20, 0), (40, 0) and the source, axis snapshots at t = 50, 100,
200, 400). That run takes tens of seconds; it is computed once per Baseline.

``python -m antiplane.acceptance`` (or ``antiplane acceptance``) prints one
pass/fail line per criterion.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import cached_property
from typing import Callable

import numpy as np

from . import analysis, asymptotics, specfun
from .asymptotics import Formula
from .fdm import FdmConfig, FdmResult, InstabilityError, WaveField, energy_balance, run, step
from .model import LatticeParams

__all__ = [
    "Check",
    "CriterionResult",
    "Baseline",
    "CRITERIA",
    "run_all",
    "format_table",
    "bessel_power_series",
    "main",
]

SNAPSHOT_TIMES = (50.0, 100.0, 200.0, 400.0)


@dataclass(frozen=True)
class Check:
    label: str
    value: float
    target: str
    passed: bool


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, label: str, value, target: str, passed: bool) -> None:
        self.checks.append(Check(label, float("nan") if value is None else float(value), target, bool(passed)))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = "; ".join(f"{c.label}={c.value:.6g} ({c.target}){'' if c.passed else ' !'}" for c in self.checks)
        return f"[{status}] {self.number}. {self.title}: {parts}"


class Baseline:
    """Lazily computed reference runs shared by the criteria."""

    def __init__(self, params: LatticeParams | None = None, tau: float = 0.07, t_end: float = 400.0):
        self.params = params or LatticeParams()
        self.tau = tau
        self.t_end = t_end

    @cached_property
    def long_run(self) -> FdmResult:
        cfg = FdmConfig(
            params=self.params,
            tau=self.tau,
            t_end=self.t_end,
            probes=((20, 0), (40, 0), (0, 0)),
            snapshot_times=SNAPSHOT_TIMES,
        )
        return run(cfg)

    def probe(self, m: int):
        return self.long_run.probes[(m, 0)]


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def criterion_1(base: Baseline) -> CriterionResult:
    res = CriterionResult(1, "displacement at (20,0), t=40")
    pr = base.probe(20)
    u40 = float(np.interp(40.0, pr.times, pr.u))
    expected = math.log(2.0 + math.sqrt(3.0)) / (2.0 * math.pi)
    res.add("u", u40, f"{expected:.4f} +-5%", _rel(u40, expected) <= 0.05)
    return res


def criterion_2(base: Baseline) -> CriterionResult:
    res = CriterionResult(2, "oscillogram agreement at m=20, t in [10,40]")
    p = base.params
    pr = base.probe(20)
    t = pr.inner_times
    window = (10.0, 40.0)
    diffs = {}
    for f, fdm_vals in (
        (Formula.VELOCITY_BESSEL, pr.v),
        (Formula.VELOCITY_AIRY, pr.v),
        (Formula.ACCELERATION_BESSEL, pr.w),
        (Formula.ACCELERATION_AIRY, pr.w),
    ):
        exact = np.asarray(asymptotics.evaluate(p, f, 20, t))
        diffs[f] = analysis.compare_series((t, fdm_vals), (t, exact), window).rel_peak_diff
    vb, va = diffs[Formula.VELOCITY_BESSEL], diffs[Formula.VELOCITY_AIRY]
    ab, aa = diffs[Formula.ACCELERATION_BESSEL], diffs[Formula.ACCELERATION_AIRY]
    res.add("v_bessel", vb, "<= 0.05", vb <= 0.05)
    res.add("v_airy", va, ">= v_bessel", vb <= va)
    res.add("w_bessel", ab, "<= w_airy", ab <= aa)
    res.add("w_airy", aa, "reference", True)
    return res


def _exact_exponent(p: LatticeParams, formula: Formula) -> float:
    maxima = [asymptotics.envelope_max(p, formula, t)[1] for t in SNAPSHOT_TIMES]
    return analysis.peak_amplitude_decay(SNAPSHOT_TIMES, maxima).exponent


def criterion_3(base: Baseline) -> CriterionResult:
    res = CriterionResult(3, "amplitude decay exponents")
    p = base.params
    ev = _exact_exponent(p, Formula.VELOCITY_AIRY)
    ea = _exact_exponent(p, Formula.ACCELERATION_AIRY)
    res.add("exact_v", ev, "-2/3 +-1e-3", abs(ev + 2 / 3) <= 1e-3)
    res.add("exact_w", ea, "-1 +-1e-3", abs(ea + 1) <= 1e-3)
    snaps = base.long_run.snapshots
    ts = [s.t for s in snaps]
    fv = analysis.peak_amplitude_decay(ts, [analysis.front_peak(s.m, s.v, p, s.t)[1] for s in snaps]).exponent
    fa = analysis.peak_amplitude_decay(ts, [analysis.front_peak(s.m, s.w, p, s.t)[1] for s in snaps]).exponent
    res.add("fdm_v", fv, "-2/3 +-0.07", abs(fv + 2 / 3) <= 0.07)
    res.add("fdm_w", fa, "-1 +-0.07", abs(fa + 1) <= 0.07)
    return res


def _exact_width(p: LatticeParams, t: float) -> float:
    hi = int(math.ceil(analysis.long_wave_window(p, t)[1])) + 4
    ms = np.arange(0, hi + 1)
    return analysis.front_width(ms, asymptotics.velocity_airy(p, ms, t), t=t, params=p).width


def criterion_4(base: Baseline) -> CriterionResult:
    res = CriterionResult(4, "quasi-front widening t=50 -> 400")
    p = base.params
    snaps = {round(s.t): s for s in base.long_run.snapshots}
    w50 = analysis.front_width(snaps[50].m, snaps[50].v, t=snaps[50].t, params=p).width
    w400 = analysis.front_width(snaps[400].m, snaps[400].v, t=snaps[400].t, params=p).width
    ratio = w400 / w50
    res.add("fdm_ratio", ratio, "2 +-20%", abs(ratio - 2.0) <= 0.4)
    exact = _exact_width(p, 400.0) / _exact_width(p, 50.0)
    res.add("exact_ratio", exact, "2 +-10%", abs(exact - 2.0) <= 0.2)
    return res


def criterion_5(base: Baseline) -> CriterionResult:
    res = CriterionResult(5, "short-wave arrival at m=20")
    p = base.params
    pr = base.probe(20)
    arrival = analysis.shortwave_arrival(pr.inner_times, pr.v, p)
    res.add("fdm", arrival, "44.4 +-4", arrival is not None and abs(arrival - 44.4) <= 4.0)
    t = pr.inner_times
    closed = analysis.shortwave_arrival(t, np.asarray(asymptotics.velocity_bessel(p, 20, t)), p)
    res.add("closed_form_detected", 0.0 if closed is None else 1.0, "not detected", closed is None)
    return res


def bessel_power_series(n: int, x: float, digits: int = 60) -> float:
    """J_n(x) from its power series in Decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = digits + int(x)  # cover the cancellation of large terms
        half = Decimal(repr(x)) / 2
        q = -half * half
        term = (half**n if n else Decimal(1)) / math.factorial(n)
        total = term
        k = 0
        eps = Decimal(10) ** -(digits + 5)
        while True:
            k += 1
            term = term * q / (k * (k + n))
            total += term
            if abs(term) < eps * max(abs(total), Decimal(1)) and k > half:
                break
        return float(total)


def _airy_ode_residual(xs: np.ndarray, h: float = 1e-4) -> float:
    second = (np.asarray(specfun.airy_ai_prime(xs + h)) - np.asarray(specfun.airy_ai_prime(xs - h))) / (2 * h)
    return float(np.max(np.abs(second - xs * np.asarray(specfun.airy_ai(xs)))))


def criterion_6(base: Baseline) -> CriterionResult:
    res = CriterionResult(6, "special functions")
    xs = np.linspace(0.0, 40.0, 200)
    worst = 0.0
    for n in (0, 1, 2, 5, 10, 20, 40):
        got = np.asarray(specfun.bessel_j(n, xs))
        ref = np.array([bessel_power_series(n, float(x)) for x in xs])
        worst = max(worst, float(np.max(np.abs(got - ref))))
    res.add("bessel_vs_series", worst, "<= 1e-10", worst <= 1e-10)
    resid = _airy_ode_residual(np.linspace(-20.0, 20.0, 2001))
    res.add("airy_ode_residual", resid, "<= 1e-5", resid <= 1e-5)
    norm = 0.0
    for x in (1.0, 10.0, 100.0, 1000.0):
        row = specfun.bessel_j_row(int(x) + 100, x)
        norm = max(norm, abs(row.normalization() - 1.0))
    res.add("bessel_normalization", norm, "<= 1e-10", norm <= 1e-10)
    return res


def _causality_violation(params: LatticeParams) -> float:
    cfg = FdmConfig(params=params, tau=0.07, t_end=3.0, symmetric=False)
    state = WaveField.at_rest(cfg)
    n = cfg.half_width
    mm, nn = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    dist = np.abs(mm) + np.abs(nn)
    worst = 0.0
    for _ in range(cfg.n_steps):
        step(state, cfg)
        outside = dist > state.r - 1  # layer r reaches graph distance r - 1
        worst = max(worst, float(np.max(np.abs(state.full()[outside]))))
    return worst


def _symmetry_gap(params: LatticeParams) -> float:
    common = dict(params=params, tau=0.07, t_end=20.0, probes=((3, 2), (0, 5), (7, 0)))
    a = run(FdmConfig(symmetric=True, **common))
    b = run(FdmConfig(symmetric=False, **common))
    field_gap = float(np.max(np.abs(a.final.full() - b.final.full())))
    probe_gap = max(float(np.max(np.abs(a.probes[k].u - b.probes[k].u))) for k in a.probes)
    return max(field_gap, probe_gap)


def richardson_ratio(params: LatticeParams, node=(20, 0), t_end: float = 40.0, taus=(0.08, 0.04, 0.02)) -> float:
    vals = [run(FdmConfig(params=params, tau=tau, t_end=t_end, probes=(node,))).probes[node].u[-1] for tau in taus]
    return (vals[0] - vals[1]) / (vals[1] - vals[2])


def _energy_worst(params: LatticeParams) -> float:
    cfg = FdmConfig(params=params, tau=0.07, t_end=40.0)
    state = WaveField.at_rest(cfg)
    worst = 0.0
    for r in range(1, cfg.n_steps + 1):
        step(state, cfg)
        if r % 50 == 0:
            eb = energy_balance(state, cfg)
            worst = max(worst, abs(eb.mismatch) / eb.work)
    return worst


def _blows_up(params: LatticeParams, courant: float) -> bool:
    cfg = FdmConfig(params=params, tau=courant / params.omega0, t_end=200.0, enforce_cfl=False)
    try:
        run(cfg)
    except InstabilityError:
        return True
    return False


def criterion_7(base: Baseline) -> CriterionResult:
    res = CriterionResult(7, "solver properties")
    p = base.params
    c = _causality_violation(p)
    res.add("causality_leak", c, "== 0", c == 0.0)
    s = _symmetry_gap(p)
    res.add("symmetry_gap", s, "<= 1e-12", s <= 1e-12)
    r = richardson_ratio(p)
    res.add("richardson", r, "4 +-0.8", abs(r - 4.0) <= 0.8)
    e = _energy_worst(p)
    res.add("energy_mismatch", e, "<= 2% of work", e <= 0.02)
    blown = _blows_up(p, 0.9)
    res.add("blowup_0.9", float(blown), "detected", blown)
    stable = not _blows_up(p, 0.7)
    res.add("stable_0.7", float(stable), "bounded", stable)
    return res


def criterion_8(base: Baseline) -> CriterionResult:
    res = CriterionResult(8, "log law at the source")
    p = base.params
    pr = base.probe(0)
    u100 = float(np.interp(100.0, pr.times, pr.u))
    u400 = float(np.interp(400.0, pr.times, pr.u))
    expected = p.load / (2 * math.pi * p.stiffness) * math.log(4.0)
    res.add("increment", u400 - u100, f"{expected:.5f} +-3%", _rel(u400 - u100, expected) <= 0.03)
    level = float(asymptotics.displacement_log(p, 0, 400.0))
    res.add("level_t400", u400, f"{level:.5f} +-5%", _rel(u400, level) <= 0.05)
    return res


CRITERIA: dict[int, Callable[[Baseline], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_all(base: Baseline | None = None) -> list[CriterionResult]:
    base = base or Baseline()
    return [fn(base) for fn in CRITERIA.values()]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return "\n".join(lines)


def main() -> int:
    results = []
    base = Baseline()
    for fn in CRITERIA.values():
        r = fn(base)
        print(r.line(), flush=True)
        results.append(r)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
