"""Experiment orchestration: run the solver for an ExperimentSpec and write artifacts.

All artifacts for experiment ``name`` go to ``<out_dir>/<name>/``. Each file
starts with the config lines of the experiment, so feeding those lines back to
``parse_config`` reproduces the run. Nothing time- or host-dependent is
written, so repeated runs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, asymptotics
from .asymptotics import Formula
from .config import ExperimentSpec, OutputKind
from .fdm import FdmResult, ProbeSeries, RowSnapshot, run
from .output import OutputError, svg_line_plot, write_csv, write_text

__all__ = ["ExperimentResult", "BUILTIN", "builtin_spec", "run_experiment", "probe_comparisons"]

# (quantity, FDM attribute, long-wave closed form used for the overlay)
_OVERLAYS = (
    ("displacement", "u", Formula.DISPLACEMENT_LOG),
    ("velocity", "v", Formula.VELOCITY_AIRY),
    ("acceleration", "w", Formula.ACCELERATION_AIRY),
)


@dataclass
class ExperimentResult:
    name: str
    directory: Path
    files: list[Path] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


BUILTIN: dict[str, ExperimentSpec] = {
    "figures-1-2-3": ExperimentSpec(
        name="figures-1-2-3",
        t_end=80.0,
        probes=((20, 0),),
        outputs=(OutputKind.PROBE_CSV, OutputKind.FIGURE_SVG, OutputKind.FIT_JSON),
    ),
    "decay-scaling": ExperimentSpec(
        name="decay-scaling",
        t_end=400.0,
        probes=((0, 0),),
        snapshot_times=(50.0, 100.0, 200.0, 400.0),
        outputs=(OutputKind.SNAPSHOT_CSV, OutputKind.FIT_JSON, OutputKind.FIGURE_SVG),
    ),
    "shortwave-arrival": ExperimentSpec(
        name="shortwave-arrival",
        t_end=130.0,
        probes=((10, 0), (20, 0), (30, 0), (40, 0)),
        outputs=(OutputKind.PROBE_CSV, OutputKind.FIT_JSON),
    ),
}


def builtin_spec(name: str) -> ExperimentSpec:
    try:
        return BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}; choose from {', '.join(BUILTIN)}") from None


def _header(spec: ExperimentSpec, extra: tuple[str, ...] = ()) -> list[str]:
    # extras are config comments, so the stripped header still parses
    return [*spec.to_config_lines(), *(f"# {e}" for e in extra)]


def _fmt_t(t: float) -> str:
    return f"{t:g}".replace(".", "p")


def _json_clean(obj):
    if isinstance(obj, dict):
        return {str(k): _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def probe_comparisons(spec: ExperimentSpec, probe: ProbeSeries) -> dict[str, np.ndarray]:
    """FDM series and closed forms on the interior time grid of an axis probe."""
    m = probe.node[0]
    t = probe.inner_times
    p = spec.params
    return {
        "t": t,
        "u": probe.u[1:-1],
        "v": probe.v,
        "w": probe.w,
        Formula.DISPLACEMENT_LOG.value: np.asarray(asymptotics.displacement_log(p, m, t)),
        Formula.VELOCITY_AIRY.value: np.asarray(asymptotics.velocity_airy(p, m, t)),
        Formula.ACCELERATION_AIRY.value: np.asarray(asymptotics.acceleration_airy(p, m, t)),
        Formula.VELOCITY_BESSEL.value: np.asarray(asymptotics.velocity_bessel(p, m, t)),
        Formula.ACCELERATION_BESSEL.value: np.asarray(asymptotics.acceleration_bessel(p, m, t)),
    }


def _probe_outputs(spec, result: FdmResult, out: Path, res: ExperimentResult) -> None:
    kinds = set(spec.outputs)
    for node, probe in result.probes.items():
        m, n = node
        tag = f"m{m}_n{n}"
        if OutputKind.PROBE_CSV in kinds:
            res.files.append(
                write_csv(
                    out / f"probe_{tag}.csv",
                    ["t", "u", "v", "w"],
                    [probe.inner_times, probe.u[1:-1], probe.v, probe.w],
                    _header(spec, (f"node {m},{n}",)),
                )
            )
        if n != 0:
            continue
        cmp = probe_comparisons(spec, probe)
        for quantity, attr, formula in _OVERLAYS:
            if OutputKind.PROBE_CSV in kinds:
                res.files.append(
                    write_csv(
                        out / f"{quantity}_{tag}.csv",
                        ["t", "fdm", "asymptotic"],
                        [cmp["t"], cmp[attr], cmp[formula.value]],
                        _header(spec, (f"node {m},{n}", f"asymptotic {formula.value}")),
                    )
                )
            if OutputKind.FIGURE_SVG in kinds:
                svg = svg_line_plot(
                    [(formula.value, cmp["t"], cmp[formula.value], 3.0), ("FDM", cmp["t"], cmp[attr], 1.0)],
                    title=f"{quantity} at node ({m}, {n})",
                    xlabel="t",
                    ylabel=quantity,
                    comments=_header(spec, (f"node {m},{n}",)),
                )
                res.files.append(write_text(out / f"{quantity}_{tag}.svg", svg))
        if OutputKind.PROBE_CSV in kinds:
            res.files.append(
                write_csv(
                    out / f"bessel_{tag}.csv",
                    ["t", "fdm_v", Formula.VELOCITY_BESSEL.value, "fdm_w", Formula.ACCELERATION_BESSEL.value],
                    [cmp["t"], cmp["v"], cmp[Formula.VELOCITY_BESSEL.value], cmp["w"], cmp[Formula.ACCELERATION_BESSEL.value]],
                    _header(spec, (f"node {m},{n}",)),
                )
            )


def _probe_summary(spec, result: FdmResult) -> dict:
    p = spec.params
    out = {}
    for (m, n), probe in result.probes.items():
        entry: dict = {"u_final": float(probe.u[-1])}
        if n == 0:
            cmp = probe_comparisons(spec, probe)
            t = cmp["t"]
            if m != 0:
                window = (max(0.5 * abs(m) / p.omega0, t[0]), min(2.0 * abs(m) / p.omega0, t[-1]))
                if window[0] < window[1]:
                    entry["comparison_window"] = list(window)
                    for label, attr, formula in (
                        ("velocity_bessel", "v", Formula.VELOCITY_BESSEL),
                        ("velocity_airy", "v", Formula.VELOCITY_AIRY),
                        ("acceleration_bessel", "w", Formula.ACCELERATION_BESSEL),
                        ("acceleration_airy", "w", Formula.ACCELERATION_AIRY),
                    ):
                        c = analysis.compare_series((t, cmp[attr]), (t, cmp[formula.value]), window)
                        entry[f"rel_peak_diff_{label}"] = c.rel_peak_diff
                        entry[f"max_abs_diff_{label}"] = c.max_abs_diff
                try:
                    arrival = analysis.shortwave_arrival(t, cmp["v"], p)
                except ValueError:
                    arrival = None
                entry["shortwave_arrival"] = arrival
                entry["shortwave_arrival_predicted"] = analysis.predicted_shortwave_arrival(p, m)
            entry["u_final_asymptotic"] = float(asymptotics.displacement_log(p, m, probe.times[-1]))
        out[f"{m},{n}"] = entry
    return out


def _snapshot_profiles(spec, snap: RowSnapshot) -> dict[str, np.ndarray]:
    p = spec.params
    if snap.t <= 0:
        zeros = np.zeros_like(snap.u)
        return {"velocity_airy": zeros, "acceleration_airy": zeros}
    return {
        "velocity_airy": np.asarray(asymptotics.velocity_airy(p, snap.m, snap.t)),
        "acceleration_airy": np.asarray(asymptotics.acceleration_airy(p, snap.m, snap.t)),
    }


def _snapshot_summary(spec, result: FdmResult) -> dict:
    p = spec.params
    rows = []
    for snap in result.snapshots:
        row: dict = {"t": snap.t, "step": snap.step}
        if snap.t > 0:
            for key, values in (("velocity", snap.v), ("acceleration", snap.w)):
                try:
                    row[f"{key}_peak"] = analysis.front_peak(snap.m, values, p, snap.t)[1]
                except ValueError:
                    row[f"{key}_peak"] = None
            try:
                row["width"] = analysis.front_width(snap.m, snap.v, t=snap.t, params=p).width
            except ValueError:
                row["width"] = None
            row["velocity_peak_exact"] = asymptotics.envelope_max(p, Formula.VELOCITY_AIRY, snap.t)[1]
            row["acceleration_peak_exact"] = asymptotics.envelope_max(p, Formula.ACCELERATION_AIRY, snap.t)[1]
            hi = int(math.ceil(analysis.long_wave_window(p, snap.t)[1])) + 4
            ms = np.arange(0, hi + 1)
            row["width_exact"] = analysis.front_width(
                ms, asymptotics.velocity_airy(p, ms, snap.t), t=snap.t, params=p
            ).width
        rows.append(row)

    summary: dict = {"snapshots": rows}
    fits = {}
    for key in ("velocity_peak", "acceleration_peak", "width", "velocity_peak_exact", "acceleration_peak_exact", "width_exact"):
        pts = [(r["t"], r.get(key)) for r in rows if r.get(key) is not None]
        if len(pts) < 4:
            continue
        ts, ys = map(np.asarray, zip(*pts))
        try:
            fit = analysis.peak_amplitude_decay(ts, ys)
        except ValueError:
            continue
        fits[key] = {
            "exponent": fit.exponent,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "sample_range": list(fit.sample_range),
            "n_points": fit.n_points,
        }
    summary["fits"] = fits
    summary["expected_exponents"] = {"velocity": -2.0 / 3.0, "acceleration": -1.0, "width": 1.0 / 3.0}
    return summary


def _snapshot_outputs(spec, result: FdmResult, out: Path, res: ExperimentResult) -> None:
    kinds = set(spec.outputs)
    series = []
    for snap in result.snapshots:
        exact = _snapshot_profiles(spec, snap)
        if OutputKind.SNAPSHOT_CSV in kinds:
            res.files.append(
                write_csv(
                    out / f"snapshot_t{_fmt_t(snap.t)}.csv",
                    ["m", "u", "v", "w", "velocity_airy", "acceleration_airy"],
                    [snap.m, snap.u, snap.v, snap.w, exact["velocity_airy"], exact["acceleration_airy"]],
                    _header(spec, (f"snapshot step {snap.step}, t {snap.t!r}",)),
                )
            )
        series.append((f"t={snap.t:.4g}", snap.m.astype(float), snap.v, 1.0))
    if OutputKind.FIGURE_SVG in kinds and series:
        svg = svg_line_plot(series, title="velocity along n = 0", xlabel="m", ylabel="v", comments=_header(spec))
        res.files.append(write_text(out / "snapshots_velocity.svg", svg))


def run_experiment(spec: ExperimentSpec, out_dir: str | Path) -> ExperimentResult:
    """Run the solver for ``spec`` and write the requested artifacts.

    The output directory is created (and checked writable) before the solver
    starts. Raises OutputError on I/O problems and InstabilityError if the
    solver blows up.
    """
    out = Path(out_dir) / spec.name
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    res = ExperimentResult(spec.name, out)

    result = run(spec.fdm_config())
    _probe_outputs(spec, result, out, res)
    _snapshot_outputs(spec, result, out, res)

    summary = {
        "name": spec.name,
        "config": spec.to_config_lines(),
        "half_width": result.config.half_width,
        "n_steps": result.config.n_steps,
        "probes": _probe_summary(spec, result),
    }
    if result.snapshots:
        summary.update(_snapshot_summary(spec, result))
    res.summary = _json_clean(summary)
    if OutputKind.FIT_JSON in spec.outputs:
        text = json.dumps(res.summary, indent=2, sort_keys=True) + "\n"
        res.files.append(write_text(out / "summary.json", text))
    return res
