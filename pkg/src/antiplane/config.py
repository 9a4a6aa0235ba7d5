"""Experiment description and its flat ``key=value`` config format.

Example::

    name = fig
    t_end = 80
    probe = 20,0
    probe = 0,0
    snapshot = 40
    outputs = probe_csv, figure_svg

Tokens may share a line (``name=x t_end=80``); ``#`` starts a comment.
``probe`` and ``snapshot`` may repeat, and ``snapshot`` also takes a comma
list. Unset keys fall back to unit lattice parameters, tau = 0.07 / w0 and
a halo of 8 nodes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .fdm import CFL_ENFORCED, FdmConfig
from .model import LatticeParams

__all__ = ["OutputKind", "ExperimentSpec", "ConfigError", "parse_config", "validate", "DEFAULT_COURANT"]

DEFAULT_COURANT = 0.07


class OutputKind(str, Enum):
    PROBE_CSV = "probe_csv"
    SNAPSHOT_CSV = "snapshot_csv"
    FIT_JSON = "fit_json"
    FIGURE_SVG = "figure_svg"


ALL_OUTPUTS = tuple(OutputKind)


class ConfigError(ValueError):
    """Invalid experiment config; ``errors`` lists every problem found."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    params: LatticeParams = field(default_factory=LatticeParams)
    tau: float | None = None
    t_end: float = 80.0
    probes: tuple[tuple[int, int], ...] = ()
    snapshot_times: tuple[float, ...] = ()
    outputs: tuple[OutputKind, ...] = ALL_OUTPUTS
    halo_margin: int = 8
    source_start: float = 0.5

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "tau", DEFAULT_COURANT / self.params.omega0)
        errors = _spec_errors(self)
        if errors:
            raise ConfigError(errors)

    def fdm_config(self) -> FdmConfig:
        return FdmConfig(
            params=self.params,
            tau=self.tau,
            t_end=self.t_end,
            probes=self.probes,
            halo_margin=self.halo_margin,
            snapshot_times=self.snapshot_times,
            source_start=self.source_start,
        )

    def to_config_lines(self) -> list[str]:
        """Config text that parses back to this spec."""
        p = self.params
        lines = [
            f"name={self.name}",
            f"mass={p.mass!r}",
            f"stiffness={p.stiffness!r}",
            f"spacing={p.spacing!r}",
            f"load={p.load!r}",
            f"tau={self.tau!r}",
            f"t_end={self.t_end!r}",
            f"halo={self.halo_margin}",
            f"source_start={self.source_start!r}",
        ]
        lines += [f"probe={m},{n}" for m, n in self.probes]
        lines += [f"snapshot={t!r}" for t in self.snapshot_times]
        lines.append("outputs=" + ",".join(o.value for o in self.outputs))
        return lines


def _value_errors(name, tau, t_end, halo, snapshots, omega0) -> list[str]:
    """Checks that do not need a full ExperimentSpec; ``omega0`` may be None."""
    errors = []
    if not name or not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        errors.append(f"name must be a nonempty token of letters, digits, '_', '.', '-': {name!r}")
    if t_end is not None and not (t_end > 0 and math.isfinite(t_end)):
        errors.append(f"t_end must be positive, got {t_end!r}")
    if tau is not None:
        if not (tau > 0 and math.isfinite(tau)):
            errors.append(f"tau must be positive, got {tau!r}")
        elif omega0 is not None and tau * omega0 > CFL_ENFORCED + 1e-12:
            errors.append(f"CFL violation: tau*w0 = {tau * omega0:.4g} > {CFL_ENFORCED} (stability limit 1/sqrt(2))")
    if halo < 0:
        errors.append("halo must be >= 0")
    for t in snapshots:
        if not (0 <= t and (t_end is None or t <= t_end)):
            errors.append(f"snapshot time {t!r} outside [0, t_end={t_end!r}]")
    return errors


def _spec_errors(spec: ExperimentSpec) -> list[str]:
    errors = _value_errors(spec.name, spec.tau, spec.t_end, spec.halo_margin, spec.snapshot_times, spec.params.omega0)
    if not errors:
        try:
            spec.fdm_config()
        except ValueError as exc:
            errors.append(str(exc))
    return errors


_FLOAT_KEYS = {"mass", "stiffness", "spacing", "load", "tau", "t_end", "source_start"}
_KNOWN = _FLOAT_KEYS | {"name", "probe", "snapshot", "outputs", "halo"}


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        # allow spaces around '=' and after commas
        line = re.sub(r"\s*=\s*", "=", line)
        line = re.sub(r"\s*,\s*", ",", line)
        for tok in line.split():
            yield lineno, tok


def parse_config(text: str) -> ExperimentSpec:
    """Parse config text; raises ConfigError listing every problem."""
    errors: list[str] = []
    scalars: dict[str, str] = {}
    probes: list[tuple[int, int]] = []
    snaps: list[float] = []
    outputs = None

    for lineno, tok in _tokens(text):
        if "=" not in tok:
            errors.append(f"line {lineno}: expected key=value, got {tok!r}")
            continue
        key, value = tok.split("=", 1)
        key = key.lower()
        if key not in _KNOWN:
            errors.append(f"line {lineno}: unknown key {key!r}")
        elif key == "probe":
            parts = value.split(",")
            try:
                if len(parts) != 2:
                    raise ValueError
                probes.append((int(parts[0]), int(parts[1])))
            except ValueError:
                errors.append(f"line {lineno}: probe must be 'm,n' integers, got {value!r}")
        elif key == "snapshot":
            for part in filter(None, value.split(",")):
                try:
                    snaps.append(float(part))
                except ValueError:
                    errors.append(f"line {lineno}: snapshot time must be a number, got {part!r}")
        elif key == "outputs":
            kinds = []
            for part in filter(None, value.split(",")):
                try:
                    kinds.append(OutputKind(part.lower()))
                except ValueError:
                    errors.append(f"line {lineno}: unknown output kind {part!r}")
            outputs = tuple(dict.fromkeys(kinds))
        else:
            if key in scalars:
                errors.append(f"line {lineno}: duplicate key {key!r}")
            scalars[key] = value

    nums: dict[str, float] = {}
    for key in _FLOAT_KEYS & scalars.keys():
        try:
            nums[key] = float(scalars[key])
        except ValueError:
            errors.append(f"{key} must be a number, got {scalars[key]!r}")
    halo = 8
    if "halo" in scalars:
        try:
            halo = int(scalars["halo"])
        except ValueError:
            errors.append(f"halo must be an integer, got {scalars['halo']!r}")
    if "name" not in scalars:
        errors.append("missing required key 'name'")
    if "t_end" not in scalars:
        errors.append("missing required key 't_end'")

    params = None
    phys = {k: nums[k] for k in ("mass", "stiffness", "spacing", "load") if k in nums}
    for k in ("mass", "stiffness", "spacing"):
        if k in phys and not phys[k] > 0:
            errors.append(f"{k} must be positive, got {phys[k]!r}")
    if "load" in phys and not math.isfinite(phys["load"]):
        errors.append("load must be finite")
    try:
        params = LatticeParams(**phys)
    except (ValueError, TypeError):
        pass

    if errors or params is None:
        # report value problems too, with the CFL check only when w0 is known
        extra = _value_errors(
            scalars.get("name", "x"),
            nums.get("tau"),
            nums.get("t_end"),
            halo,
            snaps,
            None if params is None else params.omega0,
        )
        raise ConfigError(errors + [e for e in extra if e not in errors] or ["invalid lattice parameters"])
    return ExperimentSpec(
        name=scalars["name"],
        params=params,
        tau=nums.get("tau"),
        t_end=nums["t_end"],
        probes=tuple(probes),
        snapshot_times=tuple(snaps),
        outputs=ALL_OUTPUTS if outputs is None else outputs,
        halo_margin=halo,
        source_start=nums.get("source_start", 0.5),
    )


def validate(path: str | Path) -> ExperimentSpec:
    """Read and parse a config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror or exc}"]) from exc
    return parse_config(text)
