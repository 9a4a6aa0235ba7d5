import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antiplane import cli, experiments
from antiplane.config import ConfigError, ExperimentSpec, OutputKind, parse_config, validate
from antiplane.fdm import InstabilityError
from antiplane.model import LatticeParams
from antiplane.output import OutputError, format_float, read_csv, svg_line_plot, write_csv


def test_minimal_config_defaults():
    spec = parse_config("name=x t_end=80")
    assert spec.name == "x" and spec.t_end == 80.0
    assert spec.params == LatticeParams()
    assert spec.tau == 0.07
    assert spec.halo_margin == 8
    assert spec.probes == () and spec.snapshot_times == ()
    assert set(spec.outputs) == set(OutputKind)


def test_default_tau_scales_with_omega0():
    spec = parse_config("name=x t_end=10 stiffness=4")
    assert spec.tau * spec.params.omega0 == pytest.approx(0.07, rel=1e-15)


def test_full_config():
    text = """
    # oscillograms
    name = run-1
    mass=2 stiffness = 2 spacing=1 load=0.5
    t_end=50
    probe=20,0
    probe = 3, 4
    snapshot=10,20
    snapshot=30
    halo=4
    outputs=probe_csv, FIT_JSON
    """
    spec = parse_config(text)
    assert spec.params == LatticeParams(mass=2, stiffness=2, spacing=1, load=0.5)
    assert spec.probes == ((20, 0), (3, 4))
    assert spec.snapshot_times == (10.0, 20.0, 30.0)
    assert spec.outputs == (OutputKind.PROBE_CSV, OutputKind.FIT_JSON)
    assert spec.halo_margin == 4


def test_cfl_violation():
    with pytest.raises(ConfigError, match="CFL"):
        parse_config("name=x t_end=80 tau=0.8")


def test_negative_mass_rejected():
    with pytest.raises(ConfigError, match="mass"):
        parse_config("name=x t_end=80 mass=-1")


def test_all_errors_reported():
    with pytest.raises(ConfigError) as info:
        parse_config("name=x t_end=-5 tau=0.9 colour=red probe=1 snapshot=abc outputs=pdf")
    errors = info.value.errors
    joined = "\n".join(errors)
    for needle in ("colour", "probe", "snapshot", "pdf", "t_end", "CFL"):
        assert needle in joined
    assert len(errors) >= 6


@pytest.mark.parametrize(
    "text,needle",
    [
        ("t_end=80", "name"),
        ("name=x", "t_end"),
        ("name=x t_end=10 name=y", "duplicate"),
        ("name=x t_end=10 snapshot=20", "outside"),
        ("name=x t_end=10 probe=500,0", "outside"),
        ("name=x t_end=10 oops", "key=value"),
        ("name=x t_end=ten", "number"),
        ("name=x t_end=10 halo=-1", "halo"),
        ("name=a/b t_end=10", "name"),
    ],
)
def test_config_errors(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(text)


@given(
    st.floats(0.1, 10.0),
    st.floats(0.1, 10.0),
    st.floats(1.0, 50.0),
    st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), max_size=3),
)
def test_config_lines_round_trip(mass, stiffness, t_end, probes):
    spec = ExperimentSpec(
        name="rt",
        params=LatticeParams(mass=mass, stiffness=stiffness),
        t_end=t_end,
        probes=tuple(probes),
        snapshot_times=(t_end / 2,),
    )
    assert parse_config("\n".join(spec.to_config_lines())) == spec


def test_validate_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        validate(tmp_path / "nope.cfg")


def test_csv_round_trip_is_exact(tmp_path):
    x = np.array([0.1, 1 / 3, math.pi, -2.5e-300, 1e17 + 3])
    path = write_csv(tmp_path / "a.csv", ["m", "x"], [np.arange(5), x], ["name=a", "t_end=1"])
    comments, cols, header = read_csv(path)
    assert comments == ["name=a", "t_end=1"]
    assert header == ["m", "x"]
    assert np.array_equal(cols["x"], x)
    assert format_float(0.1) == "0.10000000000000001"


def test_csv_errors(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "b.csv", ["a", "b"], [[1.0], [1.0, 2.0]])
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError, match="file"):
        write_csv(blocker / "c.csv", ["a"], [[1.0]])


def test_svg_plot():
    t = np.linspace(0, 1, 20)
    svg = svg_line_plot([("a", t, t**2, 3.0), ("b", t, t, 1.0)], title="T", comments=["name=x"])
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline") == 2
    assert "<!-- name=x -->" in svg
    assert 'stroke-width="3.0"' in svg and 'stroke-width="1.0"' in svg


def _strip_header(path):
    lines = [ln[2:] for ln in path.read_text().splitlines() if ln.startswith("# ")]
    return "\n".join(lines)


def test_snapshot_only_experiment(tmp_path):
    spec = parse_config("name=snaps t_end=30 snapshot=10,20 outputs=snapshot_csv")
    res = experiments.run_experiment(spec, tmp_path)
    names = sorted(p.name for p in res.files)
    assert len(names) == 2 and all(n.startswith("snapshot_") for n in names)
    # the header reproduces the experiment
    assert parse_config(_strip_header(res.files[0])) == spec
    comments, cols, header = read_csv(res.files[0])
    assert header == ["m", "u", "v", "w", "velocity_airy", "acceleration_airy"]


def test_experiment_outputs_are_byte_identical(tmp_path):
    spec = parse_config("name=rep t_end=20 probe=5,0 probe=2,3 snapshot=10")
    a = experiments.run_experiment(spec, tmp_path / "a")
    b = experiments.run_experiment(spec, tmp_path / "b")
    assert [p.name for p in a.files] == [p.name for p in b.files]
    for pa, pb in zip(a.files, b.files):
        assert pa.read_bytes() == pb.read_bytes()


def test_figures_experiment(tmp_path):
    res = experiments.run_experiment(experiments.builtin_spec("figures-1-2-3"), tmp_path)
    out = res.directory
    for quantity in ("displacement", "velocity", "acceleration"):
        _, cols, header = read_csv(out / f"{quantity}_m20_n0.csv")
        assert header == ["t", "fdm", "asymptotic"]
        assert (out / f"{quantity}_m20_n0.svg").exists()
    summary = json.loads((out / "summary.json").read_text())
    probe = summary["probes"]["20,0"]
    assert probe["rel_peak_diff_velocity_bessel"] <= 0.05
    assert probe["shortwave_arrival"] == pytest.approx(44.4, abs=4)
    _, cols, _ = read_csv(out / "displacement_m20_n0.csv")
    u40 = np.interp(40.0, cols["t"], cols["fdm"])
    assert u40 == pytest.approx(0.2096, rel=0.05)


def test_builtin_unknown():
    with pytest.raises(KeyError, match="choose"):
        experiments.builtin_spec("figure-9")


def test_cli_validate(tmp_path, capsys):
    good = tmp_path / "good.cfg"
    good.write_text("name=x t_end=80\n")
    assert cli.main(["validate", str(good)]) == 0
    assert "tau=0.07" in capsys.readouterr().out
    bad = tmp_path / "bad.cfg"
    bad.write_text("name=x t_end=80 tau=0.8 mass=-1 zzz=1\n")
    assert cli.main(["validate", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "zzz" in err and "mass" in err


def test_cli_simulate_uses_env_dir(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("name=envrun t_end=15 probe=3,0 outputs=probe_csv\n")
    monkeypatch.setenv(cli.ENV_OUTPUT_DIR, str(tmp_path / "env"))
    assert cli.main(["simulate", str(cfg)]) == 0
    assert (tmp_path / "env" / "envrun" / "probe_m3_n0.csv").exists()
    # --out wins over the environment
    assert cli.main(["simulate", str(cfg), "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "envrun" / "probe_m3_n0.csv").exists()


def test_cli_io_error(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("name=x t_end=5\n")
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert cli.main(["simulate", str(cfg), "--out", str(blocker)]) == 3


def test_cli_instability_exit_code(tmp_path, monkeypatch):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("name=x t_end=5\n")

    def boom(spec, out):
        raise InstabilityError("|u| too large")

    monkeypatch.setattr(cli, "run_experiment", boom)
    assert cli.main(["simulate", str(cfg), "--out", str(tmp_path)]) == 2


def test_cli_requires_subcommand():
    with pytest.raises(SystemExit):
        cli.main([])


def test_cli_reproduce_decay_scaling(tmp_path, capsys):
    assert cli.main(["reproduce", "decay-scaling", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "decay-scaling" / "summary.json").read_text())
    fits = summary["fits"]
    assert fits["velocity_peak"]["exponent"] == pytest.approx(-2 / 3, abs=0.07)
    assert fits["acceleration_peak"]["exponent"] == pytest.approx(-1.0, abs=0.07)
    assert fits["width"]["exponent"] == pytest.approx(1 / 3, abs=0.07)
    assert fits["velocity_peak_exact"]["exponent"] == pytest.approx(-2 / 3, abs=1e-3)
    assert fits["acceleration_peak_exact"]["exponent"] == pytest.approx(-1.0, abs=1e-3)
    assert len(list((tmp_path / "decay-scaling").glob("snapshot_*.csv"))) == 4
