import math

import numpy as np
import pytest

from antiplane.fdm import (
    CFL_LIMIT,
    FdmConfig,
    InstabilityError,
    ProbeSeries,
    WaveField,
    energy_balance,
    run,
    step,
)
from antiplane.model import LatticeParams

unit = LatticeParams()


def test_first_step_literal_start():
    cfg = FdmConfig(tau=0.07, t_end=1.0, source_start=1.0, symmetric=False)
    state = step(WaveField.at_rest(cfg), cfg)
    full = state.full()
    n = cfg.half_width
    assert full[n, n] == 0.07**2
    full[n, n] = 0.0
    assert not full.any()


def test_second_step_literal_start():
    tau = 0.07
    cfg = FdmConfig(tau=tau, t_end=1.0, source_start=1.0, symmetric=False)
    state = WaveField.at_rest(cfg)
    step(state, cfg)
    step(state, cfg)
    s = tau**2
    c2 = tau**2
    assert state.value(0, 0) == pytest.approx((2 - 4 * c2) * s + s, rel=1e-15)
    for node in [(1, 0), (-1, 0), (0, 1), (0, -1)]:
        assert state.value(*node) == pytest.approx(c2 * s, rel=1e-15)
    assert state.value(1, 1) == 0.0 and state.value(2, 0) == 0.0


def test_second_step_general_params():
    p = LatticeParams(mass=2.0, stiffness=0.5, load=3.0)  # w0 = 1/2
    tau = 0.4
    cfg = FdmConfig(params=p, tau=tau, t_end=2.0, source_start=1.0)
    state = WaveField.at_rest(cfg)
    step(state, cfg)
    step(state, cfg)
    s = tau**2 * p.load / p.mass
    c2 = (tau * p.omega0) ** 2
    assert state.value(0, 0) == pytest.approx((2 - 4 * c2) * s + s, rel=1e-15)
    assert state.value(0, 1) == pytest.approx(c2 * s, rel=1e-15)


def test_default_start_uses_half_step():
    cfg = FdmConfig(tau=0.05, t_end=1.0)
    state = step(WaveField.at_rest(cfg), cfg)
    assert state.value(0, 0) == 0.5 * 0.05**2


@pytest.mark.parametrize("symmetric", [True, False])
def test_causality(symmetric):
    cfg = FdmConfig(tau=0.07, t_end=2.0, symmetric=symmetric)
    state = WaveField.at_rest(cfg)
    n = cfg.half_width
    mm, nn = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1), indexing="ij")
    dist = np.abs(mm) + np.abs(nn)
    for _ in range(cfg.n_steps):
        step(state, cfg)
        full = state.full()
        assert not full[dist > state.r].any()
        # sharper: layer r reaches graph distance r - 1 and no further
        assert not full[dist > state.r - 1].any()
        assert full[dist == state.r - 1].all()


def test_symmetry_mode_matches_full_plane_bitwise():
    common = dict(tau=0.07, t_end=15.0, probes=((4, 1), (0, 6), (9, 0)))
    a = run(FdmConfig(symmetric=True, **common))
    b = run(FdmConfig(symmetric=False, **common))
    assert np.array_equal(a.final.full(), b.final.full())
    for k in a.probes:
        assert np.array_equal(a.probes[k].u, b.probes[k].u)


def test_full_plane_field_has_square_symmetry():
    res = run(FdmConfig(tau=0.07, t_end=12.0, symmetric=False))
    f = res.final.full()
    assert np.array_equal(f, f.T)
    assert np.array_equal(f, f[::-1, :])
    assert np.array_equal(f, f[:, ::-1])


def test_run_is_deterministic():
    cfg = FdmConfig(tau=0.07, t_end=10.0, probes=((3, 0),), snapshot_times=(5.0,))
    a, b = run(cfg), run(cfg)
    assert np.array_equal(a.probes[(3, 0)].u, b.probes[(3, 0)].u)
    assert np.array_equal(a.snapshots[0].v, b.snapshots[0].v)


def test_zero_load_gives_zero_field():
    res = run(FdmConfig(params=LatticeParams(load=0.0), t_end=5.0, probes=((0, 0),)))
    assert not res.final.full().any()
    assert not res.probes[(0, 0)].u.any()


def test_solution_depends_only_on_courant_and_load_per_mass():
    a = run(FdmConfig(params=unit, tau=0.07, t_end=10.0, probes=((2, 1),)))
    p = LatticeParams(mass=4.0, stiffness=4.0, load=4.0)
    b = run(FdmConfig(params=p, tau=0.07, t_end=10.0, probes=((2, 1),)))
    assert np.array_equal(a.probes[(2, 1)].u, b.probes[(2, 1)].u)


def test_config_validation():
    with pytest.raises(ValueError, match="exceeds"):
        FdmConfig(tau=0.75)
    with pytest.raises(ValueError):
        FdmConfig(tau=0.1, params=LatticeParams(stiffness=100.0))  # tau w0 = 1
    with pytest.raises(ValueError):
        FdmConfig(t_end=0.0)
    with pytest.raises(ValueError):
        FdmConfig(tau=-0.1)
    with pytest.raises(ValueError):
        FdmConfig(t_end=10.0, snapshot_times=(11.0,))
    with pytest.raises(ValueError):
        FdmConfig(t_end=10.0, probes=((500, 0),))
    with pytest.raises(ValueError):
        FdmConfig(probes=((1.5, 0),))
    assert FdmConfig(tau=0.7).courant == 0.7


def test_half_width_covers_front_region():
    cfg = FdmConfig(t_end=400.0)
    assert cfg.half_width == math.ceil(400 + 8 * 400 ** (1 / 3)) + 8
    assert cfg.half_width > 400 + 6 * 400 ** (1 / 3)
    assert cfg.n_steps == math.ceil(400 / 0.07)


def test_cfl_violation_blows_up():
    cfg = FdmConfig(tau=0.9, t_end=200.0, enforce_cfl=False)
    with pytest.raises(InstabilityError, match="stability"):
        run(cfg)
    assert 0.9 > CFL_LIMIT


def test_stable_just_inside_limit():
    res = run(FdmConfig(tau=0.7, t_end=60.0, probes=((0, 0),)))
    assert np.max(np.abs(res.final.full())) < 10.0


def test_probe_series_shapes():
    res = run(FdmConfig(tau=0.07, t_end=7.0, probes=((1, 2),)))
    pr = res.probes[(1, 2)]
    assert len(pr.times) == len(pr.u) == res.config.n_steps + 1
    assert len(pr.v) == len(pr.w) == len(pr.u) - 2
    np.testing.assert_array_equal(pr.inner_times, pr.times[1:-1])


def test_probe_series_differences():
    u = np.array([0.0, 1.0, 4.0, 9.0])
    pr = ProbeSeries.from_displacement((0, 0), 0.5, u)
    np.testing.assert_allclose(pr.v, [4.0, 8.0])
    np.testing.assert_allclose(pr.w, [8.0, 8.0])


def test_snapshot_matches_probe_differences():
    cfg = FdmConfig(tau=0.07, t_end=12.0, probes=((5, 0),), snapshot_times=(8.0,))
    res = run(cfg)
    snap = res.snapshots[0]
    pr = res.probes[(5, 0)]
    k = snap.step
    assert snap.t == pytest.approx(8.0, abs=cfg.tau / 2)
    assert snap.u[5] == pr.u[k]
    assert snap.v[5] == pytest.approx(pr.v[k - 1], rel=1e-14)
    assert snap.w[5] == pytest.approx(pr.w[k - 1], rel=1e-14)


def test_snapshot_at_end_time():
    res = run(FdmConfig(tau=0.07, t_end=7.0, snapshot_times=(7.0,)))
    assert res.snapshots[0].step == 100


def test_energy_balance():
    cfg = FdmConfig(tau=0.07, t_end=30.0)
    state = WaveField.at_rest(cfg)
    for r in range(1, cfg.n_steps + 1):
        step(state, cfg)
        if r % 40 == 0:
            eb = energy_balance(state, cfg)
            assert eb.kinetic > 0 and eb.potential > 0
            assert abs(eb.mismatch) <= 0.02 * eb.work


def test_oscillogram_at_m20():
    res = run(FdmConfig(tau=0.07, t_end=80.0, probes=((20, 0),)))
    pr = res.probes[(20, 0)]
    u40 = np.interp(40.0, pr.times, pr.u)
    assert u40 == pytest.approx(math.log(2 + math.sqrt(3)) / (2 * math.pi), rel=0.05)
    early = (pr.inner_times > 10) & (pr.inner_times < 40)
    i = np.argmax(pr.v[early])
    assert 18.0 < pr.inner_times[early][i] < 26.0
    assert 0.01 < pr.v[early][i] < 0.1
    # nothing arrives before the discrete front
    assert not pr.u[: 20].any()


def test_source_displacement_grows_logarithmically():
    res = run(FdmConfig(tau=0.07, t_end=100.0, probes=((0, 0),)))
    pr = res.probes[(0, 0)]
    du = np.interp(100.0, pr.times, pr.u) - np.interp(50.0, pr.times, pr.u)
    assert du == pytest.approx(math.log(2) / (2 * math.pi), rel=0.05)
