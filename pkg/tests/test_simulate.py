import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaspipe import ValidationError, steady_profile
from gaspipe.simulate import TimeSeries, crosscheck, delay_samples, lumped_simulate, snap_dt, statespace_simulate
from gaspipe.transferfn import compact_response


@pytest.fixture(scope="module")
def grid():
    from gaspipe import case_study, derive_constants

    k = derive_constants(case_study())
    dt, m = snap_dt(k.t_d, k.t_d / 100)
    return k, dt, m


def _series(dt, q1, q2):
    return TimeSeries(0.0, dt, {"q1": np.asarray(q1, float), "q2": np.asarray(q2, float)})


def test_zero_input(grid):
    k, dt, m = grid
    out = lumped_simulate(k, _series(dt, np.zeros(500), np.zeros(500)))
    assert not out["p1"].any() and not out["p2"].any()
    rep = crosscheck(k, _series(dt, np.zeros(3 * m), np.zeros(3 * m)), n_segments=20)
    assert rep.max_abs == {"p1": 0.0, "p2": 0.0}


def test_step_is_delayed_then_nonzero(grid):
    k, dt, m = grid
    n = 3 * m
    out = lumped_simulate(k, _series(dt, np.full(n, 2.0), np.zeros(n)))
    assert np.all(out["p2"][:m] == 0.0)
    assert np.all(out["p2"][m:] > 0.0)
    # the first nonzero value is the bilinear start of the delayed path
    assert out["p2"][m] == pytest.approx(2.0 * (1 + k.alpha * dt / 2) * (k.k_g * (1 - k.beta) / k.alpha))


@pytest.mark.parametrize("q1, q2", [(1.0, 0.0), (0.0, -1.0), (3.0, 1.0)])
def test_integrator_slope(grid, q1, q2):
    k, dt, m = grid
    n = 60 * m + 1
    t = dt * np.arange(n)
    out = lumped_simulate(k, _series(dt, np.full(n, q1), np.full(n, q2)))
    tail = slice(54 * m, n)
    for ch in ("p1", "p2"):
        slope = np.polyfit(t[tail], out[ch][tail], 1)[0]
        assert slope == pytest.approx(k.k_g * (q1 - q2), rel=1e-6)


def test_ramp_imbalance_curvature(grid):
    k, dt, m = grid
    n = 60 * m + 1
    t = dt * np.arange(n)
    r = 0.01
    out = lumped_simulate(k, _series(dt, r * t, np.zeros(n)))
    curv = np.polyfit(t[54 * m :], out["p1"][54 * m :], 2)[0] * 2
    assert curv == pytest.approx(k.k_g * r, rel=1e-6)


def test_balanced_flow_steady_state(grid):
    # compact: p1 -> K11 alpha (1+beta)/(1-beta) ... minus K21 alpha/(1-beta), i.e. K_G t_d tanh(alpha t_d)
    k, dt, m = grid
    n = 40 * m
    out = lumped_simulate(k, _series(dt, np.ones(n), np.ones(n)))
    expected = k.k_g * k.t_d * np.tanh(k.alpha * k.t_d)
    assert out["p1"][-1] == pytest.approx(expected, rel=1e-6)
    assert out["p2"][-1] == pytest.approx(-expected, rel=1e-6)
    # state space: linear drop 2 alpha L / A split evenly about the mean
    ss = statespace_simulate(k, _series(dt, np.ones(n), np.ones(n)), 100)
    assert ss["p1"][-5 * m :].mean() == pytest.approx(k.alpha * k.length / k.area, rel=1e-2)


def test_sinusoidal_steady_state_matches_transfer_function(grid):
    k, dt, m = grid
    n = 40 * m
    t = dt * np.arange(n)
    w = 0.0123
    out = lumped_simulate(k, _series(dt, np.sin(w * t), np.zeros(n)))
    late = slice(25 * m, n)
    basis = np.column_stack([np.sin(w * t[late]), np.cos(w * t[late]), np.ones(t[late].size)])
    g = compact_response(k, 1j * w)
    for ch, (i, j) in (("p1", (0, 0)), ("p2", (1, 0))):
        coef = np.linalg.lstsq(basis, out[ch][late], rcond=None)[0]
        assert complex(coef[0], coef[1]) == pytest.approx(g[i, j], rel=1e-3)


@settings(max_examples=10, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5), seed=st.integers(0, 2**16))
def test_linearity(grid, a, b, seed):
    k, dt, m = grid
    rng = np.random.default_rng(seed)
    n = 4 * m
    u = rng.standard_normal((2, n))
    v = rng.standard_normal((2, n))
    ru = lumped_simulate(k, _series(dt, *u))
    rv = lumped_simulate(k, _series(dt, *v))
    ruv = lumped_simulate(k, _series(dt, *(a * u + b * v)))
    for ch in ("p1", "p2"):
        scale = max(np.abs(ru[ch]).max(), np.abs(rv[ch]).max()) * (abs(a) + abs(b) + 1)
        assert np.abs(ruv[ch] - (a * ru[ch] + b * rv[ch])).max() <= 1e-10 * scale


def test_causality_by_truncation(grid, rng):
    k, dt, m = grid
    n = 5 * m
    q = rng.standard_normal((2, n))
    full = lumped_simulate(k, _series(dt, *q))
    cut = 3 * m + 7
    part = lumped_simulate(k, _series(dt, *q[:, :cut]))
    for ch in ("p1", "p2"):
        np.testing.assert_array_equal(full[ch][:cut], part[ch])


def test_offtake_sign_switch(grid, rng):
    k, dt, m = grid
    n = 3 * m
    q1, q2 = rng.standard_normal((2, n))
    default = lumped_simulate(k, _series(dt, q1, q2))
    printed = lumped_simulate(k, _series(dt, q1, q2), offtake_sign="printed")
    only_q2 = lumped_simulate(k, _series(dt, np.zeros(n), q2))
    np.testing.assert_allclose(printed["p2"] - default["p2"], -2 * only_q2["p2"], atol=1e-9)
    np.testing.assert_array_equal(printed["p1"], default["p1"])
    with pytest.raises(ValidationError):
        lumped_simulate(k, _series(dt, q1, q2), offtake_sign="other")


def test_absolute_output_adds_steady_ends(grid):
    k, dt, m = grid
    out = lumped_simulate(k, _series(dt, np.zeros(10), np.zeros(10)), absolute=True)
    prof = steady_profile(k.params, 2)
    assert np.all(out["p1"] == prof.pressures[0]) and np.all(out["p2"] == prof.pressures[-1])


def test_short_horizon_is_flagged(grid):
    k, dt, m = grid
    assert lumped_simulate(k, _series(dt, np.ones(m), np.zeros(m))).meta["transient_only"]
    assert not lumped_simulate(k, _series(dt, np.ones(3 * m), np.zeros(3 * m))).meta["transient_only"]
    with pytest.raises(ValidationError):
        crosscheck(k, _series(dt, np.ones(m), np.zeros(m)), n_segments=10)


def test_dt_must_divide_delay(grid):
    k, dt, m = grid
    with pytest.raises(ValidationError):
        lumped_simulate(k, _series(dt * 1.01, np.zeros(10), np.zeros(10)))
    assert delay_samples(k.t_d, dt) == m


@pytest.mark.parametrize("requested, expected_m", [(1.0, 117), (5.0, 100), (0.1, 1167)])
def test_snap_dt(consts, requested, expected_m):
    dt, m = snap_dt(consts.t_d, requested)
    assert m == expected_m and dt * m == pytest.approx(consts.t_d, rel=1e-15)
    with pytest.raises(ValidationError):
        snap_dt(consts.t_d, -1.0)


def test_csv_round_trip(tmp_path):
    ts = TimeSeries(0.5, 0.25, {"q1": [1.0, 2.0, 3.0], "q2": [0.0, -1.0, 1e-17]})
    path = tmp_path / "in.csv"
    ts.to_csv(path)
    back = TimeSeries.from_csv(path)
    assert back.t0 == 0.5 and back.dt == 0.25
    np.testing.assert_array_equal(back["q2"], ts["q2"])


def test_csv_rejections(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,q1,q2\n0,1,1\n1,1,1\n3,1,1\n")
    with pytest.raises(ValidationError):
        TimeSeries.from_csv(bad)
    bad.write_text("time,q1,q2\n0,1,1\n1,1,1\n")
    with pytest.raises(ValidationError):
        TimeSeries.from_csv(bad)


def test_time_series_invariants():
    with pytest.raises(ValidationError):
        TimeSeries(0.0, 0.0, {"q1": [1.0]})
    with pytest.raises(ValidationError):
        TimeSeries(0.0, 1.0, {"q1": [1.0, 2.0], "q2": [1.0]})
