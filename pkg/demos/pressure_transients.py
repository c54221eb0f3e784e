"""Drive the pipe with flow changes and watch the end pressures.

Run: python3 demos/pressure_transients.py
"""
import numpy as np

from gaspipe import TimeSeries, case_study, crosscheck, derive_constants, lumped_simulate, snap_dt

k = derive_constants(case_study())
dt, m = snap_dt(k.t_d, 1.0)
print(f"dt snapped to {dt:.6g} s ({m} samples per transport delay)")

# A 10 kg/s intake step: the offtake sees nothing for one transport delay,
# then both ends ramp together at k_g * 10 Pa/s as line pack accumulates.
n = 30 * m + 1
t = dt * np.arange(n)
step = lumped_simulate(k, TimeSeries(0.0, dt, {"q1": np.full(n, 10.0), "q2": np.zeros(n)}))
first = int(np.argmax(step["p2"] != 0))
print(f"offtake first moves at t = {t[first]:.2f} s (t_d = {k.t_d:.2f} s)")
late = slice(25 * m, n)
print(f"late slope of p1: {np.polyfit(t[late], step['p1'][late], 1)[0]:.5f} Pa/s, expected {10 * k.k_g:.5f}")

# Balanced extra flow settles to a fixed extra pressure drop instead of drifting.
# Flows are deviations from the nominal 90 kg/s; absolute=True adds the steady ends.
bal = lumped_simulate(k, TimeSeries(0.0, dt, {"q1": np.ones(n), "q2": np.ones(n)}), absolute=True)
print(f"absolute end pressures at nominal flow + 1 kg/s: {bal['p1'][-1] / 1e5:.4f} bar, {bal['p2'][-1] / 1e5:.4f} bar")

# The delay model and a 400-segment state-space model agree on slow demand swings.
n = 10 * m + 1
t = dt * np.arange(n)
q1 = sum(np.sin(w * t) for w in (0.002, 0.005, 0.01))
q2 = sum(0.5 * np.sin(1.3 * w * t) for w in (0.002, 0.005, 0.01))
rep = crosscheck(k, TimeSeries(0.0, dt, {"q1": q1, "q2": q2}), n_segments=400)
print(f"delay vs state-space RMS gap: p1 {100 * rep.relative_rms('p1'):.2f}%, p2 {100 * rep.relative_rms('p2'):.2f}%")
