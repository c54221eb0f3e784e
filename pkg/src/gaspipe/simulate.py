"""Time-domain simulation with the compact delay model.

The compact channels are irrational in ``s`` but become exact recursions in
time once the sample interval divides the transport delay: with
``m = t_d / dt`` every ``exp(-s t_d)`` is a lookup ``m`` samples back.  Only
the rational part ``(s + alpha) / s`` is discretised (bilinear rule), which
keeps the integrator residue exact.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, ValidationError
from .params import DerivedConstants, steady_profile
from .statespace import build_state_space, integrate
from .transferfn import compact_gains

MIN_DELAY_SAMPLES = 100
OFFTAKE_SIGNS = ("statespace", "printed")


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled named channels starting at ``t0`` with step ``dt``."""

    t0: float
    dt: float
    channels: dict
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be > 0, got {self.dt!r}")
        chans = {k: np.asarray(v, dtype=float) for k, v in self.channels.items()}
        lengths = {v.shape for v in chans.values()}
        if len(lengths) > 1 or any(len(s) != 1 for s in lengths):
            raise DimensionError("all channels must be 1-D and of equal length")
        object.__setattr__(self, "channels", chans)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def __len__(self) -> int:
        return len(next(iter(self.channels.values()))) if self.channels else 0

    @property
    def time(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    @classmethod
    def from_csv(cls, path, columns=("q1", "q2"), rtol: float = 1e-6) -> "TimeSeries":
        """Read ``t,<columns>`` with a header; the time column must be uniform."""
        with open(Path(path), newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            expected = ["t", *columns]
            if header != expected:
                raise ValidationError(f"CSV header must be {','.join(expected)}, got {','.join(header)}")
            rows = [[float(x) for x in row] for row in reader if row]
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2 or data.shape[0] < 2:
            raise ValidationError("CSV must contain at least two samples")
        t = data[:, 0]
        steps = np.diff(t)
        dt = float(steps.mean())
        if dt <= 0 or np.max(np.abs(steps - dt)) > rtol * max(dt, 1.0):
            raise ValidationError("time column is not uniformly sampled")
        return cls(float(t[0]), dt, {name: data[:, i + 1] for i, name in enumerate(columns)})

    def to_csv(self, path, columns=None) -> None:
        columns = list(self.channels) if columns is None else list(columns)
        with open(Path(path), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", *columns])
            for i, t in enumerate(self.time):
                writer.writerow([f"{t:.17g}"] + [f"{self.channels[c][i]:.17g}" for c in columns])

    def resample(self, dt: float, t_end: float | None = None) -> "TimeSeries":
        """Linear interpolation onto a new uniform grid starting at ``t0``."""
        t_end = self.time[-1] if t_end is None else t_end
        n = int(math.floor((t_end - self.t0) / dt + 1e-9)) + 1
        t_new = self.t0 + dt * np.arange(n)
        return TimeSeries(self.t0, dt, {k: np.interp(t_new, self.time, v) for k, v in self.channels.items()})


@dataclass(frozen=True)
class DelayRealization:
    delay_samples: int
    dt: float
    beta: float
    k_11: float
    k_21: float
    alpha: float
    k_g: float

    @classmethod
    def from_constants(cls, consts: DerivedConstants, dt: float) -> "DelayRealization":
        m = delay_samples(consts.t_d, dt)
        k11, k21 = compact_gains(consts)
        return cls(m, dt, consts.beta, k11, k21, consts.alpha, consts.k_g)


def snap_dt(t_d: float, dt: float, min_samples: int = MIN_DELAY_SAMPLES) -> tuple[float, int]:
    """Nearest ``t_d / m`` to ``dt`` with integer ``m >= min_samples``."""
    if not (np.isfinite(dt) and dt > 0):
        raise ValidationError(f"dt must be > 0, got {dt!r}")
    m = max(int(min_samples), int(round(t_d / dt)))
    return t_d / m, m


def delay_samples(t_d: float, dt: float, rtol: float = 1e-9) -> int:
    m = round(t_d / dt)
    if m < 1 or abs(m * dt - t_d) > rtol * t_d:
        raise ValidationError(f"dt = {dt!r} does not divide t_d = {t_d!r}; use snap_dt")
    return int(m)


def _delayed(x: np.ndarray, lag: int) -> np.ndarray:
    out = np.zeros_like(x)
    if lag < len(x):
        out[lag:] = x[: len(x) - lag]
    return out


def _bilinear_integral(w: np.ndarray, dt: float) -> np.ndarray:
    # y[n] = y[n-1] + dt/2 (w[n] + w[n-1]), zero history
    return dt * (np.cumsum(w) - 0.5 * w)


def _comb_feedback(v: np.ndarray, beta: float, lag: int) -> np.ndarray:
    """Solve y[n] = v[n] + beta * y[n - lag] with zero history, block by block."""
    y = v.copy()
    for start in range(lag, len(y), lag):
        stop = min(start + lag, len(y))
        y[start:stop] += beta * y[start - lag : stop - lag]
    return y


def _path_g11(r: DelayRealization, u: np.ndarray) -> np.ndarray:
    w = u + r.beta * _delayed(u, 2 * r.delay_samples)
    v = r.k_11 * (w + r.alpha * _bilinear_integral(w, r.dt))
    return _comb_feedback(v, r.beta, 2 * r.delay_samples)


def _path_g21(r: DelayRealization, u: np.ndarray) -> np.ndarray:
    w = _delayed(u, r.delay_samples)
    v = r.k_21 * (w + r.alpha * _bilinear_integral(w, r.dt))
    return _comb_feedback(v, r.beta, 2 * r.delay_samples)


def lumped_simulate(
    consts: DerivedConstants,
    inputs: TimeSeries,
    offtake_sign: str = "statespace",
    absolute: bool = False,
) -> TimeSeries:
    """Intake/offtake pressure deviations ``p1, p2`` from flows ``q1, q2``.

    ``p1 = G11 q1 - G21 q2`` and ``p2 = G21 q1 - G11 q2``, i.e. ``q2`` is the
    flow leaving the pipe, matching the state-space input matrix.
    ``offtake_sign="printed"`` uses ``p2 = G21 q1 + G11 q2`` instead.

    ``inputs.dt`` must divide ``t_d``; see :func:`snap_dt`.  A horizon
    shorter than ``2 t_d`` is allowed and marked ``transient_only`` in
    ``meta``.  ``absolute=True`` adds the steady end pressures.
    """
    if offtake_sign not in OFFTAKE_SIGNS:
        raise ValidationError(f"offtake_sign must be one of {OFFTAKE_SIGNS}")
    for name in ("q1", "q2"):
        if name not in inputs.channels:
            raise ValidationError(f"inputs must provide channel {name!r}")
    r = DelayRealization.from_constants(consts, inputs.dt)
    q1, q2 = inputs["q1"], inputs["q2"]
    g11_q2 = _path_g11(r, q2)
    p1 = _path_g11(r, q1) - _path_g21(r, q2)
    p2 = _path_g21(r, q1) + (g11_q2 if offtake_sign == "printed" else -g11_q2)
    if absolute:
        prof = steady_profile(consts.params, 2)
        p1 = p1 + prof.pressures[0]
        p2 = p2 + prof.pressures[-1]
    horizon = inputs.dt * (len(inputs) - 1)
    meta = {"transient_only": horizon < 2 * consts.t_d, "delay_samples": r.delay_samples}
    return TimeSeries(inputs.t0, inputs.dt, {"p1": p1, "p2": p2}, meta)


def statespace_simulate(consts: DerivedConstants, inputs: TimeSeries, n_segments: int, method: str = "trapezoid") -> TimeSeries:
    model = build_state_space(consts, n_segments)
    u = np.column_stack([inputs["q1"], inputs["q2"]])
    res = integrate(model, u, inputs.dt, method=method, t0=inputs.t0)
    return TimeSeries(inputs.t0, inputs.dt, {"p1": res.y1, "p2": res.y2})


@dataclass(frozen=True)
class CrosscheckReport:
    lumped: TimeSeries
    statespace: TimeSeries
    start_index: int
    max_abs: dict
    rms: dict
    rms_reference: dict

    def relative_rms(self, channel: str = "p1") -> float:
        return self.rms[channel] / self.rms_reference[channel]


def crosscheck(consts: DerivedConstants, inputs: TimeSeries, n_segments: int = 400, offtake_sign: str = "statespace") -> CrosscheckReport:
    """Run both models on ``inputs`` and compare after the first ``2 t_d``.

    ``rms_reference`` is the RMS of the state-space output over the same
    window; a window with no samples raises.
    """
    lumped = lumped_simulate(consts, inputs, offtake_sign=offtake_sign)
    ss = statespace_simulate(consts, inputs, n_segments)
    start = int(math.ceil(2 * consts.t_d / inputs.dt - 1e-9))
    if start >= len(inputs):
        raise ValidationError("horizon must exceed 2 t_d for a crosscheck")
    max_abs, rms, ref = {}, {}, {}
    for ch in ("p1", "p2"):
        diff = lumped[ch][start:] - ss[ch][start:]
        max_abs[ch] = float(np.max(np.abs(diff)))
        rms[ch] = float(np.sqrt(np.mean(diff**2)))
        ref[ch] = float(np.sqrt(np.mean(ss[ch][start:] ** 2)))
    return CrosscheckReport(lumped, ss, start, max_abs, rms, ref)
