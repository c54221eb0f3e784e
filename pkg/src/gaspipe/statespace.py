"""Finite-difference state-space realization of the linearised pipe.

State layout is ``x = (p_0 .. p_N, q_1 .. q_N)``: node pressures followed by
section mass flows, all deviations from the operating point.  Inputs are the
boundary flows ``u = (q_0, q_{N+1})`` and outputs the end pressures
``y = (p_0, p_N)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DimensionError, UnstableStepError, ValidationError
from .params import DerivedConstants

DEFAULT_MAX_STATES = 20001

# dt * max|Im(lambda)| limit for the explicit RK4 option.
RK4_STEP_LIMIT = 0.5


@dataclass(frozen=True)
class DiscretizationGrid:
    n_segments: int
    delta_l: float

    @classmethod
    def uniform(cls, length: float, n_segments: int) -> "DiscretizationGrid":
        if isinstance(n_segments, bool) or int(n_segments) != n_segments or n_segments < 1:
            raise ValidationError(f"n_segments must be an integer >= 1, got {n_segments!r}")
        n = int(n_segments)
        return cls(n_segments=n, delta_l=length / n)

    @property
    def n_states(self) -> int:
        return 2 * self.n_segments + 1


@dataclass(frozen=True)
class StateSpaceModel:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    state_labels: tuple
    consts: DerivedConstants = field(repr=False)
    grid: DiscretizationGrid
    realization: str = "physical"

    @property
    def n_segments(self) -> int:
        return self.grid.n_segments

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def max_frequency(self) -> float:
        """Upper bound 2c/dl on the imaginary part of every eigenvalue."""
        return 2.0 * self.consts.c / self.grid.delta_l


@dataclass(frozen=True)
class SimulationResult:
    time: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    states: np.ndarray | None = None


def _grid_for(consts: DerivedConstants, grid, max_states: int) -> DiscretizationGrid:
    if not isinstance(grid, DiscretizationGrid):
        grid = DiscretizationGrid.uniform(consts.length, grid)
    if grid.n_segments < 1:
        raise ValidationError("n_segments must be >= 1")
    if grid.n_states > max_states:
        raise ValidationError(
            f"model would have {grid.n_states} states, above the cap of {max_states}"
        )
    return grid


def _labels(n: int) -> tuple:
    return tuple(f"p_{i}" for i in range(n + 1)) + tuple(f"q_{i}" for i in range(1, n + 1))


def build_state_space(consts: DerivedConstants, grid, max_states: int = DEFAULT_MAX_STATES) -> StateSpaceModel:
    """Assemble (A, B, C) for ``grid`` (a :class:`DiscretizationGrid` or a segment count)."""
    grid = _grid_for(consts, grid, max_states)
    n = grid.n_segments
    gamma = consts.c**2 / (consts.area * grid.delta_l)  # pressure rate per unit flow
    rho = consts.area / grid.delta_l  # flow rate per unit pressure

    a = np.zeros((2 * n + 1, 2 * n + 1))
    idx = np.arange(n)
    # dp_i/dt = gamma (q_i - q_{i+1}) with q_0, q_{N+1} entering through B
    a[idx, n + 1 + idx] = -gamma
    a[idx + 1, n + 1 + idx] = gamma
    # dq_i/dt = rho (p_{i-1} - p_i) - 2 alpha q_i
    a[n + 1 + idx, idx] = rho
    a[n + 1 + idx, idx + 1] = -rho
    a[n + 1 + idx, n + 1 + idx] = -2.0 * consts.alpha

    b = np.zeros((2 * n + 1, 2))
    b[0, 0] = gamma
    b[n, 1] = -gamma
    c = np.zeros((2, 2 * n + 1))
    c[0, 0] = 1.0
    c[1, n] = 1.0
    return StateSpaceModel(a=a, b=b, c=c, state_labels=_labels(n), consts=consts, grid=grid)


def similarity_matrix(n_segments: int) -> np.ndarray:
    """Matrix T with z = T x: total pressure, adjacent pressure drops, flows."""
    n = n_segments
    t = np.zeros((2 * n + 1, 2 * n + 1))
    t[0, : n + 1] = 1.0
    idx = np.arange(n)
    t[1 + idx, idx] = 1.0
    t[1 + idx, idx + 1] = -1.0
    t[n + 1 + idx, n + 1 + idx] = 1.0
    return t


def build_transformed_realization(
    consts: DerivedConstants, grid, max_states: int = DEFAULT_MAX_STATES
) -> StateSpaceModel:
    """Bordered realization in the coordinates of :func:`similarity_matrix`.

    The first state (sum of node pressures) is decoupled and carries the
    integrator; the remaining block has a symmetric tridiagonal pressure/flow
    coupling, which is what makes the spectrum computable in closed form.
    """
    grid = _grid_for(consts, grid, max_states)
    n = grid.n_segments
    gamma = consts.c**2 / (consts.area * grid.delta_l)
    rho = consts.area / grid.delta_l

    a = np.zeros((2 * n + 1, 2 * n + 1))
    idx = np.arange(n)
    a12 = np.diag(np.full(n, -2.0 * gamma)) + np.diag(np.full(n - 1, gamma), 1) + np.diag(np.full(n - 1, gamma), -1)
    a[1 : n + 1, n + 1 :] = a12
    a[n + 1 + idx, 1 + idx] = rho
    a[n + 1 + idx, n + 1 + idx] = -2.0 * consts.alpha

    b = np.zeros((2 * n + 1, 2))
    b[0] = (gamma, -gamma)
    b[1, 0] += gamma
    b[n, 1] += gamma

    c = np.zeros((2, 2 * n + 1))
    c[:, 0] = 1.0 / (n + 1)
    c[0, 1 : n + 1] = (n + 1 - np.arange(1, n + 1)) / (n + 1)
    c[1, 1 : n + 1] = -np.arange(1, n + 1) / (n + 1)

    labels = ("sum_p",) + tuple(f"dp_{i}" for i in range(1, n + 1)) + tuple(f"q_{i}" for i in range(1, n + 1))
    return StateSpaceModel(a=a, b=b, c=c, state_labels=labels, consts=consts, grid=grid, realization="transformed")


def integrate(
    model: StateSpaceModel,
    u,
    dt: float,
    x0=None,
    method: str = "trapezoid",
    t0: float = 0.0,
    keep_states: bool = False,
) -> SimulationResult:
    """Fixed-step time integration of x' = A x + B u, y = C x.

    ``u`` has shape ``(n_samples, 2)``; sample ``k`` is held over
    ``[t_k, t_{k+1})``.  The returned outputs are sampled on the same grid,
    with ``y[0] = C x0``.

    ``method="trapezoid"`` (default) is A-stable and has no step limit.
    ``method="rk4"`` requires ``dt * max|Im lambda| <= 0.5``.
    """
    if not np.isfinite(dt) or dt <= 0:
        raise ValidationError(f"dt must be > 0, got {dt!r}")
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] != 2:
        raise DimensionError(f"u must have shape (n_samples, 2), got {u.shape}")
    n_x = model.n_states
    x = np.zeros(n_x) if x0 is None else np.array(x0, dtype=float)
    if x.shape != (n_x,):
        raise DimensionError(f"x0 must have shape ({n_x},), got {x.shape}")

    a, b = model.a, model.b
    if method == "trapezoid":
        eye = np.eye(n_x)
        lu = linalg.lu_factor(eye - 0.5 * dt * a)
        phi = linalg.lu_solve(lu, eye + 0.5 * dt * a)
        gam = linalg.lu_solve(lu, dt * b)

        def step(x, uk):
            return phi @ x + gam @ uk

    elif method == "rk4":
        if dt * model.max_frequency > RK4_STEP_LIMIT:
            raise UnstableStepError(
                f"dt * max|Im lambda| = {dt * model.max_frequency:.3g} exceeds {RK4_STEP_LIMIT} for rk4"
            )

        def step(x, uk):
            bu = b @ uk
            k1 = a @ x + bu
            k2 = a @ (x + 0.5 * dt * k1) + bu
            k3 = a @ (x + 0.5 * dt * k2) + bu
            k4 = a @ (x + dt * k3) + bu
            return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    else:
        raise ValidationError(f"unknown integration method {method!r}")

    n_t = u.shape[0]
    y = np.empty((n_t, 2))
    states = np.empty((n_t, n_x)) if keep_states else None
    for k in range(n_t):
        y[k] = model.c @ x
        if keep_states:
            states[k] = x
        if k + 1 < n_t:
            x = step(x, u[k])
    time = t0 + dt * np.arange(n_t)
    return SimulationResult(time=time, y1=y[:, 0], y2=y[:, 1], states=states)
