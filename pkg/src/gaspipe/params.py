"""Pipe parameters, validation and derived constants.

Every other module takes a :class:`DerivedConstants` rather than raw pipe
parameters, so the friction constant, transport delay and integrator gain
are computed in exactly one place.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import PressureCollapseError, ValidationError

#: Values printed for the 35 km case study (alpha in 1/s, gain in Pa/kg).
#: The gain does not follow from c**2/(A*L) with A = pi*D**2/4 (that gives
#: ~5.2064); it is kept only as a reference constant.
REFERENCE_ALPHA = 0.0051
REFERENCE_K_G = 5.064

CONFIG_KEYS = {
    "length_m": "L",
    "diameter_m": "D",
    "friction_factor": "f_c",
    "speed_of_sound_m_s": "c",
    "nominal_massflow_kg_s": "q_m",
    "nominal_pressure_pa": "p_m",
}


@dataclass(frozen=True)
class PipeParameters:
    """Geometry and operating point of a single pipe.

    Attributes are in SI units: length ``L`` and diameter ``D`` in m,
    dimensionless friction factor ``f_c``, isothermal speed of sound ``c``
    in m/s, nominal mass flow ``q_m`` in kg/s and nominal pressure ``p_m``
    in Pa.
    """

    L: float
    D: float
    f_c: float
    c: float
    q_m: float
    p_m: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValidationError(f"{f.name} must be a real number, got {value!r}") from None
            if not math.isfinite(value):
                raise ValidationError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, value)
        for name in ("L", "D", "c", "p_m"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("f_c", "q_m"):
            if getattr(self, name) < 0.0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def area(self) -> float:
        return math.pi * self.D**2 / 4.0

    def replace(self, **changes) -> "PipeParameters":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return PipeParameters(**values)

    def to_config(self) -> dict:
        return {key: getattr(self, attr) for key, attr in CONFIG_KEYS.items()}


@dataclass(frozen=True)
class DerivedConstants:
    """Scalars shared by all models.

    ``area`` [m^2], ``alpha`` [1/s] (half the linearised friction rate),
    ``t_d`` [s] transport delay L/c, ``omega0`` [rad/s] = pi/(2 t_d) and
    ``k_g`` [Pa/kg] the integrator gain c^2/(A L).
    """

    area: float
    alpha: float
    t_d: float
    omega0: float
    k_g: float
    params: PipeParameters

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def length(self) -> float:
        return self.params.L

    @property
    def beta(self) -> float:
        """Round-trip attenuation exp(-2 alpha t_d)."""
        return math.exp(-2.0 * self.alpha * self.t_d)

    def with_alpha(self, alpha: float) -> "DerivedConstants":
        """Copy with a different friction constant (used for lossless checks)."""
        if not math.isfinite(alpha) or alpha < 0:
            raise ValidationError(f"alpha must be finite and >= 0, got {alpha!r}")
        return DerivedConstants(self.area, float(alpha), self.t_d, self.omega0, self.k_g, self.params)


@dataclass(frozen=True)
class SteadyProfile:
    positions: np.ndarray
    pressures: np.ndarray


def derive_constants(params: PipeParameters) -> DerivedConstants:
    p = params
    area = p.area
    alpha = p.f_c * p.c**2 / (4.0 * p.D * area) * p.q_m / p.p_m
    t_d = p.L / p.c
    omega0 = math.pi / (2.0 * t_d)
    k_g = p.c**2 / (area * p.L)
    return DerivedConstants(area=area, alpha=alpha, t_d=t_d, omega0=omega0, k_g=k_g, params=p)


def steady_profile(params: PipeParameters, n_points: int) -> SteadyProfile:
    """Sample the steady pressure profile anchored at the intake (l0 = 0).

    Uses ``p(l)**2 = p_m**2 - f_c c^2 q_m^2 l / (2 D A^2)``.  Raises
    :class:`PressureCollapseError` when the radicand is not positive
    somewhere in ``[0, L]``.
    """
    if int(n_points) != n_points or n_points < 2:
        raise ValidationError(f"n_points must be an integer >= 2, got {n_points!r}")
    p = params
    slope = p.f_c * p.c**2 / (2.0 * p.D * p.area**2) * p.q_m**2
    positions = np.linspace(0.0, p.L, int(n_points))
    radicand = p.p_m**2 - slope * positions
    if radicand[-1] <= 0.0:
        l_max = p.p_m**2 / slope
        raise PressureCollapseError(
            f"pressure collapse at l = {l_max:.6g} m < L = {p.L:.6g} m; "
            "flow too high or pipe too long for the linearisation"
        )
    return SteadyProfile(positions=positions, pressures=np.sqrt(radicand))


def case_study() -> PipeParameters:
    """35 km, 793 mm pipe at 90 kg/s and 80 bar."""
    return PipeParameters(L=35_000.0, D=0.793, f_c=0.0079, c=300.0, q_m=90.0, p_m=8.0e6)


def params_from_config(doc: dict) -> PipeParameters:
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    unknown = sorted(set(doc) - set(CONFIG_KEYS))
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(set(CONFIG_KEYS) - set(doc))
    if missing:
        raise ValidationError(f"missing config keys: {', '.join(missing)}")
    for key, value in doc.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{key} must be a number, got {value!r}")
    return PipeParameters(**{attr: doc[key] for key, attr in CONFIG_KEYS.items()})


def load_params(path) -> PipeParameters:
    # json accepts NaN/Infinity literals; PipeParameters rejects them.
    with open(Path(path), encoding="utf-8") as fh:
        doc = json.load(fh)
    return params_from_config(doc)
