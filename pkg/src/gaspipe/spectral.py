"""Closed-form poles, zeros and integrator gain, plus numeric oracles.

The closed forms follow from the tridiagonal Toeplitz structure of the
pressure/flow coupling; the oracles (dense nonsymmetric eigensolver and
generalized eigenvalues of the Rosenbrock pencil) never use them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import EigenSolverError, ValidationError
from .params import DerivedConstants
from .statespace import StateSpaceModel


class Channel(str, enum.Enum):
    G11 = "g11"
    G12 = "g12"
    G21 = "g21"
    G22 = "g22"

    @classmethod
    def parse(cls, value) -> "Channel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(f"unknown channel {value!r}; expected one of g11, g12, g21, g22") from None

    @property
    def indices(self) -> tuple[int, int]:
        return int(self.value[1]) - 1, int(self.value[2]) - 1


@dataclass(frozen=True)
class _ConjugatePairs:
    """Roots -alpha +/- j*sqrt(omega**2 - alpha**2) for a list of omegas.

    When ``omega < alpha`` the pair is real (overdamped); ``im`` is then 0 and
    ``split`` holds sqrt(alpha**2 - omega**2).
    """

    alpha: float
    omega: np.ndarray
    mode: str
    n_segments: int | None

    @property
    def re(self) -> np.ndarray:
        return np.full(self.omega.shape, -self.alpha)

    @property
    def im(self) -> np.ndarray:
        return np.sqrt(np.clip(self.omega**2 - self.alpha**2, 0.0, None))

    @property
    def overdamped(self) -> np.ndarray:
        return self.omega < self.alpha

    @property
    def split(self) -> np.ndarray:
        return np.sqrt(np.clip(self.alpha**2 - self.omega**2, 0.0, None))

    def pair_values(self) -> np.ndarray:
        """Shape (K, 2): upper and lower member of each pair."""
        upper = np.where(self.overdamped, -self.alpha + self.split, -self.alpha + 1j * self.im)
        lower = np.where(self.overdamped, -self.alpha - self.split, -self.alpha - 1j * self.im)
        return np.stack([upper, lower], axis=-1).astype(complex)


@dataclass(frozen=True)
class Spectrum(_ConjugatePairs):
    lambda0: float = 0.0

    def values(self) -> np.ndarray:
        """All eigenvalues: lambda0 followed by the pairs, upper member first."""
        return np.concatenate([[complex(self.lambda0)], self.pair_values().ravel()])


@dataclass(frozen=True)
class ZeroSet(_ConjugatePairs):
    channel: Channel = Channel.G11

    def values(self) -> np.ndarray:
        return self.pair_values().ravel()


def _check_n(n, name="n_segments"):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"{name} must be an integer >= 1, got {n!r}")
    return int(n)


def eigenvalues_closed_form(consts: DerivedConstants, n_segments: int) -> Spectrum:
    n = _check_n(n_segments)
    k = np.arange(1, n + 1)
    c_over_dl = consts.c * n / consts.length
    omega = 2.0 * c_over_dl * np.sin(k * np.pi / (2 * (n + 1)))
    return Spectrum(alpha=consts.alpha, omega=omega, mode="finite", n_segments=n)


def eigenvalues_asymptotic(consts: DerivedConstants, k_max: int) -> Spectrum:
    k_max = _check_n(k_max, "k_max")
    omega = np.arange(1, k_max + 1) * np.pi / consts.t_d
    return Spectrum(alpha=consts.alpha, omega=omega, mode="asymptotic", n_segments=None)


def zeros_closed_form(consts: DerivedConstants, n_segments: int | None, channel="g11", k_max: int | None = None) -> ZeroSet:
    """Transmission zeros of one channel.

    Pass ``n_segments=None`` with ``k_max`` for the N -> infinity limit.
    G11 and G22 share their zeros; G12 and G21 have none.
    """
    channel = Channel.parse(channel)
    if n_segments is None:
        mode = "asymptotic"
        k_max = _check_n(k_max, "k_max")
        k = np.arange(1, k_max + 1)
        omega = (2 * k - 1) * np.pi / (2 * consts.t_d)
        n = None
    else:
        mode = "finite"
        n = _check_n(n_segments)
        k = np.arange(1, n + 1)
        omega = 2.0 * consts.c * n / consts.length * np.sin((2 * k - 1) * np.pi / (2 * (2 * n + 1)))
    if channel in (Channel.G12, Channel.G21):
        omega = np.empty(0)
    return ZeroSet(alpha=consts.alpha, omega=omega, mode=mode, n_segments=n, channel=channel)


def null_eigenvector(n_segments: int) -> np.ndarray:
    n = _check_n(n_segments)
    v0 = np.zeros(2 * n + 1)
    v0[: n + 1] = 1.0
    return v0


def gain(consts: DerivedConstants, n_segments: int | None = None) -> float:
    """Residue of G11 at s = 0: c^2 N / (A (N+1) L), or c^2/(A L) for N -> infinity."""
    k_g = consts.c**2 / (consts.area * consts.length)
    if n_segments is None:
        return k_g
    n = _check_n(n_segments)
    return k_g * n / (n + 1)


def projection_gain(model: StateSpaceModel) -> float:
    """Component of B1 along v0, computed from the assembled matrices."""
    v0 = null_eigenvector(model.n_segments)
    return float(v0 @ model.b[:, 0] / (v0 @ v0))


def numeric_eigenvalues(a: np.ndarray) -> np.ndarray:
    try:
        return linalg.eigvals(a)
    except linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver did not converge: {exc}") from exc


def numeric_zeros(model: StateSpaceModel, channel="g11") -> np.ndarray:
    """Finite invariant zeros of one SISO channel from the Rosenbrock pencil."""
    i, j = Channel.parse(channel).indices
    n = model.n_states
    m = np.zeros((n + 1, n + 1))
    m[:n, :n] = model.a
    m[:n, n] = model.b[:, j]
    m[n, :n] = model.c[i]
    e = np.zeros_like(m)
    e[:n, :n] = np.eye(n)
    try:
        w = linalg.eigvals(m, e)
    except linalg.LinAlgError as exc:
        raise EigenSolverError(f"generalized eigensolver did not converge: {exc}") from exc
    return w[np.isfinite(w)]


def match_nearest(reference: np.ndarray, candidates: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Greedy nearest-neighbour pairing of ``reference`` against ``candidates``.

    Returns the matched candidate for every reference value and the
    absolute distances.
    """
    reference = np.asarray(reference, dtype=complex)
    candidates = np.asarray(candidates, dtype=complex)
    if len(candidates) < len(reference):
        raise ValidationError("fewer candidates than reference values")
    used = np.zeros(len(candidates), dtype=bool)
    matched = np.empty(len(reference), dtype=complex)
    for i, r in enumerate(reference):
        d = np.abs(candidates - r)
        d[used] = np.inf
        j = int(np.argmin(d))
        used[j] = True
        matched[i] = candidates[j]
    return matched, np.abs(matched - reference)


@dataclass(frozen=True)
class SpectrumReport:
    closed_form: np.ndarray
    numeric: np.ndarray
    max_mismatch: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_mismatch <= self.tolerance)


def validate_spectrum(model: StateSpaceModel, spectrum: Spectrum, rtol: float = 1e-8) -> SpectrumReport:
    """Compare closed-form eigenvalues with a dense eigensolver on ``model.a``.

    Passes when the largest pairing distance is at most
    ``rtol * max(1, max|lambda|)``.
    """
    if spectrum.mode != "finite" or spectrum.n_segments != model.n_segments:
        raise ValidationError("spectrum must be finite-N with the model's segment count")
    closed = spectrum.values()
    numeric = numeric_eigenvalues(model.a)
    matched, dist = match_nearest(closed, numeric)
    tol = rtol * max(1.0, float(np.max(np.abs(closed))))
    return SpectrumReport(closed_form=closed, numeric=matched, max_mismatch=float(dist.max()), tolerance=tol)
