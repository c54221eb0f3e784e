"""Transfer-function evaluators for the 2x2 pipe model.

Four evaluators share one calling convention: ``f(..., s)`` with ``s`` a
complex scalar or array returns an array of shape ``s.shape + (2, 2)``
ordered ``[[G11, G12], [G21, G22]]``.

* :func:`truncated_response` - pole/zero product truncated at ``n`` factors.
* :func:`compact_response` - closed delay form with gains K11, K21.
* :func:`resolvent_response` - C (sI - A)^-1 B for an assembled model.
* :func:`exact_response` - hyperbolic closed form of the untruncated product.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import SingularSolveError, ValidationError
from .params import DerivedConstants
from .spectral import Channel, eigenvalues_closed_form
from .statespace import StateSpaceModel, build_state_space

POLE_RTOL = 1e-9
DEFAULT_ORDER = 200
DEFAULT_SEGMENTS = 400
_CHUNK = 512


def _assemble(g11, g21) -> np.ndarray:
    out = np.empty(np.shape(g11) + (2, 2), dtype=complex)
    out[..., 0, 0] = g11
    out[..., 0, 1] = -g21
    out[..., 1, 0] = g21
    out[..., 1, 1] = -g11
    return out


def _tanhc(x: float) -> float:
    return 1.0 if x == 0 else float(np.tanh(x) / x)


def _sinhc(x: float) -> float:
    return 1.0 if x == 0 else float(np.sinh(x) / x)


def _expm1c(x: float) -> float:
    """(1 - exp(-2x)) / (2x), continuous at 0."""
    return 1.0 if x == 0 else float(-np.expm1(-2.0 * x) / (2.0 * x))


# -- gain constants ---------------------------------------------------------

@dataclass(frozen=True)
class GainConstants:
    """Product gains and the compact-model gains.

    ``k_k[i]`` and ``k_hat_k[i]`` hold the factors for ``k = i + 1``.
    ``k_bar_11_partial``/``k_bar_12_partial`` are the order-``m`` partial
    products; ``k_bar_11``/``k_bar_12`` their tanh(x)/x and sinh(x)/x limits
    with x = alpha t_d.
    """

    m: int
    k_k: np.ndarray
    k_hat_k: np.ndarray
    k_bar_11_partial: float
    k_bar_12_partial: float
    k_bar_11: float
    k_bar_12: float
    k_11: float
    k_21: float


def compact_gains(consts: DerivedConstants) -> tuple[float, float]:
    """K11 = K_G tanh(alpha t_d)/alpha and K21 = K_G (1 - exp(-2 alpha t_d))/alpha."""
    x = consts.alpha * consts.t_d
    k11 = consts.k_g * consts.t_d * _tanhc(x)
    k21 = 2.0 * consts.k_g * consts.t_d * _expm1c(x)
    return k11, k21


def gain_constants(consts: DerivedConstants, m: int) -> GainConstants:
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValidationError(f"truncation m must be an integer >= 1, got {m!r}")
    m = int(m)
    k = np.arange(1, m + 1, dtype=float)
    a2 = consts.alpha**2
    w02 = consts.omega0**2
    k_k = (2 * k / (2 * k - 1)) ** 2
    k_hat_k = (a2 + 4 * k**2 * w02) / (a2 + (2 * k - 1) ** 2 * w02)
    even = np.log1p(a2 / (4 * k**2 * w02))
    odd = np.log1p(a2 / ((2 * k - 1) ** 2 * w02))
    x = consts.alpha * consts.t_d
    k11, k21 = compact_gains(consts)
    return GainConstants(
        m=m,
        k_k=k_k,
        k_hat_k=k_hat_k,
        k_bar_11_partial=float(np.exp(np.sum(even - odd))),
        k_bar_12_partial=float(np.exp(np.sum(even))),
        k_bar_11=_tanhc(x),
        k_bar_12=_sinhc(x),
        k_11=k11,
        k_21=k21,
    )


# -- evaluators -------------------------------------------------------------

def truncated_response(consts: DerivedConstants, n: int, s) -> np.ndarray:
    """Pole/zero product of order ``n``.

    Each factor is normalised to unit DC gain and the product is accumulated
    as a sum of complex logarithms, so thousands of near-unity factors do not
    drift.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"order n must be an integer >= 1, got {n!r}")
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    x = flat * (flat + 2.0 * consts.alpha)  # (s + alpha)^2 - alpha^2
    w02 = consts.omega0**2
    log11 = np.zeros(flat.shape, dtype=complex)
    log21 = np.zeros(flat.shape, dtype=complex)
    # samples exactly on a pole or zero give inf/nan rather than warnings
    with np.errstate(divide="ignore", invalid="ignore"):
        for start in range(1, int(n) + 1, _CHUNK):
            k = np.arange(start, min(start + _CHUNK, int(n) + 1), dtype=float)[:, None]
            den = np.log1p(x / (4.0 * k**2 * w02))
            num = np.log1p(x / ((2.0 * k - 1.0) ** 2 * w02))
            log11 += np.sum(num - den, axis=0)
            log21 -= np.sum(den, axis=0)
        base = consts.k_g / flat
        return _assemble(base * np.exp(log11), base * np.exp(log21)).reshape(s.shape + (2, 2))


def compact_response(consts: DerivedConstants, s) -> np.ndarray:
    """Delay form: transport delay t_d, round-trip attenuation exp(-2 alpha t_d)."""
    s = np.asarray(s, dtype=complex)
    k11, k21 = compact_gains(consts)
    beta = consts.beta
    e1 = np.exp(-s * consts.t_d)
    e2 = e1 * e1
    with np.errstate(divide="ignore", invalid="ignore"):
        common = (s + consts.alpha) / (s * (1.0 - beta * e2))
        g11 = k11 * common * (1.0 + beta * e2)
        g21 = k21 * common * e1
    return _assemble(g11, g21)


def compact_response_unnormalised(consts: DerivedConstants, s) -> np.ndarray:
    """Same channels written with K_G t_d K-bar gains instead of K11, K21."""
    s = np.asarray(s, dtype=complex)
    x = consts.alpha * consts.t_d
    ktd = consts.k_g * consts.t_d
    beta = consts.beta
    e1 = np.exp(-s * consts.t_d)
    with np.errstate(divide="ignore", invalid="ignore"):
        den = s * (1.0 - beta * e1 * e1)
        g11 = ktd * _tanhc(x) * (s + consts.alpha) * (1.0 + beta * e1 * e1) / den
        g21 = 2.0 * ktd * _sinhc(x) * (s + consts.alpha) * np.exp(-x) * e1 / den
    return _assemble(g11, g21)


def exact_response(consts: DerivedConstants, s) -> np.ndarray:
    """Untruncated product in closed form.

    With W = sqrt(s (s + 2 alpha)):  G11 = K_G t_d W coth(W t_d) / s and
    G21 = K_G t_d W / (s sinh(W t_d)).  Both are even in W, so the branch of
    the square root does not matter; the principal one keeps exp(-2 W t_d)
    bounded.
    """
    s = np.asarray(s, dtype=complex)
    w = np.sqrt(s * (s + 2.0 * consts.alpha))
    e1 = np.exp(-w * consts.t_d)
    e2 = e1 * e1
    ktd = consts.k_g * consts.t_d
    with np.errstate(divide="ignore", invalid="ignore"):
        g11 = ktd * w * (1.0 + e2) / (s * (1.0 - e2))
        g21 = ktd * w * 2.0 * e1 / (s * (1.0 - e2))
    return _assemble(g11, g21)


def resolvent_response(model: StateSpaceModel, s) -> np.ndarray:
    """C (sI - A)^-1 B by dense LU at every ``s``; no sign relations imposed."""
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    out = np.empty(flat.shape + (2, 2), dtype=complex)
    eye = np.eye(model.n_states)
    for i, si in enumerate(flat):
        try:
            x = linalg.solve(si * eye - model.a, model.b.astype(complex), check_finite=False)
        except linalg.LinAlgError as exc:
            raise SingularSolveError(f"sI - A is singular at s = {si}") from exc
        out[i] = model.c @ x
    return out.reshape(s.shape + (2, 2))


# -- poles and flags --------------------------------------------------------

def truncated_poles(consts: DerivedConstants, n: int) -> np.ndarray:
    k = np.arange(1, n + 1)
    root = np.sqrt((consts.alpha**2 - 4 * k**2 * consts.omega0**2).astype(complex))
    return np.concatenate([[0j], -consts.alpha + root, -consts.alpha - root])


def compact_poles(consts: DerivedConstants, s) -> np.ndarray:
    """Poles of the delay form nearest to each ``s`` (s = -alpha + j k pi/t_d and s = 0)."""
    s = np.asarray(s, dtype=complex)
    k = np.round(s.imag * consts.t_d / np.pi)
    return -consts.alpha + 1j * k * np.pi / consts.t_d


def near_pole(s, poles, rtol: float = POLE_RTOL, scale: float = 1.0) -> np.ndarray:
    """True where ``|s - p| <= rtol * max(|p|, scale)`` for some pole ``p``."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    poles = np.asarray(poles, dtype=complex).ravel()
    flags = np.zeros(s.shape, dtype=bool)
    for p in poles:
        flags |= np.abs(s - p) <= rtol * max(abs(p), scale)
    return flags


# -- frequency sweeps -------------------------------------------------------

@dataclass(frozen=True)
class FrequencyResponse:
    omega: np.ndarray
    values: np.ndarray
    provenance: str
    flags: np.ndarray = field(default=None)

    def channel(self, channel) -> np.ndarray:
        i, j = Channel.parse(channel).indices
        return self.values[:, i, j]

    def mag_db(self, channel="g11") -> np.ndarray:
        return 20.0 * np.log10(np.abs(self.channel(channel)))

    def phase_deg(self, channel="g11", unwrap: bool = True) -> np.ndarray:
        """Phase in degrees, unwrapped along omega or wrapped to (-180, 180]."""
        ph = np.angle(self.channel(channel))
        if unwrap:
            return np.degrees(np.unwrap(ph))
        deg = np.degrees(ph)
        return np.where(deg <= -180.0, deg + 360.0, deg)


def _threads(workers) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("GASPIPE_THREADS")
    return max(1, int(env)) if env else 1


def bode(
    consts: DerivedConstants,
    omega_min: float = 1e-4,
    omega_max: float = 1.0,
    points: int = 400,
    evaluator: str = "compact",
    order: int | None = None,
    n_segments: int | None = None,
    workers: int | None = None,
    pole_rtol: float = POLE_RTOL,
) -> FrequencyResponse:
    """Log-spaced sweep of the 2x2 response on s = j omega.

    ``evaluator`` is one of ``truncated`` (``order``, default 200),
    ``compact``, ``resolvent`` (``n_segments``, default 400) or ``exact``.
    Samples within ``pole_rtol`` of a pole are flagged, not dropped.
    """
    if not (0 < omega_min < omega_max) or not np.isfinite(omega_max):
        raise ValidationError("need 0 < omega_min < omega_max")
    if isinstance(points, bool) or int(points) != points or points < 2:
        raise ValidationError("points must be an integer >= 2")
    omega = np.logspace(np.log10(omega_min), np.log10(omega_max), int(points))
    s = 1j * omega

    if evaluator == "truncated":
        n = DEFAULT_ORDER if order is None else order
        fn = lambda chunk: truncated_response(consts, n, chunk)  # noqa: E731
        poles = truncated_poles(consts, n)
        provenance = f"truncated(n={n})"
    elif evaluator == "compact":
        fn = lambda chunk: compact_response(consts, chunk)  # noqa: E731
        poles = np.concatenate([[0j], compact_poles(consts, s)])
        provenance = "compact"
    elif evaluator == "resolvent":
        n_seg = DEFAULT_SEGMENTS if n_segments is None else n_segments
        model = build_state_space(consts, n_seg)
        fn = lambda chunk: resolvent_response(model, chunk)  # noqa: E731
        poles = eigenvalues_closed_form(consts, n_seg).values()
        provenance = f"resolvent(N={n_seg})"
    elif evaluator == "exact":
        fn = lambda chunk: exact_response(consts, chunk)  # noqa: E731
        k = np.arange(1, int(omega_max * consts.t_d / np.pi) + 2)
        root = np.sqrt((consts.alpha**2 - (k * np.pi / consts.t_d) ** 2).astype(complex))
        poles = np.concatenate([[0j], -consts.alpha + root, -consts.alpha - root])
        provenance = "exact"
    else:
        raise ValidationError(f"unknown evaluator {evaluator!r}")

    n_threads = _threads(workers)
    if n_threads > 1:
        chunks = np.array_split(s, n_threads)
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            values = np.concatenate(list(pool.map(fn, chunks)))
    else:
        values = fn(s)
    flags = near_pole(s, poles, rtol=pole_rtol, scale=consts.omega0)
    return FrequencyResponse(omega=omega, values=values, provenance=provenance, flags=flags)
