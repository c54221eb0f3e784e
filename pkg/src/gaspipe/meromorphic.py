"""Pole expansions of the delay kernels behind the compact model.

Two kernels, both with simple poles on the imaginary axis:

* even family ``f(s) = exp(-s T) / (1 - exp(-2 s T)) = 1 / (2 sinh(s T))``,
  poles ``j k pi / T`` with residues ``(-1)**k / (2 T)``, k in Z;
* odd family ``v(s) = exp(-s T) / (1 + exp(-2 s T)) = 1 / (2 cosh(s T))``,
  poles ``j (2k + 1) pi / (2 T)`` with residues ``j (-1)**(k + 1) / (2 T)``.

The series are only conditionally convergent, so every partial sum adds each
pole together with its conjugate partner before summing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

POLE_RTOL = 1e-9

_ALIASES = {"f": "f", "fe": "f", "even": "f", "v": "v", "fo": "v", "odd": "v"}


def _family(name: str) -> str:
    try:
        return _ALIASES[str(name).lower()]
    except KeyError:
        raise ValidationError(f"unknown kernel {name!r}; expected f/Fe or v/Fo") from None


@dataclass(frozen=True)
class ExpansionTerm:
    k: int
    pole: complex
    residue: complex


def poles(name: str, k, t_d: float) -> np.ndarray:
    k = np.asarray(k)
    if _family(name) == "f":
        return 1j * k * np.pi / t_d
    return 1j * (2 * k + 1) * np.pi / (2 * t_d)


def residue_values(name: str, k, t_d: float) -> np.ndarray:
    k = np.asarray(k)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    if _family(name) == "f":
        return sign / (2 * t_d) + 0j
    return -1j * sign / (2 * t_d)


def residues(name: str, k_range, t_d: float) -> list[ExpansionTerm]:
    ks = np.asarray(list(k_range), dtype=int)
    return [
        ExpansionTerm(int(k), complex(p), complex(r))
        for k, p, r in zip(ks, poles(name, ks, t_d), residue_values(name, ks, t_d))
    ]


def conjugate_partner(name: str, k: int) -> int:
    """Index whose pole is the complex conjugate of pole ``k``."""
    return -k if _family(name) == "f" else -k - 1


def eval_closed(name: str, s, t_d: float) -> np.ndarray:
    """Exponential closed form; accepts ``Fe``/``f`` and ``Fo``/``v``."""
    s = np.asarray(s, dtype=complex)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if _family(name) == "f":
            return 0.5 / np.sinh(s * t_d)
        return 0.5 / np.cosh(s * t_d)


def g_even(s, t_d: float) -> np.ndarray:
    """Normalised product over the even poles, via G_e = 2 T F_e."""
    return 2.0 * t_d * eval_closed("f", s, t_d)


def g_odd(s, t_d: float) -> np.ndarray:
    """Normalised product over the odd poles, via G_o = 2 F_o."""
    return 2.0 * eval_closed("v", s, t_d)


def near_pole(name: str, s, t_d: float, rtol: float = POLE_RTOL) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    if _family(name) == "f":
        k = np.round(s.imag * t_d / np.pi)
    else:
        k = np.round((s.imag * 2 * t_d / np.pi - 1) / 2)
    p = poles(name, k, t_d)
    return np.abs(s - p) <= rtol * np.maximum(np.abs(p), np.pi / t_d)


def partial_fraction_sum(name: str, m: int, s, t_d: float, chunk: int = 1 << 16) -> np.ndarray:
    """Sum of the ``m`` nearest conjugate pole pairs (plus the k = 0 pole for ``f``).

    Each pair is combined before summation and the pair contributions are
    added with numpy's pairwise summation.
    """
    family = _family(name)
    if isinstance(m, bool) or int(m) != m or m < 1:
        raise ValidationError(f"truncation M must be an integer >= 1, got {m!r}")
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    if np.any(near_pole(family, flat, t_d)):
        raise ValidationError("sample point coincides with a pole")
    total = np.zeros(flat.shape, dtype=complex)
    if family == "f":
        total += residue_values("f", 0, t_d) / flat
        ks = np.arange(1, int(m) + 1)
    else:
        ks = np.arange(0, int(m))
    for start in range(0, len(ks), chunk):
        k = ks[start : start + chunk][:, None]
        kp = -k if family == "f" else -k - 1
        pair = residue_values(family, k, t_d) / (flat - poles(family, k, t_d)) + residue_values(
            family, kp, t_d
        ) / (flat - poles(family, kp, t_d))
        total += np.sum(pair, axis=0)
    return total.reshape(s.shape)


def one_sided_sum(name: str, m: int, s, t_d: float) -> np.ndarray:
    """Poles ``k = 0 .. m-1`` only, without their conjugate partners."""
    family = _family(name)
    s = np.asarray(s, dtype=complex)[..., None]
    k = np.arange(0, int(m))
    return np.sum(residue_values(family, k, t_d) / (s - poles(family, k, t_d)), axis=-1)


def numeric_residue(func, pole: complex, eps: float, n_ring: int = 64) -> complex:
    """Average of ``(s - pole) func(s)`` over a ring of radius ``eps``.

    Equivalent to the trapezoidal contour integral around the pole, which is
    spectrally accurate for analytic integrands.
    """
    theta = 2 * np.pi * np.arange(n_ring) / n_ring
    ds = eps * np.exp(1j * theta)
    return complex(np.mean(ds * func(pole + ds)))


@dataclass(frozen=True)
class IdentityReport:
    samples: np.ndarray
    m: int
    even_deviation: np.ndarray
    odd_deviation: np.ndarray
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return float(max(self.even_deviation.max(), self.odd_deviation.max()))

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def verify_identities(t_d: float, samples, m: int = 100_000, tolerance: float = 1e-3) -> IdentityReport:
    """Check G_e = 2 T F_e and G_o = 2 F_o at ``samples`` using pole sums.

    The left sides are built from the pole expansions with the residues
    scaled to the normalised products (2 T a_k and 2 c_k).
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    for family in ("f", "v"):
        if np.any(near_pole(family, samples, t_d)):
            raise ValidationError(f"a sample lies on a pole of {family}")
    g_e = 2 * t_d * partial_fraction_sum("f", m, samples, t_d)
    g_o = 2 * partial_fraction_sum("v", m, samples, t_d)
    dev_e = np.abs(g_e - 2 * t_d * eval_closed("f", samples, t_d))
    dev_o = np.abs(g_o - 2 * eval_closed("v", samples, t_d))
    return IdentityReport(samples, int(m), dev_e, dev_o, tolerance)
