"""Where the poles and zeros of a 35 km pipe sit, and how fast they settle.

Run: python3 demos/spectrum_tour.py
"""
import numpy as np

from gaspipe import case_study, derive_constants, spectral
from gaspipe.statespace import build_state_space

k = derive_constants(case_study())
print(f"alpha = {k.alpha:.6g} 1/s, t_d = {k.t_d:.6g} s, k_g = {k.k_g:.6g} Pa/kg")

# Every pole of the discretised pipe lies on Re s = -alpha, except the integrator at 0.
model = build_state_space(k, 20)
lam = spectral.numeric_eigenvalues(model.a)
off = lam[np.abs(lam) > 1e-12]
print(f"N = 20: {lam.size} poles, real parts span [{off.real.min():.6g}, {off.real.max():.6g}]")

# The closed form reproduces the dense solver to rounding.
rep = spectral.validate_spectrum(model, spectral.eigenvalues_closed_form(k, 20))
print(f"closed form vs dense eig: max mismatch {rep.max_mismatch:.2e}")

# Refining the grid pulls the first few resonances toward k*pi/t_d.
exact = spectral.eigenvalues_asymptotic(k, 3).im
print("N      first three resonances [rad/s]      rel. error of the first")
for n in (10, 100, 1000):
    im = spectral.eigenvalues_closed_form(k, n).im[:3]
    print(f"{n:<6d} {np.array2string(im, precision=6):36s} {abs(im[0] - exact[0]) / exact[0]:.2e}")

# Zeros of the driving-point channel interlace the poles; the transfer channel has none.
z = spectral.zeros_closed_form(k, 1000, "g11").im[:3]
print("first G11 zeros:", np.array2string(z, precision=6), "  G21 zeros:", spectral.numeric_zeros(build_state_space(k, 6), "g21"))
