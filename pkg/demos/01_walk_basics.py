"""
A first walk
============

Build a coin, push a localized amplitude through a few steps and check the
exact lattice symmetries: unitarity, the two-step rule and the gauge
transformation of the coin angles.
"""
import numpy as np

from qwdirac import AngleField, GaugePhase, Lattice, SpinorField, build_coin
from qwdirac import build_s2_coefficients, evolve, gauge_transform, gauge_transform_angles, step_s2

B = build_coin(0.24, 1.1, np.pi / 2, 0.0)
print("coin:\n", np.round(B, 4))
print("B^dag B - 1:", np.abs(B.conj().T @ B - np.eye(2)).max())

# start with everything on one site, half left-moving, half right-moving
lat = Lattice(64)
L = np.zeros(64, complex)
L[32] = 1 / np.sqrt(2)
psi = SpinorField.on(lat, L, 1j * L).normalized()

angles = AngleField(theta=np.pi / 4)
out = evolve(psi, angles, lat, 20)
print("norm after 20 steps:", out.norm)
print("occupied sites:", np.nonzero(out.density > 1e-12)[0])

# two steps at once give the same amplitudes
two = step_s2(psi, build_s2_coefficients(angles, lat, 0), lat)
print("S2 vs two S1 steps:", two.max_abs_diff(evolve(psi, angles, lat, 2)))

# a site-dependent phase rotation is absorbed by shifting xi, zeta and alpha
rng = np.random.default_rng(1)
phase = GaugePhase(rng.uniform(-np.pi, np.pi, size=(6, 64)))
moved = evolve(gauge_transform(psi, phase, lat, 0), gauge_transform_angles(angles, phase), lat, 5)
print("gauge covariance error:", gauge_transform(evolve(psi, angles, lat, 5), phase, lat, 5).max_abs_diff(moved))
