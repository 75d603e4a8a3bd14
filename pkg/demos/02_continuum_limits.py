"""
Which walks have a continuum limit?
===================================

A jet describes a family of walks parametrized by the lattice step.  The
classifier tells which family it falls into; the emitted coefficients give
the limit equation, and the consistency residual confirms it shrinks
linearly with the step.
"""
import numpy as np

from qwdirac import JetSpec, Lattice, classify_jet, consistency_residual, emit_params
from qwdirac.continuum import default_samples

half = np.pi / 2
jets = {
    "electric, one step": JetSpec(1, zeta0=half, theta_bar=0.24, xi_bar=lambda T, X: 1.1 * T),
    "curved, two steps": JetSpec(2, xi0=half, alpha0=half, theta0=lambda T, X: 0.5 + 0.3 * np.sin(X)),
    "frozen, two steps": JetSpec(2, theta0=half, alpha0=half, xi0=0.4, theta_bar=0.7),
    "massive, two steps": JetSpec(2, theta0=np.pi, xi0=np.pi, zeta0=0.3, theta_bar=0.5),
    "no limit": JetSpec(1, theta0=0.3),
}
for name, jet in jets.items():
    print(f"{name:20s} -> {classify_jet(jet, default_samples())}")

p = emit_params(jets["electric, one step"])
print("electric walk: A1(T=2) =", p.A1(2.0, 0.0), " m- =", p.mass_minus(0.0, 0.0))


def smooth(X):
    return np.exp(1j * np.sin(X)), 0.5 * np.cos(X) + 0.2j


for name in ("electric, one step", "curved, two steps", "massive, two steps"):
    r = [consistency_residual(jets[name], smooth, Lattice(n), T0=0.5) for n in (128, 256, 512)]
    print(f"{name:20s} residuals {np.round(r, 5)}  ratios {np.round(np.divide(r[:-1], r[1:]), 3)}")
