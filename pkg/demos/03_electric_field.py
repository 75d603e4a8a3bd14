"""
Walk versus Dirac equation in a uniform electric field
======================================================

The one-step walk with theta = 0.24 eps, xi = 1.1 eps T, zeta = pi/2 is
compared with a spectral solution of its limit Dirac equation.  The
density mismatch falls like eps.  The full study (T = 100, n up to 8192)
is configs/electric_convergence.ini; this script runs a short version.
"""
import numpy as np

from qwdirac.experiments import ExperimentConfig, PacketSpec, run_electric_convergence, run_electric_density

cfg = ExperimentConfig("electric_convergence", resolutions=(256, 512, 1024), T_final=10.0, packet=PacketSpec(0.3))
res = run_electric_convergence(cfg)
print(f"extracted Dirac parameters: m = {res.mass}, E = {res.efield}")
for n, eps, d in res.rows:
    print(f"  n = {n:5d}   eps = {eps:.2e}   dN_rel = {d:.3e}")
print("fitted order:", round(res.slope, 3))

# density maps for a narrow and a wide packet
dens = ExperimentConfig("electric_density", resolutions=(512,), T_final=1.0, length=0.5,
                        sigmas=(0.005, 0.08), record_every=16)
out = run_electric_density(dens)
for s, (times, x, frames) in out.maps.items():
    print(f"sigmaX = {s}: {frames.shape[0]} time slices, peak density {frames.max():.1f}, "
          f"power above mode 20 at T_final {out.spectral[s]:.2e}")
