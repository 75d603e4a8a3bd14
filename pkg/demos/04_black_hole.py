"""
A walk inside a black hole
==========================

In Lemaitre coordinates the radial Schwarzschild metric is realised by a
two-step walk with cos(theta) = lambda sqrt(r / r_g).  A Gaussian packet
started inside the horizon splits in two; each half follows a radial null
geodesic into the singularity, and the match improves with resolution.
"""
import numpy as np

from qwdirac.experiments import ExperimentConfig, PacketSpec, run_schwarzschild
from qwdirac.schwarzschild import SchwarzschildConfig, horizon, radius

bh = SchwarzschildConfig(r_g=300.0, lam=1.0)
print("horizon at T=0: X =", horizon(0.0, bh), "  r there:", radius(0.0, horizon(0.0, bh), bh))

cfg = ExperimentConfig("schwarzschild", resolutions=(200, 800, 1600), T_final=110.0,
                       packet=PacketSpec(0.5, 50.5), angles="schwarzschild", length=128.0,
                       schwarzschild=bh)
res = run_schwarzschild(cfg)
for b, g in res.geodesics.items():
    print(f"branch {b:+d} reaches r = 0 at T = {g.T_end:.2f}")
for n, t in res.tracking.items():
    print(f"n = {n:5d}  dx = {res.dx[n]:.3f}  ridge offset: left {t[-1]:.3f}, right {t[1]:.3f}")

# where is the density just before the left branch hits the singularity?
times, x, frames = res.maps[1600]
k = np.searchsorted(times, 0.8 * res.geodesics[-1].T_end)
print(f"T = {times[k]:.1f}: densest site X = {x[np.argmax(frames[k, : len(x) // 2])]:.2f}, "
      f"geodesic X = {res.geodesics[-1].at(times[k]):.2f}")
