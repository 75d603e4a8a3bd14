"""Seeded randomized checks of the exact discrete invariants.

Each check draws random angle fields and states, measures the worst
violation and compares it with a bound.  A negative control runs the same
norm check with a deliberately non-unitary coin and must be flagged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dirac import FlatDiracConfig, dirac_step_flat
from .lattice import AngleField, Lattice, SpinorField, build_coin
from .walk import (
    GaugePhase,
    _s1_arrays,
    build_s2_coefficients,
    gauge_transform,
    gauge_transform_angles,
    step_s1,
    step_s1_fourier,
    step_s2,
)


@dataclass
class Check:
    name: str
    measured: float
    bound: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.bound - self.measured


@dataclass
class PropertyReport:
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1

    def format(self) -> str:
        lines = [f"property suite, seed {self.seed}"]
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(f"{tag}  {c.name:<34} measured {c.measured:.3e}  bound {c.bound:.1e}")
        lines.append("all passed" if self.passed else "FAILURES present")
        return "\n".join(lines)


def random_angles(rng: np.random.Generator, n: int, slices: int) -> AngleField:
    """Independent uniform angles per site and time slice."""
    draw = lambda lo, hi: rng.uniform(lo, hi, size=(slices, n))  # noqa: E731
    return AngleField(draw(0, np.pi), draw(-np.pi, np.pi), draw(-np.pi, np.pi), draw(-np.pi, np.pi))


def random_state(rng: np.random.Generator, lattice: Lattice) -> SpinorField:
    z = rng.normal(size=(2, lattice.n)) + 1j * rng.normal(size=(2, lattice.n))
    return SpinorField.on(lattice, z[0], z[1]).normalized()


def _instance(rng, n_min=4, n_max=64):
    lat = Lattice(int(rng.integers(n_min, n_max + 1)), float(rng.uniform(0.5, 10.0)))
    return lat, random_angles(rng, lat.n, 4), random_state(rng, lat)


def check_norm(rng, instances):
    worst = 0.0
    for _ in range(instances):
        lat, ang, psi = _instance(rng)
        a = step_s1(psi, ang, lat, 0)
        b = step_s2(psi, build_s2_coefficients(ang, lat, 0), lat)
        worst = max(worst, abs(a.norm - psi.norm), abs(b.norm - psi.norm))
    return worst


def check_s2_composition(rng, instances):
    worst = 0.0
    for _ in range(instances):
        lat, ang, psi = _instance(rng)
        two = step_s1(step_s1(psi, ang, lat, 0), ang, lat, 1)
        one = step_s2(psi, build_s2_coefficients(ang, lat, 0), lat)
        worst = max(worst, one.max_abs_diff(two))
    return worst


def check_fourier_shift(rng, instances):
    worst = 0.0
    for _ in range(instances):
        lat, ang, psi = _instance(rng)
        worst = max(worst, step_s1(psi, ang, lat, 0).max_abs_diff(step_s1_fourier(psi, ang, lat, 0)))
    return worst


def check_gauge(rng, instances, steps=3):
    worst = 0.0
    for _ in range(instances):
        lat, ang, psi = _instance(rng)
        phase = GaugePhase(rng.uniform(-np.pi, np.pi, size=(steps + 1, lat.n)))
        ang2 = gauge_transform_angles(ang, phase)
        a, b = psi, gauge_transform(psi, phase, lat, 0)
        for j in range(steps):
            a = step_s1(a, ang, lat, j)
            b = step_s1(b, ang2, lat, j)
        worst = max(worst, gauge_transform(a, phase, lat, steps).max_abs_diff(b))
    return worst


def corrupted_coin(theta, xi, zeta, alpha, defect=1e-6):
    """A coin with one entry scaled by (1 + defect): no longer unitary."""
    B = build_coin(theta, xi, zeta, alpha)
    B[1, 1] *= 1.0 + defect
    return B


def check_coin(rng, instances, coin=build_coin):
    worst = 0.0
    for _ in range(instances):
        th, xi, ze, al = rng.uniform(-np.pi, np.pi, size=4)
        B = coin(th, xi, ze, al)
        worst = max(
            worst,
            float(np.max(np.abs(B.conj().T @ B - np.eye(2)))),
            abs(np.linalg.det(B) - np.exp(2j * al)),
        )
    return worst


def check_dirac_unitarity(rng, instances):
    worst = 0.0
    for _ in range(instances):
        lat = Lattice(int(rng.integers(8, 129)), float(rng.uniform(1.0, 10.0)))
        cfg = FlatDiracConfig(float(rng.normal()), float(rng.normal()), lat)
        psi = random_state(rng, lat)
        T = float(rng.uniform(0, 10))
        worst = max(worst, abs(dirac_step_flat(psi, cfg, T, lat.dt).norm - psi.norm))
    return worst


def corrupted_norm_drift(rng, instances, scale=1.0 + 1e-6):
    """Norm drift of a walk whose coin is multiplied by ``scale``."""
    worst = 0.0
    for _ in range(instances):
        lat, ang, psi = _instance(rng)
        th, xi, ze, al = ang.sample(lat, 0)
        B = [scale * b for b in (np.cos(th), np.sin(th))]
        b11 = np.exp(1j * (al + xi)) * B[0]
        b12 = np.exp(1j * (al + ze)) * B[1]
        b21 = -np.exp(1j * (al - ze)) * B[1]
        b22 = np.exp(1j * (al - xi)) * B[0]
        L, R = _s1_arrays(psi.psiL, psi.psiR, b11, b12, b21, b22)
        worst = max(worst, abs(SpinorField(L, R, lat.dx).norm - psi.norm))
    return worst


CHECKS = (
    ("norm per S1/S2 step", check_norm, 1e-12),
    ("S2 == S1 o S1", check_s2_composition, 1e-13),
    ("Fourier shift == roll", check_fourier_shift, 1e-12),
    ("gauge covariance", check_gauge, 1e-12),
    ("coin unitarity and det", check_coin, 1e-12),
    ("Dirac step unitarity", check_dirac_unitarity, 1e-12),
)


def run_property_suite(seed: int = 0, instances: int = 100, corrupt: bool = False) -> PropertyReport:
    """Run every invariant on ``instances`` random cases.

    The negative control passes when the corrupted coin's norm drift is
    caught by the same bound the genuine walk meets.  ``corrupt=True``
    feeds a non-unitary coin to the norm and coin checks, which must then
    fail by name.
    """
    rng = np.random.default_rng(seed)
    report = PropertyReport(seed)
    for name, fn, bound in CHECKS:
        if corrupt and fn is check_norm:
            m = corrupted_norm_drift(rng, instances)
        elif corrupt and fn is check_coin:
            m = check_coin(rng, instances, coin=corrupted_coin)
        else:
            m = fn(rng, instances)
        report.checks.append(Check(name, m, bound, bool(m < bound)))
    drift = corrupted_norm_drift(rng, instances)
    report.checks.append(Check("negative control detected", 1e-12 / max(drift, 1e-300), 1.0, bool(drift >= 1e-12)))
    return report
