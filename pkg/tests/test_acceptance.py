"""One test per acceptance criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the terminal summary.
"""
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE
from qwdirac.continuum import Family, JetSpec, classify_jet, consistency_residual, default_samples
from qwdirac.dirac import FlatDiracConfig, dirac_step_flat, evolve_flat, integrate_characteristic
from qwdirac.experiments import load_config, run_electric_convergence, run_schwarzschild, with_output
from qwdirac.lattice import Lattice, SpinorField
from qwdirac.properties import random_state, run_property_suite
from qwdirac.schwarzschild import (
    SchwarzschildConfig,
    domain_edge,
    g_XX,
    horizon,
    in_domain,
    make_schwarzschild_jet,
    radius,
    singularity,
    walk_theta,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
HALF = np.pi / 2


def report(num, title, ok, detail):
    line = f"criterion {num} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def test_criterion_1_first_order_convergence():
    cfg = load_config(CONFIGS / "electric_convergence.ini")
    assert cfg.T_final == 100 and cfg.resolutions == tuple(2**k for k in range(8, 14))
    res = run_electric_convergence(with_output(cfg, None))
    errs = ", ".join(f"{r[0]}:{r[2]:.3e}" for r in res.rows)
    report(1, "slope of log dN_rel vs log eps in [0.85, 1.15]", 0.85 <= res.slope <= 1.15,
           f"slope {res.slope:.4f}; {errs}")


def test_criterion_2_discrete_invariants():
    rep = run_property_suite(seed=0, instances=100)
    detail = "; ".join(f"{c.name} {c.measured:.1e}<{c.bound:.0e}" for c in rep.checks)
    report(2, "exact invariants on 100 seeded instances", rep.passed, detail)


def test_criterion_3_classification_table():
    cases = [
        (JetSpec(1), Family.S1),
        (JetSpec(2, xi0=HALF, alpha0=HALF, theta0=lambda T, X: 0.2 + 0.5 * np.sin(X + T) ** 2), Family.CASE1),
        (JetSpec(2, theta0=HALF, alpha0=HALF, xi0=lambda T, X: 0.3 * X - T), Family.CASE2_1),
        (JetSpec(2), Family.CASE2_2),
        (JetSpec(2, xi0=HALF, alpha0=HALF), Family.OVERLAP),
    ]
    got = [classify_jet(j, default_samples()).tag for j, _ in cases]
    want = [t for _, t in cases]
    report(3, "five classification examples", got == want, ", ".join(t.value for t in got))


def _state(X):
    return np.exp(1j * np.sin(X)) * (1 + 0.3 * np.cos(2 * X)), 0.7 * np.exp(-1j * np.cos(X))


def test_criterion_4_first_order_residual():
    jets = {
        "S1": (JetSpec(1, zeta0=lambda T, X: 0.5 + 0.3 * np.sin(X - T),
                       theta_bar=lambda T, X: 0.4 + 0.2 * np.cos(X),
                       xi_bar=lambda T, X: 1.1 * T + 0.2 * np.sin(X),
                       alpha_bar=lambda T, X: 0.3 * np.cos(X + T)), None, 0.5),
        "Case1": (JetSpec(2, xi0=HALF, alpha0=HALF, theta0=lambda T, X: 0.6 + 0.3 * np.sin(X - 0.5 * T),
                          zeta0=lambda T, X: 0.4 * np.cos(X + T), alpha_bar=lambda T, X: 0.3 * np.sin(X),
                          xi_bar=lambda T, X: 0.2 * np.cos(X) + 0.5 * T), None, 0.5),
        "Case2_1": (JetSpec(2, theta0=HALF, alpha0=HALF, xi0=lambda T, X: 0.3 + np.sin(X),
                            zeta0=lambda T, X: 0.5 * np.cos(X - T),
                            theta_bar=lambda T, X: 0.4 + 0.1 * np.sin(X), alpha_bar=0.3), None, 0.5),
        "Case2_2": (JetSpec(2, theta0=np.pi, xi0=np.pi, zeta0=lambda T, X: 0.5 * np.cos(X - T),
                            theta_bar=0.4, alpha_bar=lambda T, X: 0.2 * np.sin(X),
                            xi_bar=lambda T, X: 0.3 * T), None, 0.5),
        "Overlap": (JetSpec(2, xi0=HALF, alpha0=HALF, zeta0=lambda T, X: 0.5 * np.cos(X - T),
                            alpha_bar=lambda T, X: 0.2 * np.sin(X)), None, 0.5),
        "Schwarzschild": (make_schwarzschild_jet(SchwarzschildConfig(3.0, 1.0)), (0.4, 1.6), 0.0),
    }
    ratios = {}
    for name, (jet, window, T0) in jets.items():
        r = []
        for n in (256, 512):
            lat = Lattice(n)
            region = None if window is None else (lat.x > window[0]) & (lat.x < window[1])
            r.append(consistency_residual(jet, _state, lat, T0=T0, region=region))
        ratios[name] = r[0] / r[1]
    ok = all(1.7 <= v <= 2.3 for v in ratios.values())
    report(4, "residual(eps)/residual(eps/2) in [1.7, 2.3]", ok,
           ", ".join(f"{k} {v:.3f}" for k, v in ratios.items()))


def test_criterion_5_geometry_oracles():
    worst = 0.0
    rng = np.random.default_rng(5)
    for _ in range(200):
        c = SchwarzschildConfig(float(rng.uniform(0.1, 20)), float(rng.uniform(0.3, 3)))
        T = float(rng.uniform(-10, 10))
        worst = max(
            worst,
            abs(radius(T, horizon(T, c), c) - c.r_g) / c.r_g,
            abs(radius(T, singularity(T, c), c)),
            abs(radius(T, domain_edge(T, c), c) - c.r_g / c.lam**2) / (c.r_g / c.lam**2),
            abs(g_XX(T, domain_edge(T, c), c) + 1.0),
            float(not in_domain(T, domain_edge(T, c), c)),
        )
    unit = SchwarzschildConfig(1.0, 1.0)
    g = integrate_characteristic(2.0 / 3.0, 1, lambda T, X: walk_theta(T, X, unit), 50.0, 0.01)
    drift = float(np.max(np.abs(g.X - horizon(g.T, unit))))
    ok = worst < 1e-12 and drift < 1e-6 and g.T_end == pytest.approx(50.0)
    report(5, "geometry identities to 1e-12, horizon geodesic within 1e-6 over [0, 50]", ok,
           f"identity error {worst:.1e}, horizon drift {drift:.1e}")


def test_criterion_6_geodesic_tracking():
    cfg = load_config(CONFIGS / "black_hole.ini")
    cfg = with_output(cfg, None)
    assert cfg.resolutions == (200, 800, 1600) and cfg.packet.sigmaX == 0.5 and cfg.packet.center == 50.5
    res = run_schwarzschild(cfg)
    lines, ok = [], True
    for b in (-1, 1):
        e = [res.tracking[n][b] for n in cfg.resolutions]
        mono = e[0] > e[1] > e[2]
        fine = e[2] < 2 * res.dx[1600]
        ok &= mono and fine
        lines.append(f"branch {b:+d}: " + " > ".join(f"{v:.4f}" for v in e) + f" (2dx={2 * res.dx[1600]:.3f})")
    report(6, "ridge-geodesic error decreases 200>800>1600 and < 2 dx at 1600", ok, "; ".join(lines))


def test_criterion_7_dirac_self_checks():
    rng = np.random.default_rng(7)
    lat = Lattice(64, 5.0)
    cfg = FlatDiracConfig(float(rng.normal()), float(rng.normal()), lat)
    psi = random_state(rng, lat)
    drift = 0.0
    for i in range(200):
        nxt = dirac_step_flat(psi, cfg, i * lat.dt, lat.dt)
        drift = max(drift, abs(nxt.norm - psi.norm))
        psi = nxt

    m, dt = 0.8, 0.005
    one = Lattice(8)
    z = SpinorField.on(one, np.ones(8), np.zeros(8)).normalized()
    zc = FlatDiracConfig(m, 0.0, one)
    steps = int(10.5 * 2 * np.pi / m / dt)
    re, st = [], z
    for i in range(steps):
        re.append(st.psiL[0].real)
        st = dirac_step_flat(st, zc, i * dt, dt)
    re = np.array(re)
    idx = np.nonzero(np.sign(re[:-1]) != np.sign(re[1:]))[0]
    tz = (idx + re[idx] / (re[idx] - re[idx + 1])) * dt
    period = 2 * (tz[-1] - tz[0]) / (len(tz) - 1)
    rel = abs(period - 2 * np.pi / m) / (2 * np.pi / m)

    free = FlatDiracConfig(0.0, 0.0, lat)
    f = lambda X: np.exp(np.cos(2 * np.pi * X / 5.0))  # noqa: E731
    g = lambda X: np.sin(4 * np.pi * X / 5.0) + 0.5j  # noqa: E731
    s = evolve_flat(SpinorField.on(lat, f(lat.x), g(lat.x)), free, 0.0, 37, 0.0173)
    T = 37 * 0.0173
    transport = max(np.max(np.abs(s.psiL - f(lat.x + T))), np.max(np.abs(s.psiR - g(lat.x - T))))
    ok = drift < 1e-12 and rel < 1e-3 and len(tz) >= 20 and transport < 1e-12
    report(7, "Dirac unitarity, k=0 period, massless transport", ok,
           f"norm drift/step {drift:.1e}, period error {rel:.1e} over {len(tz) // 2} periods, "
           f"transport error {transport:.1e}")
