import numpy as np
import pytest

from qwdirac.dirac import (
    DensityField,
    FlatDiracConfig,
    characteristic_speed,
    delta_n_rel,
    dirac_step_flat,
    evolve_flat,
    integrate_characteristic,
    positive_energy_packet,
    positive_energy_spinor,
)
from qwdirac.errors import DegenerateInputError, DimensionError, DomainError, ResolutionError
from qwdirac.lattice import Lattice, SpinorField
from qwdirac.properties import random_state


def test_eigenspinor_solves_symbol():
    k = np.linspace(-5, 5, 41)
    for m in (0.0, 0.24, -1.3):
        v1, v2 = positive_energy_spinor(k, m)
        E = np.sqrt(k**2 + m**2)
        np.testing.assert_allclose(-k * v1 + m * v2, E * v1, atol=1e-12)
        np.testing.assert_allclose(m * v1 + k * v2, E * v2, atol=1e-12)
        assert np.all(np.abs(np.imag(v1)) == 0) and np.all(np.real(v1) >= 0)


def test_packet_norm_and_guard():
    lat = Lattice(128)
    p = positive_energy_packet(1.0, 0.4, 0.24, lat)
    assert abs(p.norm - 1) < 1e-12
    with pytest.raises(ResolutionError):
        positive_energy_packet(0.0, 3 * lat.dx, 0.24, lat)


def test_massless_right_moving_packet():
    lat = Lattice(128)
    p = positive_energy_packet(8.0, 1.0, 0.0, lat)
    assert np.max(np.abs(p.psiL)) < 1e-12


def test_packet_density_width_without_mass():
    # m = 0 and k0 well above zero: a single chirality, so the density is the Gaussian envelope
    lat = Lattice(512, 40.0)
    p = positive_energy_packet(12.0, 1.5, 0.0, lat)
    x = lat.x - 20.0
    sd = np.sqrt(np.sum(p.density * x**2) * lat.dx)
    assert sd == pytest.approx(1.5, rel=1e-6)


def test_free_modes_keep_their_weight():
    lat = Lattice(64)
    cfg = FlatDiracConfig(0.7, 0.0, lat)
    psi = positive_energy_packet(0.5, 0.5, 0.7, lat)
    w0 = np.abs(np.fft.fft(psi.psiL)) ** 2 + np.abs(np.fft.fft(psi.psiR)) ** 2
    out = evolve_flat(psi, cfg, 0.0, 100, lat.dt)
    w1 = np.abs(np.fft.fft(out.psiL)) ** 2 + np.abs(np.fft.fft(out.psiR)) ** 2
    assert np.max(np.abs(w1 - w0)) / np.max(w0) < 1e-12
    # phases follow exp(-i E(k) t) up to the splitting error, which is second order in dt
    k = lat.wavenumbers
    E = np.sqrt(k**2 + 0.7**2)
    errs = []
    for steps, dt in ((100, lat.dt), (1000, lat.dt / 10)):
        out = evolve_flat(psi, cfg, 0.0, steps, dt)
        want = np.fft.fft(psi.psiL) * np.exp(-1j * E * steps * dt)
        errs.append(np.max(np.abs(np.fft.fft(out.psiL) - want)) / np.max(np.abs(want)))
    assert errs[1] < 1e-4
    assert 90 < errs[0] / errs[1] < 110


def test_massless_transport_exact():
    lat = Lattice(64)
    cfg = FlatDiracConfig(0.0, 0.0, lat)
    f = lambda X: np.exp(np.cos(X)) + 0.5j * np.sin(3 * X)  # noqa: E731
    g = lambda X: np.cos(2 * X) - 1j * np.exp(np.sin(X))  # noqa: E731
    psi = SpinorField.on(lat, f(lat.x), g(lat.x))
    dt = 0.0371
    out = psi
    for i in range(25):
        out = dirac_step_flat(out, cfg, i * dt, dt)
    T = 25 * dt
    assert np.max(np.abs(out.psiL - f(lat.x + T))) < 1e-12
    assert np.max(np.abs(out.psiR - g(lat.x - T))) < 1e-12


def test_zero_mode_oscillation_period():
    m = 0.8
    lat = Lattice(16)
    cfg = FlatDiracConfig(m, 0.0, lat)
    psi = SpinorField.on(lat, np.ones(16), np.zeros(16)).normalized()
    dt = 0.01
    steps = int(10 * 2 * np.pi / m / dt) + 10
    t = np.arange(steps) * dt
    out = evolve_flat(psi, cfg, 0.0, 1000, dt)
    np.testing.assert_allclose(out.psiL, psi.psiL * np.cos(m * 10.0), atol=1e-12)
    np.testing.assert_allclose(out.psiR, -1j * psi.psiL * np.sin(m * 10.0), atol=1e-12)
    # measured period from sign changes of Re psiL
    re = []
    state = psi
    for i in range(steps):
        re.append(state.psiL[0].real)
        state = dirac_step_flat(state, cfg, i * dt, dt)
    re = np.array(re)
    idx = np.nonzero(np.sign(re[:-1]) != np.sign(re[1:]))[0]
    tz = t[idx] + dt * re[idx] / (re[idx] - re[idx + 1])
    period = 2 * np.mean(np.diff(tz))
    assert len(tz) >= 20
    assert abs(period - 2 * np.pi / m) / (2 * np.pi / m) < 1e-3


def test_step_unitary_over_many_steps(rng):
    lat = Lattice(32, 5.0)
    cfg = FlatDiracConfig(float(rng.normal()), float(rng.normal()), lat)
    psi = random_state(rng, lat)
    out = psi
    for i in range(10_000):
        out = dirac_step_flat(out, cfg, i * 0.01, 0.01)
    assert abs(out.norm - 1) < 1e-12


def test_spectral_evolver_matches_steps(rng):
    lat = Lattice(48, 4.0)
    cfg = FlatDiracConfig(-0.4, 1.3, lat)
    psi = random_state(rng, lat)
    slow = psi
    for i in range(30):
        slow = dirac_step_flat(slow, cfg, 0.2 + i * 0.05, 0.05)
    fast = evolve_flat(psi, cfg, 0.2, 30, 0.05)
    assert fast.max_abs_diff(slow) < 1e-13


def test_step_argument_errors():
    lat = Lattice(8)
    cfg = FlatDiracConfig(0.1, 0.0, lat)
    with pytest.raises(ValueError):
        dirac_step_flat(SpinorField.on(lat, np.ones(8), np.ones(8)), cfg, 0.0, 0.0)
    with pytest.raises(DimensionError):
        dirac_step_flat(SpinorField(np.ones(4), np.ones(4)), cfg, 0.0, 0.1)
    assert cfg.A1(2.0) == 0.0 and cfg.A0(2.0) == 0.0
    assert FlatDiracConfig(0.0, 1.1, lat).A1(2.0) == pytest.approx(-2.2)


def test_delta_n_rel():
    n = np.array([1.0, 2.0, 3.0])
    assert delta_n_rel(n, n) == 0.0
    u = np.full(5, 0.3)
    assert delta_n_rel(2 * u, u) == pytest.approx(1.0)
    assert delta_n_rel(DensityField(2 * u), DensityField(u)) == pytest.approx(1.0)
    with pytest.raises(DegenerateInputError):
        delta_n_rel(u, np.zeros(5))
    with pytest.raises(DimensionError):
        delta_n_rel(u, n)


def test_characteristic_speed():
    assert characteristic_speed(0, 0, lambda T, X: 0.0) == (-1.0, 1.0)
    lo, hi = characteristic_speed(0, 0, lambda T, X: np.pi / 3)
    assert lo == pytest.approx(-0.5) and hi == pytest.approx(0.5)
    with pytest.raises(DomainError):
        characteristic_speed(0, 0, lambda T, X: np.pi / 2)


def test_flat_characteristic_and_mirror():
    g = integrate_characteristic(0.0, 1, lambda T, X: 0.0, 3.0, 0.1)
    np.testing.assert_allclose(g.X, g.T, atol=1e-13)
    assert g.reason == "t_max" and g.T_end == pytest.approx(3.0)
    th = lambda T, X: 0.6 * np.exp(-((X - 2.0) ** 2)) * (1 + 0.3 * T)  # noqa: E731
    up = integrate_characteristic(2.0, 1, th, 2.0, 0.01)
    dn = integrate_characteristic(2.0, -1, th, 2.0, 0.01)
    np.testing.assert_allclose(up.X - 2.0, 2.0 - dn.X, atol=1e-13)


def test_characteristic_stops_at_boundary():
    g = integrate_characteristic(0.5, -1, lambda T, X: 0.0, 5.0, 0.1, inside=lambda T, X: X >= 0)
    assert g.reason == "boundary"
    assert g.T_end == pytest.approx(0.5, abs=1e-8)
    with pytest.raises(DomainError):
        integrate_characteristic(-1.0, 1, lambda T, X: 0.0, 1.0, 0.1, inside=lambda T, X: X >= 0)
    with pytest.raises(ValueError):
        integrate_characteristic(0.0, 0, lambda T, X: 0.0, 1.0, 0.1)
