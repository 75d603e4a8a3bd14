"""Continuum references for the walks.

Flat case: spectral Strang-split integrator for

    i dT psiL = i dX psiL + A1 psiL + m psiR
    i dT psiR = -i dX psiR - A1 psiR + m psiL

in the temporal gauge A0 = 0, A1 = -E T (uniform field E).  In Fourier
space the free symbol is H(k) = [[-k, m], [m, k]].

Curved massless case: characteristics dX/dT = -/+ cos(theta) traced with
RK4.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateInputError, DimensionError, DomainError, ResolutionError
from .lattice import Lattice, SpinorField


@dataclass(frozen=True)
class FlatDiracConfig:
    """Uniform mass and uniform electric field, temporal gauge only."""

    mass: float
    efield: float
    lattice: Lattice

    def A0(self, T) -> float:
        return 0.0

    def A1(self, T) -> float:
        return -self.efield * T


@dataclass(frozen=True)
class DensityField:
    N: np.ndarray
    dx: float = 1.0

    @classmethod
    def of(cls, state: SpinorField) -> "DensityField":
        return cls(state.density, state.dx)

    @property
    def total(self) -> float:
        return float(np.sum(self.N) * self.dx)


def positive_energy_spinor(k, mass):
    """Eigenvectors of [[-k, m], [m*, k]] for eigenvalue +sqrt(k^2 + |m|^2).

    The upper component is made real and non-negative.
    """
    k = np.asarray(k, dtype=float)
    m = complex(mass)
    E = np.sqrt(k**2 + abs(m) ** 2)
    right = k >= 0
    v1 = np.where(right, m, E - k).astype(complex)
    v2 = np.where(right, k + E, np.conj(m)).astype(complex)
    nrm = np.sqrt(np.abs(v1) ** 2 + np.abs(v2) ** 2)
    nrm[nrm == 0] = 1.0
    v1, v2 = v1 / nrm, v2 / nrm
    a = np.abs(v1)
    ph = np.where(a > 0, np.conj(v1) / np.where(a > 0, a, 1.0), 1.0)
    return v1 * ph, v2 * ph


def positive_energy_packet(
    k0: float, sigmaX: float, mass: float, lattice: Lattice, center: float | None = None
) -> SpinorField:
    """Gaussian superposition of free positive-energy eigenspinors.

    Mode k carries amplitude exp(-(k - k0)^2 sigmaX^2) exp(-i k center), so
    the density is a Gaussian of standard deviation sigmaX (on an infinite
    line).  The result has unit norm.
    """
    if sigmaX < 4 * lattice.dx:
        raise ResolutionError(
            f"sigmaX={sigmaX} is below 4 dx = {4 * lattice.dx:.4g} at n={lattice.n}"
        )
    if center is None:
        center = 0.5 * lattice.length
    k = lattice.wavenumbers
    amp = np.exp(-((k - k0) ** 2) * sigmaX**2) * np.exp(-1j * k * center)
    v1, v2 = positive_energy_spinor(k, mass)
    L = np.fft.ifft(amp * v1)
    R = np.fft.ifft(amp * v2)
    return SpinorField.on(lattice, L, R).normalized()


def _mass_half(L, R, mass, h):
    c, s = np.cos(mass * h), np.sin(mass * h)
    return c * L - 1j * s * R, c * R - 1j * s * L


def dirac_step_flat(state: SpinorField, cfg: FlatDiracConfig, T: float, dt: float) -> SpinorField:
    """One Strang step from T to T + dt.

    Half step of the mass term per site, exact advection in Fourier space
    with A1 taken at T + dt/2, second half step of the mass term.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    lat = cfg.lattice
    if state.n != lat.n:
        raise DimensionError(f"state has {state.n} sites, lattice has {lat.n}")
    m = np.asarray(cfg.mass, dtype=float)
    L, R = _mass_half(state.psiL, state.psiR, m, dt / 2)
    p = lat.wavenumbers - cfg.A1(T + dt / 2)
    L = np.fft.ifft(np.fft.fft(L) * np.exp(1j * p * dt))
    R = np.fft.ifft(np.fft.fft(R) * np.exp(-1j * p * dt))
    L, R = _mass_half(L, R, m, dt / 2)
    return SpinorField(L, R, lat.dx)


def evolve_flat(
    state: SpinorField,
    cfg: FlatDiracConfig,
    T0: float,
    steps: int,
    dt: float,
    record_every: int | None = None,
):
    """Repeated :func:`dirac_step_flat`, carried out in Fourier space.

    With a uniform mass the per-site mass rotation commutes with the FFT,
    so the whole Strang sequence can stay spectral; consecutive half steps
    of the mass term are merged.  Results match repeated
    ``dirac_step_flat`` to rounding.
    """
    lat = cfg.lattice
    m = float(cfg.mass)
    k = lat.wavenumbers
    L = np.fft.fft(state.psiL)
    R = np.fft.fft(state.psiR)
    frames = [] if record_every else None
    # exp(+-i (k - A1) dt) = exp(+-i k dt) * exp(-+i A1 dt): one array phase, one scalar
    adv = np.exp(1j * k * dt)
    adv_c = np.conj(adv)
    L, R = _mass_half(L, R, m, dt / 2)
    for i in range(steps):
        if frames is not None and i % record_every == 0:
            l0, r0 = _mass_half(L, R, m, -dt / 2)
            frames.append(np.abs(np.fft.ifft(l0)) ** 2 + np.abs(np.fft.ifft(r0)) ** 2)
        a = np.exp(-1j * cfg.A1(T0 + (i + 0.5) * dt) * dt)
        L = L * (adv * a)
        R = R * (adv_c * np.conj(a))
        L, R = _mass_half(L, R, m, dt if i < steps - 1 else dt / 2)
    if steps == 0:
        L, R = _mass_half(L, R, m, -dt / 2)
    out = SpinorField(np.fft.ifft(L), np.fft.ifft(R), lat.dx)
    if frames is not None:
        if steps % record_every == 0:
            frames.append(out.density)
        return out, frames
    return out


def delta_n_rel(nqw, nd) -> float:
    """sqrt(<(N_qw - N_d)^2>) / <N_d>, averages over collocation points."""
    a = np.asarray(nqw.N if isinstance(nqw, DensityField) else nqw, dtype=float)
    b = np.asarray(nd.N if isinstance(nd, DensityField) else nd, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"density shapes differ: {a.shape} vs {b.shape}")
    mean = np.mean(b)
    if mean == 0:
        raise DegenerateInputError("reference density has zero mean")
    return float(np.sqrt(np.mean((a - b) ** 2)) / mean)


def characteristic_speed(T: float, X: float, theta_field: Callable) -> tuple[float, float]:
    """Left and right characteristic slopes (-cos theta, +cos theta)."""
    c = float(np.cos(theta_field(T, X)))
    # cos(pi/2) rounds to ~6e-17; treat that as zero speed
    if not c > 1e-14:
        raise DomainError(f"cos(theta) = {c} <= 0 at (T, X) = ({T}, {X})")
    return -c, c


@dataclass(frozen=True)
class GeodesicPath:
    """Sampled characteristic X(T); ``branch`` is -1 (left) or +1 (right)."""

    T: np.ndarray
    X: np.ndarray
    branch: int
    reason: str = "t_max"
    error_estimate: float | None = field(default=None, compare=False)

    def at(self, T) -> np.ndarray:
        return np.interp(T, self.T, self.X)

    @property
    def T_end(self) -> float:
        return float(self.T[-1])


def _trace(X0, branch, theta_field, T0, T_max, dt, inside, min_step):
    def speed(T, X):
        c = float(np.cos(theta_field(T, X)))
        if not np.isfinite(c) or c < 0:
            raise DomainError("cos(theta) is not admissible")
        return branch * c

    def ok(T, X):
        return inside is None or bool(inside(T, X))

    Ts, Xs = [T0], [X0]
    T, X, h = T0, X0, dt
    reason = "t_max"
    while T < T_max - 1e-14 * max(1.0, abs(T_max)):
        step = min(h, T_max - T)
        try:
            k1 = speed(T, X)
            k2 = speed(T + step / 2, X + step / 2 * k1)
            k3 = speed(T + step / 2, X + step / 2 * k2)
            k4 = speed(T + step, X + step * k3)
            Xn = X + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            good = ok(T + step, Xn)
        except DomainError:
            good = False
        if not good:
            if step <= min_step:
                reason = "boundary"
                break
            h = step / 2
            continue
        T, X = T + step, Xn
        Ts.append(T)
        Xs.append(X)
    return np.array(Ts), np.array(Xs), reason


def integrate_characteristic(
    X0: float,
    branch: int,
    theta_field: Callable,
    T_max: float,
    dt: float,
    T0: float = 0.0,
    inside: Callable | None = None,
    estimate_error: bool = False,
) -> GeodesicPath:
    """Trace dX/dT = branch * cos(theta(T, X)) with classical RK4.

    The path stops at ``T_max`` or where it leaves the domain: either
    ``inside(T, X)`` turns false or ``theta_field`` raises
    :class:`DomainError`.  Near the exit the step is halved repeatedly so
    the last point sits within ``dt * 2**-30`` of the boundary.
    """
    if branch not in (-1, 1):
        raise ValueError("branch must be -1 or +1")
    if inside is not None and not inside(T0, X0):
        raise DomainError(f"start point ({T0}, {X0}) is outside the domain")
    theta_field(T0, X0)
    min_step = dt * 2.0**-30
    T, X, reason = _trace(X0, branch, theta_field, T0, T_max, dt, inside, min_step)
    err = None
    if estimate_error:
        T2, X2, _ = _trace(X0, branch, theta_field, T0, T[-1], dt / 2, inside, min_step)
        span = max(T[-1] - T0, 1e-300)
        err = float(np.max(np.abs(np.interp(T, T2, X2) - X)) / 15.0 / span)
    return GeodesicPath(T, X, branch, reason, err)
