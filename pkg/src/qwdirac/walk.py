"""Walk stepping: one-step rule, two-step (stroboscopic) rule, Fourier
shifts and the exact lattice gauge transformation.

Convention: the L component is fed from the right neighbour and the R
component from the left one,

    psiL[j+1, m] = b11 psiL[j, m+1] + b12 psiR[j, m-1]
    psiR[j+1, m] = b21 psiL[j, m+1] + b22 psiR[j, m-1]

with periodic indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DimensionError
from .lattice import AngleField, Lattice, SpinorField, coin_entries, sample_angles


def _check(state: SpinorField, lattice: Lattice):
    if state.n != lattice.n:
        raise DimensionError(f"state has {state.n} sites, lattice has {lattice.n}")


def _s1_arrays(L, R, b11, b12, b21, b22):
    Lp = np.roll(L, -1)
    Rm = np.roll(R, 1)
    return b11 * Lp + b12 * Rm, b21 * Lp + b22 * Rm


def _collapse_uniform(arrays):
    """Replace angle arrays that are constant over the lattice by scalars."""
    if all(a[0] == a.min() == a.max() for a in arrays):
        return tuple(float(a[0]) for a in arrays)
    return arrays


def step_s1(state: SpinorField, angles: AngleField, lattice: Lattice, j: int) -> SpinorField:
    """Advance the walk by one time step, from index j to j+1."""
    _check(state, lattice)
    b = coin_entries(*sample_angles(angles, lattice, j))
    L, R = _s1_arrays(state.psiL, state.psiR, *b)
    return SpinorField(L, R, lattice.dx)


def _fourier_shift_array(a: np.ndarray, offset: int) -> np.ndarray:
    n = a.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    return np.fft.ifft(np.fft.fft(a) * np.exp(2j * np.pi * k * offset / n))


def shift_fourier(state: SpinorField, offsets=(1, -1)) -> SpinorField:
    """Circularly shift each component in Fourier space.

    An offset ``o`` maps psi[m] <- psi[m + o], i.e. each Fourier mode k is
    multiplied by exp(i k 2 pi o / n).  The default ``(1, -1)`` is the walk
    shift.
    """
    if state.n < 2:
        raise DimensionError("Fourier shift needs at least two sites")
    oL, oR = offsets
    return SpinorField(
        _fourier_shift_array(state.psiL, oL), _fourier_shift_array(state.psiR, oR), state.dx
    )


def step_s1_fourier(state: SpinorField, angles: AngleField, lattice: Lattice, j: int) -> SpinorField:
    """Same as :func:`step_s1` with the shift done spectrally."""
    _check(state, lattice)
    b11, b12, b21, b22 = coin_entries(*sample_angles(angles, lattice, j))
    sh = shift_fourier(state, (1, -1))
    return SpinorField(
        b11 * sh.psiL + b12 * sh.psiR, b21 * sh.psiL + b22 * sh.psiR, lattice.dx
    )


@dataclass(frozen=True)
class S2Coefficients:
    """Two-step transfer coefficients for one pair of time slices (j, j+1)."""

    AL: np.ndarray
    BL: np.ndarray
    CL: np.ndarray
    DL: np.ndarray
    AR: np.ndarray
    BR: np.ndarray
    CR: np.ndarray
    DR: np.ndarray


def build_s2_coefficients(angles: AngleField, lattice: Lattice, j: int) -> S2Coefficients:
    th0, xi0, ze0, al0 = sample_angles(angles, lattice, j)
    th1, xi1, ze1, al1 = sample_angles(angles, lattice, j + 1)
    c1, s1 = np.cos(th1), np.sin(th1)

    def up(a):  # value at m+1
        return np.roll(a, -1)

    def dn(a):  # value at m-1
        return np.roll(a, 1)

    cu, su = np.cos(up(th0)), np.sin(up(th0))
    cd, sd = np.cos(dn(th0)), np.sin(dn(th0))
    xu, zu, au = up(xi0), up(ze0), up(al0)
    xd, zd, ad = dn(xi0), dn(ze0), dn(al0)
    e = lambda p: np.exp(1j * p)  # noqa: E731
    return S2Coefficients(
        AL=c1 * cu * e(al1 + xi1 + au + xu),
        BL=-s1 * sd * e(al1 + ze1 + ad - zd),
        CL=c1 * su * e(al1 + xi1 + au + zu),
        DL=s1 * cd * e(al1 + ze1 + ad - xd),
        AR=-s1 * cu * e(al1 - ze1 + au + xu),
        BR=-sd * c1 * e(al1 - xi1 + ad - zd),
        CR=-s1 * su * e(al1 - ze1 + au + zu),
        DR=cd * c1 * e(al1 - xi1 + ad - xd),
    )


def step_s2(state: SpinorField, coeffs: S2Coefficients, lattice: Lattice) -> SpinorField:
    """Advance by two time steps with precomputed coefficients."""
    _check(state, lattice)
    if lattice.n < 4:
        raise DimensionError("the two-step stencil needs n >= 4")
    L, R = state.psiL, state.psiR
    L2 = np.roll(L, -2)
    R2 = np.roll(R, 2)
    k = coeffs
    newL = k.AL * L2 + k.BL * L + k.CL * R + k.DL * R2
    newR = k.AR * L2 + k.BR * L + k.CR * R + k.DR * R2
    return SpinorField(newL, newR, lattice.dx)


def evolve(
    state: SpinorField,
    angles: AngleField,
    lattice: Lattice,
    steps: int,
    j0: int = 0,
    record_every: int | None = None,
):
    """Apply ``steps`` one-step updates starting at time index ``j0``.

    With ``record_every`` set, also returns the list of densities taken
    every that many steps (including the initial one).
    """
    _check(state, lattice)
    L, R = state.psiL, state.psiR
    frames = [] if record_every else None
    for j in range(j0, j0 + steps):
        if frames is not None and (j - j0) % record_every == 0:
            frames.append(np.abs(L) ** 2 + np.abs(R) ** 2)
        b = coin_entries(*_collapse_uniform(sample_angles(angles, lattice, j)))
        L, R = _s1_arrays(L, R, *b)
    out = SpinorField(L, R, lattice.dx)
    if frames is not None:
        if steps % record_every == 0:
            frames.append(out.density)
        return out, frames
    return out


PhaseLaw = Union[float, Callable, np.ndarray]


@dataclass(frozen=True)
class GaugePhase:
    """Site phases phi[j, m] for the lattice U(1) transformation.

    ``phi`` is a constant, a callable ``phi(T, X)`` evaluated at
    (j dt, m dx), or an array indexed ``[j, m]``.
    """

    phi: PhaseLaw

    def values(self, lattice: Lattice, j: int) -> np.ndarray:
        p = self.phi
        if callable(p):
            out = np.asarray(p(lattice.time(j), lattice.x), dtype=float)
        elif isinstance(p, np.ndarray) and p.ndim == 2:
            out = p[j]
        else:
            out = np.asarray(p, dtype=float)
        return np.broadcast_to(out, (lattice.n,)).astype(float, copy=True)

    def sigma(self, lattice: Lattice, j: int) -> np.ndarray:
        """phi[j, m+1] + phi[j, m-1] - 2 phi[j+1, m], periodic in m."""
        p = self.values(lattice, j)
        return np.roll(p, -1) + np.roll(p, 1) - 2.0 * self.values(lattice, j + 1)

    def delta(self, lattice: Lattice, j: int) -> np.ndarray:
        """(phi[j, m+1] - phi[j, m-1]) / 2, periodic in m."""
        p = self.values(lattice, j)
        return 0.5 * (np.roll(p, -1) - np.roll(p, 1))


def gauge_transform(state: SpinorField, phase: GaugePhase, lattice: Lattice, j: int) -> SpinorField:
    """Return Psi' = Psi exp(-i phi_j)."""
    _check(state, lattice)
    ph = np.exp(-1j * phase.values(lattice, j))
    return SpinorField(state.psiL * ph, state.psiR * ph, lattice.dx)


def gauge_transform_angles(angles: AngleField, phase: GaugePhase) -> AngleField:
    """Angles of the walk obeyed by the gauge-transformed amplitudes.

    alpha' = alpha + sigma/2, xi' = xi + delta, zeta' = zeta - delta,
    theta' = theta.
    """

    def sampler(lattice: Lattice, j: int):
        th, xi, ze, al = sample_angles(angles, lattice, j)
        d = phase.delta(lattice, j)
        s = phase.sigma(lattice, j)
        return th, xi + d, ze - d, al + 0.5 * s

    return AngleField.from_sampler(sampler)
