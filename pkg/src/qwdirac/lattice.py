"""Lattice, coin angles, spinor fields and the U(2) coin matrix."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DimensionError, DomainError

TWO_PI = 2.0 * np.pi

# An angle law is a constant, a callable f(T, X) vectorised over X, or an
# array of shape (n_slices, n) indexed by time step.
AngleLaw = Union[float, Callable, np.ndarray]


@dataclass(frozen=True)
class Lattice:
    """Periodic space-time lattice with dt = dx = epsilon.

    Units are dimensionless, so the infinitesimal ``epsilon`` of the
    jet expansion is the space step itself.
    """

    n: int
    length: float = TWO_PI

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be finite and positive, got {self.length!r}")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dt(self) -> float:
        return self.dx

    @property
    def epsilon(self) -> float:
        return self.dx

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    def time(self, j: int) -> float:
        return j * self.dt

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT order, 2*pi*k_int/length."""
        return TWO_PI * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def mode_index(self) -> np.ndarray:
        """Integer mode numbers k_int in FFT order (-n/2 .. n/2-1)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)


def _sample_law(law, T: float, X: np.ndarray, j: int, n: int) -> np.ndarray:
    if callable(law):
        out = np.asarray(law(T, X), dtype=float)
    elif isinstance(law, np.ndarray) and law.ndim == 2:
        if j >= law.shape[0]:
            raise IndexError(f"time index {j} beyond sampled slices ({law.shape[0]})")
        out = law[j]
        if out.shape[0] != n:
            raise DimensionError(f"sampled slice has {out.shape[0]} entries, lattice has {n}")
    else:
        out = np.asarray(law, dtype=float)
    return np.broadcast_to(out, (n,)).astype(float, copy=True)


@dataclass(frozen=True)
class AngleField:
    """The four coin angles (theta, xi, zeta, alpha) over the lattice.

    Each angle is a constant, a callable ``f(T, X)`` (vectorised over X) or
    a per-slice array of shape ``(n_slices, n)``.  ``sampler`` overrides all
    four with a function ``(lattice, j) -> (theta, xi, zeta, alpha)``; it is
    used for fields derived on the lattice, such as gauge transforms.
    """

    theta: AngleLaw = 0.0
    xi: AngleLaw = 0.0
    zeta: AngleLaw = 0.0
    alpha: AngleLaw = 0.0
    sampler: Callable | None = None

    @classmethod
    def from_sampler(cls, sampler: Callable) -> "AngleField":
        return cls(sampler=sampler)

    def sample(self, lattice: Lattice, j: int):
        return sample_angles(self, lattice, j)


def sample_angles(field: AngleField, lattice: Lattice, time_index: int):
    """Evaluate the four angles at (t_j, x_m) for every site m.

    Returns ``(theta, xi, zeta, alpha)`` as float arrays of length n.
    """
    if time_index < 0:
        raise ValueError("time_index must be non-negative")
    n = lattice.n
    if field.sampler is not None:
        arrays = tuple(np.asarray(a, dtype=float) for a in field.sampler(lattice, time_index))
        arrays = tuple(np.broadcast_to(a, (n,)).copy() for a in arrays)
    else:
        T = lattice.time(time_index)
        X = lattice.x
        arrays = tuple(
            _sample_law(law, T, X, time_index, n)
            for law in (field.theta, field.xi, field.zeta, field.alpha)
        )
    for name, a in zip(("theta", "xi", "zeta", "alpha"), arrays):
        if not np.all(np.isfinite(a)):
            raise DomainError(f"angle {name} is not finite at time index {time_index}")
    return arrays


def build_coin(theta: float, xi: float, zeta: float, alpha: float) -> np.ndarray:
    """Return the 2x2 coin matrix B(theta, xi, zeta, alpha).

    B = e^{i alpha} [[e^{i xi} cos(theta), e^{i zeta} sin(theta)],
                     [-e^{-i zeta} sin(theta), e^{-i xi} cos(theta)]]

    The result is unitary with determinant e^{2 i alpha}.
    """
    vals = (theta, xi, zeta, alpha)
    if not all(np.isfinite(v) for v in vals):
        raise DomainError(f"coin angles must be finite, got {vals}")
    c, s = np.cos(theta), np.sin(theta)
    ph = np.exp(1j * alpha)
    return ph * np.array(
        [
            [np.exp(1j * xi) * c, np.exp(1j * zeta) * s],
            [-np.exp(-1j * zeta) * s, np.exp(-1j * xi) * c],
        ],
        dtype=complex,
    )


def coin_entries(theta, xi, zeta, alpha):
    """Vectorised coin entries (b11, b12, b21, b22) for angle arrays."""
    c, s = np.cos(theta), np.sin(theta)
    b11 = np.exp(1j * (alpha + xi)) * c
    b12 = np.exp(1j * (alpha + zeta)) * s
    b21 = -np.exp(1j * (alpha - zeta)) * s
    b22 = np.exp(1j * (alpha - xi)) * c
    return b11, b12, b21, b22


@dataclass(frozen=True)
class SpinorField:
    """Two-component amplitude (psiL, psiR) on n periodic sites."""

    psiL: np.ndarray
    psiR: np.ndarray
    dx: float = 1.0

    def __post_init__(self):
        L = np.asarray(self.psiL, dtype=complex)
        R = np.asarray(self.psiR, dtype=complex)
        if L.ndim != 1 or L.shape != R.shape:
            raise DimensionError(f"component shapes differ: {L.shape} vs {R.shape}")
        L.setflags(write=False)
        R.setflags(write=False)
        object.__setattr__(self, "psiL", L)
        object.__setattr__(self, "psiR", R)

    @classmethod
    def on(cls, lattice: Lattice, psiL, psiR) -> "SpinorField":
        return cls(np.asarray(psiL, dtype=complex), np.asarray(psiR, dtype=complex), lattice.dx)

    @property
    def n(self) -> int:
        return self.psiL.shape[0]

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psiL) ** 2 + np.abs(self.psiR) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.density) * self.dx)

    def normalized(self) -> "SpinorField":
        s = np.sqrt(self.norm)
        return SpinorField(self.psiL / s, self.psiR / s, self.dx)

    def __add__(self, other: "SpinorField") -> "SpinorField":
        return SpinorField(self.psiL + other.psiL, self.psiR + other.psiR, self.dx)

    def __mul__(self, a) -> "SpinorField":
        return SpinorField(a * self.psiL, a * self.psiR, self.dx)

    __rmul__ = __mul__

    def max_abs_diff(self, other: "SpinorField") -> float:
        return float(max(np.max(np.abs(self.psiL - other.psiL)), np.max(np.abs(self.psiR - other.psiR))))
