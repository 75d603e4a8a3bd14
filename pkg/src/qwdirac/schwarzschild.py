"""Radial Schwarzschild geometry in Lemaitre coordinates, T = tau, X = lambda rho.

    r(T, X) = [3/2 (X/lambda - T)]^(2/3) r_g^(1/3),  g_XX = -r_g / (lambda^2 r)

The walk angle realising the metric is cos(theta) = lambda sqrt(r / r_g),
defined on the domain D where -g_XX >= 1, i.e. lambda T <= X <= lambda T +
2 r_g / (3 lambda^2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .continuum import JetSpec
from .errors import DomainError
from .lattice import AngleField

_GUARD = 1e-12


@dataclass(frozen=True)
class SchwarzschildConfig:
    r_g: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        for name in ("r_g", "lam"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v!r}")


def _u(T, X, cfg):
    # X/lambda - T, written so that X = lambda T gives exactly zero
    return (np.asarray(X, dtype=float) - cfg.lam * np.asarray(T, dtype=float)) / cfg.lam


def radius(T, X, cfg: SchwarzschildConfig):
    u = _u(T, X, cfg)
    if np.any(u < 0):
        raise DomainError("X < lambda T lies beyond the singularity (r undefined)")
    r = np.cbrt((1.5 * u) ** 2) * np.cbrt(cfg.r_g)
    return float(r) if np.ndim(r) == 0 else r


def g_XX(T, X, cfg: SchwarzschildConfig):
    return -cfg.r_g / (cfg.lam**2 * radius(T, X, cfg))


def singularity(T, cfg: SchwarzschildConfig):
    """X of the r = 0 locus."""
    return cfg.lam * np.asarray(T, dtype=float)


def horizon(T, cfg: SchwarzschildConfig):
    """X of the r = r_g locus."""
    return cfg.lam * (np.asarray(T, dtype=float) + 2.0 * cfg.r_g / 3.0)


def domain_edge(T, cfg: SchwarzschildConfig):
    """X of the outer boundary of D (r = r_g / lambda^2)."""
    return cfg.lam * np.asarray(T, dtype=float) + 2.0 * cfg.r_g / (3.0 * cfg.lam**2)


def in_domain(T, X, cfg: SchwarzschildConfig):
    X = np.asarray(X, dtype=float)
    res = (X >= singularity(T, cfg)) & (X <= domain_edge(T, cfg))
    return bool(res) if res.ndim == 0 else res


def _cos_theta(T, X, cfg):
    u = _u(T, X, cfg)
    r_ratio = np.cbrt((1.5 * np.maximum(u, 0.0) / cfg.r_g) ** 2)
    return u, cfg.lam * np.sqrt(r_ratio)


def walk_theta(T, X, cfg: SchwarzschildConfig):
    """theta = arccos(lambda sqrt(r / r_g)) in [0, pi/2].

    Points within a relative 1e-12 band outside D are clamped onto its
    boundary; anything further out raises DomainError.
    """
    u, c = _cos_theta(T, X, cfg)
    scale = max(1.0, float(np.max(np.abs(np.asarray(X, dtype=float)))) / cfg.lam)
    if np.any(u < -_GUARD * scale) or np.any(c > 1.0 + _GUARD):
        raise DomainError("point outside the domain D")
    th = np.arccos(np.clip(c, 0.0, 1.0))
    return float(th) if np.ndim(th) == 0 else th


def theta_field(cfg: SchwarzschildConfig):
    """Lattice-safe angle law: walk_theta inside D, 0 outside."""

    def f(T, X):
        T, X = np.broadcast_arrays(np.asarray(T, dtype=float), np.asarray(X, dtype=float))
        u, c = _cos_theta(T, X, cfg)
        inside = (u >= 0) & (c <= 1.0)
        return np.where(inside, np.arccos(np.clip(c, 0.0, 1.0)), 0.0)

    return f


def domain_flags(T, X, cfg: SchwarzschildConfig):
    """True where a lattice site lies in D; sites flagged False walk freely."""
    return in_domain(T, X, cfg)


def make_schwarzschild_jet(cfg: SchwarzschildConfig) -> JetSpec:
    """Two-step jet realising the metric: theta from the map above,
    xi = alpha = zeta = pi/2 and no first-order perturbation.

    xi = alpha = pi/2 is the admissible case-1 choice.  The table
    alpha = 0, xi = pi gives a coin with B^2 != 1 and no limit, see
    :func:`table_jet`.
    """
    half = np.pi / 2
    return JetSpec(n_steps=2, theta0=theta_field(cfg), xi0=half, zeta0=half, alpha0=half)


def table_jet(cfg: SchwarzschildConfig) -> JetSpec:
    """alpha = 0, xi = pi, zeta = pi/2 with the same theta (no continuum limit)."""
    return JetSpec(n_steps=2, theta0=theta_field(cfg), xi0=np.pi, zeta0=np.pi / 2, alpha0=0.0)


def walk_angles(cfg: SchwarzschildConfig) -> AngleField:
    return make_schwarzschild_jet(cfg).angles(0.0)
