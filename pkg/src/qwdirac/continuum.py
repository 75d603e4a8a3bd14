"""Continuous limits of walk families (1-jets with unit scaling exponents).

A jet gives every coin angle as a zeroth-order field plus epsilon times a
first-order field.  Depending on the zeroth-order fields the one-step walk
(S1) or the two-step stroboscopic walk (S2) has a differential limit:

* S1: flat Dirac equation with potential (A0, A1) = (abar, -xibar) and
  masses m-/+ = +/- i thetabar exp(i(theta0 + alpha0 +/- zeta)).
* S2 case 1 (cos xi0 = 0): massless Dirac spinor in the curved metric
  diag(1, -1/cos^2 theta).
* S2 case 2.1 (theta0 odd multiple of pi/2): ODEs, no propagation.
* S2 case 2.2 (theta0 even multiple of pi/2): flat Dirac equation with
  masses m-/+ = +/- i thetabar exp(i(2 alpha0 +/- zeta)) cos xi0.

Masses are reported with the sign produced by these formulas; no sign
normalisation is applied.  For example zeta = pi/2, thetabar > 0 gives
m- = m+ = -thetabar.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ClassificationError, DomainError, FamilyError
from .lattice import AngleField, Lattice, SpinorField
from .walk import build_s2_coefficients, step_s1, step_s2

# Pauli matrices and the 2D Clifford representation gamma0 = s1, gamma1 = i s2.
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
GAMMA0 = SIGMA1
GAMMA1 = 1j * SIGMA2
ETA = np.diag([1.0, -1.0])

CONSTRAINT_TOL = 1e-9
_DERIV_STEP = 1e-3


class Family(str, enum.Enum):
    S1 = "S1"
    CASE1 = "Case1"
    CASE2_1 = "Case2_1"
    CASE2_2 = "Case2_2"
    OVERLAP = "Overlap_1_and_2"
    NO_LIMIT = "NoLimit"


def _law(f):
    """Wrap a constant or callable as a vectorised f(T, X)."""
    if callable(f):
        return f
    c = float(f)
    return lambda T, X: np.full(np.broadcast(np.asarray(T), np.asarray(X)).shape, c)


def evaluate(f, T, X) -> np.ndarray:
    T, X = np.broadcast_arrays(np.asarray(T, dtype=float), np.asarray(X, dtype=float))
    return np.broadcast_to(np.asarray(_law(f)(T, X), dtype=float), T.shape).copy()


def partial_T(f, T, X, h: float = _DERIV_STEP) -> np.ndarray:
    """d f / d T by a fourth-order central stencil (zero for constants)."""
    if not callable(f):
        return np.zeros(np.broadcast(np.asarray(T), np.asarray(X)).shape)
    T = np.asarray(T, dtype=float)
    return (
        -evaluate(f, T + 2 * h, X) + 8 * evaluate(f, T + h, X)
        - 8 * evaluate(f, T - h, X) + evaluate(f, T - 2 * h, X)
    ) / (12 * h)


def partial_X(f, T, X, h: float = _DERIV_STEP) -> np.ndarray:
    """d f / d X by a fourth-order central stencil (zero for constants)."""
    if not callable(f):
        return np.zeros(np.broadcast(np.asarray(T), np.asarray(X)).shape)
    X = np.asarray(X, dtype=float)
    return (
        -evaluate(f, T, X + 2 * h) + 8 * evaluate(f, T, X + h)
        - 8 * evaluate(f, T, X - h) + evaluate(f, T, X - 2 * h)
    ) / (12 * h)


def spectral_derivative(values: np.ndarray, lattice: Lattice) -> np.ndarray:
    """d/dX of periodic samples, computed by multiplying modes by i k."""
    k = lattice.wavenumbers.copy()
    if lattice.n % 2 == 0:
        k[lattice.n // 2] = 0.0
    return np.fft.ifft(1j * k * np.fft.fft(values))


@dataclass(frozen=True)
class JetSpec:
    """A 1-jet of walks: angle = zeroth-order field + epsilon * first-order field.

    Fields are constants or vectorised callables f(T, X).  Only the unit
    scaling (all exponents 1) is supported.  Angles that the limit leaves
    unconstrained (zeta always; theta in case 1; xi in case 2.1) live in the
    zeroth-order slot and their first-order slot must stay zero.
    """

    n_steps: int
    theta0: object = 0.0
    xi0: object = 0.0
    zeta0: object = 0.0
    alpha0: object = 0.0
    theta_bar: object = 0.0
    xi_bar: object = 0.0
    zeta_bar: object = 0.0
    alpha_bar: object = 0.0
    exponents: tuple = (1, 1, 1, 1, 1)

    def __post_init__(self):
        if self.n_steps not in (1, 2):
            raise ValueError(f"n_steps must be 1 or 2, got {self.n_steps}")
        if tuple(self.exponents) != (1, 1, 1, 1, 1):
            raise ValueError("only the scaling delta = omega = beta = gamma = eta = 1 is supported")

    def angles(self, eps: float) -> AngleField:
        """The walk of this jet at a given epsilon."""

        def combine(f0, f1):
            a, b = _law(f0), _law(f1)
            return lambda T, X: a(T, X) + eps * b(T, X)

        return AngleField(
            theta=combine(self.theta0, self.theta_bar),
            xi=combine(self.xi0, self.xi_bar),
            zeta=combine(self.zeta0, self.zeta_bar),
            alpha=combine(self.alpha0, self.alpha_bar),
        )

    def zeroth(self, T, X):
        return tuple(evaluate(f, T, X) for f in (self.theta0, self.xi0, self.zeta0, self.alpha0))


@dataclass(frozen=True)
class LimitClass:
    tag: Family
    params: dict = field(default_factory=dict)
    subfamily: Family | None = None

    def __str__(self):
        extra = f" via {self.subfamily.value}" if self.subfamily else ""
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.tag.value}({args}){extra}"


def _dist(a, period):
    return np.abs(a - period * np.round(a / period))


def _idx(a, period):
    return np.round(a / period).astype(int)


def _s1_check(th, xi, al, tol):
    k = _idx(th, np.pi)
    ok = (
        (_dist(th, np.pi) < tol)
        & (_dist(al + xi - k * np.pi, 2 * np.pi) < tol)
        & (_dist(al - xi - k * np.pi, 2 * np.pi) < tol)
    )
    params = {
        "k": k,
        "k_plus": _idx(al + xi - k * np.pi, 2 * np.pi),
        "k_minus": _idx(al - xi - k * np.pi, 2 * np.pi),
    }
    return ok, params


def _s2_checks(th, xi, al, tol):
    half = np.pi / 2
    odd_alpha = _dist(al - half, np.pi) < tol
    case1 = (_dist(xi - half, np.pi) < tol) & odd_alpha
    k = _idx(th, half)
    on_grid = _dist(th, half) < tol
    case21 = on_grid & (k % 2 == 1) & odd_alpha
    case22 = (
        on_grid & (k % 2 == 0) & (_dist(al, half) < tol) & (_dist(xi - al, np.pi) < tol)
    )
    params = {
        Family.CASE1: {"k": _idx(xi - half, np.pi), "k_prime": _idx(al - half, np.pi)},
        Family.CASE2_1: {"k": k, "k_prime": _idx(al - half, np.pi)},
        Family.CASE2_2: {"k": k, "k_prime": _idx(al, half), "k_second": _idx(xi - al, np.pi)},
    }
    return {Family.CASE1: case1, Family.CASE2_1: case21, Family.CASE2_2: case22}, params


def _constant_params(params: dict, family: Family) -> dict:
    out = {}
    for name, vals in params.items():
        u = np.unique(vals)
        if u.size != 1:
            raise ClassificationError(f"{family.value}: integer parameter {name} varies over samples ({u})")
        out[name] = int(u[0])
    return out


def classify_jet(jet: JetSpec, samples: Sequence, tol: float = CONSTRAINT_TOL) -> LimitClass:
    """Find the continuous-limit family of a jet from sampled points.

    ``samples`` is a sequence of (T, X) pairs.  A family is returned only if
    its zeroth-order constraints hold at every sample (within ``tol`` of the
    admissible multiples of pi or pi/2).
    """
    pts = np.asarray(samples, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("samples must be non-empty")
    th, xi, _, al = jet.zeroth(pts[:, 0], pts[:, 1])
    for a in (th, xi, al):
        if not np.all(np.isfinite(a)):
            raise DomainError("zeroth-order angles are not finite on the samples")

    if jet.n_steps == 1:
        ok, params = _s1_check(th, xi, al, tol)
        if not np.all(ok):
            return LimitClass(Family.NO_LIMIT)
        return LimitClass(Family.S1, _constant_params(params, Family.S1))

    checks, params = _s2_checks(th, xi, al, tol)
    any_ok = checks[Family.CASE1] | checks[Family.CASE2_1] | checks[Family.CASE2_2]
    if not np.all(any_ok):
        return LimitClass(Family.NO_LIMIT)
    everywhere = [f for f, ok in checks.items() if np.all(ok)]
    if not everywhere:
        raise ClassificationError("the limit family changes across the sampled points")
    case2 = [f for f in everywhere if f is not Family.CASE1]
    if Family.CASE1 in everywhere and case2:
        sub = case2[0]
        merged = {"k_xi": params[Family.CASE1]["k"], **params[sub]}
        return LimitClass(Family.OVERLAP, _constant_params(merged, Family.OVERLAP), subfamily=sub)
    fam = everywhere[0]
    return LimitClass(fam, _constant_params(params[fam], fam))


def default_samples(T_range=(0.0, 1.0), X_range=(0.0, 2 * np.pi), nT: int = 5, nX: int = 9):
    T, X = np.meshgrid(np.linspace(*T_range, nT), np.linspace(*X_range, nX), indexing="ij")
    return np.column_stack([T.ravel(), X.ravel()])


@dataclass(frozen=True)
class DiracParams:
    """Coefficients of the limit Dirac equation, as callables f(T, X).

    ``A0``/``A1`` are the potential components (A_T, A_X); ``GXX`` the
    covariant spatial metric component; ``cos_theta`` the diad coefficient
    e_1 = cos(theta) e_X.  The L equation couples to R through
    ``mass_minus`` and the R equation to L through ``mass_plus``:

        i dT psiL = i dX psiL - (A0 - A1) psiL + m- psiR
        i dT psiR = -i dX psiR - (A0 + A1) psiR + m+ psiL
    """

    A0: Callable
    A1: Callable
    mass_minus: Callable
    mass_plus: Callable
    GXX: Callable
    cos_theta: Callable
    family: LimitClass

    @property
    def flat(self) -> bool:
        return self.family.tag is not Family.CASE1


def _require(jet, family: LimitClass | None, samples, allowed):
    if family is None:
        family = classify_jet(jet, default_samples() if samples is None else samples)
    tag = family.subfamily if family.tag is Family.OVERLAP else family.tag
    # an overlap jet is a case-1 jet as well as a case-2 one
    overlap_ok = family.tag is Family.OVERLAP and Family.CASE1 in allowed
    if family.tag not in allowed and tag not in allowed and not overlap_ok:
        raise FamilyError(f"jet belongs to {family.tag.value}, expected one of {[a.value for a in allowed]}")
    return family


def _require_zero(f, name, samples):
    pts = np.asarray(default_samples() if samples is None else samples, dtype=float).reshape(-1, 2)
    if np.any(evaluate(f, pts[:, 0], pts[:, 1]) != 0.0):
        raise ValueError(f"{name} must be zero: that angle is carried entirely by its zeroth-order field")


_one = lambda T, X: np.ones(np.broadcast(np.asarray(T), np.asarray(X)).shape)  # noqa: E731
_minus_one = lambda T, X: -_one(T, X)  # noqa: E731
_zero_c = lambda T, X: np.zeros(np.broadcast(np.asarray(T), np.asarray(X)).shape, dtype=complex)  # noqa: E731


def emit_s1_params(jet: JetSpec, family: LimitClass | None = None, samples=None) -> DiracParams:
    """Potentials and masses of the one-step limit."""
    family = _require(jet, family, samples, (Family.S1,))
    _require_zero(jet.zeta_bar, "zeta_bar", samples)
    tb, ab, xb, ze = jet.theta_bar, jet.alpha_bar, jet.xi_bar, jet.zeta0
    th0, al0 = jet.theta0, jet.alpha0

    def phase(T, X):
        return evaluate(th0, T, X) + evaluate(al0, T, X)

    return DiracParams(
        A0=lambda T, X: evaluate(ab, T, X),
        A1=lambda T, X: -evaluate(xb, T, X),
        mass_minus=lambda T, X: 1j * evaluate(tb, T, X) * np.exp(1j * (phase(T, X) + evaluate(ze, T, X))),
        mass_plus=lambda T, X: -1j * evaluate(tb, T, X) * np.exp(1j * (phase(T, X) - evaluate(ze, T, X))),
        GXX=_minus_one,
        cos_theta=_one,
        family=family,
    )


def emit_case22_params(jet: JetSpec, family: LimitClass | None = None, samples=None) -> DiracParams:
    """Potentials and masses of the two-step limit, case 2.2."""
    family = _require(jet, family, samples, (Family.CASE2_2,))
    _require_zero(jet.zeta_bar, "zeta_bar", samples)
    tb, ab, xb, ze = jet.theta_bar, jet.alpha_bar, jet.xi_bar, jet.zeta0
    al0, xi0 = jet.alpha0, jet.xi0

    def amp(T, X):
        return evaluate(tb, T, X) * np.cos(evaluate(xi0, T, X))

    return DiracParams(
        A0=lambda T, X: evaluate(ab, T, X),
        A1=lambda T, X: -evaluate(xb, T, X),
        mass_minus=lambda T, X: 1j * amp(T, X) * np.exp(1j * (2 * evaluate(al0, T, X) + evaluate(ze, T, X))),
        mass_plus=lambda T, X: -1j * amp(T, X) * np.exp(1j * (2 * evaluate(al0, T, X) - evaluate(ze, T, X))),
        GXX=_minus_one,
        cos_theta=_one,
        family=family,
    )


def emit_case1_params(jet: JetSpec, family: LimitClass | None = None, samples=None) -> DiracParams:
    """Massless curved-space limit of case 1.

    Requires cos(theta) > 0 at every sample; the metric is
    G = diag(1, -1/cos^2 theta) and
    A_T = abar + (1 - cos theta)/2 dX zeta,
    A_X = -xibar - (1 - cos theta)/(2 cos theta) dT zeta.
    """
    family = _require(jet, family, samples, (Family.CASE1,))
    _require_zero(jet.zeta_bar, "zeta_bar", samples)
    _require_zero(jet.theta_bar, "theta_bar", samples)
    pts = np.asarray(default_samples() if samples is None else samples, dtype=float).reshape(-1, 2)
    if np.any(np.cos(evaluate(jet.theta0, pts[:, 0], pts[:, 1])) <= 0):
        raise DomainError("case 1 needs cos(theta) > 0 on the sampled domain")
    th, ze, ab, xb = jet.theta0, jet.zeta0, jet.alpha_bar, jet.xi_bar

    def cos_t(T, X):
        return np.cos(evaluate(th, T, X))

    return DiracParams(
        A0=lambda T, X: evaluate(ab, T, X) + 0.5 * (1 - cos_t(T, X)) * partial_X(ze, T, X),
        A1=lambda T, X: -evaluate(xb, T, X)
        - (1 - cos_t(T, X)) / (2 * cos_t(T, X)) * partial_T(ze, T, X),
        mass_minus=_zero_c,
        mass_plus=_zero_c,
        GXX=lambda T, X: -1.0 / cos_t(T, X) ** 2,
        cos_theta=cos_t,
        family=family,
    )


@dataclass(frozen=True)
class Case21System:
    """Local ODEs of case 2.1 at each fixed X:

    2 dT psiL = 2i abar psiL + i d+zeta psiL + 2 thetabar e^{i zeta} cos(xi) psiR
    2 dT psiR = 2i abar psiR - i d-zeta psiR - 2 thetabar e^{-i zeta} cos(xi) psiL
    """

    alpha_bar: object
    zeta: object
    xi: object
    theta_bar: object

    def rhs(self, T, X, psiL, psiR):
        ab = evaluate(self.alpha_bar, T, X)
        ze = evaluate(self.zeta, T, X)
        tb = evaluate(self.theta_bar, T, X)
        cx = np.cos(evaluate(self.xi, T, X))
        zt, zx = partial_T(self.zeta, T, X), partial_X(self.zeta, T, X)
        dL = 1j * ab * psiL + 0.5j * (zt + zx) * psiL + tb * np.exp(1j * ze) * cx * psiR
        dR = 1j * ab * psiR - 0.5j * (zt - zx) * psiR - tb * np.exp(-1j * ze) * cx * psiL
        return dL, dR

    def solve(self, psiL, psiR, X, T0: float, T1: float, steps: int = 1000):
        """Integrate from T0 to T1 with classical RK4."""
        L = np.asarray(psiL, dtype=complex)
        R = np.asarray(psiR, dtype=complex)
        h = (T1 - T0) / steps
        T = T0
        for _ in range(steps):
            k1 = self.rhs(T, X, L, R)
            k2 = self.rhs(T + h / 2, X, L + h / 2 * k1[0], R + h / 2 * k1[1])
            k3 = self.rhs(T + h / 2, X, L + h / 2 * k2[0], R + h / 2 * k2[1])
            k4 = self.rhs(T + h, X, L + h * k3[0], R + h * k3[1])
            L = L + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            R = R + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            T += h
        return L, R


def emit_case21_system(jet: JetSpec, family: LimitClass | None = None, samples=None) -> Case21System:
    family = _require(jet, family, samples, (Family.CASE2_1,))
    _require_zero(jet.zeta_bar, "zeta_bar", samples)
    _require_zero(jet.xi_bar, "xi_bar", samples)
    return Case21System(jet.alpha_bar, jet.zeta0, jet.xi0, jet.theta_bar)


def emit_params(jet: JetSpec, family: LimitClass | None = None, samples=None):
    """Dispatch to the emitter matching the jet's family."""
    if family is None:
        family = classify_jet(jet, default_samples() if samples is None else samples)
    tag = family.subfamily if family.tag is Family.OVERLAP else family.tag
    if tag is Family.S1:
        return emit_s1_params(jet, family, samples)
    if tag is Family.CASE1:
        return emit_case1_params(jet, family, samples)
    if tag is Family.CASE2_1:
        return emit_case21_system(jet, family, samples)
    if tag is Family.CASE2_2:
        return emit_case22_params(jet, family, samples)
    raise FamilyError("jet has no continuous limit")


def _pm_matrix(theta, zeta, xi0):
    h = 0.5 * np.asarray(theta, dtype=float)
    c, s = np.cos(h), np.sin(h)
    u11 = c
    u12 = np.exp(1j * (zeta - xi0)) * s
    u21 = np.exp(-1j * (zeta + xi0)) * s
    u22 = c
    return u11, u12, u21, u22


def _check_orthonormal(theta, xi0):
    if np.any(np.abs(np.cos(xi0) * np.sin(np.asarray(theta))) > 1e-9):
        raise ValueError("(b-, b+) is orthonormal only where cos(xi0) sin(theta) = 0")


def rotate_to_pm_basis(state: SpinorField, theta, zeta, xi0: float) -> SpinorField:
    """Coordinates (psi-, psi+) of the state on the basis

    b- = cos(theta/2) bL + e^{i(xi0 - zeta)} sin(theta/2) bR
    b+ = e^{i(zeta + xi0)} sin(theta/2) bL + cos(theta/2) bR
    """
    _check_orthonormal(theta, xi0)
    u11, u12, u21, u22 = _pm_matrix(theta, zeta, xi0)
    L, R = state.psiL, state.psiR
    return SpinorField(u11 * L + u12 * R, u21 * L + u22 * R, state.dx)


def rotate_from_pm_basis(state: SpinorField, theta, zeta, xi0: float) -> SpinorField:
    """Inverse of :func:`rotate_to_pm_basis`."""
    _check_orthonormal(theta, xi0)
    u11, u12, u21, u22 = _pm_matrix(theta, zeta, xi0)
    m, p = state.psiL, state.psiR
    return SpinorField(np.conj(u11) * m + np.conj(u21) * p, np.conj(u12) * m + np.conj(u22) * p, state.dx)


def flat_rhs(params: DiracParams, T, X, psiL, psiR, dL, dR):
    """dT Psi of the flat limit, given the X-derivatives (dL, dR)."""
    A0, A1 = params.A0(T, X), params.A1(T, X)
    mm, mp = params.mass_minus(T, X), params.mass_plus(T, X)
    return (
        dL + 1j * (A0 - A1) * psiL - 1j * mm * psiR,
        -dR + 1j * (A0 + A1) * psiR - 1j * mp * psiL,
    )


def _advance(jet: JetSpec, state: SpinorField, lattice: Lattice, j: int) -> SpinorField:
    angles = jet.angles(lattice.epsilon)
    if jet.n_steps == 1:
        return step_s1(state, angles, lattice, j)
    return step_s2(state, build_s2_coefficients(angles, lattice, j), lattice)


def consistency_residual(
    jet: JetSpec,
    test_state,
    lattice: Lattice,
    T0: float = 0.0,
    region=None,
) -> float:
    """Max-norm mismatch between one walk period and the limit equation.

    Computes max |(Psi_{j+n} - Psi_j)/(n eps) - RHS(Psi_j)| over the sites
    in ``region`` (boolean mask, default all sites), where n is the jet's
    stroboscope period and RHS is assembled from the emitted coefficients.
    For a jet with a limit this is O(eps).

    ``test_state`` is a SpinorField on the lattice or a callable
    ``X -> (psiL, psiR)``; it should be band-limited.
    """
    eps = lattice.epsilon
    j = int(round(T0 / eps))
    T = j * eps
    X = lattice.x
    if callable(test_state):
        L, R = test_state(X)
        state = SpinorField.on(lattice, L, R)
    else:
        state = test_state
    mask = np.ones(lattice.n, dtype=bool) if region is None else np.asarray(region, dtype=bool)
    n = jet.n_steps
    times = [lattice.time(j + i) for i in range(n + 1)]
    samples = np.column_stack(
        [np.repeat(times, mask.sum()), np.tile(X[mask], len(times))]
    )
    family = classify_jet(jet, samples)
    if family.tag is Family.NO_LIMIT:
        raise FamilyError("jet has no continuous limit on the sampled region")
    params = emit_params(jet, family, samples)
    later = _advance(jet, state, lattice, j)
    dL = spectral_derivative(state.psiL, lattice)
    dR = spectral_derivative(state.psiR, lattice)
    Tv = np.full_like(X, T)

    if isinstance(params, Case21System):
        rL, rR = params.rhs(Tv, X, state.psiL, state.psiR)
        qL = (later.psiL - state.psiL) / (n * eps) - rL
        qR = (later.psiR - state.psiR) / (n * eps) - rR
    elif params.flat:
        rL, rR = flat_rhs(params, Tv, X, state.psiL, state.psiR, dL, dR)
        qL = (later.psiL - state.psiL) / (n * eps) - rL
        qR = (later.psiR - state.psiR) / (n * eps) - rR
    else:
        xi0 = float(evaluate(jet.xi0, T, X[0]))
        T1 = times[-1]
        th_a, ze_a = evaluate(jet.theta0, Tv, X), evaluate(jet.zeta0, Tv, X)
        th_b = evaluate(jet.theta0, np.full_like(X, T1), X)
        ze_b = evaluate(jet.zeta0, np.full_like(X, T1), X)
        pm_a = rotate_to_pm_basis(state, th_a, ze_a, xi0)
        pm_b = rotate_to_pm_basis(later, th_b, ze_b, xi0)
        # X-derivative of the rotated coordinates by the product rule
        thx, zex = partial_X(jet.theta0, Tv, X), partial_X(jet.zeta0, Tv, X)
        u11, u12, u21, u22 = _pm_matrix(th_a, ze_a, xi0)
        hs, hc = np.sin(th_a / 2), np.cos(th_a / 2)
        d11 = -0.5 * hs * thx
        d12 = np.exp(1j * (ze_a - xi0)) * (1j * zex * hs + 0.5 * hc * thx)
        d21 = np.exp(-1j * (ze_a + xi0)) * (-1j * zex * hs + 0.5 * hc * thx)
        d22 = d11
        L, R = state.psiL, state.psiR
        dm = d11 * L + d12 * R + u11 * dL + u12 * dR
        dp = d21 * L + d22 * R + u21 * dL + u22 * dR
        c = params.cos_theta(Tv, X)
        cx = partial_X(params.cos_theta, Tv, X)
        AT, AX = params.A0(Tv, X), params.A1(Tv, X)
        rm = c * dm + 0.5 * cx * pm_a.psiL + 1j * (AT - c * AX) * pm_a.psiL
        rp = -(c * dp + 0.5 * cx * pm_a.psiR) + 1j * (AT + c * AX) * pm_a.psiR
        qL = (pm_b.psiL - pm_a.psiL) / (n * eps) - rm
        qR = (pm_b.psiR - pm_a.psiR) / (n * eps) - rp
    return float(max(np.max(np.abs(qL[mask])), np.max(np.abs(qR[mask]))))
