"""Experiment harness: electric-field convergence and density maps, and
the Schwarzschild walk against null geodesics.

Each run returns its numbers and, when ``output_dir`` is set, writes CSV
files with a JSON sidecar (config, package version, epsilon values and
the extracted Dirac parameters).  Files are written to a temporary name
and renamed, so a crashed run never leaves a half-written table.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .continuum import JetSpec, emit_s1_params
from .dirac import (
    FlatDiracConfig,
    delta_n_rel,
    evolve_flat,
    integrate_characteristic,
    positive_energy_packet,
)
from .errors import ConfigError, DomainError
from .lattice import TWO_PI, Lattice, SpinorField
from .schwarzschild import (
    SchwarzschildConfig,
    domain_edge,
    horizon,
    in_domain,
    make_schwarzschild_jet,
    radius,
    singularity,
    walk_theta,
)
from .walk import build_s2_coefficients, evolve, step_s2

KINDS = ("electric_convergence", "electric_density", "schwarzschild", "classify", "geodesic")


@dataclass(frozen=True)
class PacketSpec:
    sigmaX: float = 0.3
    center: float | None = None
    k0: float = 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one harness run.

    ``sigmas`` lists the packet widths of a density run; other runs use
    ``packet.sigmaX``.  ``length`` is the periodic box length.
    """

    kind: str
    resolutions: tuple = (256,)
    T_final: float = 10.0
    packet: PacketSpec = field(default_factory=PacketSpec)
    angles: str = "electric"
    theta_bar: float = 0.24
    efield: float = 1.1
    length: float = TWO_PI
    sigmas: tuple = ()
    record_every: int = 0
    schwarzschild: SchwarzschildConfig | None = None
    output_dir: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        res = tuple(int(r) for r in self.resolutions)
        if not res:
            raise ConfigError("at least one resolution is required")
        if len(set(res)) != len(res):
            raise ConfigError(f"duplicate resolutions in {res}")
        if list(res) != sorted(res):
            raise ConfigError(f"resolutions must be sorted ascending, got {res}")
        if res[0] < 8:
            raise ConfigError("every resolution must be >= 8")
        if not (np.isfinite(self.T_final) and self.T_final > 0):
            raise ConfigError("T_final must be positive")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ConfigError("length must be positive")
        if self.angles not in ("electric", "schwarzschild"):
            raise ConfigError(f"unknown angle set {self.angles!r}")
        object.__setattr__(self, "resolutions", res)
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["resolutions"] = list(self.resolutions)
        d["sigmas"] = list(self.sigmas)
        return d


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def load_config(path) -> ExperimentConfig:
    """Read an INI-style experiment file.

    Sections: ``[experiment]`` (kind, resolutions, T_final, length, sigmas,
    record_every, output_dir, seed), ``[packet]`` (sigmaX, center, k0),
    ``[angles]`` (set, theta_bar, efield) and ``[schwarzschild]`` (r_g,
    lambda).
    """
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not cp.has_section("experiment"):
        raise ConfigError(f"{path}: missing [experiment] section")
    try:
        ex = cp["experiment"]
        kw = dict(
            kind=ex.get("kind", "").strip(),
            resolutions=tuple(int(v) for v in _floats(ex.get("resolutions", "256"))),
            T_final=ex.getfloat("T_final", 10.0),
            length=ex.getfloat("length", TWO_PI),
            sigmas=tuple(_floats(ex.get("sigmas", ""))),
            record_every=ex.getint("record_every", 0),
            output_dir=ex.get("output_dir", None),
            seed=ex.getint("seed", 0),
        )
        if cp.has_section("packet"):
            p = cp["packet"]
            center = p.get("center", None)
            kw["packet"] = PacketSpec(
                p.getfloat("sigmaX", 0.3), None if center is None else float(center), p.getfloat("k0", 0.0)
            )
        if cp.has_section("angles"):
            a = cp["angles"]
            kw["angles"] = a.get("set", "electric").strip()
            kw["theta_bar"] = a.getfloat("theta_bar", 0.24)
            kw["efield"] = a.getfloat("efield", 1.1)
        if cp.has_section("schwarzschild"):
            s = cp["schwarzschild"]
            kw["schwarzschild"] = SchwarzschildConfig(s.getfloat("r_g", 1.0), s.getfloat("lambda", 1.0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc
    return ExperimentConfig(**kw)


# -- output helpers ---------------------------------------------------------


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    _atomic_write(path, buf.getvalue())


def _write_meta(path: Path, cfg: ExperimentConfig, **extra):
    meta = {"config": cfg.to_dict(), "version": __version__}
    meta.update(extra)
    _atomic_write(path, json.dumps(meta, indent=2, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _write_map(path: Path, times, x, frames):
    _write_csv(path, ["T"] + [f"{v:.10g}" for v in x], ([t, *f] for t, f in zip(times, frames)))


# -- electric field ---------------------------------------------------------


def electric_jet(theta_bar: float = 0.24, efield: float = 1.1) -> JetSpec:
    """One-step jet with theta = eps*theta_bar, xi = eps*E*T, zeta = pi/2, alpha = 0."""
    return JetSpec(
        n_steps=1,
        zeta0=np.pi / 2,
        theta_bar=theta_bar,
        xi_bar=lambda T, X: efield * np.asarray(T, dtype=float) + 0.0 * np.asarray(X, dtype=float),
    )


def electric_dirac(cfg: ExperimentConfig, lattice: Lattice) -> FlatDiracConfig:
    """Uniform mass and field read off the limit of :func:`electric_jet`."""
    params = emit_s1_params(electric_jet(cfg.theta_bar, cfg.efield))
    T = np.array([0.0, 0.5, 1.0])
    X = np.array([0.0, 1.0, 2.0])
    mm, mp = params.mass_minus(T, X), params.mass_plus(T, X)
    if np.ptp(mm) > 1e-12 or np.max(np.abs(mm - mp)) > 1e-12 or np.max(np.abs(np.imag(mm))) > 1e-12:
        raise ConfigError("electric angle set must give a uniform real mass")
    a1 = params.A1(T, X)
    E = -(a1[2] - a1[0]) / (T[2] - T[0])
    if np.max(np.abs(params.A0(T, X))) > 1e-12:
        raise ConfigError("electric angle set must be in the temporal gauge")
    return FlatDiracConfig(float(np.real(mm[0])), float(E), lattice)


@dataclass
class ConvergenceResult:
    rows: list  # (n, epsilon, deltaN_rel)
    slope: float | None
    mass: float
    efield: float
    paths: dict = field(default_factory=dict)


def _electric_pair(cfg: ExperimentConfig, n: int, sigmaX: float, record_every: int = 0):
    lat = Lattice(n, cfg.length)
    dcfg = electric_dirac(cfg, lat)
    center = cfg.packet.center if cfg.packet.center is not None else 0.5 * cfg.length
    psi0 = positive_energy_packet(cfg.packet.k0, sigmaX, dcfg.mass, lat, center)
    steps = int(round(cfg.T_final / lat.dt))
    angles = electric_jet(cfg.theta_bar, cfg.efield).angles(lat.epsilon)
    walk = evolve(psi0, angles, lat, steps, record_every=record_every or None)
    return lat, dcfg, psi0, steps, walk


def run_electric_convergence(cfg: ExperimentConfig) -> ConvergenceResult:
    """delta N_rel between the one-step walk and the Dirac reference at T_final.

    Both start from the same positive-energy packet and use dt = epsilon.
    The slope is the least-squares fit of log delta N_rel against log
    epsilon, emitted only with two or more resolutions.
    """
    rows = []
    dcfg = None
    for n in cfg.resolutions:
        lat, dcfg, psi0, steps, walk = _electric_pair(cfg, n, cfg.packet.sigmaX)
        ref = evolve_flat(psi0, dcfg, 0.0, steps, lat.dt)
        rows.append((n, lat.epsilon, delta_n_rel(walk.density, ref.density)))
    slope = None
    if len(rows) > 1:
        eps = np.log([r[1] for r in rows])
        err = np.log([r[2] for r in rows])
        slope = float(np.polyfit(eps, err, 1)[0])
    out = ConvergenceResult(rows, slope, dcfg.mass, dcfg.efield)
    if cfg.output_dir:
        d = Path(cfg.output_dir)
        out.paths["table"] = d / "convergence.csv"
        _write_csv(out.paths["table"], ["n", "epsilon", "deltaN_rel"], rows)
        out.paths["meta"] = d / "convergence.json"
        _write_meta(
            out.paths["meta"], cfg, epsilon=[r[1] for r in rows], mass=dcfg.mass,
            efield=dcfg.efield, slope=slope,
        )
    return out


def spectral_content(density: np.ndarray, above: int = 20) -> float:
    """Fraction of the (mean-removed) density power in Fourier modes |k| > above."""
    N = np.asarray(density, dtype=float)
    P = np.abs(np.fft.fft(N - N.mean())) ** 2
    k = np.abs(np.fft.fftfreq(N.size, d=1.0 / N.size))
    tot = P.sum()
    return float(P[k > above].sum() / tot) if tot > 0 else 0.0


@dataclass
class DensityResult:
    maps: dict  # sigmaX -> (times, x, frames)
    spectral: dict  # sigmaX -> high-mode fraction at T_final
    paths: dict = field(default_factory=dict)


def run_electric_density(cfg: ExperimentConfig) -> DensityResult:
    """Space-time density of the walk for each packet width in ``sigmas``.

    Uses the first resolution.  Rows of the CSV are time slices.
    """
    sigmas = cfg.sigmas or (cfg.packet.sigmaX,)
    n = cfg.resolutions[0]
    every = cfg.record_every or 1
    maps, spec = {}, {}
    for s in sigmas:
        lat, dcfg, psi0, steps, (final, frames) = _electric_pair(cfg, n, s, every)
        times = [i * every * lat.dt for i in range(len(frames))]
        maps[s] = (np.array(times), lat.x, np.array(frames))
        spec[s] = spectral_content(final.density)
    out = DensityResult(maps, spec)
    if cfg.output_dir:
        d = Path(cfg.output_dir)
        for i, s in enumerate(sigmas):
            p = d / f"density_sigma{i}_{s:g}.csv"
            _write_map(p, *maps[s])
            out.paths[s] = p
        out.paths["meta"] = d / "density.json"
        lat = Lattice(n, cfg.length)
        dcfg = electric_dirac(cfg, lat)
        _write_meta(
            out.paths["meta"], cfg, epsilon=lat.epsilon, mass=dcfg.mass, efield=dcfg.efield,
            spectral_content_above_20={f"{s:g}": v for s, v in spec.items()},
        )
    return out


# -- Schwarzschild ----------------------------------------------------------


def null_geodesics(sc: SchwarzschildConfig, X0: float, T_max: float = 1e4, dt: float = 0.01):
    """Both radial null geodesics from (0, X0), followed until they leave D."""
    if not in_domain(0.0, X0, sc):
        raise DomainError(f"X0 = {X0} is outside D")

    def th(T, X):
        return walk_theta(T, X, sc)

    def ins(T, X):
        return in_domain(T, X, sc)

    return {b: integrate_characteristic(X0, b, th, T_max, dt, inside=ins) for b in (-1, 1)}


def ridge_error(times, x, frames, path, T_lo, T_hi, half_width):
    """RMS distance between the density maximum near a geodesic and the geodesic.

    Only times in [T_lo, T_hi] count.  The maximum is searched within
    ``half_width`` of the geodesic and refined by a parabola through the
    three highest samples.
    """
    dx = x[1] - x[0]
    n = x.size
    errs = []
    for T, d in zip(times, frames):
        if T < T_lo or T > T_hi:
            continue
        xg = float(path.at(T))
        idx = np.nonzero(np.abs(x - xg) <= half_width)[0]
        if idx.size == 0:
            continue
        i = idx[np.argmax(d[idx])]
        y0, y1, y2 = d[(i - 1) % n], d[i], d[(i + 1) % n]
        den = y0 - 2 * y1 + y2
        off = 0.5 * (y0 - y2) / den if den != 0 else 0.0
        errs.append(x[i] + off * dx - xg)
    if not errs:
        return float("nan")
    return float(np.sqrt(np.mean(np.square(errs))))


@dataclass
class SchwarzschildResult:
    geodesics: dict  # branch -> GeodesicPath
    tracking: dict  # n -> {branch: rms error}
    dx: dict  # n -> grid spacing
    window: dict  # branch -> (T_lo, T_hi)
    maps: dict  # n -> (times, x, frames)
    outside_sites: dict  # n -> number of sites outside D at T = 0
    paths: dict = field(default_factory=dict)


def schwarzschild_initial(lattice: Lattice, X0: float, sigmaX: float) -> SpinorField:
    """sqrt(N0) (bL + i bR) for a Gaussian N0, normalised."""
    N0 = np.exp(-((lattice.x - X0) ** 2) / (2 * sigmaX**2))
    a = np.sqrt(N0)
    return SpinorField.on(lattice, a, 1j * a).normalized()


def run_schwarzschild(cfg: ExperimentConfig, fraction: float = 0.8) -> SchwarzschildResult:
    """Two-step walk realising the Lemaitre metric, compared with its null geodesics.

    Sites outside D get theta = 0.  The density is recorded every
    ``2 * record_every`` steps.  The tracking error of each branch is
    measured from the time the two geodesics are 6 sigma apart up to
    ``fraction`` of that branch's time to reach the singularity.
    """
    sc = cfg.schwarzschild
    if sc is None:
        raise ConfigError("schwarzschild run needs a [schwarzschild] section")
    X0 = cfg.packet.center if cfg.packet.center is not None else 0.5 * cfg.length
    sig = cfg.packet.sigmaX
    if not in_domain(0.0, X0, sc) or not 0 <= X0 < cfg.length:
        raise ConfigError(f"initial packet centre X0 = {X0} is outside D or the box")
    geo = null_geodesics(sc, X0)
    T_stop = min(cfg.T_final, max(g.T_end for g in geo.values()))
    Tg = np.linspace(0.0, min(g.T_end for g in geo.values()), 4001)
    sep = np.abs(geo[1].at(Tg) - geo[-1].at(Tg))
    T_lo = float(Tg[np.argmax(sep >= 6 * sig)]) if np.any(sep >= 6 * sig) else np.inf
    window = {b: (T_lo, fraction * g.T_end) for b, g in geo.items()}

    jet = make_schwarzschild_jet(sc)
    angles = jet.angles(0.0)
    every = 2 * max(1, cfg.record_every // 2 if cfg.record_every else 1)
    res = SchwarzschildResult(geo, {}, {}, window, {}, {})
    for n in cfg.resolutions:
        lat = Lattice(n, cfg.length)
        st = schwarzschild_initial(lat, X0, sig)
        res.outside_sites[n] = int(np.sum(~in_domain(0.0, lat.x, sc)))
        times, frames = [], []
        j = 0
        while True:
            T = lat.time(j)
            if j % every == 0:
                times.append(T)
                frames.append(st.density)
            if T + 2 * lat.dt > T_stop + 1e-12:
                break
            st = step_s2(st, build_s2_coefficients(angles, lat, j), lat)
            j += 2
        times, frames = np.array(times), np.array(frames)
        res.maps[n] = (times, lat.x, frames)
        res.dx[n] = lat.dx
        res.tracking[n] = {
            b: ridge_error(times, lat.x, frames, g, *window[b], 3 * sig) for b, g in geo.items()
        }
    if cfg.output_dir:
        _write_schwarzschild_files(cfg, res, X0)
    return res


def _write_schwarzschild_files(cfg, res: SchwarzschildResult, X0):
    sc = cfg.schwarzschild
    d = Path(cfg.output_dir)
    for n, m in res.maps.items():
        res.paths[("density", n)] = d / f"schwarzschild_density_n{n}.csv"
        _write_map(res.paths[("density", n)], *m)
    res.paths["geodesics"] = write_geodesics(d / "geodesics.csv", res.geodesics, sc)
    T = np.linspace(0.0, max(g.T_end for g in res.geodesics.values()), 201)
    res.paths["loci"] = d / "loci.csv"
    _write_csv(
        res.paths["loci"], ["T", "singularity", "horizon", "domain_edge"],
        zip(T, singularity(T, sc), horizon(T, sc), domain_edge(T, sc)),
    )
    res.paths["meta"] = d / "schwarzschild.json"
    _write_meta(
        res.paths["meta"], cfg, X0=X0,
        epsilon={str(n): dx for n, dx in res.dx.items()},
        tracking_error={str(n): {str(b): e for b, e in t.items()} for n, t in res.tracking.items()},
        window={str(b): w for b, w in res.window.items()},
        singularity_time={str(b): g.T_end for b, g in res.geodesics.items()},
        outside_sites_at_start={str(n): k for n, k in res.outside_sites.items()},
    )


def write_geodesics(path: Path, geodesics: dict, sc: SchwarzschildConfig) -> Path:
    """CSV with columns branch, T, X, r, in_domain."""
    rows = []
    for b, g in sorted(geodesics.items()):
        r = radius(g.T, np.maximum(g.X, singularity(g.T, sc)), sc)
        flags = in_domain(g.T, g.X, sc)
        rows.extend((b, t, x, rr, int(f)) for t, x, rr, f in zip(g.T, g.X, r, flags))
    _write_csv(Path(path), ["branch", "T", "X", "r", "in_domain"], rows)
    return Path(path)


def with_output(cfg: ExperimentConfig, output_dir) -> ExperimentConfig:
    return replace(cfg, output_dir=None if output_dir is None else str(output_dir))
