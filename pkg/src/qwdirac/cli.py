"""Command line entry point: ``python -m qwdirac <command>``.

Exit status is 0 on success, 1 when an invariant or check fails and 2 on
a bad configuration.
"""
from __future__ import annotations

import argparse
import ast
import configparser
import json
import operator
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .continuum import Family, JetSpec, classify_jet, default_samples
from .errors import ConfigError, QWError, ResolutionError
from .experiments import (
    load_config,
    null_geodesics,
    run_electric_convergence,
    run_electric_density,
    run_schwarzschild,
    write_geodesics,
)
from .properties import run_property_suite

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Evaluate a number such as ``3*pi/2`` or ``-0.5``; nothing else is allowed."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return float(np.pi)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ConfigError(f"unsupported angle expression {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except SyntaxError as exc:
        raise ConfigError(f"bad angle expression {text!r}") from exc


def load_jet(path) -> JetSpec:
    """Constant jet from a ``[jet]`` section (n_steps, theta0, ..., alpha_bar)."""
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not cp.has_section("jet"):
        raise ConfigError(f"{path}: missing [jet] section")
    s = cp["jet"]
    names = ("theta0", "xi0", "zeta0", "alpha0", "theta_bar", "xi_bar", "zeta_bar", "alpha_bar")
    kw = {k: parse_angle(s[k]) for k in names if k in s}
    try:
        return JetSpec(n_steps=int(s.get("n_steps", "1")), **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cfg(args):
    cfg = load_config(args.config)
    if args.resolution:
        cfg = replace(cfg, resolutions=tuple(sorted(args.resolution)))
    if args.out:
        cfg = replace(cfg, output_dir=str(args.out))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _cfg(args)
    if cfg.kind == "electric_density":
        res = run_electric_density(cfg)
        for s, v in res.spectral.items():
            print(f"sigmaX={s:g}  high-mode fraction at T_final: {v:.4e}")
    elif cfg.kind == "schwarzschild":
        res = run_schwarzschild(cfg)
        for n, t in res.tracking.items():
            errs = "  ".join(f"branch {b:+d}: {e:.4f}" for b, e in t.items())
            print(f"n={n}  dx={res.dx[n]:.4f}  {errs}")
    elif cfg.kind == "electric_convergence":
        return cmd_converge(args)
    else:
        raise ConfigError(f"simulate does not handle kind {cfg.kind!r}")
    return 0


def cmd_converge(args) -> int:
    cfg = _cfg(args)
    res = run_electric_convergence(cfg)
    print(f"mass={res.mass:g}  E={res.efield:g}")
    for n, eps, d in res.rows:
        print(f"n={n:6d}  eps={eps:.5e}  deltaN_rel={d:.5e}")
    if res.slope is not None:
        print(f"slope={res.slope:.4f}")
    return 0


def cmd_classify(args) -> int:
    jet = load_jet(args.config)
    c = classify_jet(jet, default_samples())
    print(json.dumps({"tag": c.tag.value, "params": c.params,
                      "subfamily": c.subfamily.value if c.subfamily else None}))
    return 0 if c.tag is not Family.NO_LIMIT or args.allow_no_limit else 1


def cmd_geodesic(args) -> int:
    cfg = _cfg(args)
    if cfg.schwarzschild is None:
        raise ConfigError("geodesic needs a [schwarzschild] section")
    X0 = cfg.packet.center if cfg.packet.center is not None else 0.5 * cfg.length
    geo = null_geodesics(cfg.schwarzschild, X0)
    for b, g in geo.items():
        print(f"branch {b:+d}: reaches the boundary at T={g.T_end:.6f}, X={g.X[-1]:.6f}")
    if cfg.output_dir:
        write_geodesics(Path(cfg.output_dir) / "geodesics.csv", geo, cfg.schwarzschild)
    return 0


def cmd_check(args) -> int:
    report = run_property_suite(args.seed or 0, instances=args.instances)
    print(report.format())
    return report.exit_status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwdirac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--out", type=Path, default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--resolution", type=int, action="append", help="override resolutions (repeatable)")

    for name, fn in (("simulate", cmd_simulate), ("converge", cmd_converge), ("geodesic", cmd_geodesic)):
        sp = sub.add_parser(name)
        common(sp)
        sp.set_defaults(fn=fn)
    sp = sub.add_parser("classify")
    common(sp)
    sp.add_argument("--allow-no-limit", action="store_true", help="exit 0 even for NoLimit")
    sp.set_defaults(fn=cmd_classify)
    sp = sub.add_parser("check")
    common(sp, config=False)
    sp.add_argument("--instances", type=int, default=100)
    sp.set_defaults(fn=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ResolutionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QWError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
