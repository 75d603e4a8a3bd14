import csv
import json

import numpy as np
import pytest

from qwdirac.errors import ConfigError
from qwdirac.experiments import (
    ExperimentConfig,
    PacketSpec,
    electric_dirac,
    load_config,
    run_electric_convergence,
    run_electric_density,
    run_schwarzschild,
    spectral_content,
)
from qwdirac.lattice import Lattice
from qwdirac.schwarzschild import SchwarzschildConfig


def electric(tmp_path=None, **kw):
    base = dict(kind="electric_convergence", resolutions=(128, 256), T_final=2.0, packet=PacketSpec(0.3))
    base.update(kw)
    if tmp_path is not None:
        base["output_dir"] = str(tmp_path)
    return ExperimentConfig(**base)


@pytest.mark.parametrize(
    "kw",
    [
        dict(resolutions=(256, 256)),
        dict(resolutions=(512, 256)),
        dict(resolutions=(4,)),
        dict(resolutions=()),
        dict(T_final=0.0),
        dict(kind="nonsense"),
        dict(angles="other"),
    ],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        electric(**kw)


def test_extracted_dirac_parameters():
    d = electric_dirac(electric(), Lattice(64))
    assert d.mass == pytest.approx(-0.24) and d.efield == pytest.approx(1.1)


def test_single_resolution_has_no_slope(tmp_path):
    res = run_electric_convergence(electric(tmp_path, resolutions=(128,)))
    assert len(res.rows) == 1 and res.slope is None
    meta = json.loads((tmp_path / "convergence.json").read_text())
    assert meta["slope"] is None and meta["mass"] == pytest.approx(-0.24)
    assert meta["version"] and meta["config"]["resolutions"] == [128]


def test_convergence_table_and_files(tmp_path):
    res = run_electric_convergence(electric(tmp_path))
    assert [r[0] for r in res.rows] == [128, 256]
    assert res.rows[1][2] < res.rows[0][2]
    with open(tmp_path / "convergence.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "epsilon", "deltaN_rel"] and len(rows) == 3
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".")]


def test_density_maps(tmp_path):
    cfg = electric(tmp_path, kind="electric_density", resolutions=(256,), sigmas=(0.1, 0.3), record_every=4)
    res = run_electric_density(cfg)
    assert set(res.maps) == {0.1, 0.3}
    times, x, frames = res.maps[0.1]
    assert frames.shape == (len(times), 256)
    np.testing.assert_allclose(frames.sum(axis=1) * (x[1] - x[0]), 1.0, atol=1e-12)
    meta = json.loads((tmp_path / "density.json").read_text())
    assert set(meta["spectral_content_above_20"]) == {"0.1", "0.3"}


def test_spectral_content():
    x = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    assert spectral_content(1 + np.cos(3 * x)) == pytest.approx(0.0, abs=1e-20)
    assert spectral_content(1 + np.cos(30 * x)) == pytest.approx(1.0)
    assert spectral_content(np.ones(16)) == 0.0


def test_free_packet_drifts_at_group_velocity():
    # E = 0: the walk packet centre moves at k0 / sqrt(k0^2 + m^2)
    k0, m = 2.0, 0.24
    cfg = electric(kind="electric_density", resolutions=(1024,), T_final=2.0, efield=0.0,
                   length=20.0, packet=PacketSpec(1.0, 6.0, k0), record_every=16)
    times, x, frames = run_electric_density(cfg).maps[1.0]
    centre = frames @ x * (x[1] - x[0])
    slope, icpt = np.polyfit(times, centre, 1)
    r2 = 1 - np.sum((centre - (slope * times + icpt)) ** 2) / np.sum((centre - centre.mean()) ** 2)
    assert r2 > 0.999
    assert slope == pytest.approx(k0 / np.hypot(k0, m), rel=2e-2)


def test_load_config(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text(
        "[experiment]\nkind = schwarzschild\nresolutions = 200, 800\nT_final = 5\nlength = 128\n"
        "[packet]\nsigmaX = 0.5\ncenter = 50.5\n[angles]\nset = schwarzschild\n"
        "[schwarzschild]\nr_g = 300\nlambda = 1\n"
    )
    cfg = load_config(p)
    assert cfg.resolutions == (200, 800) and cfg.schwarzschild == SchwarzschildConfig(300.0, 1.0)
    assert cfg.packet.center == 50.5
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nkind = electric_convergence\nT_final = abc\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def schwarzschild_cfg(tmp_path=None, **kw):
    base = dict(kind="schwarzschild", resolutions=(200, 400), T_final=20.0, packet=PacketSpec(0.5, 50.5),
                angles="schwarzschild", length=128.0, schwarzschild=SchwarzschildConfig(300.0, 1.0))
    base.update(kw)
    if tmp_path is not None:
        base["output_dir"] = str(tmp_path)
    return ExperimentConfig(**base)


def test_schwarzschild_outputs(tmp_path):
    res = run_schwarzschild(schwarzschild_cfg(tmp_path))
    names = {p.name for p in tmp_path.iterdir()}
    assert {"geodesics.csv", "loci.csv", "schwarzschild.json",
            "schwarzschild_density_n200.csv", "schwarzschild_density_n400.csv"} <= names
    with open(tmp_path / "geodesics.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["branch", "T", "X", "r", "in_domain"]
    for g in res.geodesics.values():
        assert g.reason == "boundary"
    assert res.tracking[400][-1] < res.tracking[200][-1]


def test_schwarzschild_rejects_start_outside_domain():
    with pytest.raises(ConfigError):
        run_schwarzschild(schwarzschild_cfg(packet=PacketSpec(0.5, 250.0), length=300.0))
    with pytest.raises(ConfigError):
        run_schwarzschild(schwarzschild_cfg(schwarzschild=None))
