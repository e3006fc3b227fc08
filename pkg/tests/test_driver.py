import os

import numpy as np
import pytest

from swemix import imex
from swemix.basis import nodal_basis
from swemix.config import parse_text
from swemix.dg import ExplicitOperator, nodal_field
from swemix.driver import (
    ExplicitOnlyOperator,
    SplitOperator,
    build_simulation,
    convergence,
    energy_proxy,
    explicit_gravity_dt,
    run,
    total_mass,
)
from swemix.errors import InvalidArgumentError
from swemix.hdg import ImplicitSolverBank
from swemix.mesh import build_structured
from swemix.swe import ModelParams


def _cfg(text):
    return parse_text(text)


LAKE = """
case.name = lake_at_rest
time.dt = 0.01
time.t_final = 0.1
mesh.nx = 4
mesh.ny = 4
disc.order = 2
output.dir = {out}
"""


def test_lake_at_rest_run(tmp_path):
    cfg = _cfg(LAKE.format(out=tmp_path / "out"))
    result = run(cfg, quiet=True)
    assert result.steps == 10
    assert np.max(np.abs(result.final_field.data)) < 1e-12
    rows = open(result.csv_path).read().splitlines()
    assert len(rows) == 12  # header + initial + 10 steps
    masses = [float(r.split(",")[2]) for r in rows[1:]]
    assert max(masses) - min(masses) <= 1e-12 * abs(masses[0])


@pytest.mark.parametrize("scheme", ["ars111", "ars222", "ars233"])
def test_lake_at_rest_stays_at_rest_all_schemes(tmp_path, scheme):
    cfg = _cfg(LAKE.format(out=tmp_path / "o") + f"time.scheme = {scheme}\n")
    cfg.time.t_final = 1.0  # 100 steps
    result = run(cfg, quiet=True)
    assert result.steps == 100
    assert np.max(np.abs(result.final_field.data)) <= 1e-12


def test_rerun_is_byte_identical(tmp_path):
    text = """
case.name = standing_wave
case.linear_mode = true
time.dt = 0.005
time.t_final = 0.05
mesh.nx = 6
mesh.ny = 6
disc.order = 2
output.dir = {out}
"""
    a = run(_cfg(text.format(out=tmp_path / "a")), quiet=True)
    b = run(_cfg(text.format(out=tmp_path / "b")), quiet=True)
    assert open(a.csv_path, "rb").read() == open(b.csv_path, "rb").read()


def test_vtk_snapshots_written(tmp_path):
    cfg = _cfg(LAKE.format(out=tmp_path / "v") + "output.vtk_every_n_steps = 5\n")
    result = run(cfg, quiet=True)
    names = [os.path.basename(p) for p in result.vtk_paths]
    assert names == ["snap_000000.vtk", "snap_000005.vtk", "snap_000010.vtk"]
    for p in result.vtk_paths:
        assert os.path.exists(p)


def test_output_dir_created_and_overwritten(tmp_path):
    out = tmp_path / "fresh" / "nested"
    cfg = _cfg(LAKE.format(out=out))
    run(cfg, quiet=True)
    assert (out / "series.csv").exists()
    first = (out / "series.csv").read_bytes()
    run(cfg, quiet=True)
    assert (out / "series.csv").read_bytes() == first


def test_case_defaults_and_overrides():
    sim = build_simulation(_cfg("case.name = mms_nonlinear\ntime.dt = 0.1\ntime.t_final = 1\n"))
    assert sim.mesh.bc_x == "periodic" and sim.mesh.bc_y == "periodic"
    sim = build_simulation(
        _cfg("case.name = mms_nonlinear\ntime.dt = 0.1\ntime.t_final = 1\nmesh.bc_x = wall\n")
    )
    assert sim.mesh.bc_x == "wall"


def test_explicit_gravity_dt():
    mesh = build_structured(16, 16, (0.0, 1.0, 0.0, 1.0), "wall", "wall")
    basis = nodal_basis(2)
    params = ModelParams(phi_bar=4.0)
    dt = explicit_gravity_dt(mesh, basis, params)
    assert abs(dt - (1.0 / 16) / (9 * 2.0)) < 1e-16


def test_mass_and_energy_proxies():
    params = ModelParams(phi_bar=2.0)
    mesh = build_structured(3, 3, (0.0, 1.0, 0.0, 1.0), "wall", "wall")
    basis = nodal_basis(2)
    field = nodal_field(mesh, basis, lambda x, y: np.stack(
        [np.full_like(x, 0.1), np.full_like(x, 0.3), np.full_like(x, -0.2)], axis=-1))
    assert abs(total_mass(field, params) - 2.1) < 1e-13
    expected_energy = 0.5 * ((0.3**2 + 0.2**2) / 2.0 + 0.1**2)
    assert abs(energy_proxy(field, params) - expected_energy) < 1e-14


def test_linear_mode_zeroes_explicit_side():
    params = ModelParams(phi_bar=1.0)
    mesh = build_structured(2, 2, (0.0, 1.0, 0.0, 1.0), "wall", "wall")
    basis = nodal_basis(1)
    bank = ImplicitSolverBank(mesh, basis, params)
    pair = SplitOperator(ExplicitOperator(mesh, basis), bank, params, linear_mode=True)
    q = nodal_field(mesh, basis, lambda x, y: np.stack(
        [0.2 * x, 0.1 * y, 0.0 * x], axis=-1))
    n = pair.explicit_tendency(q, 0.0)
    assert np.array_equal(n.data, np.zeros_like(n.data))


def test_explicit_only_operator_identity_solve():
    params = ModelParams(phi_bar=1.0)
    mesh = build_structured(2, 2, (0.0, 1.0, 0.0, 1.0), "wall", "wall")
    basis = nodal_basis(1)
    pair = ExplicitOnlyOperator(ExplicitOperator(mesh, basis), params)
    q = nodal_field(mesh, basis, lambda x, y: np.stack(
        [0.0 * x + 0.01, 0.0 * x, 0.0 * x], axis=-1))
    assert pair.implicit_solve(0.3, q) is q
    assert np.array_equal(pair.apply_implicit(q).data, np.zeros_like(q.data))


def test_convergence_requires_two_levels():
    cfg = _cfg("case.name = standing_wave\ntime.dt = 0.01\ntime.t_final = 0.02\n")
    with pytest.raises(InvalidArgumentError):
        convergence(cfg, [8], "spatial")
    with pytest.raises(InvalidArgumentError):
        convergence(cfg, [8, 16], "sideways")


def test_convergence_spatial_smoke(tmp_path):
    cfg = _cfg(
        """
case.name = standing_wave
case.linear_mode = true
time.dt = 0.002
time.t_final = 0.04
time.scheme = ars222
disc.order = 2
output.dir = {out}
""".format(out=tmp_path)
    )
    res = convergence(cfg, [4, 8], "spatial")
    assert res.errors.shape == (2, 3)
    assert res.errors[1, 0] < res.errors[0, 0]  # refinement helps
    path = res.to_csv(str(tmp_path / "conv.csv"))
    rows = open(path).read().splitlines()
    assert rows[0].startswith("level,spacing")
    assert len(rows) == 3
    assert "measured order" in res.table()


def test_convergence_needs_exact_solution(tmp_path):
    cfg = _cfg(LAKE.format(out=tmp_path))
    # lake at rest has an exact solution (itself); build a case without one
    cfg2 = _cfg(
        "case.name = standing_wave\ncase.linear_mode = true\ntime.dt = 0.01\ntime.t_final = 0.02\n"
    )
    res = convergence(cfg2, [2, 4], "spatial")  # works: exact exists
    assert res.rates.shape == (1, 3)
