"""Simulation assembly and study harnesses.

Builds the mesh/basis/operator stack from a Config, wires the explicit DG
and implicit HDG operators into the split-operator pair the IMEX stepper
consumes, marches in time with diagnostics, and provides the convergence
and large-time-step stability studies used by the CLI and the acceptance
suite.
"""

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import imex
from .basis import nodal_basis
from .cases import l2_error, make_case
from .dg import ExplicitOperator, StateField, nodal_field
from .errors import DryStateError, InvalidArgumentError
from .hdg import ImplicitSolverBank
from .mesh import build_structured
from .output import CsvSeriesWriter, write_vtk
from .swe import ModelParams


class SplitOperator:
    """Explicit DG remainder plus implicit HDG linear solve.

    ``linear_mode`` zeroes the explicit operator entirely, leaving the pure
    implicit gravity-wave discretization (used to isolate spatial HDG
    accuracy).  ``extra_source`` is an optional (x, y, t) -> 3-vector added
    on the explicit side; manufactured-solution cases inject their residual
    through it.
    """

    def __init__(self, dg_op, bank, params, extra_source=None, linear_mode=False):
        self.dg_op = dg_op
        self.bank = bank
        self.params = params
        self.extra_source = extra_source
        self.linear_mode = linear_mode

    def explicit_tendency(self, q, t):
        if self.linear_mode:
            return q.zeros_like()
        out = self.dg_op.tendency(q.data, t, self.params, extra_source=self.extra_source)
        return StateField(out, q.mesh, q.basis)

    def implicit_solve(self, shift, r):
        q, _ = self.bank.solve(shift, r)
        return q


class ExplicitOnlyOperator:
    """Control configuration: the complete flux on the explicit side.

    The implicit solve degenerates to the identity, so the IMEX stepper
    reproduces the scheme's explicit Runge-Kutta method applied to the full
    system.  Exists to demonstrate the fast-wave time-step restriction the
    split method removes.
    """

    def __init__(self, dg_op, params, extra_source=None):
        self.dg_op = dg_op
        self.params = params
        self.extra_source = extra_source

    def explicit_tendency(self, q, t):
        out = self.dg_op.tendency(
            q.data, t, self.params, extra_source=self.extra_source, mode="full"
        )
        return StateField(out, q.mesh, q.basis)

    def implicit_solve(self, shift, r):
        return r

    def apply_implicit(self, q):
        return q.zeros_like()


@dataclass
class Simulation:
    config: object
    case: object
    params: ModelParams
    mesh: object
    basis: object
    dg_op: ExplicitOperator
    bank: ImplicitSolverBank
    tab: imex.ImexTableau

    def initial_field(self):
        return nodal_field(self.mesh, self.basis, self.case.initial_state)

    def operator(self):
        return SplitOperator(
            self.dg_op,
            self.bank,
            self.params,
            extra_source=self.case.mms_source,
            linear_mode=self.config.case.linear_mode,
        )


def build_simulation(cfg):
    params = ModelParams(
        phi_bar=cfg.physics.phi_bar,
        f0=cfg.physics.f0,
        beta=cfg.physics.beta,
        drag=cfg.physics.drag,
    )
    case = make_case(cfg.case.name, params, cfg.case.amplitude)
    bx0, bx1, by0, by1 = case.bounds
    bounds = (
        bx0 if cfg.mesh.xmin is None else cfg.mesh.xmin,
        bx1 if cfg.mesh.xmax is None else cfg.mesh.xmax,
        by0 if cfg.mesh.ymin is None else cfg.mesh.ymin,
        by1 if cfg.mesh.ymax is None else cfg.mesh.ymax,
    )
    mesh = build_structured(
        cfg.mesh.nx,
        cfg.mesh.ny,
        bounds,
        cfg.mesh.bc_x or case.bc_x,
        cfg.mesh.bc_y or case.bc_y,
    )
    basis = nodal_basis(cfg.disc.order)
    bank = ImplicitSolverBank(
        mesh,
        basis,
        params,
        tau=cfg.disc.tau,
        backend=cfg.solver.backend,
        rel_tol=cfg.solver.rel_tol,
        max_iter=cfg.solver.max_iter,
    )
    return Simulation(
        config=cfg,
        case=case,
        params=params,
        mesh=mesh,
        basis=basis,
        dg_op=ExplicitOperator(mesh, basis),
        bank=bank,
        tab=imex.tableau(cfg.time.scheme),
    )


def total_mass(field, params):
    """Integral of the total geopotential phi over the domain."""
    mesh, basis = field.mesh, field.basis
    w = basis.weights
    mass2d = 0.25 * mesh.hx * mesh.hy * np.outer(w, w)
    return float(np.einsum("jk,ejk->", mass2d, params.phi_bar + field.phi_prime))


def energy_proxy(field, params):
    """0.5 * integral of (|U|^2 / phi_bar + phi'^2); monitored, not conserved."""
    mesh, basis = field.mesh, field.basis
    w = basis.weights
    mass2d = 0.25 * mesh.hx * mesh.hy * np.outer(w, w)
    dens = (field.momentum_x**2 + field.momentum_y**2) / params.phi_bar + field.phi_prime**2
    return float(0.5 * np.einsum("jk,ejk->", mass2d, dens))


def explicit_gravity_dt(mesh, basis, params, cfl=1.0):
    """Reference explicit gravity-wave step limit C*h / ((p+1)^2 c)."""
    h = min(mesh.hx, mesh.hy)
    return cfl * h / ((basis.order + 1) ** 2 * params.wave_speed)


@dataclass
class RunResult:
    steps: int
    t_final: float
    final_field: StateField
    mass_drift: float
    final_errors: Optional[np.ndarray]
    csv_path: Optional[str]
    vtk_paths: list


def run(cfg, quiet=False):
    """Time-march the configured case, writing CSV/VTK artifacts."""
    sim = build_simulation(cfg)
    dt = cfg.time.dt
    n_steps = int(round(cfg.time.t_final / dt))
    pair = sim.operator()
    q = sim.initial_field()
    exact = sim.case.exact_solution

    out_dir = cfg.output.dir
    writer = None
    if cfg.output.csv_series:
        writer = CsvSeriesWriter(os.path.join(out_dir, "series.csv"), with_errors=exact is not None)
    vtk_paths = []

    def snapshot(step, field):
        path = os.path.join(out_dir, f"snap_{step:06d}.vtk")
        write_vtk(field, sim.mesh, sim.basis, path, sim.params.phi_bar)
        vtk_paths.append(path)

    def record(step, t, field):
        if writer is not None:
            errs = l2_error(field, exact, t) if exact is not None else None
            writer.add(step, t, total_mass(field, sim.params), energy_proxy(field, sim.params), errs)
        if cfg.output.vtk_every_n_steps and step % cfg.output.vtk_every_n_steps == 0:
            snapshot(step, field)

    mass0 = total_mass(q, sim.params)
    record(0, 0.0, q)
    t = 0.0
    for k in range(n_steps):
        q = imex.step(pair, q, t, dt, sim.tab)
        t = (k + 1) * dt
        record(k + 1, t, q)

    csv_path = writer.write() if writer is not None else None
    mass_drift = abs(total_mass(q, sim.params) - mass0) / abs(mass0)
    errors = l2_error(q, exact, t) if exact is not None else None
    if not quiet:
        print(f"case={sim.case.name} scheme={sim.tab.name} order={sim.basis.order} "
              f"mesh={sim.mesh.nx}x{sim.mesh.ny} steps={n_steps} t={t:.6g}")
        print(f"  mass drift (relative): {mass_drift:.3e}")
        print(f"  max |phi'|: {np.max(np.abs(q.phi_prime)):.6e}")
        if errors is not None:
            print(f"  L2 errors (phi', U, V): {errors[0]:.6e} {errors[1]:.6e} {errors[2]:.6e}")
    return RunResult(
        steps=n_steps,
        t_final=t,
        final_field=q,
        mass_drift=mass_drift,
        final_errors=errors,
        csv_path=csv_path,
        vtk_paths=vtk_paths,
    )


@dataclass
class ConvergenceResult:
    mode: str
    levels: list
    spacings: np.ndarray  # h or dt per level
    errors: np.ndarray  # (nlevels, 3)
    rates: np.ndarray  # (nlevels - 1, 3) pairwise log2 ratios
    measured_order: np.ndarray  # (3,) mean pairwise rate

    def table(self):
        lines = [f"{'level':>8} {'spacing':>12} {'L2(phi)':>12} {'L2(U)':>12} {'L2(V)':>12} {'rate(phi)':>10}"]
        for i, lev in enumerate(self.levels):
            rate = f"{self.rates[i - 1, 0]:10.3f}" if i > 0 else " " * 10
            e = self.errors[i]
            lines.append(
                f"{lev:>8} {self.spacings[i]:12.5e} {e[0]:12.5e} {e[1]:12.5e} {e[2]:12.5e} {rate}"
            )
        lines.append(f"measured order (phi', U, V): "
                     f"{self.measured_order[0]:.3f} {self.measured_order[1]:.3f} {self.measured_order[2]:.3f}")
        return "\n".join(lines)

    def to_csv(self, path):
        rows = ["level,spacing,l2_phi,l2_u,l2_v,rate_phi,rate_u,rate_v"]
        for i, lev in enumerate(self.levels):
            rate = ["", "", ""] if i == 0 else [f"{r:.17g}" for r in self.rates[i - 1]]
            e = [f"{v:.17g}" for v in self.errors[i]]
            rows.append(",".join([str(lev), f"{self.spacings[i]:.17g}"] + e + rate))
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(rows) + "\n")
        return path


def _run_error(cfg):
    result = run(cfg, quiet=True)
    if result.final_errors is None:
        raise InvalidArgumentError("convergence study needs a case with an exact solution")
    return result.final_errors


def convergence(cfg, levels, mode):
    """Refinement study.

    mode="spatial": levels are mesh sizes (nx = ny), marched at the config's
    fixed dt.  mode="temporal": levels are step counts over t_final on the
    config's fixed mesh.  Levels must at least halve the spacing end to end
    to make the pairwise log2 rates meaningful; the usual usage doubles
    each level.
    """
    import copy

    if len(levels) < 2:
        raise InvalidArgumentError("need at least 2 refinement levels")
    if mode not in ("spatial", "temporal"):
        raise InvalidArgumentError(f"mode must be 'spatial' or 'temporal', got {mode!r}")
    errors = []
    spacings = []
    for lev in levels:
        c = copy.deepcopy(cfg)
        c.output.csv_series = False
        c.output.vtk_every_n_steps = 0
        if mode == "spatial":
            c.mesh.nx = c.mesh.ny = int(lev)
            spacings.append(1.0 / int(lev))
        else:
            n = int(lev)
            c.time.dt = cfg.time.t_final / n
            spacings.append(c.time.dt)
        errors.append(_run_error(c))
    errors = np.array(errors)
    spacings = np.array(spacings)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = spacings[:-1] / spacings[1:]
        rates = np.log2(errors[:-1] / errors[1:]) / np.log2(ratio)[:, None]
    measured = np.mean(rates, axis=0)
    return ConvergenceResult(
        mode=mode,
        levels=list(levels),
        spacings=spacings,
        errors=errors,
        rates=rates,
        measured_order=measured,
    )


@dataclass
class StabilityResult:
    dt_cfl: float
    dt: float
    initial_max: float
    imex_max_ratio: float
    explicit_max_ratio: float
    explicit_steps_survived: int


def stability_study(
    nx=16,
    order=2,
    phi_bar=1.0,
    amplitude_factor=1e-3,
    cfl_multiple=20.0,
    n_steps=200,
    scheme="ars222",
    quiet=False,
):
    """Large-time-step demonstration on the nonlinear standing wave.

    Runs the split method at ``cfl_multiple`` times the explicit gravity
    CFL reference step, then an explicit-only control (full flux moved to
    the explicit side) at the same step.  The control is aborted once its
    amplitude exceeds 1e6 times the initial one or goes non-finite.
    """
    params = ModelParams(phi_bar=phi_bar)
    case = make_case("standing_wave", params, amplitude_factor * phi_bar)
    mesh = build_structured(nx, nx, case.bounds, case.bc_x, case.bc_y)
    basis = nodal_basis(order)
    dg_op = ExplicitOperator(mesh, basis)
    dt_cfl = explicit_gravity_dt(mesh, basis, params)
    dt = cfl_multiple * dt_cfl
    tab = imex.tableau(scheme)
    q0 = nodal_field(mesh, basis, case.initial_state)
    initial_max = float(np.max(np.abs(q0.phi_prime)))

    bank = ImplicitSolverBank(mesh, basis, params)
    pair = SplitOperator(dg_op, bank, params)
    q = q0.copy()
    imex_max = initial_max
    for k in range(n_steps):
        q = imex.step(pair, q, k * dt, dt, tab)
        imex_max = max(imex_max, float(np.max(np.abs(q.phi_prime))))

    control = ExplicitOnlyOperator(dg_op, params)
    q = q0.copy()
    explicit_max = initial_max
    survived = 0
    blowup_cap = 1e6 * initial_max
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for k in range(n_steps):
            try:
                q = imex.step(control, q, k * dt, dt, tab)
            except (DryStateError, FloatingPointError):
                explicit_max = np.inf
                break
            m = float(np.max(np.abs(q.phi_prime)))
            if not np.isfinite(m) or m > blowup_cap:
                explicit_max = np.inf
                break
            explicit_max = max(explicit_max, m)
            survived = k + 1

    result = StabilityResult(
        dt_cfl=dt_cfl,
        dt=dt,
        initial_max=initial_max,
        imex_max_ratio=imex_max / initial_max,
        explicit_max_ratio=explicit_max / initial_max,
        explicit_steps_survived=survived,
    )
    if not quiet:
        print(f"explicit gravity-wave dt_CFL = {dt_cfl:.6e}; running at dt = {dt:.6e} "
              f"({cfl_multiple:g}x) for {n_steps} steps")
        print(f"  split method   max|phi'| / initial = {result.imex_max_ratio:.3f}")
        print(f"  explicit control max|phi'| / initial = {result.explicit_max_ratio:.3e} "
              f"(survived {survived} steps)")
    return result
