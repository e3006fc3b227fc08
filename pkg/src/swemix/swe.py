"""Shallow water physics in conservative geopotential form.

State vectors carry (phi_prime, U, V) in the last axis: the geopotential
perturbation about the mean ``phi_bar`` and the two momentum components.
All flux and source routines are vectorized over leading axes.

The full flux splits additively into a linear gravity-wave part (treated
implicitly downstream) and the nonlinear remainder (treated explicitly).
The constant ``phi_bar^2 / 2`` is removed from the pressure so every flux
vanishes identically at rest:

    pressure      P  = (phi^2 - phi_bar^2) / 2 = phi_bar * phi' + phi'^2 / 2
    linear part        phi_bar * phi'
    remainder          phi'^2 / 2
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DryStateError, InvalidArgumentError

PHI, MX, MY = 0, 1, 2  # component indices: perturbation, x-momentum, y-momentum


@dataclass(frozen=True)
class ModelParams:
    """Physical constants: mean geopotential, rotation, drag, forcing.

    ``forcing``, if given, is a callable ``(x, y, t) -> (Fx, Fy)`` adding a
    prescribed momentum source; it never touches the continuity equation.
    """

    phi_bar: float
    f0: float = 0.0
    beta: float = 0.0
    drag: float = 0.0
    forcing: Optional[Callable] = None

    def __post_init__(self):
        if not self.phi_bar > 0.0:
            raise InvalidArgumentError(f"phi_bar must be positive, got {self.phi_bar}")
        if self.drag < 0.0:
            raise InvalidArgumentError(f"drag must be nonnegative, got {self.drag}")

    @property
    def wave_speed(self):
        return float(np.sqrt(self.phi_bar))


def geopotential(q, params):
    """Total geopotential phi = phi_bar + phi'; raises on dry states."""
    phi = params.phi_bar + np.asarray(q)[..., PHI]
    if np.any(phi <= 0.0):
        raise DryStateError(f"non-positive geopotential (min {np.min(phi):.3e})")
    return phi


def flux_full(q, params):
    """Full nonlinear flux tensor, shape (..., 2, 3): axis -2 is (x, y)."""
    q = np.asarray(q, dtype=float)
    phi = geopotential(q, params)
    u_mom, v_mom = q[..., MX], q[..., MY]
    pressure = 0.5 * (phi**2 - params.phi_bar**2)
    flux = np.empty(q.shape[:-1] + (2, 3))
    flux[..., 0, PHI] = u_mom
    flux[..., 0, MX] = u_mom**2 / phi + pressure
    flux[..., 0, MY] = u_mom * v_mom / phi
    flux[..., 1, PHI] = v_mom
    flux[..., 1, MX] = u_mom * v_mom / phi
    flux[..., 1, MY] = v_mom**2 / phi + pressure
    return flux


def flux_linear(q, params):
    """Linear gravity-wave flux: continuity (U, V), momentum pressure phi_bar*phi'."""
    q = np.asarray(q, dtype=float)
    flux = np.zeros(q.shape[:-1] + (2, 3))
    flux[..., 0, PHI] = q[..., MX]
    flux[..., 0, MX] = params.phi_bar * q[..., PHI]
    flux[..., 1, PHI] = q[..., MY]
    flux[..., 1, MY] = params.phi_bar * q[..., PHI]
    return flux


def flux_nonlinear(q, params):
    """Nonlinear remainder flux: advection plus the quadratic pressure tail.

    Continuity rows are identically zero, so the explicit operator never
    moves mass.
    """
    q = np.asarray(q, dtype=float)
    phi = geopotential(q, params)
    u_mom, v_mom = q[..., MX], q[..., MY]
    tail = 0.5 * q[..., PHI] ** 2
    flux = np.zeros(q.shape[:-1] + (2, 3))
    flux[..., 0, MX] = u_mom**2 / phi + tail
    flux[..., 0, MY] = u_mom * v_mom / phi
    flux[..., 1, MX] = u_mom * v_mom / phi
    flux[..., 1, MY] = v_mom**2 / phi + tail
    return flux


def source(q, x, y, t, params):
    """Coriolis, linear bottom drag, and prescribed momentum forcing.

    The Coriolis parameter is f = f0 + beta*y; its contribution rotates
    momentum without injecting energy.  Continuity source is zero.
    """
    q = np.asarray(q, dtype=float)
    f = params.f0 + params.beta * np.asarray(y)
    u_mom, v_mom = q[..., MX], q[..., MY]
    src = np.zeros_like(q)
    src[..., MX] = f * v_mom - params.drag * u_mom
    src[..., MY] = -f * u_mom - params.drag * v_mom
    if params.forcing is not None:
        fx, fy = params.forcing(x, y, t)
        src[..., MX] += fx
        src[..., MY] += fy
    return src
