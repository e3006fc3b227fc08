"""Explicit nodal DG residual for the nonlinear remainder of the system.

The semi-discrete tendency for one element is

    dq/dt = M^-1 [ integral F . grad(test)  -  surface lift of fluxes ] + S

with Rusanov interface fluxes.  In the default ``remainder`` mode the flux
is the nonlinear remainder and the Rusanov speed is purely advective: the
gravity-wave speed is excluded because the fast wave is handled by the
implicit operator.  The ``full`` mode discretizes the complete flux with
the standard speed |u.n| + sqrt(phi); it exists for explicit control runs
that demonstrate the time-step restriction the splitting removes.

Wall faces use a reflected ghost state (normal momentum negated, the rest
copied); periodic faces read the wrapped neighbor through the shared face.
Face contributions are computed in one pass over the fixed face ordering
and scattered back per element, so results are deterministic.
"""

from dataclasses import dataclass

import numpy as np

from . import swe
from .errors import DryStateError, InvalidArgumentError
from .mesh import EAST, NORTH, SOUTH, WEST


@dataclass
class StateField:
    """Nodal coefficients of (phi', U, V) on every element.

    ``data`` has shape (num_elements, p+1, p+1, 3) with axes
    (element, y node, x node, component).  Supports the small amount of
    linear algebra the time stepper needs.
    """

    data: np.ndarray
    mesh: object
    basis: object

    def copy(self):
        return StateField(self.data.copy(), self.mesh, self.basis)

    def zeros_like(self):
        return StateField(np.zeros_like(self.data), self.mesh, self.basis)

    def __add__(self, other):
        return StateField(self.data + other.data, self.mesh, self.basis)

    def __sub__(self, other):
        return StateField(self.data - other.data, self.mesh, self.basis)

    def __mul__(self, scalar):
        return StateField(self.data * scalar, self.mesh, self.basis)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return StateField(self.data / scalar, self.mesh, self.basis)

    @property
    def phi_prime(self):
        return self.data[..., swe.PHI]

    @property
    def momentum_x(self):
        return self.data[..., swe.MX]

    @property
    def momentum_y(self):
        return self.data[..., swe.MY]


def nodal_field(mesh, basis, fn, t=None):
    """Sample ``fn(x, y)`` (or ``fn(x, y, t)``) at all element nodes."""
    from .mesh import gll_node_coords

    xy = gll_node_coords(mesh, basis)
    x, y = xy[..., 0], xy[..., 1]
    values = fn(x, y) if t is None else fn(x, y, t)
    return StateField(np.asarray(values, dtype=float), mesh, basis)


def rusanov_flux(q_minus, q_plus, normal, params, mode="remainder"):
    """Rusanov flux through a face with unit normal pointing from minus to plus.

    mode="remainder" penalizes with the advective speed max|u.n| only;
    mode="full" uses |u.n| + sqrt(phi), the full wave speed.
    """
    q_minus = np.asarray(q_minus, dtype=float)
    q_plus = np.asarray(q_plus, dtype=float)
    normal = np.asarray(normal, dtype=float)
    if mode == "remainder":
        flux_fn = swe.flux_nonlinear
    elif mode == "full":
        flux_fn = swe.flux_full
    else:
        raise InvalidArgumentError(f"unknown flux mode {mode!r}")
    f_minus = flux_fn(q_minus, params)
    f_plus = flux_fn(q_plus, params)
    normal_flux = 0.5 * np.einsum("...dc,...d->...c", f_minus + f_plus, normal)

    phi_minus = params.phi_bar + q_minus[..., swe.PHI]
    phi_plus = params.phi_bar + q_plus[..., swe.PHI]
    un_minus = (q_minus[..., swe.MX] * normal[..., 0] + q_minus[..., swe.MY] * normal[..., 1]) / phi_minus
    un_plus = (q_plus[..., swe.MX] * normal[..., 0] + q_plus[..., swe.MY] * normal[..., 1]) / phi_plus
    smax = np.maximum(np.abs(un_minus), np.abs(un_plus))
    if mode == "full":
        smax = smax + np.sqrt(np.maximum(phi_minus, phi_plus))
    return normal_flux - 0.5 * smax[..., None] * (q_plus - q_minus)


def _check_wet(data, params):
    phi = params.phi_bar + data[..., swe.PHI]
    if np.any(phi <= 0.0):
        bad = int(np.argwhere(np.min(phi, axis=(1, 2)) <= 0.0)[0, 0])
        raise DryStateError(
            f"non-positive geopotential in element {bad} (min {np.min(phi):.3e})",
            element=bad,
        )


class ExplicitOperator:
    """Precomputed connectivity and quadrature for tendency evaluation.

    Construction is cheap; reuse one instance across a time march to avoid
    rebuilding index arrays every stage.
    """

    def __init__(self, mesh, basis):
        from .mesh import gll_node_coords

        self.mesh = mesh
        self.basis = basis
        n1 = basis.n
        w = basis.weights
        self.mass2d = 0.25 * mesh.hx * mesh.hy * np.outer(w, w)  # (jy, ix)
        self.wd = w[:, None] * basis.D  # wd[i, m] = w_i D[i, m]
        self.node_xy = gll_node_coords(mesh, basis)

        self.left_elem = mesh.face_left[:, 0]
        self.left_side = mesh.face_left[:, 1]
        self.right_elem = mesh.face_right[:, 0]
        self.right_side = mesh.face_right[:, 1]
        self.interior = self.right_elem >= 0
        self.normals = mesh.face_normal
        self.face_w = 0.5 * mesh.face_length[:, None] * w[None, :]  # (nface, p+1)
        # Node permutation seen from the right element (flip flags).
        idx = np.arange(n1)
        self.right_perm = np.where(
            mesh.elem_face_flip[self.right_elem, self.right_side][:, None],
            idx[::-1][None, :],
            idx[None, :],
        )

    def _side_traces(self, data):
        n1 = self.basis.n
        traces = np.empty((data.shape[0], 4, n1, 3))
        traces[:, SOUTH] = data[:, 0, :, :]
        traces[:, EAST] = data[:, :, n1 - 1, :]
        traces[:, NORTH] = data[:, n1 - 1, :, :]
        traces[:, WEST] = data[:, :, 0, :]
        return traces

    def tendency(self, data, t, params, extra_source=None, mode="remainder"):
        """Semi-discrete tendency for nodal data (nelem, p+1, p+1, 3)."""
        _check_wet(data, params)
        mesh, basis = self.mesh, self.basis
        n1 = basis.n
        w = basis.weights
        flux_fn = swe.flux_nonlinear if mode == "remainder" else swe.flux_full

        flux = flux_fn(data, params)  # (e, jy, ix, 2, 3)
        vol = 0.5 * mesh.hy * np.einsum("n,im,enic->enmc", w, self.wd, flux[..., 0, :])
        vol += 0.5 * mesh.hx * np.einsum("m,jn,ejmc->enmc", w, self.wd, flux[..., 1, :])

        traces = self._side_traces(data)
        q_left = traces[self.left_elem, self.left_side]  # (nface, p+1, 3)
        q_right = q_left.copy()
        normals = self.normals[:, None, :]
        # Wall ghost: reflect the normal momentum.
        un = q_left[..., swe.MX] * normals[..., 0] + q_left[..., swe.MY] * normals[..., 1]
        q_right[..., swe.MX] -= 2.0 * un * normals[..., 0]
        q_right[..., swe.MY] -= 2.0 * un * normals[..., 1]
        if np.any(self.interior):
            ids = np.nonzero(self.interior)[0]
            q_right[ids] = traces[
                self.right_elem[ids, None], self.right_side[ids, None], self.right_perm[ids]
            ]

        fhat = rusanov_flux(q_left, q_right, normals, params, mode=mode)
        fhat_w = fhat * self.face_w[:, :, None]

        side_acc = np.zeros((mesh.num_elements, 4, n1, 3))
        side_acc[self.left_elem, self.left_side] = fhat_w
        if np.any(self.interior):
            ids = np.nonzero(self.interior)[0]
            back = -np.take_along_axis(fhat_w[ids], self.right_perm[ids][:, :, None], axis=1)
            side_acc[self.right_elem[ids], self.right_side[ids]] = back

        vol[:, 0, :, :] -= side_acc[:, SOUTH]
        vol[:, n1 - 1, :, :] -= side_acc[:, NORTH]
        vol[:, :, n1 - 1, :] -= side_acc[:, EAST]
        vol[:, :, 0, :] -= side_acc[:, WEST]

        out = vol / self.mass2d[None, :, :, None]
        x, y = self.node_xy[..., 0], self.node_xy[..., 1]
        out += swe.source(data, x, y, t, params)
        if extra_source is not None:
            out += extra_source(x, y, t)
        return out


def residual_explicit(field, t, params, extra_source=None, mode="remainder"):
    """Explicit DG tendency as a StateField (convenience wrapper)."""
    op = ExplicitOperator(field.mesh, field.basis)
    return StateField(
        op.tendency(field.data, t, params, extra_source=extra_source, mode=mode),
        field.mesh,
        field.basis,
    )
