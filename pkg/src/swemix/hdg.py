"""Hybridized DG solver for the implicit gravity-wave stage system.

Each implicit stage requires (M + a L) q = M r where L is the weak
divergence of the linear flux and ``a`` is the stage-scaled time step.
The hybridized form introduces a single-valued scalar trace lambda on the
face skeleton approximating phi', with numerical fluxes

    continuity:  U.n + tau (phi' - lambda)
    momentum:    phi_bar * lambda * n

Element unknowns are ordered component-major (phi', U, V), each block in
the flattened (jy, ix) node order.  Eliminating them element by element
against the transmission condition (the continuity flux sums to zero over
each face; on walls it vanishes outright, which enforces U.n = 0 weakly)
leaves the condensed trace system

    H lambda = g,     H = sum_K (D_K - C_K A_K^-1 B_K).

On the uniform structured meshes produced by :mod:`swemix.mesh` every
element shares one set of local blocks, so they are formed once and
scattered by connectivity.  Back-substitution recovers q element-wise from
the stored factorization; no reassembly happens between solves with the
same shift.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .basis import element_operators
from .dg import StateField
from .errors import AssemblyError, InvalidArgumentError, SolverFailureError
from .mesh import SIDE_NORMALS


@dataclass
class TraceField:
    """Nodal trace values (one row of p+1 values per geometric face)."""

    data: np.ndarray
    mesh: object
    basis: object


def hdg_numerical_flux(q, lam, normal, tau, params):
    """Pointwise HDG flux: stabilized continuity, trace-valued momentum pressure."""
    if tau <= 0.0:
        raise InvalidArgumentError(f"stabilization tau must be positive, got {tau}")
    q = np.asarray(q, dtype=float)
    normal = np.asarray(normal, dtype=float)
    un = q[..., 1] * normal[..., 0] + q[..., 2] * normal[..., 1]
    out = np.empty(q.shape[:-1] + (3,))
    out[..., 0] = un + tau * (q[..., 0] - lam)
    out[..., 1] = params.phi_bar * lam * normal[..., 0]
    out[..., 2] = params.phi_bar * lam * normal[..., 1]
    return out


@dataclass
class LocalBlocks:
    """Element-local blocks of the coupled (q, lambda) system, shared by all
    elements of a uniform mesh, with the A factorization precomputed."""

    n_vol: int  # 3 * (p+1)^2
    n_face: int  # p+1
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    A_lu: tuple
    A_inv_B: np.ndarray
    schur: np.ndarray  # D - C A^-1 B
    mass3: np.ndarray  # diagonal of the 3-component mass block
    alpha_dt: float
    tau: float


def _extraction(n1, side):
    """E[k, volume_index] = 1 for the volume node under face node k of a side."""
    e = np.zeros((n1, n1 * n1))
    for k in range(n1):
        if side == 0:
            e[k, k] = 1.0
        elif side == 1:
            e[k, k * n1 + n1 - 1] = 1.0
        elif side == 2:
            e[k, (n1 - 1) * n1 + k] = 1.0
        else:
            e[k, k * n1] = 1.0
    return e


def assemble_local(mesh, basis, params, alpha_dt, tau):
    """Build A, B, C, D for one element and factorize A.

    A couples the element unknowns to themselves (flux terms taken at
    lambda = 0), B carries the lambda dependence of the element equations,
    and C, D express the element's share of the transmission condition.
    """
    if alpha_dt <= 0.0 or tau <= 0.0:
        raise AssemblyError(f"need alpha_dt > 0 and tau > 0, got {alpha_dt}, {tau}")
    ops = element_operators(basis, mesh.hx, mesh.hy)
    n1 = basis.n
    nn = n1 * n1
    a = alpha_dt
    phi_bar = params.phi_bar

    A = np.zeros((3 * nn, 3 * nn))
    B = np.zeros((3 * nn, 4 * n1))
    C = np.zeros((4 * n1, 3 * nn))
    D = np.zeros((4 * n1, 4 * n1))

    sl = [slice(c * nn, (c + 1) * nn) for c in range(3)]
    mass = np.diag(ops.mass_diag)
    A[sl[0], sl[0]] = mass
    A[sl[1], sl[1]] = mass
    A[sl[2], sl[2]] = mass
    A[sl[0], sl[1]] = -a * ops.weak_dx
    A[sl[0], sl[2]] = -a * ops.weak_dy
    A[sl[1], sl[0]] = -a * phi_bar * ops.weak_dx
    A[sl[2], sl[0]] = -a * phi_bar * ops.weak_dy

    for side in range(4):
        nx, ny = SIDE_NORMALS[side]
        lift = ops.face_lift[side]  # (nn, n1), includes face weights
        ext = _extraction(n1, side)
        cols = slice(side * n1, (side + 1) * n1)
        A[sl[0], sl[0]] += a * tau * lift @ ext
        A[sl[0], sl[1]] += a * nx * lift @ ext
        A[sl[0], sl[2]] += a * ny * lift @ ext
        B[sl[0], cols] = -a * tau * lift
        B[sl[1], cols] = a * phi_bar * nx * lift
        B[sl[2], cols] = a * phi_bar * ny * lift
        C[cols, sl[0]] = tau * lift.T
        C[cols, sl[1]] = nx * lift.T
        C[cols, sl[2]] = ny * lift.T
        D[cols, cols] = -tau * np.diag(ops.face_weights[side])

    A_lu = scipy.linalg.lu_factor(A, check_finite=False)
    if np.min(np.abs(np.diag(A_lu[0]))) == 0.0:
        raise AssemblyError("singular element matrix; check alpha_dt and tau")
    A_inv_B = scipy.linalg.lu_solve(A_lu, B, check_finite=False)
    schur = D - C @ A_inv_B
    mass3 = np.tile(ops.mass_diag, 3)
    return LocalBlocks(
        n_vol=3 * nn,
        n_face=n1,
        A=A,
        B=B,
        C=C,
        D=D,
        A_lu=A_lu,
        A_inv_B=A_inv_B,
        schur=schur,
        mass3=mass3,
        alpha_dt=alpha_dt,
        tau=tau,
    )


def _trace_ids(mesh, n1):
    """Global trace dof per (element, side-major face node), honoring flips."""
    fwd = np.arange(n1)
    ids = np.empty((mesh.num_elements, 4 * n1), dtype=int)
    for side in range(4):
        fid = mesh.elem_faces[:, side]
        perm = np.where(mesh.elem_face_flip[:, side][:, None], fwd[::-1][None, :], fwd[None, :])
        ids[:, side * n1 : (side + 1) * n1] = fid[:, None] * n1 + perm
    return ids


@dataclass
class CondensedSystem:
    """Condensed trace system plus everything needed for back-substitution."""

    mesh: object
    basis: object
    blocks: LocalBlocks
    H: scipy.sparse.csc_matrix
    elem_trace_ids: np.ndarray
    backend: str
    rel_tol: float = 1e-10
    max_iter: int = 500
    _direct: object = field(default=None, repr=False)
    _precond: object = field(default=None, repr=False)

    @property
    def num_trace_dofs(self):
        return self.H.shape[0]

    def solve_trace(self, g):
        if self.backend == "direct":
            return self._direct.solve(g)
        lam, info = scipy.sparse.linalg.gmres(
            self.H,
            g,
            rtol=self.rel_tol,
            atol=0.0,
            restart=30,
            maxiter=self.max_iter,
            M=self._precond,
        )
        if info != 0:
            res = np.linalg.norm(self.H @ lam - g) / max(np.linalg.norm(g), 1e-300)
            raise SolverFailureError(
                f"trace GMRES did not converge (info={info}, relative residual {res:.3e})",
                residual=res,
                iterations=info,
            )
        return lam


def condense_and_factor(blocks, mesh, basis, backend="direct", rel_tol=1e-10, max_iter=500):
    """Scatter the element Schur complements into the global trace matrix and
    prepare the chosen solver backend."""
    n1 = blocks.n_face
    ndof = mesh.num_faces * n1
    ids = _trace_ids(mesh, n1)
    nelem = mesh.num_elements
    rows = np.repeat(ids, 4 * n1, axis=1).ravel()
    cols = np.tile(ids, (1, 4 * n1)).ravel()
    data = np.tile(blocks.schur.ravel(), nelem)
    H = scipy.sparse.coo_matrix((data, (rows, cols)), shape=(ndof, ndof)).tocsc()

    system = CondensedSystem(
        mesh=mesh,
        basis=basis,
        blocks=blocks,
        H=H,
        elem_trace_ids=ids,
        backend=backend,
        rel_tol=rel_tol,
        max_iter=max_iter,
    )
    if backend == "direct":
        try:
            system._direct = scipy.sparse.linalg.splu(H)
        except RuntimeError as exc:
            raise AssemblyError(f"condensed trace system is singular: {exc}") from exc
    elif backend == "gmres":
        system._precond = _block_jacobi(H, mesh.num_faces, n1)
    else:
        raise InvalidArgumentError(f"unknown solver backend {backend!r}")
    return system


def _block_jacobi(H, num_faces, n1):
    """Per-face block-diagonal inverse of H as a preconditioning operator."""
    Hc = H.tocsr()
    inv = np.empty((num_faces, n1, n1))
    for f in range(num_faces):
        s = slice(f * n1, (f + 1) * n1)
        block = Hc[s, s].toarray()
        try:
            inv[f] = np.linalg.inv(block)
        except np.linalg.LinAlgError as exc:
            raise AssemblyError(f"singular face block {f} in preconditioner") from exc

    def apply(v):
        return (inv @ v.reshape(num_faces, n1, 1)).reshape(-1)

    return scipy.sparse.linalg.LinearOperator(H.shape, matvec=apply)


def implicit_solve(system, rhs_field):
    """Solve (M + alpha_dt L) q = M r; return the state and the trace.

    Uses the stored factorizations only: one batched element solve for the
    static-condensation forward pass, a trace solve, and one batched
    back-substitution.
    """
    blocks = system.blocks
    mesh, basis = system.mesh, system.basis
    data = rhs_field.data
    if not np.all(np.isfinite(data)):
        raise InvalidArgumentError("implicit solve right-hand side contains non-finite values")
    nelem = mesh.num_elements
    r_flat = np.moveaxis(data, 3, 1).reshape(nelem, blocks.n_vol)
    y = scipy.linalg.lu_solve(blocks.A_lu, (r_flat * blocks.mass3).T, check_finite=False).T

    g = np.zeros(system.num_trace_dofs)
    np.add.at(g, system.elem_trace_ids, -(y @ blocks.C.T))
    lam = system.solve_trace(g)

    q = y - lam[system.elem_trace_ids] @ blocks.A_inv_B.T
    n1 = basis.n
    q_data = np.moveaxis(q.reshape(nelem, 3, n1, n1), 1, 3).copy()
    return (
        StateField(q_data, mesh, basis),
        TraceField(lam.reshape(mesh.num_faces, n1), mesh, basis),
    )


class ImplicitSolverBank:
    """Cache of condensed systems keyed by the stage shift alpha*dt.

    Keys match within 1e-14, so a scheme with one distinct implicit
    diagonal triggers exactly one assembly per run regardless of step
    count.  ``num_assemblies`` exposes that for tests and diagnostics.
    """

    def __init__(self, mesh, basis, params, tau=None, backend="direct", rel_tol=1e-10, max_iter=500):
        self.mesh = mesh
        self.basis = basis
        self.params = params
        self.tau = params.wave_speed if tau is None else float(tau)
        if self.tau <= 0.0:
            raise InvalidArgumentError(f"stabilization tau must be positive, got {self.tau}")
        self.backend = backend
        self.rel_tol = rel_tol
        self.max_iter = max_iter
        self.num_assemblies = 0
        self._systems = []  # (alpha_dt, CondensedSystem)

    def system_for(self, alpha_dt):
        for key, system in self._systems:
            if abs(key - alpha_dt) <= 1e-14:
                return system
        blocks = assemble_local(self.mesh, self.basis, self.params, alpha_dt, self.tau)
        system = condense_and_factor(
            blocks,
            self.mesh,
            self.basis,
            backend=self.backend,
            rel_tol=self.rel_tol,
            max_iter=self.max_iter,
        )
        self.num_assemblies += 1
        self._systems.append((alpha_dt, system))
        return system

    def solve(self, alpha_dt, rhs_field):
        return implicit_solve(self.system_for(alpha_dt), rhs_field)
