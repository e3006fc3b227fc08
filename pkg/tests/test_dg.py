import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from swemix.basis import nodal_basis
from swemix.dg import ExplicitOperator, StateField, nodal_field, residual_explicit, rusanov_flux
from swemix.errors import DryStateError
from swemix.mesh import PERIODIC, WALL, build_structured
from swemix.swe import ModelParams, flux_nonlinear

P1 = ModelParams(phi_bar=1.0)

state = st.builds(
    lambda p, u, v: np.array([p, u, v]),
    st.floats(-0.5, 2.0),
    st.floats(-2.0, 2.0),
    st.floats(-2.0, 2.0),
)
unit_normal = st.sampled_from(
    [np.array([1.0, 0.0]), np.array([-1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, -1.0])]
)


@given(state, unit_normal)
def test_rusanov_consistency(q, n):
    fhat = rusanov_flux(q, q, n, P1)
    expected = np.einsum("dc,d->c", flux_nonlinear(q, P1), n)
    assert np.allclose(fhat, expected, rtol=0, atol=1e-15)


def test_rusanov_rest_states_average_pressure_remainder():
    # both sides at rest, differing phi': advective speed is zero, so the
    # flux is the plain average of the pressure remainders
    qm = np.array([0.2, 0.0, 0.0])
    qp = np.zeros(3)
    n = np.array([1.0, 0.0])
    fhat = rusanov_flux(qm, qp, n, P1)
    assert fhat[0] == 0.0
    assert abs(fhat[1] - 0.5 * 0.02) < 1e-16
    assert fhat[2] == 0.0


@given(state, state, unit_normal)
def test_rusanov_antisymmetry(qm, qp, n):
    a = rusanov_flux(qm, qp, n, P1)
    b = rusanov_flux(qp, qm, -n, P1)
    assert np.allclose(a, -b, rtol=0, atol=1e-14)


def test_rusanov_dry_state():
    with pytest.raises(DryStateError):
        rusanov_flux(np.array([-2.0, 0.0, 0.0]), np.zeros(3), np.array([1.0, 0.0]), P1)


def _random_field(mesh, basis, rng, scale=0.3):
    data = rng.uniform(-scale, scale, size=(mesh.num_elements, basis.n, basis.n, 3))
    return StateField(data, mesh, basis)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_free_stream_on_periodic_mesh(p):
    rng = np.random.default_rng(11 + p)
    mesh = build_structured(4, 3, (0.0, 1.0, 0.0, 1.0), PERIODIC, PERIODIC)
    basis = nodal_basis(p)
    op = ExplicitOperator(mesh, basis)
    for _ in range(5):
        const = rng.uniform(-0.4, 0.4, size=3)
        data = np.tile(const, (mesh.num_elements, basis.n, basis.n, 1))
        tend = op.tendency(data, 0.0, P1)
        assert np.max(np.abs(tend)) < 1e-12


def test_rest_state_zero_tendency_exactly():
    mesh = build_structured(3, 3, (0.0, 1.0, 0.0, 1.0), WALL, WALL)
    basis = nodal_basis(2)
    op = ExplicitOperator(mesh, basis)
    tend = op.tendency(np.zeros((9, 3, 3, 3)), 0.0, P1)
    assert np.array_equal(tend, np.zeros_like(tend))


def test_dense_quadrature_oracle_single_element():
    # phi' constant and strictly positive linear momenta keep every
    # integrand inside both quadratures' exactness ranges, so the two
    # assemblies must agree to roundoff.
    p = 2
    basis = nodal_basis(p)
    mesh = build_structured(1, 1, (0.0, 1.0, 0.0, 1.0), WALL, WALL)

    def state_fn(x, y):
        x = np.asarray(x, dtype=float)
        return np.stack([np.full_like(x, 0.08), 2.0 + 0.35 * x, 1.5 + 0.2 * np.asarray(y)], axis=-1)

    field = nodal_field(mesh, basis, state_fn)
    op = ExplicitOperator(mesh, basis)
    tend = op.tendency(field.data, 0.0, P1)
    residual = tend[0] * op.mass2d[:, :, None]
    expected = oracles.dense_dg_weak_residual(basis, 1.0, 1.0, state_fn, P1, n_quad=p + 2)
    assert np.max(np.abs(residual - expected)) < 1e-10


@pytest.mark.parametrize("bcs", [(WALL, WALL), (PERIODIC, PERIODIC)])
def test_discrete_mass_conservation(bcs):
    rng = np.random.default_rng(5)
    mesh = build_structured(4, 4, (0.0, 1.0, 0.0, 1.0), *bcs)
    basis = nodal_basis(2)
    op = ExplicitOperator(mesh, basis)
    field = _random_field(mesh, basis, rng)
    tend = op.tendency(field.data, 0.0, P1)
    total = np.einsum("jk,ejk->", op.mass2d, tend[..., 0])
    assert abs(total) < 1e-12


def test_local_support():
    mesh = build_structured(5, 5, (0.0, 1.0, 0.0, 1.0), WALL, WALL)
    basis = nodal_basis(2)
    op = ExplicitOperator(mesh, basis)
    rng = np.random.default_rng(8)
    field = _random_field(mesh, basis, rng)
    base = op.tendency(field.data, 0.0, P1)
    target = 12  # interior element of the 5x5 grid
    bumped = field.data.copy()
    bumped[target] += rng.uniform(-0.05, 0.05, size=bumped[target].shape)
    diff = np.max(np.abs(op.tendency(bumped, 0.0, P1) - base), axis=(1, 2, 3))
    neighbors = {target}
    for side in range(4):
        f = mesh.elem_faces[target, side]
        for e in (mesh.face_left[f, 0], mesh.face_right[f, 0]):
            if e >= 0:
                neighbors.add(int(e))
    touched = set(np.nonzero(diff > 0)[0].tolist())
    assert touched <= neighbors
    assert target in touched


def test_dry_state_reports_element():
    mesh = build_structured(2, 2, (0.0, 1.0, 0.0, 1.0), WALL, WALL)
    basis = nodal_basis(1)
    data = np.zeros((4, 2, 2, 3))
    data[3, 0, 0, 0] = -1.5
    op = ExplicitOperator(mesh, basis)
    with pytest.raises(DryStateError) as err:
        op.tendency(data, 0.0, P1)
    assert err.value.element == 3


def test_tendency_deterministic():
    mesh = build_structured(3, 2, (0.0, 1.0, 0.0, 1.0), PERIODIC, WALL)
    basis = nodal_basis(3)
    rng = np.random.default_rng(21)
    field = _random_field(mesh, basis, rng)
    op = ExplicitOperator(mesh, basis)
    a = op.tendency(field.data, 0.1, P1)
    b = op.tendency(field.data, 0.1, P1)
    assert a.tobytes() == b.tobytes()


def test_residual_explicit_wrapper_matches_operator():
    mesh = build_structured(2, 2, (0.0, 1.0, 0.0, 1.0), WALL, WALL)
    basis = nodal_basis(2)
    rng = np.random.default_rng(4)
    field = _random_field(mesh, basis, rng)
    wrapped = residual_explicit(field, 0.0, P1)
    direct = ExplicitOperator(mesh, basis).tendency(field.data, 0.0, P1)
    assert np.array_equal(wrapped.data, direct)
