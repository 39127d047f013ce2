import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from photoqgan.mesh import mzi
from photoqgan.projector import (
    MONITORED_PORT,
    BasisParams,
    ProjectorPhases,
    expectation_of_projector,
    monitored_rows,
    projected_vector,
    projection_phases,
    projection_unitary,
    projection_unitary_batch,
    ququart_from_params,
)

basis = st.builds(
    BasisParams,
    *[st.floats(0, np.pi / 2) for _ in range(3)],
    *[st.floats(0, 2 * np.pi) for _ in range(4)],
)
six = arrays(float, 6, elements=st.floats(-10, 10, allow_nan=False))


def circuit_oracle(q):
    """Projection circuit assembled from full 4x4 factors."""
    ps = ProjectorPhases.from_vector(q).to_vector()
    u = np.diag(np.exp(1j * np.append(ps[:3], 0.0)))
    col = np.eye(4, dtype=complex)
    col[:2, :2] = mzi(ps[3])
    col[2:, 2:] = mzi(ps[4])
    u = col @ u
    last = np.eye(4, dtype=complex)
    last[1:3, 1:3] = mzi(ps[5])
    return last @ u


def random_state4(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def test_ququart_selects_first_mode():
    v = ququart_from_params(BasisParams(theta1=np.pi / 2, theta2=np.pi / 2))
    np.testing.assert_allclose(v, [1, 0, 0, 0], atol=1e-15)


def test_ququart_selects_fourth_mode():
    np.testing.assert_allclose(ququart_from_params(BasisParams()), [0, 0, 0, 1], atol=1e-15)


@given(basis)
def test_ququart_unit_norm(p):
    assert abs(np.linalg.norm(ququart_from_params(p)) - 1) < 1e-14


def test_projection_phases_all_zero():
    got = projection_phases(BasisParams()).to_vector()
    np.testing.assert_allclose(got, [np.pi / 2, np.pi / 2, 0, np.pi, 0, 0], atol=1e-15)


def test_projection_phases_theta1_half_pi():
    got = projection_phases(BasisParams(theta1=np.pi / 2)).to_vector()
    np.testing.assert_allclose(got, [np.pi / 2, np.pi / 2, 0, np.pi, 0, np.pi], atol=1e-15)


@given(basis)
def test_projection_routes_basis_state_to_port_two(p):
    out = projection_unitary(projection_phases(p)) @ ququart_from_params(p)
    assert abs(out[MONITORED_PORT]) > 1 - 1e-10


def test_all_zero_phases_match_hand_composition():
    np.testing.assert_allclose(projection_unitary(np.zeros(6)), circuit_oracle(np.zeros(6)), atol=1e-15)


@given(six)
def test_circuit_matches_oracle_and_is_unitary(q):
    u = projection_unitary(q)
    assert np.max(np.abs(u - circuit_oracle(q))) < 1e-12
    assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


def test_batch_matches_single(rng):
    qs = rng.uniform(-4, 4, (5, 6))
    for q, u in zip(qs, projection_unitary_batch(qs)):
        np.testing.assert_allclose(u, projection_unitary(q), atol=1e-15)


def test_self_projection_is_one(rng):
    p = BasisParams.random(rng)
    assert abs(expectation_of_projector(ququart_from_params(p), p) - 1) < 1e-10


def test_orthogonal_state_never_clicks(rng):
    p = BasisParams.random(rng)
    psi = ququart_from_params(p)
    other = random_state4(rng)
    other = other - np.vdot(psi, other) * psi
    other /= np.linalg.norm(other)
    assert expectation_of_projector(other, p) < 1e-10


def test_circuit_route_matches_inner_product_route():
    r = np.random.default_rng(8)
    for _ in range(10_000):
        p = BasisParams.random(r)
        s = random_state4(r)
        oracle = abs(np.vdot(ququart_from_params(p), s)) ** 2
        assert abs(expectation_of_projector(s, p) - oracle) < 1e-12


@given(six)
def test_projected_vector_is_row_of_port_two(q):
    u = projection_unitary(q)
    np.testing.assert_allclose(projected_vector(q), u[MONITORED_PORT].conj(), atol=1e-15)


@given(six, st.integers(0, 5), st.integers(0, 3))
def test_click_probability_first_order_trig(q, k, port):
    state = np.array([0.5, 0.5j, -0.5, 0.5])

    def prob(theta):
        v = q.copy()
        v[k] = theta
        return abs(projection_unitary(v)[port] @ state) ** 2

    probes = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    design = np.stack([np.ones(3), np.cos(probes), np.sin(probes)], axis=1)
    coef = np.linalg.solve(design, [prob(t) for t in probes])
    t = -0.77
    assert abs(coef @ [1, np.cos(t), np.sin(t)] - prob(t)) < 1e-10


def test_parameter_validation():
    with pytest.raises(ValueError):
        BasisParams(theta1=np.inf)
    with pytest.raises(ValueError):
        ProjectorPhases(ps1=np.nan)
    with pytest.raises(ValueError):
        ProjectorPhases.from_vector(np.zeros(5))


def test_random_basis_ranges(rng):
    for _ in range(100):
        p = BasisParams.random(rng)
        assert all(0 <= t <= np.pi / 2 for t in (p.theta1, p.theta2, p.theta3))
        assert all(0 <= f < 2 * np.pi for f in (p.phi1, p.phi2, p.phi3, p.phi4))


@given(arrays(float, (4, 6), elements=st.floats(-10, 10, allow_nan=False)))
def test_monitored_rows_closed_form(qs):
    assert np.max(np.abs(monitored_rows(qs) - projection_unitary_batch(qs)[:, MONITORED_PORT])) < 1e-14
