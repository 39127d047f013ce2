import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from photoqgan.linalg import NotUnitaryError, distance_up_to_global_phase, haar_random_unitary
from photoqgan.mesh import (
    N_PHASES,
    MeshPhases,
    beam_splitter,
    clements_decompose,
    embed_two_mode,
    identity_phases,
    mesh_transpose_apply,
    mesh_unitary,
    mesh_unitary_batch,
    mzi,
    phase_shifter,
)

phase_vectors = arrays(float, N_PHASES, elements=st.floats(-20, 20, allow_nan=False))


def layout_oracle(vec):
    """Mesh unitary assembled from full 4x4 factors, one component at a time."""
    p = MeshPhases.from_vector(vec)
    pairs = [(1, 2), (3, 4), (2, 3), (1, 2), (3, 4), (2, 3)]
    u = np.eye(4, dtype=complex)
    for k, modes in enumerate(pairs):
        u = embed_two_mode(phase_shifter(p.external[k]), modes) @ u
        u = embed_two_mode(mzi(p.internal[k]), modes) @ u
    return np.diag(np.append(np.exp(1j * p.output), 1)) @ u


def test_beam_splitter_value():
    np.testing.assert_allclose(beam_splitter(), np.array([[1, 1j], [1j, 1]]) / np.sqrt(2), atol=1e-16)


def test_beam_splitter_unitary_and_square():
    bs = beam_splitter()
    assert np.max(np.abs(bs @ bs.conj().T - np.eye(2))) < 1e-15
    np.testing.assert_allclose(bs @ bs, [[0, 1j], [1j, 0]], atol=1e-15)


@pytest.mark.parametrize("theta, want", [(0, np.eye(2)), (np.pi, np.diag([-1, 1])), (np.pi / 2, np.diag([1j, 1]))])
def test_phase_shifter_values(theta, want):
    np.testing.assert_allclose(phase_shifter(theta), want, atol=1e-15)


def test_mzi_special_values():
    np.testing.assert_allclose(mzi(0.0), [[0, 1j], [1j, 0]], atol=1e-15)
    np.testing.assert_allclose(mzi(np.pi), [[-1, 0], [0, 1]], atol=1e-15)


@given(st.floats(-20, 20, allow_nan=False))
def test_mzi_closed_form_matches_composition(theta):
    want = beam_splitter() @ phase_shifter(theta) @ beam_splitter()
    assert np.max(np.abs(mzi(theta) - want)) < 1e-14


def test_embed_two_mode_blocks():
    np.testing.assert_array_equal(embed_two_mode(np.eye(2), (1, 2)), np.eye(4))
    swap = embed_two_mode([[0, 1], [1, 0]], (2, 3))
    np.testing.assert_array_equal(swap, np.eye(4)[[0, 2, 1, 3]])
    m = embed_two_mode(mzi(0.4), (3, 4))
    np.testing.assert_array_equal(m[:2, :2], np.eye(2))
    np.testing.assert_allclose(m[2:, 2:], mzi(0.4))


@pytest.mark.parametrize("modes", [(1, 3), (0, 1), (4, 5), (2, 1)])
def test_embed_rejects_bad_modes(modes):
    with pytest.raises(ValueError):
        embed_two_mode(np.eye(2), modes)


def test_identity_phases_give_identity():
    u = mesh_unitary(identity_phases())
    assert distance_up_to_global_phase(u, np.eye(4)) < 1e-10
    assert np.array_equal(identity_phases().to_vector(), identity_phases().to_vector())


def test_all_internal_pi_zero_externals_is_diagonal():
    vec = np.zeros(N_PHASES)
    vec[:6] = np.pi
    u = mesh_unitary(vec)
    assert np.max(np.abs(u - np.diag(np.diag(u)))) < 1e-15
    np.testing.assert_allclose(np.abs(np.diag(u)), 1, atol=1e-15)


@given(phase_vectors)
def test_mesh_matches_component_oracle_and_is_unitary(vec):
    u = mesh_unitary(vec)
    assert np.max(np.abs(u - layout_oracle(vec))) < 1e-12
    assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


def test_mesh_batch_matches_single(rng):
    vecs = rng.uniform(0, 2 * np.pi, (7, N_PHASES))
    batch = mesh_unitary_batch(vecs)
    for v, u in zip(vecs, batch):
        np.testing.assert_allclose(u, mesh_unitary(v), atol=1e-14)


def test_mesh_unitary_rejects_wrong_length():
    with pytest.raises(ValueError):
        mesh_unitary(np.zeros(14))


def test_decompose_identity_round_trips():
    phases = clements_decompose(np.eye(4))
    assert distance_up_to_global_phase(mesh_unitary(phases), np.eye(4)) < 1e-10
    assert distance_up_to_global_phase(mesh_unitary(phases), mesh_unitary(identity_phases())) < 1e-10


def test_decompose_single_phase_diagonal():
    u = np.diag([np.exp(0.83j), 1, 1, 1])
    assert distance_up_to_global_phase(mesh_unitary(clements_decompose(u)), u) < 1e-10


@pytest.mark.parametrize("perm", [[1, 2, 3, 0], [3, 2, 1, 0], [0, 2, 1, 3], [1, 0, 3, 2]])
def test_decompose_permutations(perm):
    u = np.eye(4)[perm]
    assert distance_up_to_global_phase(mesh_unitary(clements_decompose(u)), u) < 1e-10


def test_decompose_hundred_haar_unitaries():
    r = np.random.default_rng(100)
    for _ in range(100):
        u = haar_random_unitary(4, r)
        assert distance_up_to_global_phase(mesh_unitary(clements_decompose(u)), u) < 1e-10


@given(st.integers(0, 2**32 - 1))
def test_decompose_output_normalised(seed):
    u = haar_random_unitary(4, np.random.default_rng(seed))
    vec = clements_decompose(u).to_vector()
    assert np.all((vec >= 0) & (vec < 2 * np.pi))


def test_decompose_rejects_non_unitary():
    with pytest.raises(NotUnitaryError):
        clements_decompose(np.ones((4, 4)))
    with pytest.raises(ValueError):
        clements_decompose(np.eye(3))


@given(phase_vectors, st.integers(0, N_PHASES - 1), st.integers(0, 15))
def test_every_entry_is_first_order_trig_in_each_phase(vec, k, entry):
    def value(theta):
        v = vec.copy()
        v[k] = theta
        return mesh_unitary(v).reshape(-1)[entry]

    # fit a + b cos + c sin from three probes, then predict a fourth point
    probes = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    design = np.stack([np.ones(3), np.cos(probes), np.sin(probes)], axis=1)
    coef = np.linalg.solve(design, np.array([value(t) for t in probes]))
    t = 1.234
    assert abs(coef @ [1, np.cos(t), np.sin(t)] - value(t)) < 1e-10


def test_mesh_phases_validation_and_round_trip(rng):
    vec = rng.normal(size=N_PHASES)
    np.testing.assert_array_equal(MeshPhases.from_vector(vec).to_vector(), vec)
    with pytest.raises(ValueError):
        MeshPhases(np.zeros(5), np.zeros(6), np.zeros(3))
    with pytest.raises(ValueError):
        MeshPhases(np.full(6, np.nan), np.zeros(6), np.zeros(3))
    with pytest.raises(ValueError):
        MeshPhases.from_vector(np.zeros(16))
    wrapped = MeshPhases.from_vector(vec + 4 * np.pi).normalized()
    assert distance_up_to_global_phase(mesh_unitary(wrapped), mesh_unitary(vec)) < 1e-12


@given(arrays(float, (3, N_PHASES), elements=st.floats(-20, 20, allow_nan=False)))
def test_transpose_apply_matches_matrix_product(vecs):
    x = np.array([[1, 2j, -1, 0.5]] * 3) / 2.5
    got = mesh_transpose_apply(vecs, x)
    want = np.einsum("bkj,bk->bj", mesh_unitary_batch(vecs), x)
    assert np.max(np.abs(got - want)) < 1e-13
