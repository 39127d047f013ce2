import numpy as np
import pytest
from hypothesis import given, strategies as st

from photoqgan.linalg import (
    NotUnitaryError,
    as_matrix,
    as_vector,
    check_unitary,
    distance_up_to_global_phase,
    haar_random_unitary,
    is_unitary,
    tensor_product,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
phases = st.floats(min_value=-10, max_value=10, allow_nan=False)


def kron_oracle(a, b):
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(m):
                for l in range(m):
                    out[m * i + k, m * j + l] = a[i, j] * b[k, l]
    return out


def test_identity_tensor_identity():
    assert np.array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))


def test_diagonal_tensor_product():
    a, b = 0.7, -1.3
    got = tensor_product(np.diag([np.exp(1j * a), 1]), np.diag([np.exp(1j * b), 1]))
    want = np.diag([np.exp(1j * (a + b)), np.exp(1j * a), np.exp(1j * b), 1])
    np.testing.assert_allclose(got, want, atol=1e-15)


def test_tensor_product_matches_index_oracle(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    np.testing.assert_allclose(tensor_product(a, b), kron_oracle(a, b), atol=1e-14)


@given(seeds)
def test_tensor_product_associative(seed):
    r = np.random.default_rng(seed)
    a, b, c = (r.normal(size=(2, 2)) + 1j * r.normal(size=(2, 2)) for _ in range(3))
    left = tensor_product(tensor_product(a, b), c)
    right = tensor_product(a, tensor_product(b, c))
    assert np.max(np.abs(left - right)) < 1e-12


def test_haar_one_dimensional_is_unit_phase(rng):
    u = haar_random_unitary(1, rng)
    assert u.shape == (1, 1)
    assert abs(abs(u[0, 0]) - 1) < 1e-14


@given(seeds)
def test_haar_output_is_unitary(seed):
    u = haar_random_unitary(4, np.random.default_rng(seed))
    assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12
    check_unitary(u)


def test_haar_first_moment():
    r = np.random.default_rng(5)
    samples = np.array([abs(haar_random_unitary(4, r)[0, 0]) ** 2 for _ in range(10_000)])
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - 0.25) < 3 * se


def test_haar_phase_correction_removes_qr_bias():
    # without the diag(R) phase fix the diagonal of Q is biased towards the real axis
    r = np.random.default_rng(11)
    diag_phases = np.array([np.angle(haar_random_unitary(3, r)[0, 0]) for _ in range(5000)])
    assert abs(np.mean(np.cos(diag_phases))) < 0.05


def test_haar_is_deterministic():
    a = haar_random_unitary(4, np.random.default_rng(3))
    b = haar_random_unitary(4, np.random.default_rng(3))
    assert np.array_equal(a, b)


def test_haar_rejects_zero_dimension(rng):
    with pytest.raises(ValueError):
        haar_random_unitary(0, rng)


def test_distance_of_equal_unitaries_is_zero(rng):
    u = haar_random_unitary(4, rng)
    assert distance_up_to_global_phase(u, u) < 1e-14


def test_distance_ignores_global_phase(rng):
    u = haar_random_unitary(4, rng)
    assert distance_up_to_global_phase(u, np.exp(1j * np.pi / 3) * u) < 1e-12


def test_distance_identity_to_pauli_x():
    # tr(X^dagger I) = 0, so every phase gives ||I - e^{i phi} X||_F = 2
    x = np.array([[0, 1], [1, 0]])
    assert abs(distance_up_to_global_phase(np.eye(2), x) - 2) < 1e-12


@given(seeds, phases)
def test_distance_symmetric_and_zero_only_for_phase(seed, phi):
    r = np.random.default_rng(seed)
    u, v = haar_random_unitary(4, r), haar_random_unitary(4, r)
    assert abs(distance_up_to_global_phase(u, v) - distance_up_to_global_phase(v, u)) < 1e-12
    assert distance_up_to_global_phase(u, v) > 1e-10
    assert distance_up_to_global_phase(u, np.exp(1j * phi) * u) < 1e-10


def test_distance_shape_mismatch():
    with pytest.raises(ValueError):
        distance_up_to_global_phase(np.eye(2), np.eye(3))


def test_check_unitary_rejects_non_unitary():
    with pytest.raises(NotUnitaryError, match="exceeds"):
        check_unitary(np.array([[1, 0], [0, 2]]))
    with pytest.raises(NotUnitaryError, match="square"):
        check_unitary(np.ones((2, 3)))
    assert not is_unitary(np.ones((2, 3)))


def test_check_unitary_returns_fresh_copy():
    src = np.eye(2, dtype=complex)
    out = check_unitary(src)
    out[0, 0] = 5
    assert src[0, 0] == 1


def test_as_vector_and_matrix_validation():
    assert as_vector([1, 2j], dim=2).dtype == complex
    with pytest.raises(ValueError):
        as_vector([1, 2, 3], dim=2)
    np.testing.assert_array_equal(as_matrix([1, 2, 3, 4], rows=2, cols=2), [[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        as_matrix([1, 2, 3], rows=2, cols=2)
    with pytest.raises(ValueError):
        as_matrix([1, 2, 3, 4])
    with pytest.raises(ValueError):
        as_matrix(np.eye(2), rows=3, cols=2)
