"""Two-ququart states produced by the generator and read by the discriminator.

Amplitudes are stored signal-major: index ``4*k + l`` holds signal mode
``k`` and idler mode ``l`` (both 0-based). A maximally entangled state
``(U_s (x) U_i)|psi0>`` reshaped to 4x4 is just ``U_s U_i^T / 2``, which is
what the batched helpers below exploit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import haar_random_unitary, tensor_product
from .mesh import (
    N_PHASES,
    MeshPhases,
    identity_phases,
    mesh_transpose_apply,
    mesh_unitary,
    mesh_unitary_batch,
)
from .projector import (
    MONITORED_PORT,
    N_PROJECTOR_PHASES,
    BasisParams,
    ProjectorPhases,
    monitored_rows,
    projection_phases,
    projection_unitary,
    projection_unitary_batch,
)

DIM = 16
NORM_ATOL = 1e-12
COINCIDENCE_INDEX = 4 * MONITORED_PORT + MONITORED_PORT  # outcome (2, 2)


def outcome_index(k: int, l: int) -> int:
    """Flat index of 1-based outcome ``(k, l)``."""
    return 4 * (k - 1) + (l - 1)


@dataclass(frozen=True)
class TwoQuquartState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != DIM:
            raise ValueError(f"state needs {DIM} amplitudes, got {amps.shape[0]}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalised (norm = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes as a 4x4 array ``[signal, idler]``."""
        return self.amplitudes.reshape(4, 4)

    def reduced_signal(self) -> np.ndarray:
        m = self.as_matrix()
        return m @ m.conj().T

    def reduced_idler(self) -> np.ndarray:
        m = self.as_matrix()
        return (m.T @ m.conj()).astype(complex)


@dataclass(frozen=True)
class GeneratorParams:
    signal: MeshPhases
    idler: MeshPhases

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.signal.to_vector(), self.idler.to_vector()])

    @classmethod
    def from_vector(cls, vec) -> "GeneratorParams":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.shape[0] != 2 * N_PHASES:
            raise ValueError(f"expected {2 * N_PHASES} phases, got {vec.shape[0]}")
        return cls(MeshPhases.from_vector(vec[:N_PHASES]), MeshPhases.from_vector(vec[N_PHASES:]))

    @classmethod
    def identity(cls) -> "GeneratorParams":
        return cls(identity_phases(), identity_phases())


@dataclass(frozen=True)
class DiscriminatorParams:
    signal: ProjectorPhases
    idler: ProjectorPhases

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.signal.to_vector(), self.idler.to_vector()])

    @classmethod
    def from_vector(cls, vec) -> "DiscriminatorParams":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.shape[0] != 2 * N_PROJECTOR_PHASES:
            raise ValueError(f"expected {2 * N_PROJECTOR_PHASES} phases, got {vec.shape[0]}")
        n = N_PROJECTOR_PHASES
        return cls(ProjectorPhases.from_vector(vec[:n]), ProjectorPhases.from_vector(vec[n:]))

    @classmethod
    def from_basis(cls, signal: BasisParams, idler: BasisParams) -> "DiscriminatorParams":
        return cls(projection_phases(signal), projection_phases(idler))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "DiscriminatorParams":
        return cls.from_basis(BasisParams.random(rng), BasisParams.random(rng))


def bell_state() -> TwoQuquartState:
    return TwoQuquartState(np.eye(4).reshape(-1) / 2)


def entangled_state(u_signal, u_idler) -> TwoQuquartState:
    """``(u_signal (x) u_idler)`` applied to :func:`bell_state`."""
    return TwoQuquartState(tensor_product(u_signal, u_idler) @ bell_state().amplitudes)


def generate_state(g: GeneratorParams) -> TwoQuquartState:
    return entangled_state(mesh_unitary(g.signal), mesh_unitary(g.idler))


def random_true_state(rng: np.random.Generator) -> TwoQuquartState:
    u_s = haar_random_unitary(4, rng)
    u_i = haar_random_unitary(4, rng)
    return entangled_state(u_s, u_i)


def outcome_distribution(s: TwoQuquartState, d: DiscriminatorParams) -> np.ndarray:
    """Joint click probabilities over the 16 (signal, idler) output ports."""
    p_s = projection_unitary(d.signal)
    p_i = projection_unitary(d.idler)
    out = p_s @ s.as_matrix() @ p_i.T
    return (np.abs(out) ** 2).reshape(-1)


def expectation(s: TwoQuquartState, d: DiscriminatorParams) -> float:
    """``<s| P_s (x) P_i |s>``, read off as the (2, 2) coincidence probability."""
    return float(outcome_distribution(s, d)[COINCIDENCE_INDEX])


def fidelity(a: TwoQuquartState, b: TwoQuquartState) -> float:
    """Pure-state fidelity ``|<a|b>|``, clipped into [0, 1]."""
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))


# -- batched kernels used by the trainer -------------------------------------


def generator_matrices(gen_vectors: np.ndarray) -> np.ndarray:
    """State matrices ``U_s U_i^T / 2`` for stacked 30-vectors, ``(B, 30) -> (B, 4, 4)``."""
    gen_vectors = np.asarray(gen_vectors, dtype=float)
    u_s = mesh_unitary_batch(gen_vectors[:, :N_PHASES])
    u_i = mesh_unitary_batch(gen_vectors[:, N_PHASES:])
    return np.einsum("bkj,blj->bkl", u_s, u_i) / 2


def distribution_batch(state_matrices: np.ndarray, disc_vectors: np.ndarray) -> np.ndarray:
    """Outcome distributions ``(B, 16)`` for stacked states and 12-vectors.

    ``state_matrices`` may hold a single 4x4 state that is broadcast over the
    discriminator batch.
    """
    disc_vectors = np.asarray(disc_vectors, dtype=float)
    p_s = projection_unitary_batch(disc_vectors[:, :N_PROJECTOR_PHASES])
    p_i = projection_unitary_batch(disc_vectors[:, N_PROJECTOR_PHASES:])
    out = p_s @ state_matrices @ np.swapaxes(p_i, 1, 2)
    return (np.abs(out) ** 2).reshape(out.shape[0], DIM)


def coincidence_batch(gen_vectors: np.ndarray, disc_vectors: np.ndarray) -> np.ndarray:
    """(2, 2) coincidence probabilities for paired generator/discriminator rows.

    With ``v_s, v_i`` the monitored rows of the two projection circuits, the
    amplitude is ``v_s^T U_s U_i^T v_i / 2 = (U_s^T v_s) . (U_i^T v_i) / 2``,
    so only two vectors per row are pushed through the meshes.
    """
    gen_vectors = np.asarray(gen_vectors, dtype=float)
    disc_vectors = np.asarray(disc_vectors, dtype=float)
    n = N_PROJECTOR_PHASES
    a_s = mesh_transpose_apply(gen_vectors[:, :N_PHASES], monitored_rows(disc_vectors[:, :n]))
    a_i = mesh_transpose_apply(gen_vectors[:, N_PHASES:], monitored_rows(disc_vectors[:, n:]))
    return np.abs(np.sum(a_s * a_i, axis=1) / 2) ** 2


def coincidence_on_state(state_matrix: np.ndarray, disc_vectors: np.ndarray) -> np.ndarray:
    """(2, 2) coincidence probabilities of one 4x4 state matrix for stacked 12-vectors."""
    disc_vectors = np.asarray(disc_vectors, dtype=float)
    n = N_PROJECTOR_PHASES
    v_s = monitored_rows(disc_vectors[:, :n])
    v_i = monitored_rows(disc_vectors[:, n:])
    return np.abs(np.einsum("bk,kl,bl->b", v_s, state_matrix, v_i)) ** 2
