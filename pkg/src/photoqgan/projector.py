"""Single-photon projection circuit of the discriminator.

An arbitrary ququart basis state is parametrised by three mixing angles and
four phases::

    psi = (e^{i phi1} sin t1 sin t2,  e^{i phi2} sin t1 cos t2,
           e^{i phi3} cos t1 sin t3,  e^{i phi4} cos t1 cos t3)

The circuit is triangular: phase shifters ``ps1..ps3`` on modes 1-3, then
``MZI(ps4)`` on modes (1,2) and ``MZI(ps5)`` on modes (3,4), then
``MZI(ps6)`` on modes (2,3). With the phases from :func:`projection_phases`
the basis state ``psi`` exits entirely at port 2, so a click there realises
the rank-1 projector ``|psi><psi|``.
"""
from __future__ import annotations

from dataclasses import astuple, dataclass

import numpy as np

N_PROJECTOR_PHASES = 6
MONITORED_PORT = 1  # 0-based index of output port 2


@dataclass(frozen=True)
class BasisParams:
    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0
    phi4: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(astuple(self))):
            raise ValueError("basis parameters must be finite")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "BasisParams":
        """Uniformly random angles; not Haar-uniform on the state sphere."""
        thetas = rng.uniform(0.0, np.pi / 2, 3)
        phis = rng.uniform(0.0, 2 * np.pi, 4)
        return cls(*thetas, *phis)


@dataclass(frozen=True)
class ProjectorPhases:
    ps1: float = 0.0
    ps2: float = 0.0
    ps3: float = 0.0
    ps4: float = 0.0
    ps5: float = 0.0
    ps6: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(astuple(self))):
            raise ValueError("projector phases must be finite")

    def to_vector(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_vector(cls, vec) -> "ProjectorPhases":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.shape[0] != N_PROJECTOR_PHASES:
            raise ValueError(f"expected {N_PROJECTOR_PHASES} phases, got {vec.shape[0]}")
        return cls(*map(float, vec))


def ququart_from_params(p: BasisParams) -> np.ndarray:
    s1, c1 = np.sin(p.theta1), np.cos(p.theta1)
    return np.array(
        [
            np.exp(1j * p.phi1) * s1 * np.sin(p.theta2),
            np.exp(1j * p.phi2) * s1 * np.cos(p.theta2),
            np.exp(1j * p.phi3) * c1 * np.sin(p.theta3),
            np.exp(1j * p.phi4) * c1 * np.cos(p.theta3),
        ]
    )


def projection_phases(p: BasisParams) -> ProjectorPhases:
    """Hardware phases that route ``ququart_from_params(p)`` to port 2."""
    common = p.phi4 - p.theta2 + p.theta3 + np.pi / 2
    return ProjectorPhases(
        ps1=-p.phi1 + common,
        ps2=-p.phi2 + common,
        ps3=-p.phi3 + p.phi4,
        ps4=np.pi + 2 * p.theta2,
        ps5=2 * p.theta3,
        ps6=2 * p.theta1,
    )


def _mzi_batch(theta: np.ndarray) -> np.ndarray:
    half = theta / 2
    pre = 1j * np.exp(1j * half)
    s = pre * np.sin(half)
    c = pre * np.cos(half)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = s
    out[..., 0, 1] = c
    out[..., 1, 0] = c
    out[..., 1, 1] = -s
    return out


def projection_unitary_batch(phases: np.ndarray) -> np.ndarray:
    """Projection-circuit unitaries for stacked 6-vectors, ``(B, 6) -> (B, 4, 4)``."""
    phases = np.asarray(phases, dtype=float)
    batch = phases.shape[0]
    u = np.zeros((batch, 4, 4), dtype=complex)
    u[:, 0, 0] = np.exp(1j * phases[:, 0])
    u[:, 1, 1] = np.exp(1j * phases[:, 1])
    u[:, 2, 2] = np.exp(1j * phases[:, 2])
    u[:, 3, 3] = 1.0
    for col, m in ((3, 0), (4, 2), (5, 1)):
        b = _mzi_batch(phases[:, col])
        top = u[:, m, :].copy()
        bottom = u[:, m + 1, :]
        u[:, m, :] = b[:, 0, 0, None] * top + b[:, 0, 1, None] * bottom
        u[:, m + 1, :] = b[:, 1, 0, None] * top + b[:, 1, 1, None] * bottom
    return u


def monitored_rows(phases: np.ndarray) -> np.ndarray:
    """Row ``MONITORED_PORT`` of each projection unitary, ``(B, 6) -> (B, 4)``.

    Closed form of ``projection_unitary_batch(phases)[:, MONITORED_PORT]``:
    port 2 collects the lower output of MZI(ps4) and the upper output of
    MZI(ps5) through the top arm of MZI(ps6).
    """
    phases = np.asarray(phases, dtype=float)
    half = phases[:, 3:6] / 2
    pre = 1j * np.exp(1j * half)
    sin = pre * np.sin(half)  # MZI entries [0, 0] (and -[1, 1])
    cos = pre * np.cos(half)  # MZI entries [0, 1] and [1, 0]
    upper, lower = sin[:, 2], cos[:, 2]
    row = np.empty((phases.shape[0], 4), dtype=complex)
    row[:, 0] = upper * cos[:, 0] * np.exp(1j * phases[:, 0])
    row[:, 1] = -upper * sin[:, 0] * np.exp(1j * phases[:, 1])
    row[:, 2] = lower * sin[:, 1] * np.exp(1j * phases[:, 2])
    row[:, 3] = lower * cos[:, 1]
    return row


def projection_unitary(q) -> np.ndarray:
    vec = q.to_vector() if isinstance(q, ProjectorPhases) else np.asarray(q, dtype=float)
    return projection_unitary_batch(vec.reshape(1, N_PROJECTOR_PHASES))[0]


def projected_vector(q) -> np.ndarray:
    """The state whose projector the circuit measures: ``U^dagger |2>``."""
    return projection_unitary(q)[MONITORED_PORT].conj()


def expectation_of_projector(state4, p: BasisParams) -> float:
    """Click probability at port 2 for a single-photon ``state4``."""
    state4 = np.asarray(state4, dtype=complex)
    u = projection_unitary(projection_phases(p))
    return float(abs(u[MONITORED_PORT] @ state4) ** 2)

