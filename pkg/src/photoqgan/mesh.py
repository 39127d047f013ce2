"""Four-mode universal interferometer used by each generator arm.

Components follow the on-chip conventions::

    BS     = 1/sqrt(2) [[1, i], [i, 1]]
    PS(t)  = diag(e^{it}, 1)
    MZI(t) = BS . PS(t) . BS

The mesh is a rectangular (Clements) arrangement of six basic modules
``T_k = MZI(theta_k) . PS(phi_k)`` followed by output phases on modes 1-3.
Mode 4 carries no output phase, which removes the global phase as a
parameter. Column order, with 0-based mode pairs::

    (0,1) (2,3) | (1,2) | (0,1) (2,3) | (1,2) | diag(e^{id0}, e^{id1}, e^{id2}, 1)

A flat phase vector is laid out as ``[internal(6), external(6), output(3)]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import check_unitary

N_MODES = 4
N_MZI = 6
N_PHASES = 15
TWO_PI = 2 * np.pi

# upper mode of each MZI, in the order light meets them
MZI_MODES: tuple[int, ...] = (0, 2, 1, 0, 2, 1)

_BS = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2.0)


@dataclass(frozen=True)
class MeshPhases:
    """The 15 programmable phases of one mesh arm (radians)."""

    internal: np.ndarray = field(default_factory=lambda: np.zeros(N_MZI))
    external: np.ndarray = field(default_factory=lambda: np.zeros(N_MZI))
    output: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name, size in (("internal", N_MZI), ("external", N_MZI), ("output", 3)):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            if arr.shape[0] != size:
                raise ValueError(f"{name} needs {size} phases, got {arr.shape[0]}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} phases must be finite")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.internal, self.external, self.output])

    @classmethod
    def from_vector(cls, vec) -> "MeshPhases":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.shape[0] != N_PHASES:
            raise ValueError(f"expected {N_PHASES} phases, got {vec.shape[0]}")
        return cls(vec[:6], vec[6:12], vec[12:])

    def normalized(self) -> "MeshPhases":
        return MeshPhases.from_vector(np.mod(self.to_vector(), TWO_PI))


def beam_splitter() -> np.ndarray:
    return _BS.copy()


def phase_shifter(theta: float) -> np.ndarray:
    return np.diag([np.exp(1j * theta), 1.0 + 0j])


def mzi(theta: float) -> np.ndarray:
    """Closed form of ``BS . PS(theta) . BS``."""
    s, c = np.sin(theta / 2), np.cos(theta / 2)
    return 1j * np.exp(1j * theta / 2) * np.array([[s, c], [c, -s]], dtype=complex)


def embed_two_mode(u, modes: tuple[int, int], n: int = N_MODES) -> np.ndarray:
    """Place a 2x2 block on adjacent ``modes`` (1-based) of an n-mode identity."""
    i, j = modes
    if not (1 <= i < j <= n) or j != i + 1:
        raise ValueError(f"modes must be adjacent and within 1..{n}, got {modes}")
    out = np.eye(n, dtype=complex)
    out[i - 1:j, i - 1:j] = np.asarray(u, dtype=complex)
    return out


def _module_blocks(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Batched ``MZI(theta) . PS(phi)``; returns shape ``theta.shape + (2, 2)``."""
    half = theta / 2
    pre = 1j * np.exp(1j * half)
    s = pre * np.sin(half)
    c = pre * np.cos(half)
    e = np.exp(1j * phi)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = s * e
    out[..., 0, 1] = c
    out[..., 1, 0] = c * e
    out[..., 1, 1] = -s
    return out


def mesh_unitary_batch(phases: np.ndarray) -> np.ndarray:
    """Mesh unitaries for a stack of flat phase vectors, shape ``(B, 15) -> (B, 4, 4)``."""
    phases = np.asarray(phases, dtype=float)
    batch = phases.shape[0]
    u = np.broadcast_to(np.eye(N_MODES, dtype=complex), (batch, N_MODES, N_MODES)).copy()
    blocks = _module_blocks(phases[:, 0:6], phases[:, 6:12])
    for k, m in enumerate(MZI_MODES):
        b = blocks[:, k]
        top = u[:, m, :].copy()
        bottom = u[:, m + 1, :]
        u[:, m, :] = b[:, 0, 0, None] * top + b[:, 0, 1, None] * bottom
        u[:, m + 1, :] = b[:, 1, 0, None] * top + b[:, 1, 1, None] * bottom
    u[:, :3, :] *= np.exp(1j * phases[:, 12:15])[:, :, None]
    return u


def mesh_transpose_apply(phases: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``U(phases)^T x`` row by row without forming ``U``; shapes ``(B, 15), (B, 4) -> (B, 4)``.

    Propagates the row vector ``x^T`` backwards through the output phases and
    the modules, which is a quarter of the work of building the matrices.
    """
    phases = np.asarray(phases, dtype=float)
    y = np.array(np.broadcast_to(x, (phases.shape[0], N_MODES)), dtype=complex)
    y[:, :3] *= np.exp(1j * phases[:, 12:15])
    blocks = _module_blocks(phases[:, 0:6], phases[:, 6:12])
    for k in range(N_MZI - 1, -1, -1):
        m = MZI_MODES[k]
        b = blocks[:, k]
        top = y[:, m].copy()
        bottom = y[:, m + 1]
        y[:, m] = top * b[:, 0, 0] + bottom * b[:, 1, 0]
        y[:, m + 1] = top * b[:, 0, 1] + bottom * b[:, 1, 1]
    return y


def mesh_unitary(phases) -> np.ndarray:
    """4x4 unitary programmed by ``phases`` (a :class:`MeshPhases` or flat 15-vector)."""
    vec = phases.to_vector() if isinstance(phases, MeshPhases) else np.asarray(phases, dtype=float)
    if vec.shape != (N_PHASES,):
        raise ValueError(f"expected {N_PHASES} phases, got shape {vec.shape}")
    return mesh_unitary_batch(vec[None, :])[0]


def identity_phases() -> MeshPhases:
    # MZI(pi) . PS(pi) is exactly the 2x2 identity
    return MeshPhases(np.full(N_MZI, np.pi), np.full(N_MZI, np.pi), np.zeros(3))


def _null_right(x: complex, y: complex) -> tuple[float, float]:
    """(theta, phi) with ``[x, y] . T^-1`` vanishing in its first slot."""
    theta = 2 * np.arctan2(abs(y), abs(x))
    phi = 0.0 if abs(x) == 0 or abs(y) == 0 else np.angle(x) - np.angle(y) + np.pi
    return theta, phi


def _null_left(x: complex, y: complex) -> tuple[float, float]:
    """(theta, phi) with ``T . [x, y]^T`` vanishing in its second slot."""
    theta = 2 * np.arctan2(abs(x), abs(y))
    phi = 0.0 if abs(x) == 0 or abs(y) == 0 else np.angle(y) - np.angle(x)
    return theta, phi


def _split_diag_module(v: np.ndarray) -> tuple[complex, complex, float, float]:
    """Write a 2x2 unitary as ``diag(a, b) . MZI(theta) . PS(phi)``."""
    theta = 2 * np.arctan2(abs(v[0, 0]), abs(v[0, 1]))
    s, c = np.sin(theta / 2), np.cos(theta / 2)
    if abs(v[0, 0]) > 1e-14 and abs(v[0, 1]) > 1e-14:
        phi = np.angle(v[0, 0]) - np.angle(v[0, 1])
    else:
        phi = 0.0
    pre = 1j * np.exp(1j * theta / 2)
    e = np.exp(1j * phi)
    a = v[0, 1] / (pre * c) if c >= s else v[0, 0] / (pre * s * e)
    b = v[1, 0] / (pre * c * e) if c >= s else -v[1, 1] / (pre * s)
    return a, b, theta, phi


def _module(theta: float, phi: float, m: int) -> np.ndarray:
    return embed_two_mode(mzi(theta) @ phase_shifter(phi), (m + 1, m + 2))


def clements_decompose(u) -> MeshPhases:
    """Analytic phases reproducing ``u`` on the mesh, up to a global phase.

    Elements below the anti-diagonal are nulled alternately by modules
    acting on columns from the right and on rows from the left. The left
    modules are then pushed through the residual diagonal so every module
    ends up in light-propagation order with a single diagonal at the output.
    """
    u = check_unitary(u)
    if u.shape != (N_MODES, N_MODES):
        raise ValueError(f"expected a 4x4 unitary, got {u.shape}")
    w = u.copy()
    right: list[tuple[float, float, int]] = []
    left: list[tuple[float, float, int]] = []
    n = N_MODES
    for i in range(n - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                row, col = n - 1 - j, i - j
                theta, phi = _null_right(w[row, col], w[row, col + 1])
                w = w @ _module(theta, phi, col).conj().T
                right.append((theta, phi, col))
        else:
            for j in range(1, i + 2):
                row, col = n + j - i - 2, j - 1
                theta, phi = _null_left(w[row - 1, col], w[row, col])
                w = _module(theta, phi, row - 1) @ w
                left.append((theta, phi, row - 1))

    # u = L1^-1 ... Lk^-1 . D . R_last ... R_1; move each L^-1 right-to-left through D
    diag = np.diag(w).copy()
    moved: list[tuple[float, float, int]] = []
    for theta, phi, m in reversed(left):
        block = (mzi(theta) @ phase_shifter(phi)).conj().T @ np.diag(diag[m:m + 2])
        a, b, t2, p2 = _split_diag_module(block)
        diag[m], diag[m + 1] = a, b
        moved.append((t2, p2, m))

    # light order: right modules as applied, then the moved left modules
    ordered = right + moved
    modes = tuple(m for _, _, m in ordered)
    # modules in the same column act on disjoint modes and commute
    if sorted(modes[:2]) != [0, 2] or modes[2] != 1 or sorted(modes[3:5]) != [0, 2] or modes[5] != 1:
        raise RuntimeError(f"unexpected module order {modes}")
    slots = {}
    for pos, (theta, phi, m) in enumerate(ordered):
        column = (0, 0, 1, 2, 2, 3)[pos]
        slots[(column, m)] = (theta, phi)
    layout = [(0, 0), (0, 2), (1, 1), (2, 0), (2, 2), (3, 1)]
    internal = np.array([slots[k][0] for k in layout])
    external = np.array([slots[k][1] for k in layout])
    output = np.angle(diag[:3] / diag[3])
    return MeshPhases(internal, external, output).normalized()
