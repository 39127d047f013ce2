"""Input coercion shared by the estimator and the CLI."""
from __future__ import annotations

import numbers

import numpy as np

from .state import DIM, NORM_ATOL, TwoQuquartState


def check_state(x, name: str = "state", normalize: bool = False) -> TwoQuquartState:
    """Coerce ``x`` to a :class:`TwoQuquartState`.

    Accepts a state object, 16 amplitudes, or a 4x4 ``[signal, idler]``
    amplitude array. ``normalize=True`` rescales instead of rejecting an
    unnormalised vector.
    """
    if isinstance(x, TwoQuquartState):
        return x
    amps = np.asarray(x, dtype=complex)
    if amps.size != DIM:
        raise ValueError(f"{name} must have {DIM} amplitudes, got shape {amps.shape}")
    amps = amps.reshape(-1)
    if not np.all(np.isfinite(amps)):
        raise ValueError(f"{name} contains non-finite amplitudes")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError(f"{name} is the zero vector")
    if normalize:
        amps = amps / norm
    elif abs(norm - 1) > NORM_ATOL:
        raise ValueError(f"{name} is not normalised (norm = {norm!r}); pass normalize=True")
    return TwoQuquartState(amps)


def check_phase_matrix(x, n_cols: int, name: str = "X") -> np.ndarray:
    """2-d float array of phase rows with exactly ``n_cols`` columns."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n_cols:
        raise ValueError(f"{name} must have shape (n, {n_cols}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite phases")
    return arr


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int, a SeedSequence or a Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise ValueError(f"cannot build a random generator from {seed!r}")
