"""Hardware imperfections: phase noise, shot noise and broken phase shifters."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import N_PHASES

ARMS = ("signal", "idler")


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian phase noise of width ``sigma`` plus Poisson shot noise.

    ``total_count=None`` means probabilities are read out exactly. When
    ``shot_noise_on_target`` is set the true-state expectation is sampled
    too; by default it is evaluated exactly.
    """

    sigma: float = 0.0
    total_count: float | None = None
    shot_noise_on_target: bool = False

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError(f"sigma must be a finite non-negative number, got {self.sigma}")
        if self.total_count is not None and not self.total_count > 0:
            raise ValueError(f"total_count must be positive, got {self.total_count}")

    @property
    def is_exact(self) -> bool:
        return self.sigma == 0 and self.total_count is None


@dataclass(frozen=True)
class DefectMask:
    """Broken phase shifters of the generator, keyed by ``(arm, index)``.

    Indices follow the flat mesh layout ``[internal(6), external(6), output(3)]``.
    """

    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.entries).items():
            arm, index = key
            if arm not in ARMS:
                raise ValueError(f"unknown arm {arm!r}")
            if not 0 <= int(index) < N_PHASES:
                raise ValueError(f"phase index {index} out of range 0..{N_PHASES - 1}")
            if not np.isfinite(value):
                raise ValueError("defect values must be finite")
            clean[(arm, int(index))] = float(value)
        object.__setattr__(self, "entries", clean)

    def __len__(self) -> int:
        return len(self.entries)

    def count(self, arm: str) -> int:
        return sum(1 for a, _ in self.entries if a == arm)

    def flat_indices(self) -> np.ndarray:
        """Positions in the 30-phase generator vector, signal arm first."""
        return np.array(
            [ARMS.index(a) * N_PHASES + i for a, i in sorted(self.entries)], dtype=int
        )

    def flat_values(self) -> np.ndarray:
        return np.array([self.entries[k] for k in sorted(self.entries)], dtype=float)

    @classmethod
    def random(cls, per_arm: int, rng: np.random.Generator, values=None) -> "DefectMask":
        """``per_arm`` broken shifters in each arm, frozen at uniform random phases."""
        if not 0 <= per_arm <= N_PHASES:
            raise ValueError(f"per_arm must be within 0..{N_PHASES}")
        entries = {}
        for arm in ARMS:
            for index in sorted(rng.choice(N_PHASES, size=per_arm, replace=False)):
                entries[(arm, int(index))] = rng.uniform(0.0, 2 * np.pi) if values is None else values
        return cls(entries)

    def to_records(self) -> list[dict]:
        return [{"arm": a, "index": i, "value": v} for (a, i), v in sorted(self.entries.items())]

    @classmethod
    def from_records(cls, records) -> "DefectMask":
        return cls({(r["arm"], int(r["index"])): float(r["value"]) for r in records})


def perturb_phases(phases, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Independent Gaussian kicks of width ``sigma`` on every phase."""
    phases = np.asarray(phases, dtype=float)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return phases.copy()
    return phases + rng.normal(0.0, sigma, size=phases.shape)


def apply_defects(g, mask: DefectMask):
    """Overwrite the masked generator phases with their frozen values.

    Accepts either :class:`~photoqgan.state.GeneratorParams` or a flat
    30-vector (or a stack of them) and returns the same kind.
    """
    from .state import GeneratorParams

    if isinstance(g, GeneratorParams):
        return GeneratorParams.from_vector(apply_defects(g.to_vector(), mask))
    out = np.array(g, dtype=float)
    if len(mask):
        out[..., mask.flat_indices()] = mask.flat_values()
    return out


def sample_counts(dist, total_count: float, rng: np.random.Generator) -> np.ndarray:
    """Poisson counts with means ``total_count * dist`` (last axis is the outcome)."""
    dist = np.asarray(dist, dtype=float)
    if np.any(np.abs(dist.sum(axis=-1) - 1.0) > 1e-9):
        raise ValueError("distribution must sum to 1")
    return rng.poisson(total_count * np.clip(dist, 0.0, None))


def estimate_probability(counts, outcome: int):
    """Relative frequency of ``outcome``; 0 where no counts were recorded.

    Works on one count vector or a stack of them along the first axis.
    """
    counts = np.asarray(counts)
    total = counts.sum(axis=-1)
    hits = counts[..., outcome]
    est = np.where(total > 0, hits / np.maximum(total, 1), 0.0)
    return float(est) if est.ndim == 0 else est


def tvd(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def shot_noise_tvd(counts_levels, repetitions: int, rng: np.random.Generator, dim: int = 16):
    """Mean TVD between a uniform distribution and its Poisson-sampled estimate.

    Returns one ``(mean, std)`` pair per count level.
    """
    uniform = np.full(dim, 1.0 / dim)
    results = []
    for total in counts_levels:
        counts = sample_counts(np.broadcast_to(uniform, (repetitions, dim)), total, rng)
        sums = counts.sum(axis=1, keepdims=True)
        est = np.where(sums > 0, counts / np.maximum(sums, 1), 0.0)
        dists = 0.5 * np.abs(est - uniform).sum(axis=1)
        results.append((float(dists.mean()), float(dists.std())))
    return results
